#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <map>

#include "hsfuse/acquisition/phantom.hpp"
#include "hsfuse/acquisition/sampling.hpp"
#include "support/test_util.hpp"

using namespace hsfuse;

namespace {

// Independent oracle for the line-scan time model: integer row count from
// exact rational arithmetic, then seconds -> minutes.
double oracle_minutes(double region_um, double dy_um, double s_per_row) {
    double rows = std::ceil(region_um / dy_um);
    return rows * s_per_row / 60.0;
}

} // namespace

TEST_CASE("acquisition time matches the published protocol table") {
    // 1500x1500 um region at 0.5 um pixels, 1.8 s per scan row.
    const TimeModel tm{1.8, 0.0};
    const struct {
        double dy;
        double minutes;  // true model value
        double fraction; // exact dx/dy
    } rows[] = {
        {0.5, 90.0, 1.0},    {1.0, 45.0, 0.5},  {2.0, 22.5, 0.25}, {3.0, 15.0, 1.0 / 6.0},
        {5.0, 9.0, 0.1},     {10.0, 4.5, 0.05}, {20.0, 2.25, 0.025},
    };
    for (const auto& row : rows) {
        SamplingSpec spec{0.5, row.dy, 1500.0, 1500.0};
        double minutes = acquisition_time_minutes(spec, tm);
        REQUIRE(minutes == Catch::Approx(row.minutes).margin(1e-9));
        REQUIRE(minutes == Catch::Approx(oracle_minutes(1500.0, row.dy, 1.8)).margin(1e-12));
        REQUIRE(data_fraction(spec) == row.fraction);
    }
}

TEST_CASE("time model details") {
    SECTION("partial strides still cost a full row") {
        // 1501 um at dy=2 -> ceil(750.5) = 751 rows.
        SamplingSpec spec{0.5, 2.0, 1500.0, 1501.0};
        REQUIRE(acquisition_time_minutes(spec, {1.8, 0.0}) ==
                Catch::Approx(751 * 1.8 / 60.0).margin(1e-12));
    }
    SECTION("fixed overhead adds a constant") {
        SamplingSpec spec{0.5, 0.5, 1500.0, 1500.0};
        double base = acquisition_time_minutes(spec, {1.8, 0.0});
        double with = acquisition_time_minutes(spec, {1.8, 120.0});
        REQUIRE(with - base == Catch::Approx(2.0).margin(1e-12));
    }
    SECTION("invalid specs are rejected") {
        REQUIRE_THROWS_AS(data_fraction(SamplingSpec{0.5, 0.75, 1500.0, 1500.0}),
                          validation_error); // dy not an integer multiple
        REQUIRE_THROWS_AS(data_fraction(SamplingSpec{0.5, 0.25, 1500.0, 1500.0}),
                          validation_error); // dy below dx
        REQUIRE_THROWS_AS(acquisition_time_minutes(SamplingSpec{0.5, 0.5, 0.0, 1500.0}),
                          validation_error);
        REQUIRE_THROWS_AS(acquisition_time_minutes(SamplingSpec{0.5, 0.5, 1500.0, 1500.0},
                                                   TimeModel{0.0, 0.0}),
                          validation_error);
    }
}

TEST_CASE("sparse acquisition keeps every r-th row bit exact") {
    BandImage full = testutil::random_band(12, 17, 31);
    for (int r : {1, 2, 3, 5, 17}) {
        BandImage sparse = simulate_sparse_acquisition(full, r);
        REQUIRE(sparse.height == (17 + r - 1) / r);
        REQUIRE(sparse.width == 12);
        REQUIRE(sparse.dy_um == r * full.dx_um);
        for (int y = 0; y < sparse.height; ++y)
            REQUIRE(std::memcmp(&sparse.at(0, y), &full.at(0, y * r), 12 * sizeof(float)) == 0);
    }
    SECTION("r=1 is the identity") {
        BandImage same = simulate_sparse_acquisition(full, 1);
        REQUIRE(same.pixels == full.pixels);
        REQUIRE(same.dy_um == full.dy_um);
    }
    SECTION("invalid factors are rejected") {
        REQUIRE_THROWS_AS(simulate_sparse_acquisition(full, 0), validation_error);
        REQUIRE_THROWS_AS(simulate_sparse_acquisition(full, 18), validation_error);
        BandImage aniso = full;
        aniso.dy_um = 2 * aniso.dx_um;
        REQUIRE_THROWS_AS(simulate_sparse_acquisition(aniso, 2), validation_error);
    }
}

TEST_CASE("phantom generation is deterministic and labeled consistently") {
    PhantomSpec spec;
    spec.width = 96;
    spec.height = 80;
    Phantom a = generate_phantom(spec, 42);
    Phantom b = generate_phantom(spec, 42);
    REQUIRE(a.labels.labels == b.labels.labels);
    REQUIRE(a.cube.bands.size() == spec.wavenumbers_cm1.size());
    for (size_t i = 0; i < a.cube.bands.size(); ++i)
        REQUIRE(a.cube.bands[i].pixels == b.cube.bands[i].pixels);

    Phantom c = generate_phantom(spec, 43);
    bool differs = a.labels.labels != c.labels.labels;
    for (size_t i = 0; i < a.cube.bands.size() && !differs; ++i)
        differs = a.cube.bands[i].pixels != c.cube.bands[i].pixels;
    REQUIRE(differs);

    SECTION("every class paints at least one pixel") {
        std::map<uint8_t, size_t> counts;
        for (uint8_t l : a.labels.labels) ++counts[l];
        for (size_t cls = 1; cls <= spec.classes.size(); ++cls)
            REQUIRE(counts[static_cast<uint8_t>(cls)] > 0);
    }
}

TEST_CASE("noiseless texture-free phantom equals the class signature table") {
    PhantomSpec spec;
    spec.width = 64;
    spec.height = 64;
    spec.noise_sigma = 0.0;
    spec.texture_amplitude = 0.0;
    Phantom ph = generate_phantom(spec, 7);
    // Oracle: each pixel's spectrum is exactly background + class signature.
    double max_err = 0.0;
    for (size_t bi = 0; bi < spec.wavenumbers_cm1.size(); ++bi) {
        double wn = spec.wavenumbers_cm1[bi];
        for (size_t i = 0; i < ph.labels.labels.size(); ++i) {
            double expected = spec.background_level;
            uint8_t l = ph.labels.labels[i];
            if (l > 0) expected += phantom_signature(spec.classes[l - 1], wn);
            max_err = std::max(max_err, std::abs(ph.cube.bands[bi].pixels[i] - expected));
        }
    }
    REQUIRE(max_err < 1e-6);
}

TEST_CASE("fully occluded classes abort generation") {
    PhantomSpec spec;
    spec.width = 48;
    spec.height = 48;
    // One tiny blob of class 1, then class 2 blobs big enough to cover the
    // whole scene with certainty.
    spec.classes[0].blob_count = 1;
    spec.classes[0].min_radius_frac = 0.02;
    spec.classes[0].max_radius_frac = 0.03;
    spec.classes.resize(2);
    spec.classes[1].blob_count = 40;
    spec.classes[1].min_radius_frac = 0.9;
    spec.classes[1].max_radius_frac = 0.9;
    REQUIRE_THROWS_AS(generate_phantom(spec, 5), std::runtime_error);
}

TEST_CASE("phantom spec validation") {
    PhantomSpec spec;
    spec.classes.clear();
    REQUIRE_THROWS_AS(spec.validate(), validation_error);

    PhantomSpec unsorted;
    unsorted.wavenumbers_cm1 = {1000.0, 900.0};
    REQUIRE_THROWS_AS(unsorted.validate(), validation_error);

    PhantomSpec bad_texture;
    bad_texture.texture_amplitude = 1.5;
    REQUIRE_THROWS_AS(bad_texture.validate(), validation_error);
}

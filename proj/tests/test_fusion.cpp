#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "hsfuse/acquisition/sampling.hpp"
#include "hsfuse/core/image.hpp"
#include "hsfuse/eval/metrics.hpp"
#include "hsfuse/recon/fusion.hpp"
#include "support/test_util.hpp"

using namespace hsfuse;

namespace {

bool pixels_equal(const BandImage& a, const BandImage& b) {
    return a.width == b.width && a.height == b.height &&
           std::memcmp(a.pixels.data(), b.pixels.data(),
                       a.size() * sizeof(float)) == 0;
}

/// Reference implementation of the pyramid splice, built from the public
/// transform only: scales above the cutoff come from the (optionally
/// equalized) reference, the rest from the interpolated band.
BandImage splice_oracle(const BandImage& interp, const BandImage& reference, int r,
                        const FusionConfig& cfg) {
    const int J = curvelet_scale_count(interp.width, interp.height);
    int jc;
    if (cfg.cutoff_scale >= 0) {
        jc = cfg.cutoff_scale;
    } else {
        int k = 0;
        while ((1 << k) < r) ++k; // ceil(log2 r), derived by counting
        jc = std::clamp(J - 1 - k, 0, J - 1);
    }
    BandImage ref_used = cfg.equalize ? equalize_linear(reference, interp).image
                                      : reference;
    CurveletCoeffs mixed = curvelet_forward(interp);
    CurveletCoeffs from_ref = curvelet_forward(ref_used);
    for (int j = jc + 1; j < J; ++j) mixed.scales[j] = from_ref.scales[j];
    return curvelet_inverse(mixed);
}

/// A band with detail too fine for the sparse vertical grid: high-frequency
/// stripes plus a smooth ramp so equalization has contrast to work with.
BandImage detailed_band(int w, int h, double wn) {
    BandImage b = BandImage::make(w, h, 1.0, 1.0, wn);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            b.at(x, y) = static_cast<float>(
                std::sin(2.0 * M_PI * 20.0 * y / h) +
                0.4 * std::cos(2.0 * M_PI * 9.0 * x / w) +
                0.002 * (x + 2 * y));
    return b;
}

} // namespace

TEST_CASE("equalize_linear recovers an exact affine intensity map") {
    BandImage ref = testutil::random_band(48, 40, 3);
    for (float& v : ref.pixels) v = std::round(v * 256.0f) / 256.0f;
    BandImage target = ref;
    for (float& v : target.pixels) v = 2.5f * v - 1.25f; // exact in float

    EqualizeResult res = equalize_linear(ref, target);
    REQUIRE_FALSE(res.degenerate_reference);
    REQUIRE(res.gain == Catch::Approx(2.5).margin(1e-9));
    REQUIRE(res.offset == Catch::Approx(-1.25).margin(1e-9));
    for (size_t i = 0; i < target.size(); ++i)
        REQUIRE(res.image.pixels[i] == Catch::Approx(target.pixels[i]).margin(1e-6));
}

TEST_CASE("equalize_linear flags a contrast-free reference") {
    BandImage ref = BandImage::make(16, 16, 1.0, 1.0, 1660.0);
    for (float& v : ref.pixels) v = 4.0f;
    BandImage target = testutil::random_band(16, 16, 9);
    double mean_t = 0.0;
    for (float v : target.pixels) mean_t += v;
    mean_t /= static_cast<double>(target.size());

    EqualizeResult res = equalize_linear(ref, target);
    REQUIRE(res.degenerate_reference);
    REQUIRE(res.gain == 0.0);
    REQUIRE(res.offset == Catch::Approx(mean_t).margin(1e-9));
    for (float v : res.image.pixels)
        REQUIRE(v == Catch::Approx(mean_t).margin(1e-6));
}

TEST_CASE("equalize_linear rejects mismatched dimensions") {
    REQUIRE_THROWS_AS(
        equalize_linear(testutil::random_band(8, 8, 1), testutil::random_band(8, 9, 1)),
        validation_error);
}

TEST_CASE("fuse_bands matches a hand-spliced pyramid bit for bit") {
    BandImage interp = testutil::random_band(64, 64, 101);
    BandImage reference = detailed_band(64, 64, 1660.0);

    for (int r : {2, 3, 10, 100}) {
        for (bool eq : {true, false}) {
            FusionConfig cfg;
            cfg.equalize = eq;
            BandImage got = fuse_bands(interp, reference, r, cfg);
            BandImage want = splice_oracle(interp, reference, r, cfg);
            INFO("r=" << r << " equalize=" << eq);
            REQUIRE(pixels_equal(got, want));
        }
    }

    SECTION("explicit cutoff overrides the spacing-derived one") {
        FusionConfig cfg;
        cfg.cutoff_scale = 1;
        BandImage got = fuse_bands(interp, reference, 10, cfg);
        REQUIRE(pixels_equal(got, splice_oracle(interp, reference, 10, cfg)));
    }
}

TEST_CASE("cutoff at the finest scale means the reference is unused") {
    BandImage interp = testutil::random_band(64, 64, 55);
    BandImage ref_a = detailed_band(64, 64, 1660.0);
    BandImage ref_b = testutil::random_band(64, 64, 56);
    const int J = curvelet_scale_count(64, 64);

    FusionConfig cfg;
    cfg.cutoff_scale = J - 1;
    BandImage out_a = fuse_bands(interp, ref_a, 10, cfg);
    BandImage out_b = fuse_bands(interp, ref_b, 10, cfg);
    REQUIRE(pixels_equal(out_a, out_b)); // two unrelated references, same output

    SECTION("fully sampled input passes through untouched") {
        // Auto cutoff at r=1 keeps every scale, and the transform round trip
        // is exact at float precision.
        BandImage out = fuse_bands(interp, ref_a, 1);
        REQUIRE(pixels_equal(out, interp));
    }
}

TEST_CASE("fuse_bands validates its inputs") {
    BandImage interp = testutil::random_band(64, 64, 1);
    BandImage reference = testutil::random_band(64, 64, 2);
    const int J = curvelet_scale_count(64, 64);

    FusionConfig cfg;
    cfg.cutoff_scale = J; // one past the finest scale
    REQUIRE_THROWS_AS(fuse_bands(interp, reference, 4, cfg), validation_error);
    REQUIRE_THROWS_AS(fuse_bands(interp, reference, 0), validation_error);
    REQUIRE_THROWS_AS(fuse_bands(interp, testutil::random_band(64, 48, 2), 4),
                      validation_error);
}

TEST_CASE("fusion restores detail the row skipping destroyed") {
    // Truth and reference share a grid of sharp bumps (edge-like, spatially
    // localized detail, well past the sparse vertical Nyquist) on top of
    // unrelated smooth backgrounds. Row skipping blurs the bumps away in the
    // interpolated band; the spliced fine scales of the reference bring them
    // back.
    const int w = 64, h = 64, r = 4;
    auto bumps = [&](int x, int y) {
        double v = 0.0;
        for (int cy = 8; cy < h; cy += 12)
            for (int cx = 8; cx < w; cx += 12) {
                double d2 = double(x - cx) * (x - cx) + double(y - cy) * (y - cy);
                v += std::exp(-d2 / (2.0 * 1.2 * 1.2));
            }
        return v;
    };
    BandImage truth = BandImage::make(w, h, 1.0, 1.0, 1540.0);
    BandImage reference = BandImage::make(w, h, 1.0, 1.0, 1660.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            truth.at(x, y) = static_cast<float>(
                bumps(x, y) + 0.3 * std::sin(2.0 * M_PI * 2.0 * y / h) + 2.0);
            reference.at(x, y) = static_cast<float>(
                1.5 * bumps(x, y) + 0.2 * std::cos(2.0 * M_PI * x / w) + 1.0);
        }
    BandImage sparse = simulate_sparse_acquisition(truth, r);
    BandImage interp = fourier_interpolate(sparse, h);

    BandImage fused = fuse_bands(interp, reference, r);
    REQUIRE(mse(fused, truth) < mse(interp, truth));
    REQUIRE(ssim(truth, fused) > ssim(truth, interp));
}

TEST_CASE("reconstruct_set rebuilds every band on the reference grid") {
    const int w = 64, h = 64, r = 4;
    AcquisitionSet set;
    set.reference = detailed_band(w, h, 1660.0);
    for (double wn : {1540.0, 1080.0, 1740.0})
        set.sparse_bands.push_back(
            simulate_sparse_acquisition(detailed_band(w, h, wn), r));

    HyperCube cube = reconstruct_set(set);
    REQUIRE(cube.bands.size() == 4);
    std::vector<double> wns;
    for (const BandImage& b : cube.bands) {
        REQUIRE(b.width == w);
        REQUIRE(b.height == h);
        REQUIRE(b.dy_um == set.reference.dx_um);
        wns.push_back(b.wavenumber_cm1);
    }
    REQUIRE(std::is_sorted(wns.begin(), wns.end()));
    REQUIRE(wns == std::vector<double>{1080.0, 1540.0, 1660.0, 1740.0});
    REQUIRE(pixels_equal(cube.bands[2], set.reference)); // reference untouched

    SECTION("fully sampled acquisition reproduces the truth exactly") {
        AcquisitionSet full;
        full.reference = set.reference;
        BandImage truth = detailed_band(w, h, 1540.0);
        full.sparse_bands.push_back(simulate_sparse_acquisition(truth, 1));
        HyperCube out = reconstruct_set(full);
        REQUIRE(out.bands.size() == 2);
        REQUIRE(pixels_equal(out.bands[0], truth));
    }
}

TEST_CASE("reconstruct_set handles ragged sparse heights") {
    // 70 rows at r=4 -> ceil(70/4) = 18 sampled rows; interpolation overshoots
    // to 72 and must be cropped back to the reference height.
    const int w = 64, h = 70, r = 4;
    AcquisitionSet set;
    set.reference = detailed_band(w, h, 1660.0);
    set.sparse_bands.push_back(
        simulate_sparse_acquisition(detailed_band(w, h, 1540.0), r));
    REQUIRE(set.sparse_bands[0].height == 18);

    HyperCube cube = reconstruct_set(set);
    REQUIRE(cube.bands.size() == 2);
    REQUIRE(cube.bands[0].height == h);
    REQUIRE(cube.bands[0].width == w);
}

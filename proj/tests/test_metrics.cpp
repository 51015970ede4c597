#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hsfuse/core/image.hpp"
#include "hsfuse/core/rng.hpp"
#include "hsfuse/eval/metrics.hpp"
#include "hsfuse/eval/roc.hpp"
#include "hsfuse/eval/sweep.hpp"
#include "support/test_util.hpp"

using namespace hsfuse;

namespace {

BandImage band_from(std::initializer_list<float> vals, int w, int h) {
    BandImage b = BandImage::make(w, h, 1.0, 1.0, 1660.0);
    std::copy(vals.begin(), vals.end(), b.pixels.begin());
    return b;
}

/// 3x3 box blur with clamped borders, applied `passes` times.
BandImage box_blur(const BandImage& in, int passes) {
    BandImage a = in, b = in;
    for (int p = 0; p < passes; ++p) {
        for (int y = 0; y < a.height; ++y)
            for (int x = 0; x < a.width; ++x) {
                double acc = 0.0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int sx = std::clamp(x + dx, 0, a.width - 1);
                        int sy = std::clamp(y + dy, 0, a.height - 1);
                        acc += a.at(sx, sy);
                    }
                b.at(x, y) = static_cast<float>(acc / 9.0);
            }
        std::swap(a, b);
    }
    return a;
}

/// Direct (non-separable) SSIM over every valid window; the production code
/// must agree with this to floating-point noise.
double ssim_bruteforce(const BandImage& ref, const BandImage& img, const SsimParams& p) {
    const int win = p.window;
    std::vector<double> k(win);
    double sum = 0.0;
    const double half = (win - 1) / 2.0;
    for (int i = 0; i < win; ++i) {
        double d = i - half;
        k[i] = std::exp(-0.5 * d * d / (p.sigma * p.sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;

    double L;
    if (p.dynamic_range) {
        L = *p.dynamic_range;
    } else {
        double lo = ref.pixels[0], hi = ref.pixels[0];
        for (float v : ref.pixels) {
            lo = std::min(lo, static_cast<double>(v));
            hi = std::max(hi, static_cast<double>(v));
        }
        L = hi - lo > 0 ? hi - lo : 1.0;
    }
    const double c1 = (p.k1 * L) * (p.k1 * L);
    const double c2 = (p.k2 * L) * (p.k2 * L);

    double acc = 0.0;
    int count = 0;
    for (int y0 = 0; y0 + win <= ref.height; ++y0)
        for (int x0 = 0; x0 + win <= ref.width; ++x0) {
            double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
            for (int j = 0; j < win; ++j)
                for (int i = 0; i < win; ++i) {
                    double w = k[j] * k[i];
                    double a = ref.at(x0 + i, y0 + j);
                    double b = img.at(x0 + i, y0 + j);
                    mx += w * a;
                    my += w * b;
                    mxx += w * a * a;
                    myy += w * b * b;
                    mxy += w * a * b;
                }
            double vx = mxx - mx * mx, vy = myy - my * my, cov = mxy - mx * my;
            acc += ((2 * mx * my + c1) * (2 * cov + c2)) /
                   ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    return acc / count;
}

double concordance(const std::vector<double>& scores, const std::vector<uint8_t>& labels) {
    double num = 0.0;
    size_t pairs = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j])
                num += 1.0;
            else if (scores[i] == scores[j])
                num += 0.5;
        }
    }
    return num / static_cast<double>(pairs);
}

} // namespace

TEST_CASE("mse hand-checked values are exact") {
    BandImage a = band_from({1.0f, 2.0f, 3.0f, 4.0f}, 2, 2);
    REQUIRE(mse(a, a) == 0.0);

    BandImage zeros = band_from({0, 0, 0, 0}, 4, 1);
    BandImage ones = band_from({1, 1, 1, 1}, 4, 1);
    REQUIRE(mse(zeros, ones) == 1.0);

    BandImage z22 = band_from({0, 0, 0, 0}, 2, 2);
    BandImage ramp = band_from({1, 2, 3, 4}, 2, 2);
    REQUIRE(mse(z22, ramp) == 7.5); // (1 + 4 + 9 + 16) / 4

    SECTION("symmetric") {
        BandImage x = testutil::random_band(16, 12, 4);
        BandImage y = testutil::random_band(16, 12, 5);
        REQUIRE(mse(x, y) == mse(y, x));
    }
    SECTION("dimension mismatch rejected") {
        REQUIRE_THROWS_AS(mse(zeros, z22), validation_error);
    }
}

TEST_CASE("ssim of an image with itself is exactly one") {
    BandImage a = testutil::random_band(32, 24, 7);
    REQUIRE(ssim(a, a) == 1.0);

    SECTION("even for a constant image (unit-range fallback)") {
        BandImage c = BandImage::make(16, 16, 1.0, 1.0, 1000.0);
        for (float& v : c.pixels) v = 2.0f;
        REQUIRE(ssim(c, c) == 1.0);
    }
}

TEST_CASE("ssim penalizes a constant luminance shift without reaching zero") {
    // Keep the pixels positive: with a negative-mean window the luminance
    // term 2*mu_x*mu_y can legitimately push local SSIM below zero.
    BandImage a = testutil::random_band(32, 32, 8);
    double lo = a.pixels[0], hi = a.pixels[0];
    for (float v : a.pixels) {
        lo = std::min(lo, static_cast<double>(v));
        hi = std::max(hi, static_cast<double>(v));
    }
    for (float& v : a.pixels) v += static_cast<float>(1.0 - lo);
    BandImage b = a;
    for (float& v : b.pixels) v += static_cast<float>(0.5 * (hi - lo));
    double s = ssim(a, b);
    REQUIRE(s > 0.0);
    REQUIRE(s < 1.0);
}

TEST_CASE("ssim drops monotonically with blur severity") {
    BandImage truth = testutil::random_band(48, 48, 9);
    double s2 = ssim(truth, box_blur(truth, 2));
    double s4 = ssim(truth, box_blur(truth, 4));
    REQUIRE(s2 < 1.0);
    REQUIRE(s4 < s2);
}

TEST_CASE("ssim is symmetric once the dynamic range is pinned") {
    BandImage a = testutil::random_band(24, 20, 10);
    BandImage b = testutil::random_band(24, 20, 11);
    SsimParams p;
    p.dynamic_range = 1.0;
    REQUIRE(ssim(a, b, p) == ssim(b, a, p));
}

TEST_CASE("ssim agrees with a direct per-window evaluation") {
    BandImage a = testutil::random_band(32, 24, 12);
    BandImage blurred = box_blur(a, 1);
    SECTION("default parameters") {
        double got = ssim(a, blurred);
        double want = ssim_bruteforce(a, blurred, {});
        REQUIRE(got == Catch::Approx(want).epsilon(1e-12));
    }
    SECTION("custom window and range") {
        SsimParams p;
        p.window = 7;
        p.sigma = 1.1;
        p.dynamic_range = 2.0;
        double got = ssim(a, blurred, p);
        double want = ssim_bruteforce(a, blurred, p);
        REQUIRE(got == Catch::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("ssim validates its parameters") {
    BandImage a = testutil::random_band(32, 32, 1);
    BandImage b = testutil::random_band(32, 32, 2);
    SsimParams p;

    p.window = 4;
    REQUIRE_THROWS_AS(ssim(a, b, p), validation_error);
    p.window = 1;
    REQUIRE_THROWS_AS(ssim(a, b, p), validation_error);
    p = {};
    p.sigma = 0.0;
    REQUIRE_THROWS_AS(ssim(a, b, p), validation_error);
    p = {};
    p.dynamic_range = -1.0;
    REQUIRE_THROWS_AS(ssim(a, b, p), validation_error);
    p = {};
    REQUIRE_THROWS_AS(ssim(testutil::random_band(8, 8, 1), testutil::random_band(8, 8, 2), p),
                      validation_error); // smaller than the window
    REQUIRE_THROWS_AS(ssim(a, testutil::random_band(32, 30, 2)), validation_error);
}

TEST_CASE("roc hand-checked curve and area") {
    std::vector<double> scores{0.9, 0.8, 0.3, 0.2};
    std::vector<uint8_t> labels{1, 1, 0, 1};
    auto curve = roc_curve(scores, labels);

    std::vector<RocPoint> expected{
        {0.0, 0.0}, {0.0, 1.0 / 3.0}, {0.0, 2.0 / 3.0}, {1.0, 2.0 / 3.0}, {1.0, 1.0}};
    REQUIRE(curve.size() == expected.size());
    for (size_t i = 0; i < curve.size(); ++i) {
        REQUIRE(curve[i].fpr == Catch::Approx(expected[i].fpr).margin(1e-15));
        REQUIRE(curve[i].tpr == Catch::Approx(expected[i].tpr).margin(1e-15));
    }
    REQUIRE(auc(curve) == Catch::Approx(2.0 / 3.0).margin(1e-12));
}

TEST_CASE("roc endpoints and extremes") {
    SECTION("perfect separation") {
        std::vector<double> s{0.9, 0.8, 0.2, 0.1};
        std::vector<uint8_t> l{1, 1, 0, 0};
        REQUIRE(auc(roc_curve(s, l)) == 1.0);
    }
    SECTION("perfectly inverted") {
        std::vector<double> s{0.1, 0.2, 0.8, 0.9};
        std::vector<uint8_t> l{1, 1, 0, 0};
        REQUIRE(auc(roc_curve(s, l)) == 0.0);
    }
    SECTION("all scores tied collapses to the diagonal") {
        std::vector<double> s{0.5, 0.5, 0.5, 0.5};
        std::vector<uint8_t> l{1, 0, 1, 0};
        auto curve = roc_curve(s, l);
        REQUIRE(curve.size() == 2);
        REQUIRE(curve.front().fpr == 0.0);
        REQUIRE(curve.front().tpr == 0.0);
        REQUIRE(curve.back().fpr == 1.0);
        REQUIRE(curve.back().tpr == 1.0);
        REQUIRE(auc(curve) == 0.5);
    }
    SECTION("curves are monotone and span [0,1]") {
        std::vector<double> s{0.7, 0.1, 0.7, 0.4, 0.9, 0.1};
        std::vector<uint8_t> l{1, 0, 0, 1, 1, 1};
        auto curve = roc_curve(s, l);
        REQUIRE(curve.front().fpr == 0.0);
        REQUIRE(curve.front().tpr == 0.0);
        REQUIRE(curve.back().fpr == 1.0);
        REQUIRE(curve.back().tpr == 1.0);
        for (size_t i = 1; i < curve.size(); ++i) {
            REQUIRE(curve[i].fpr >= curve[i - 1].fpr);
            REQUIRE(curve[i].tpr >= curve[i - 1].tpr);
        }
    }
}

TEST_CASE("auc equals pairwise ranking concordance") {
    CounterRng rng(2024, 0);
    for (int trial = 0; trial < 200; ++trial) {
        size_t n = 2 + rng.next_index(28);
        std::vector<double> scores(n);
        std::vector<uint8_t> labels(n);
        // Quantized scores force plenty of ties.
        for (size_t i = 0; i < n; ++i) scores[i] = std::floor(rng.next_unit() * 8.0) / 8.0;
        size_t pos = 0;
        for (size_t i = 0; i < n; ++i) {
            labels[i] = rng.next_unit() < 0.5 ? 1 : 0;
            pos += labels[i];
        }
        if (pos == 0) labels[0] = 1;
        if (pos == n) labels[0] = 0;

        double a = auc(roc_curve(scores, labels));
        double c = concordance(scores, labels);
        INFO("trial " << trial << " n=" << n);
        REQUIRE(a == Catch::Approx(c).margin(1e-9));
    }
}

TEST_CASE("roc input validation") {
    std::vector<double> s{0.1, 0.2};
    REQUIRE_THROWS_AS(roc_curve(s, std::vector<uint8_t>{1, 1}), validation_error);
    REQUIRE_THROWS_AS(roc_curve(s, std::vector<uint8_t>{0, 0}), validation_error);
    REQUIRE_THROWS_AS(roc_curve(s, std::vector<uint8_t>{1, 2}), validation_error);
    REQUIRE_THROWS_AS(roc_curve(s, std::vector<uint8_t>{1}), validation_error);
    REQUIRE_THROWS_AS(roc_curve(std::vector<double>{}, std::vector<uint8_t>{}),
                      validation_error);

    SECTION("auc wants a monotone curve of two or more points") {
        REQUIRE_THROWS_AS(auc(std::vector<RocPoint>{{0.0, 0.0}}), validation_error);
        REQUIRE_THROWS_AS(
            auc(std::vector<RocPoint>{{0.0, 0.0}, {0.5, 0.8}, {0.4, 1.0}}),
            validation_error);
    }
}

namespace {

HyperCube sweep_cube(int w, int h) {
    HyperCube cube;
    for (double wn : {1600.0, 1660.0, 1700.0}) {
        BandImage b = BandImage::make(w, h, 1.0, 1.0, wn);
        CounterRng rng(77, static_cast<uint64_t>(wn));
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                b.at(x, y) = static_cast<float>(
                    std::sin(2.0 * M_PI * (3.0 * x + 17.0 * y) / w) +
                    0.1 * rng.next_normal());
        cube.bands.push_back(std::move(b));
    }
    return cube;
}

} // namespace

TEST_CASE("spacing sweep scores every non-reference band at every factor") {
    HyperCube cube = sweep_cube(64, 64);
    std::vector<int> factors{4, 1, 2, 2}; // unsorted, one duplicate
    SweepReport rep = spacing_sweep(cube, 1660.0, factors);

    REQUIRE(rep.rows.size() == 6); // 3 distinct factors x 2 non-reference bands
    REQUIRE(rep.aggregates.size() == 3);

    std::vector<int> rs;
    for (const SweepAggregate& a : rep.aggregates) rs.push_back(a.r);
    REQUIRE(rs == std::vector<int>{1, 2, 4});

    for (const SweepRow& row : rep.rows) {
        REQUIRE(row.wavenumber_cm1 != 1660.0); // reference band is not scored
        REQUIRE(row.dy_um == row.r * 1.0);
        if (row.r == 1) {
            REQUIRE(row.mse == 0.0);
            REQUIRE(row.ssim == 1.0);
        } else {
            REQUIRE(row.mse > 0.0);
            REQUIRE(row.ssim < 1.0);
        }
    }

    SECTION("aggregates are the per-factor mean and population std of the rows") {
        for (const SweepAggregate& a : rep.aggregates) {
            std::vector<double> ms, ss;
            for (const SweepRow& row : rep.rows)
                if (row.r == a.r) {
                    ms.push_back(row.mse);
                    ss.push_back(row.ssim);
                }
            REQUIRE(ms.size() == 2);
            double mmean = (ms[0] + ms[1]) / 2.0;
            double smean = (ss[0] + ss[1]) / 2.0;
            double mstd = std::sqrt(((ms[0] - mmean) * (ms[0] - mmean) +
                                     (ms[1] - mmean) * (ms[1] - mmean)) /
                                    2.0);
            double sstd = std::sqrt(((ss[0] - smean) * (ss[0] - smean) +
                                     (ss[1] - smean) * (ss[1] - smean)) /
                                    2.0);
            REQUIRE(a.mse_mean == Catch::Approx(mmean).margin(1e-15));
            REQUIRE(a.ssim_mean == Catch::Approx(smean).margin(1e-15));
            REQUIRE(a.mse_std == Catch::Approx(mstd).margin(1e-15));
            REQUIRE(a.ssim_std == Catch::Approx(sstd).margin(1e-15));
        }
    }
}

TEST_CASE("sweep CSV layout and determinism") {
    HyperCube cube = sweep_cube(64, 64);
    std::vector<int> factors{1, 2};
    std::string csv1 = sweep_to_csv(spacing_sweep(cube, 1660.0, factors));
    std::string csv2 = sweep_to_csv(spacing_sweep(cube, 1660.0, factors));
    REQUIRE(csv1 == csv2);

    REQUIRE(csv1.rfind("r,dy_um,wavenumber_cm1,mse,ssim\n", 0) == 0);
    REQUIRE(csv1.find("# aggregate\nr,dy_um,mse_mean,mse_std,ssim_mean,ssim_std\n") !=
            std::string::npos);
    size_t lines = static_cast<size_t>(std::count(csv1.begin(), csv1.end(), '\n'));
    REQUIRE(lines == 1 + 4 + 2 + 2); // header, 4 rows, aggregate banner+header, 2 aggs

    // r = 1 rows must literally read mse 0 / ssim 1.
    REQUIRE(csv1.find("1,1,1600,0,1\n") != std::string::npos);
    REQUIRE(csv1.find("1,1,1700,0,1\n") != std::string::npos);
}

TEST_CASE("sweep input validation") {
    HyperCube cube = sweep_cube(64, 64);
    REQUIRE_THROWS_AS(spacing_sweep(cube, 1660.0, std::vector<int>{}), validation_error);
    REQUIRE_THROWS_AS(spacing_sweep(cube, 1660.0, std::vector<int>{0}), validation_error);
    REQUIRE_THROWS_AS(spacing_sweep(cube, 1660.0, std::vector<int>{100}),
                      validation_error); // exceeds the 64-row height
    REQUIRE_THROWS_AS(spacing_sweep(cube, 1234.0, std::vector<int>{2}), validation_error);

    HyperCube only_ref;
    only_ref.bands.push_back(cube.bands[1]);
    REQUIRE_THROWS_AS(spacing_sweep(only_ref, 1660.0, std::vector<int>{2}),
                      validation_error);
}

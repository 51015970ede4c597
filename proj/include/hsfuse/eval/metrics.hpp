#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "hsfuse/core/errors.hpp"
#include "hsfuse/core/image.hpp"

namespace hsfuse {

/// Mean squared error between two equally sized bands, accumulated in double.
/// Symmetric; zero exactly when the pixel values are equal.
inline double mse(const BandImage& a, const BandImage& b) {
    detail::require(a.width == b.width && a.height == b.height,
                    "mse: images must share dimensions");
    detail::require(a.size() > 0, "mse: empty images");
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

struct SsimParams {
    int window = 11;       // odd Gaussian window side
    double sigma = 1.5;    // Gaussian std in pixels
    double k1 = 0.01;
    double k2 = 0.03;
    /// Dynamic range L; unset = max - min of the first (ground-truth) image.
    std::optional<double> dynamic_range;
};

namespace metricsdetail {

/// Separable Gaussian-weighted local means over valid (fully inside) windows.
/// Output dims: (h - win + 1) x (w - win + 1).
inline std::vector<double> local_means(const std::vector<double>& img, int w, int h,
                                       const std::vector<double>& kernel) {
    const int win = static_cast<int>(kernel.size());
    const int ow = w - win + 1, oh = h - win + 1;
    std::vector<double> horiz(static_cast<size_t>(ow) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            const double* row = img.data() + static_cast<size_t>(y) * w + x;
            for (int k = 0; k < win; ++k) acc += kernel[k] * row[k];
            horiz[static_cast<size_t>(y) * ow + x] = acc;
        }
    std::vector<double> out(static_cast<size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < win; ++k)
                acc += kernel[k] * horiz[static_cast<size_t>(y + k) * ow + x];
            out[static_cast<size_t>(y) * ow + x] = acc;
        }
    return out;
}

} // namespace metricsdetail

/// Structural similarity index, mean over all fully valid Gaussian windows.
/// Identical inputs give exactly 1.0 (the symmetric terms are computed from
/// bitwise-identical intermediates).
inline double ssim(const BandImage& reference, const BandImage& image,
                   const SsimParams& p = {}) {
    detail::require(reference.width == image.width && reference.height == image.height,
                    "ssim: images must share dimensions");
    detail::require(p.window >= 3 && p.window % 2 == 1, "ssim: window must be odd and >= 3");
    detail::require(p.sigma > 0, "ssim: sigma must be positive");
    detail::require(p.k1 > 0 && p.k2 > 0, "ssim: k1 and k2 must be positive");
    detail::require(reference.width >= p.window && reference.height >= p.window,
                    "ssim: images smaller than the window");

    double L;
    if (p.dynamic_range) {
        L = *p.dynamic_range;
        detail::require(L > 0, "ssim: dynamic range must be positive");
    } else {
        double lo = reference.pixels[0], hi = reference.pixels[0];
        for (float v : reference.pixels) {
            lo = std::min(lo, static_cast<double>(v));
            hi = std::max(hi, static_cast<double>(v));
        }
        L = hi - lo;
        if (L <= 0) L = 1.0; // constant reference: fall back to a unit range
    }
    const double c1 = (p.k1 * L) * (p.k1 * L);
    const double c2 = (p.k2 * L) * (p.k2 * L);

    std::vector<double> kernel(p.window);
    {
        const double half = (p.window - 1) / 2.0;
        double sum = 0.0;
        for (int i = 0; i < p.window; ++i) {
            double d = i - half;
            kernel[i] = std::exp(-0.5 * d * d / (p.sigma * p.sigma));
            sum += kernel[i];
        }
        for (double& k : kernel) k /= sum;
    }

    const int w = reference.width, h = reference.height;
    const size_t n = reference.size();
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (size_t i = 0; i < n; ++i) {
        double a = reference.pixels[i], b = image.pixels[i];
        x[i] = a;
        y[i] = b;
        xx[i] = a * a;
        yy[i] = b * b;
        xy[i] = a * b;
    }
    using metricsdetail::local_means;
    std::vector<double> mx = local_means(x, w, h, kernel);
    std::vector<double> my = local_means(y, w, h, kernel);
    std::vector<double> mxx = local_means(xx, w, h, kernel);
    std::vector<double> myy = local_means(yy, w, h, kernel);
    std::vector<double> mxy = local_means(xy, w, h, kernel);

    double acc = 0.0;
    for (size_t i = 0; i < mx.size(); ++i) {
        double vx = mxx[i] - mx[i] * mx[i];
        double vy = myy[i] - my[i] * my[i];
        double cov = mxy[i] - mx[i] * my[i];
        double num = (2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2);
        double den = (mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2);
        acc += num / den;
    }
    return acc / static_cast<double>(mx.size());
}

} // namespace hsfuse

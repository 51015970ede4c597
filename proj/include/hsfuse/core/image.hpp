#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hsfuse/core/errors.hpp"

namespace hsfuse {

/// One band of a hyperspectral acquisition: a single-channel raster with its
/// pixel pitch in micrometres and the wavenumber it was measured at.
///
/// Pixels are stored row-major, 32-bit float. `dy_um >= dx_um`; a sparsely
/// row-sampled band has `dy_um = r * dx_um` for an integer spacing factor r.
struct BandImage {
    int width = 0;
    int height = 0;
    double dx_um = 1.0;
    double dy_um = 1.0;
    double wavenumber_cm1 = 0.0;
    std::vector<float> pixels; // row-major, width*height

    static BandImage make(int width, int height, double dx_um, double dy_um,
                          double wavenumber_cm1) {
        BandImage b;
        b.width = width;
        b.height = height;
        b.dx_um = dx_um;
        b.dy_um = dy_um;
        b.wavenumber_cm1 = wavenumber_cm1;
        detail::require(width > 0 && height > 0, "BandImage: dimensions must be positive");
        detail::require(dx_um > 0 && dy_um > 0, "BandImage: pixel pitch must be positive");
        b.pixels.assign(static_cast<size_t>(width) * height, 0.0f);
        return b;
    }

    size_t size() const { return static_cast<size_t>(width) * height; }

    float& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    float at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }

    void validate() const {
        detail::require(width > 0 && height > 0, "BandImage: dimensions must be positive");
        detail::require(dx_um > 0 && dy_um > 0, "BandImage: pixel pitch must be positive");
        detail::require(pixels.size() == size(),
                        "BandImage: pixel buffer size does not match dimensions");
        for (float v : pixels)
            detail::require(std::isfinite(v), "BandImage: pixels must be finite");
    }
};

/// Axis-aligned crop; the rectangle must lie fully inside the band.
/// Pitches and wavenumber carry over.
inline BandImage crop(const BandImage& band, int x0, int y0, int w, int h) {
    detail::require(w > 0 && h > 0, "crop: empty rectangle");
    detail::require(x0 >= 0 && y0 >= 0 && x0 + w <= band.width && y0 + h <= band.height,
                    "crop: rectangle exceeds image bounds");
    BandImage out = BandImage::make(w, h, band.dx_um, band.dy_um, band.wavenumber_cm1);
    for (int y = 0; y < h; ++y) {
        const float* src = band.pixels.data() + static_cast<size_t>(y0 + y) * band.width + x0;
        std::copy(src, src + w, out.pixels.begin() + static_cast<size_t>(y) * w);
    }
    return out;
}

/// A stack of co-registered bands sharing one pixel grid, sorted by
/// strictly increasing wavenumber.
struct HyperCube {
    std::vector<BandImage> bands;

    int width() const { return bands.empty() ? 0 : bands.front().width; }
    int height() const { return bands.empty() ? 0 : bands.front().height; }

    void validate() const {
        detail::require(!bands.empty(), "HyperCube: must contain at least one band");
        const BandImage& first = bands.front();
        for (size_t i = 0; i < bands.size(); ++i) {
            const BandImage& b = bands[i];
            b.validate();
            detail::require(b.width == first.width && b.height == first.height,
                            "HyperCube: bands must share dimensions");
            detail::require(b.dx_um == first.dx_um && b.dy_um == first.dy_um,
                            "HyperCube: bands must share pixel pitch");
            if (i > 0)
                detail::require(bands[i - 1].wavenumber_cm1 < b.wavenumber_cm1,
                                "HyperCube: wavenumbers must be strictly increasing");
        }
    }

    void sort_bands() {
        std::sort(bands.begin(), bands.end(), [](const BandImage& a, const BandImage& b) {
            return a.wavenumber_cm1 < b.wavenumber_cm1;
        });
    }

    /// Index of the band whose wavenumber matches `wn` (tiny tolerance for
    /// round-tripped values); throws if absent.
    int band_index(double wn) const {
        for (size_t i = 0; i < bands.size(); ++i) {
            double d = std::abs(bands[i].wavenumber_cm1 - wn);
            if (d <= 1e-6 * std::max(1.0, std::abs(wn))) return static_cast<int>(i);
        }
        detail::fail_validation("HyperCube: no band at wavenumber " + std::to_string(wn));
    }
};

/// The output of one sparse acquisition protocol run: a full-resolution
/// reference band plus sparsely row-sampled bands at the other wavenumbers.
struct AcquisitionSet {
    BandImage reference;                  // dy_um == dx_um
    std::vector<BandImage> sparse_bands;  // each dy_um = r * dx_um, r >= 1 integer

    void validate() const {
        reference.validate();
        detail::require(reference.dy_um == reference.dx_um,
                        "AcquisitionSet: reference band must be fully sampled (dy == dx)");
        for (const BandImage& b : sparse_bands) {
            b.validate();
            detail::require(b.width == reference.width,
                            "AcquisitionSet: sparse band width must match reference");
            detail::require(b.dx_um == reference.dx_um,
                            "AcquisitionSet: sparse band dx must match reference");
            double r = b.dy_um / b.dx_um;
            detail::require(std::abs(r - std::round(r)) < 1e-9 && r >= 1.0,
                            "AcquisitionSet: dy must be an integer multiple of dx");
            int ri = static_cast<int>(std::round(r));
            int expect_h = (reference.height + ri - 1) / ri;
            detail::require(b.height == expect_h,
                            "AcquisitionSet: sparse band height inconsistent with its spacing");
        }
    }
};

/// Per-pixel class labels on the same grid as a cube. 0 = unlabeled,
/// 1..n_classes = tissue class codes.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> labels; // row-major

    static LabelMap make(int width, int height) {
        detail::require(width > 0 && height > 0, "LabelMap: dimensions must be positive");
        LabelMap m;
        m.width = width;
        m.height = height;
        m.labels.assign(static_cast<size_t>(width) * height, 0);
        return m;
    }

    size_t size() const { return static_cast<size_t>(width) * height; }
    uint8_t& at(int x, int y) { return labels[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }

    void validate() const {
        detail::require(width > 0 && height > 0, "LabelMap: dimensions must be positive");
        detail::require(labels.size() == size(),
                        "LabelMap: label buffer size does not match dimensions");
    }
};

} // namespace hsfuse

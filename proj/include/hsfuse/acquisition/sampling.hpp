#pragma once

#include <cmath>

#include "hsfuse/core/errors.hpp"
#include "hsfuse/core/image.hpp"

namespace hsfuse {

/// Geometry of a raster-scanned acquisition: pixel pitch and the physical
/// region covered. Row spacing must be an integer multiple of the pixel size.
struct SamplingSpec {
    double dx_um = 0.5;
    double dy_um = 0.5;
    double region_width_um = 1500.0;
    double region_height_um = 1500.0;

    void validate() const {
        detail::require(dx_um > 0 && dy_um > 0, "SamplingSpec: pitch must be positive");
        detail::require(region_width_um > 0 && region_height_um > 0,
                        "SamplingSpec: region must have positive extent");
        double r = dy_um / dx_um;
        detail::require(r >= 1.0 - 1e-12 && std::abs(r - std::round(r)) < 1e-9,
                        "SamplingSpec: dy_um must be a positive integer multiple of dx_um");
    }
};

/// Linear time model for a line-scanning instrument: every acquired row costs
/// the same, plus a fixed per-measurement overhead.
struct TimeModel {
    double seconds_per_row = 1.8;
    double fixed_overhead_s = 0.0;
};

/// Fraction of pixels acquired relative to a fully sampled raster. Exactly
/// dx/dy: skipping every second row halves the data, and so on.
inline double data_fraction(const SamplingSpec& spec) {
    spec.validate();
    return spec.dx_um / spec.dy_um;
}

/// Predicted wall-clock minutes to acquire one band over the region.
inline double acquisition_time_minutes(const SamplingSpec& spec, const TimeModel& model = {}) {
    spec.validate();
    detail::require(model.seconds_per_row > 0 && model.fixed_overhead_s >= 0,
                    "TimeModel: seconds_per_row must be positive, overhead non-negative");
    double rows = std::ceil(spec.region_height_um / spec.dy_um);
    return (rows * model.seconds_per_row + model.fixed_overhead_s) / 60.0;
}

/// Simulates acquiring only every r-th row of a fully sampled band: keeps
/// rows 0, r, 2r, ... unchanged (bit-exact) and records the widened row pitch.
/// The last partial stride still contributes its leading row, so the output
/// height is ceil(height / r).
inline BandImage simulate_sparse_acquisition(const BandImage& band, int r) {
    band.validate();
    detail::require(band.dy_um == band.dx_um,
                    "simulate_sparse_acquisition: input must be fully sampled (dy == dx)");
    detail::require(r >= 1, "simulate_sparse_acquisition: spacing factor must be >= 1");
    detail::require(r <= band.height,
                    "simulate_sparse_acquisition: spacing factor exceeds image height");
    int out_h = (band.height + r - 1) / r;
    BandImage out = BandImage::make(band.width, out_h, band.dx_um,
                                    band.dx_um * static_cast<double>(r), band.wavenumber_cm1);
    for (int yo = 0; yo < out_h; ++yo) {
        const float* src = band.pixels.data() + static_cast<size_t>(yo) * r * band.width;
        std::copy(src, src + band.width,
                  out.pixels.begin() + static_cast<size_t>(yo) * band.width);
    }
    return out;
}

} // namespace hsfuse

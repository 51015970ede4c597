#pragma once

#include <bit>
#include <cmath>

#include "hsfuse/core/errors.hpp"
#include "hsfuse/core/image.hpp"
#include "hsfuse/core/parallel.hpp"
#include "hsfuse/recon/curvelet.hpp"
#include "hsfuse/recon/interpolate.hpp"

namespace hsfuse {

struct EqualizeResult {
    BandImage image;
    double gain = 0.0;
    double offset = 0.0;
    bool degenerate_reference = false; // reference variance was zero
};

/// Least-squares linear intensity match: returns gain*reference + offset with
/// (gain, offset) minimizing the squared distance to `target`. A constant
/// reference has no usable contrast; the result is then the constant
/// mean(target) and the degenerate flag is set.
inline EqualizeResult equalize_linear(const BandImage& reference, const BandImage& target) {
    reference.validate();
    target.validate();
    detail::require(reference.width == target.width && reference.height == target.height,
                    "equalize_linear: images must share dimensions");
    const size_t n = reference.size();
    double mean_r = 0.0, mean_t = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mean_r += reference.pixels[i];
        mean_t += target.pixels[i];
    }
    mean_r /= static_cast<double>(n);
    mean_t /= static_cast<double>(n);
    double var_r = 0.0, cov = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dr = reference.pixels[i] - mean_r;
        double dt = target.pixels[i] - mean_t;
        var_r += dr * dr;
        cov += dr * dt;
    }

    EqualizeResult res;
    res.image = BandImage::make(reference.width, reference.height, reference.dx_um,
                                reference.dy_um, reference.wavenumber_cm1);
    if (var_r == 0.0) {
        res.gain = 0.0;
        res.offset = mean_t;
        res.degenerate_reference = true;
        std::fill(res.image.pixels.begin(), res.image.pixels.end(),
                  static_cast<float>(mean_t));
        return res;
    }
    res.gain = cov / var_r;
    res.offset = mean_t - res.gain * mean_r;
    for (size_t i = 0; i < n; ++i)
        res.image.pixels[i] = static_cast<float>(res.gain * reference.pixels[i] + res.offset);
    return res;
}

struct FusionConfig {
    /// Highest curvelet scale still taken from the interpolated band; scales
    /// above it come from the reference. -1 picks J-1-ceil(log2(r)) (clamped
    /// to [0, J-1]): the coarser the row sampling, the fewer scales the
    /// interpolation can be trusted for.
    int cutoff_scale = -1;
    /// Linearly match the reference's intensity to the interpolated band
    /// before mixing pyramids.
    bool equalize = true;
    /// Vertical low-pass width for the interpolation step (reconstruct_set).
    double gaussian_sigma_frac = 0.5;
};

/// Replaces the fine scales of the interpolated band's curvelet pyramid with
/// those of the (equalized) full-resolution reference and inverts. The
/// interpolated band supplies per-band intensity at coarse scales; the
/// reference supplies the spatial detail that row skipping destroyed.
inline BandImage fuse_bands(const BandImage& interp, const BandImage& reference,
                            int spacing_factor, const FusionConfig& cfg = {}) {
    interp.validate();
    reference.validate();
    detail::require(interp.width == reference.width && interp.height == reference.height,
                    "fuse_bands: images must share dimensions");
    detail::require(spacing_factor >= 1, "fuse_bands: spacing factor must be >= 1");

    const int J = curvelet_scale_count(interp.width, interp.height);
    int jc;
    if (cfg.cutoff_scale >= 0) {
        detail::require(cfg.cutoff_scale < J,
                        "fuse_bands: cutoff_scale " + std::to_string(cfg.cutoff_scale) +
                            " out of range for " + std::to_string(J) + " scales");
        jc = cfg.cutoff_scale;
    } else {
        int ceil_log2_r = spacing_factor > 1
                              ? std::bit_width(static_cast<unsigned>(spacing_factor - 1))
                              : 0;
        jc = std::clamp(J - 1 - ceil_log2_r, 0, J - 1);
    }

    const BandImage& ref_used =
        cfg.equalize ? equalize_linear(reference, interp).image : reference;

    CurveletCoeffs fused = curvelet_forward(interp);
    if (jc < J - 1) {
        CurveletCoeffs ref_coeffs = curvelet_forward(ref_used);
        for (int j = jc + 1; j < J; ++j) fused.scales[j] = std::move(ref_coeffs.scales[j]);
    }
    BandImage out = curvelet_inverse(fused);
    out.wavenumber_cm1 = interp.wavenumber_cm1;
    return out;
}

/// Reconstructs every sparse band of an acquisition to the reference grid:
/// Fourier interpolation back to full height, then curvelet fusion with the
/// reference. The returned cube contains the reconstructed bands plus the
/// reference itself, sorted by wavenumber.
inline HyperCube reconstruct_set(const AcquisitionSet& set, const FusionConfig& cfg = {}) {
    set.validate();
    const BandImage& ref = set.reference;

    std::vector<BandImage> results(set.sparse_bands.size());
    parallel_for(set.sparse_bands.size(), [&](size_t i) {
        const BandImage& sparse = set.sparse_bands[i];
        int r = static_cast<int>(std::lround(sparse.dy_um / sparse.dx_um));
        BandImage interp;
        if (r == 1) {
            interp = sparse; // already on the reference grid
        } else {
            interp = fourier_interpolate(sparse, sparse.height * r, cfg.gaussian_sigma_frac);
            if (interp.height > ref.height) // ceil(h/r)*r rows; drop the over-run
                interp = crop(interp, 0, 0, interp.width, ref.height);
        }
        results[i] = fuse_bands(interp, ref, r, cfg);
    });

    HyperCube cube;
    cube.bands.reserve(results.size() + 1);
    for (BandImage& b : results) cube.bands.push_back(std::move(b));
    cube.bands.push_back(ref);
    cube.sort_bands();
    cube.validate(); // rejects duplicate wavenumbers etc.
    return cube;
}

} // namespace hsfuse

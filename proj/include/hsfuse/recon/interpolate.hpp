#pragma once

#include <cmath>
#include <vector>

#include "hsfuse/core/errors.hpp"
#include "hsfuse/core/image.hpp"
#include "hsfuse/recon/fft.hpp"

namespace hsfuse {

/// Upsamples a sparsely row-sampled band back to the full vertical resolution
/// by zero-padding its spectrum along the vertical frequency axis (band-limited
/// a.k.a. sinc interpolation) and applying a Gaussian low-pass along that axis
/// to suppress replication ringing.
///
/// `target_height` must be an integer multiple r of the band height, matching
/// the recorded pitch ratio dy_um / dx_um. The Gaussian std is
/// `gaussian_sigma_frac` times the input's vertical Nyquist frequency; the DC
/// gain is exactly 1, so constant bands and the image mean are preserved.
inline BandImage fourier_interpolate(const BandImage& band, int target_height,
                                     double gaussian_sigma_frac = 0.5) {
    band.validate();
    detail::require(gaussian_sigma_frac > 0,
                    "fourier_interpolate: gaussian_sigma_frac must be positive");
    detail::require(target_height >= band.height,
                    "fourier_interpolate: target height must not shrink the band");
    detail::require(target_height % band.height == 0,
                    "fourier_interpolate: target height must be an integer multiple of the "
                    "band height");
    const int h = band.height, W = band.width, H = target_height;
    const int r = H / h;
    double ratio = band.dy_um / band.dx_um;
    detail::require(std::abs(ratio - static_cast<double>(r)) <= 1e-9 * r,
                    "fourier_interpolate: target height disagrees with the recorded "
                    "row-spacing ratio dy_um/dx_um");
    if (r == 1) return band; // fully sampled already; nothing to fill in

    std::vector<cplx> input(band.size());
    for (size_t i = 0; i < band.size(); ++i) input[i] = cplx(band.pixels[i], 0.0);
    std::vector<cplx> spec(band.size());
    FftEngine::instance().dft2(h, W, input.data(), spec.data(), true);

    // Zero-pad vertically around the centre of the spectrum. For even input
    // height the Nyquist row is shared between +h/2 and -h/2; splitting its
    // amplitude keeps the padded spectrum Hermitian, hence the output real.
    std::vector<cplx> padded(static_cast<size_t>(H) * W, cplx(0.0, 0.0));
    for (int k1 = 0; k1 < h; ++k1) {
        int f = (k1 <= (h - 1) / 2) ? k1 : k1 - h; // signed vertical frequency
        const cplx* src = spec.data() + static_cast<size_t>(k1) * W;
        if (h % 2 == 0 && k1 == h / 2) {
            cplx* up = padded.data() + static_cast<size_t>(h / 2) * W;
            cplx* dn = padded.data() + static_cast<size_t>(H - h / 2) % H * W;
            for (int k2 = 0; k2 < W; ++k2) {
                up[k2] += 0.5 * src[k2];
                dn[k2] += 0.5 * src[k2];
            }
        } else {
            cplx* dst = padded.data() + static_cast<size_t>((f + H) % H) * W;
            for (int k2 = 0; k2 < W; ++k2) dst[k2] = src[k2];
        }
    }

    const double sigma = gaussian_sigma_frac * (static_cast<double>(h) / 2.0);
    for (int k1 = 0; k1 < H; ++k1) {
        int f = (k1 <= H / 2) ? k1 : k1 - H;
        double g = std::exp(-0.5 * (static_cast<double>(f) * f) / (sigma * sigma));
        cplx* row = padded.data() + static_cast<size_t>(k1) * W;
        for (int k2 = 0; k2 < W; ++k2) row[k2] *= g;
    }

    std::vector<cplx> out(padded.size());
    FftEngine::instance().dft2(H, W, padded.data(), out.data(), false);

    BandImage result = BandImage::make(W, H, band.dx_um, band.dx_um, band.wavenumber_cm1);
    const double scale = 1.0 / (static_cast<double>(h) * W); // 1/(H*W) inverse, *H/h gain
    for (size_t i = 0; i < out.size(); ++i)
        result.pixels[i] = static_cast<float>(out[i].real() * scale);
    return result;
}

} // namespace hsfuse

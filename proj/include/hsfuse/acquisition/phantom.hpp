#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hsfuse/core/errors.hpp"
#include "hsfuse/core/image.hpp"
#include "hsfuse/core/rng.hpp"

namespace hsfuse {

/// One Gaussian absorption peak of a synthetic tissue spectrum.
struct SpectralPeak {
    double center_cm1;
    double width_cm1;
    double amplitude;
};

/// A synthetic tissue class: a spectral signature plus blob geometry. Blob
/// radii are fractions of min(width, height) so specs scale with image size.
struct PhantomClass {
    std::string name;
    std::vector<SpectralPeak> peaks;
    int blob_count = 6;
    double min_radius_frac = 0.04;
    double max_radius_frac = 0.11;
};

/// Spec for a synthetic labeled hyperspectral scene.
struct PhantomSpec {
    int width = 256;
    int height = 256;
    double dx_um = 0.5;
    std::vector<double> wavenumbers_cm1 = default_wavenumbers();
    std::vector<PhantomClass> classes = default_classes();
    double background_level = 0.05;
    double texture_scale_px = 12.0;   // correlation length; <= 0 disables texture
    double texture_amplitude = 0.15;  // std of the multiplicative field around 1
    double noise_sigma = 0.01;        // additive white Gaussian noise per band

    /// Absorption wavenumbers typical of an infrared tissue protocol,
    /// including the amide I band at 1660 used as the reference.
    static std::vector<double> default_wavenumbers() {
        return {908,  974,  984,  1036, 1070, 1102, 1136, 1178, 1238, 1280,
                1300, 1325, 1358, 1396, 1420, 1456, 1482, 1500, 1536, 1556,
                1596, 1610, 1660, 1662, 1668, 1682, 1746, 1786};
    }

    static std::vector<PhantomClass> default_classes() {
        return {
            {"epithelium",
             {{1660, 35, 1.00}, {1556, 25, 0.50}, {1238, 20, 0.20}},
             6, 0.04, 0.11},
            {"stroma",
             {{1660, 35, 0.75}, {1536, 25, 0.35}, {1238, 22, 0.55}, {1300, 20, 0.30}},
             6, 0.04, 0.11},
            {"necrosis",
             {{1660, 45, 0.50}, {1070, 30, 0.45}, {1102, 30, 0.35}, {1396, 25, 0.20}},
             6, 0.04, 0.11},
        };
    }

    void validate() const {
        detail::require(width > 0 && height > 0, "PhantomSpec: zero-area scene");
        detail::require(dx_um > 0, "PhantomSpec: pixel pitch must be positive");
        detail::require(!classes.empty(), "PhantomSpec: at least one class required");
        detail::require(classes.size() <= 255, "PhantomSpec: too many classes for u8 labels");
        detail::require(!wavenumbers_cm1.empty(), "PhantomSpec: at least one wavenumber");
        for (size_t i = 1; i < wavenumbers_cm1.size(); ++i)
            detail::require(wavenumbers_cm1[i - 1] < wavenumbers_cm1[i],
                            "PhantomSpec: wavenumbers must be strictly increasing");
        for (const PhantomClass& c : classes) {
            detail::require(c.blob_count > 0, "PhantomSpec: class needs at least one blob");
            detail::require(c.min_radius_frac > 0 && c.max_radius_frac >= c.min_radius_frac,
                            "PhantomSpec: invalid blob radius range");
            detail::require(!c.peaks.empty(), "PhantomSpec: class needs a spectral signature");
            for (const SpectralPeak& p : c.peaks)
                detail::require(p.width_cm1 > 0, "PhantomSpec: peak width must be positive");
        }
        detail::require(background_level >= 0, "PhantomSpec: negative background");
        detail::require(texture_amplitude >= 0 && texture_amplitude < 1,
                        "PhantomSpec: texture amplitude must be in [0, 1)");
        detail::require(noise_sigma >= 0, "PhantomSpec: negative noise sigma");
    }
};

struct Phantom {
    HyperCube cube;
    LabelMap labels;
};

/// Per-class absorbance at one wavenumber (sum of Gaussian peaks).
inline double phantom_signature(const PhantomClass& cls, double wn) {
    double v = 0.0;
    for (const SpectralPeak& p : cls.peaks) {
        double t = (wn - p.center_cm1) / p.width_cm1;
        v += p.amplitude * std::exp(-0.5 * t * t);
    }
    return v;
}

namespace phantomdetail {

/// Smooth multiplicative texture: blurred white noise, rescaled to mean 1 and
/// std `amplitude`, floored to stay positive.
inline std::vector<double> texture_field(int w, int h, double scale, double amplitude,
                                         uint64_t seed) {
    std::vector<double> field(static_cast<size_t>(w) * h, 1.0);
    if (scale <= 0.0 || amplitude <= 0.0) return field;

    std::vector<double> noise(field.size());
    for (size_t i = 0; i < noise.size(); ++i) noise[i] = rng_normal(seed, 2, i);

    int radius = static_cast<int>(std::ceil(3.0 * scale));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (scale * scale));
        ksum += kernel[i + radius];
    }
    for (double& k : kernel) k /= ksum;

    auto reflect = [](int i, int n) {
        while (i < 0 || i >= n) {
            if (i < 0) i = -i - 1;
            if (i >= n) i = 2 * n - 1 - i;
        }
        return i;
    };

    std::vector<double> tmp(noise.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += kernel[k + radius] * noise[static_cast<size_t>(y) * w + reflect(x + k, w)];
            tmp[static_cast<size_t>(y) * w + x] = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += kernel[k + radius] * tmp[static_cast<size_t>(reflect(y + k, h)) * w + x];
            field[static_cast<size_t>(y) * w + x] = acc;
        }

    double mean = 0.0;
    for (double v : field) mean += v;
    mean /= static_cast<double>(field.size());
    double var = 0.0;
    for (double v : field) var += (v - mean) * (v - mean);
    var /= static_cast<double>(field.size());
    double sd = std::sqrt(var);
    double gain = sd > 0 ? amplitude / sd : 0.0;
    for (double& v : field) v = std::max(0.05, 1.0 + gain * (v - mean));
    return field;
}

} // namespace phantomdetail

/// Builds a labeled synthetic scene: class blobs on a uniform background,
/// per-class Gaussian-peak spectra, a shared smooth multiplicative texture,
/// and per-band additive noise. Bit-deterministic for a given (spec, seed).
inline Phantom generate_phantom(const PhantomSpec& spec, uint64_t seed) {
    spec.validate();
    const int w = spec.width, h = spec.height;
    const int n_classes = static_cast<int>(spec.classes.size());
    const int n_bands = static_cast<int>(spec.wavenumbers_cm1.size());

    // Blob geometry (stream 1, sequential draws in a fixed order).
    LabelMap labels = LabelMap::make(w, h);
    CounterRng geom(seed, 1);
    const double rad_base = static_cast<double>(std::min(w, h));
    for (int c = 0; c < n_classes; ++c) {
        const PhantomClass& cls = spec.classes[c];
        for (int b = 0; b < cls.blob_count; ++b) {
            double cx = geom.next_unit() * w;
            double cy = geom.next_unit() * h;
            double radius = std::max(
                2.0, rad_base * (cls.min_radius_frac +
                                 geom.next_unit() * (cls.max_radius_frac - cls.min_radius_frac)));
            int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
            int x1 = std::min(w - 1, static_cast<int>(std::ceil(cx + radius)));
            int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
            int y1 = std::min(h - 1, static_cast<int>(std::ceil(cy + radius)));
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
                    if (dx * dx + dy * dy <= radius * radius)
                        labels.at(x, y) = static_cast<uint8_t>(c + 1);
                }
        }
    }
    for (int c = 1; c <= n_classes; ++c) {
        bool present = false;
        for (uint8_t v : labels.labels)
            if (v == c) { present = true; break; }
        if (!present)
            throw std::runtime_error("generate_phantom: class " + spec.classes[c - 1].name +
                                     " fully occluded by later blobs; adjust the blob spec");
    }

    // Per (label, band) absorbance table; label 0 is bare background.
    std::vector<double> table(static_cast<size_t>(n_classes + 1) * n_bands);
    for (int l = 0; l <= n_classes; ++l)
        for (int bi = 0; bi < n_bands; ++bi) {
            double v = spec.background_level;
            if (l > 0) v += phantom_signature(spec.classes[l - 1], spec.wavenumbers_cm1[bi]);
            table[static_cast<size_t>(l) * n_bands + bi] = v;
        }

    std::vector<double> texture = phantomdetail::texture_field(
        w, h, spec.texture_scale_px, spec.texture_amplitude, seed);

    HyperCube cube;
    cube.bands.reserve(n_bands);
    for (int bi = 0; bi < n_bands; ++bi) {
        BandImage band = BandImage::make(w, h, spec.dx_um, spec.dx_um, spec.wavenumbers_cm1[bi]);
        const uint64_t noise_stream = 1000 + static_cast<uint64_t>(bi);
        for (size_t i = 0; i < band.size(); ++i) {
            double v = table[static_cast<size_t>(labels.labels[i]) * n_bands + bi] * texture[i];
            if (spec.noise_sigma > 0) v += spec.noise_sigma * rng_normal(seed, noise_stream, i);
            band.pixels[i] = static_cast<float>(v);
        }
        cube.bands.push_back(std::move(band));
    }
    cube.validate();
    return {std::move(cube), std::move(labels)};
}

} // namespace hsfuse

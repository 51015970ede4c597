#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "hsfuse/acquisition/sampling.hpp"
#include "hsfuse/core/errors.hpp"
#include "hsfuse/core/format.hpp"
#include "hsfuse/core/image.hpp"
#include "hsfuse/core/parallel.hpp"
#include "hsfuse/eval/metrics.hpp"
#include "hsfuse/recon/fusion.hpp"

namespace hsfuse {

struct SweepRow {
    int r;
    double dy_um;
    double wavenumber_cm1;
    double mse;
    double ssim;
};

struct SweepAggregate {
    int r;
    double dy_um;
    double mse_mean;
    double mse_std;
    double ssim_mean;
    double ssim_std;
};

struct SweepReport {
    std::vector<SweepRow> rows;            // sorted by (r, wavenumber)
    std::vector<SweepAggregate> aggregates; // per r, over the non-reference bands
};

/// Degradation study: undersample every non-reference band of a ground-truth
/// cube at each spacing factor, reconstruct it against the cube's own
/// reference band, and score against the original. r = 1 is the identity
/// protocol (nothing discarded, nothing to reconstruct), so it scores
/// mse = 0 / ssim = 1 exactly by definition.
inline SweepReport spacing_sweep(const HyperCube& truth, double reference_wavenumber,
                                 std::span<const int> factors, const FusionConfig& cfg = {},
                                 const SsimParams& ssim_params = {}) {
    truth.validate();
    detail::require(!factors.empty(), "spacing_sweep: no spacing factors given");
    std::vector<int> rs(factors.begin(), factors.end());
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    for (int r : rs) {
        detail::require(r >= 1, "spacing_sweep: spacing factors must be >= 1");
        detail::require(r <= truth.height(),
                        "spacing_sweep: factor " + std::to_string(r) +
                            " exceeds image height " + std::to_string(truth.height()));
    }
    const int ref_idx = truth.band_index(reference_wavenumber);
    const BandImage& ref = truth.bands[ref_idx];
    detail::require(truth.bands.size() >= 2, "spacing_sweep: need at least one band besides "
                                             "the reference");
    detail::require(ref.dy_um == ref.dx_um,
                    "spacing_sweep: ground-truth cube must be fully sampled");

    std::vector<int> band_ids;
    for (size_t i = 0; i < truth.bands.size(); ++i)
        if (static_cast<int>(i) != ref_idx) band_ids.push_back(static_cast<int>(i));

    SweepReport report;
    report.rows.resize(rs.size() * band_ids.size());
    parallel_for(report.rows.size(), [&](size_t k) {
        const int r = rs[k / band_ids.size()];
        const BandImage& band = truth.bands[band_ids[k % band_ids.size()]];
        SweepRow row{r, r * band.dx_um, band.wavenumber_cm1, 0.0, 1.0};
        if (r > 1) {
            BandImage sparse = simulate_sparse_acquisition(band, r);
            BandImage interp =
                fourier_interpolate(sparse, sparse.height * r, cfg.gaussian_sigma_frac);
            if (interp.height > band.height)
                interp = crop(interp, 0, 0, interp.width, band.height);
            BandImage fused = fuse_bands(interp, ref, r, cfg);
            row.mse = mse(band, fused);
            row.ssim = ssim(band, fused, ssim_params);
        }
        report.rows[k] = row;
    });

    for (size_t fi = 0; fi < rs.size(); ++fi) {
        double msum = 0.0, ssum = 0.0;
        const size_t base = fi * band_ids.size(), n = band_ids.size();
        for (size_t i = 0; i < n; ++i) {
            msum += report.rows[base + i].mse;
            ssum += report.rows[base + i].ssim;
        }
        double mmean = msum / static_cast<double>(n);
        double smean = ssum / static_cast<double>(n);
        double mvar = 0.0, svar = 0.0;
        for (size_t i = 0; i < n; ++i) {
            mvar += (report.rows[base + i].mse - mmean) * (report.rows[base + i].mse - mmean);
            svar += (report.rows[base + i].ssim - smean) * (report.rows[base + i].ssim - smean);
        }
        report.aggregates.push_back({rs[fi], rs[fi] * ref.dx_um, mmean,
                                     std::sqrt(mvar / static_cast<double>(n)), smean,
                                     std::sqrt(svar / static_cast<double>(n))});
    }
    return report;
}

/// CSV rendering: per-band rows, then an aggregate section. Byte-stable for
/// identical reports.
inline std::string sweep_to_csv(const SweepReport& report) {
    std::string out = "r,dy_um,wavenumber_cm1,mse,ssim\n";
    for (const SweepRow& row : report.rows) {
        out += std::to_string(row.r);
        out += ',';
        out += format_double(row.dy_um);
        out += ',';
        out += format_double(row.wavenumber_cm1);
        out += ',';
        out += format_double(row.mse);
        out += ',';
        out += format_double(row.ssim);
        out += '\n';
    }
    out += "# aggregate\n";
    out += "r,dy_um,mse_mean,mse_std,ssim_mean,ssim_std\n";
    for (const SweepAggregate& a : report.aggregates) {
        out += std::to_string(a.r);
        out += ',';
        out += format_double(a.dy_um);
        out += ',';
        out += format_double(a.mse_mean);
        out += ',';
        out += format_double(a.mse_std);
        out += ',';
        out += format_double(a.ssim_mean);
        out += ',';
        out += format_double(a.ssim_std);
        out += '\n';
    }
    return out;
}

} // namespace hsfuse

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "hsfuse/core/errors.hpp"
#include "hsfuse/core/image.hpp"
#include "hsfuse/recon/fft.hpp"

namespace hsfuse {

// Wrapping-based fast discrete curvelet transform.
//
// The frequency plane is split into a coarse low-pass block, dyadic annuli
// covered by angular wedges (parabolic scaling: the orientation count doubles
// every other scale), and a finest wavelet ring. Each wedge is windowed with
// smooth Meyer-style windows, wrapped into a rectangle around the origin, and
// inverse-transformed; that rectangle of complex coefficients is the wedge's
// output. Geometry and window formulas follow the classical wrapping
// construction (complex transform, wavelets at the finest scale, 16
// orientations at the second-coarsest scale).
//
// Implementation: all indexing and window evaluation is precomputed once per
// image size into per-wedge gather plans (plane cell -> rectangle cell with a
// real weight). After building the plans, the total frame gain
// S(w) = sum of squared weights covering each frequency cell is measured and
// every weight is divided by sqrt(S); the windows already make S ~= 1, and the
// renormalization makes the frame exactly tight, so inverse(forward(x)) == x
// and coefficient energy equals image energy up to FFT rounding.

struct CurveletWedge {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> data; // row-major complex coefficients
};

struct CurveletCoeffs {
    int width = 0;  // original image dims, required for inversion
    int height = 0;
    double dx_um = 1.0;
    double dy_um = 1.0;
    double wavenumber_cm1 = 0.0;
    std::vector<std::vector<CurveletWedge>> scales; // [scale][orientation], scale 0 = coarsest

    int n_scales() const { return static_cast<int>(scales.size()); }
};

/// Number of scales for a width x height image: max(2, ceil(log2(min)) - 3).
inline int curvelet_scale_count(int width, int height) {
    int m = std::min(width, height);
    detail::require(m >= 32, "curvelet: images smaller than 32x32 are not supported");
    int ceil_log2 = std::bit_width(static_cast<unsigned>(m - 1));
    return std::max(2, ceil_log2 - 3);
}

/// Orientations per scale: 1 at the coarsest, 16 at scale 1 doubling every
/// second scale, 1 at the finest (wavelet) scale.
inline std::vector<int> curvelet_orientation_counts(int width, int height) {
    int J = curvelet_scale_count(width, height);
    std::vector<int> n(J, 1);
    for (int j = 1; j <= J - 2; ++j) n[j] = 16 << (j / 2); // 16 * 2^ceil((j-1)/2)
    return n;
}

namespace curvedetail {

/// Meyer-style window pair on [0,1]: wl rises 0 -> 1, wr falls 1 -> 0, with
/// wl^2 + wr^2 == 1 pointwise.
inline void meyer_pair(double x, double& wl, double& wr) {
    if (std::abs(x) < 0x1p-52) x = 0.0;
    if (x <= 0.0) {
        wl = 0.0;
        wr = 1.0;
        return;
    }
    if (x >= 1.0) {
        wl = 1.0;
        wr = 0.0;
        return;
    }
    double er = std::exp(1.0 - 1.0 / (1.0 - std::exp(1.0 - 1.0 / x)));
    double el = std::exp(1.0 - 1.0 / (1.0 - std::exp(1.0 - 1.0 / (1.0 - x))));
    double n = std::sqrt(el * el + er * er);
    wl = el / n;
    wr = er / n;
}

inline double meyer_wl(double x) {
    double wl, wr;
    meyer_pair(x, wl, wr);
    return wl;
}

inline double meyer_wr(double x) {
    double wl, wr;
    meyer_pair(x, wl, wr);
    return wr;
}

/// 1-D radial low-pass profile for parameter M: a flat centre of width
/// 2*floor(M)+1 with Meyer tapers on both sides; total length 2*floor(2M)+1.
inline std::vector<double> lowpass_profile(double M) {
    int wlen = static_cast<int>(std::floor(2 * M)) - static_cast<int>(std::floor(M)) - 1;
    int flat = 2 * static_cast<int>(std::floor(M)) + 1;
    if (wlen < 1)
        throw std::logic_error("curvelet: degenerate low-pass taper (image too small)");
    std::vector<double> prof;
    prof.reserve(2 * (wlen + 1) + flat);
    std::vector<double> rise(wlen + 1), fall(wlen + 1);
    for (int i = 0; i <= wlen; ++i) {
        double wl, wr;
        meyer_pair(static_cast<double>(i) / wlen, wl, wr);
        rise[i] = wl;
        fall[i] = wr;
    }
    prof.insert(prof.end(), rise.begin(), rise.end());
    prof.insert(prof.end(), static_cast<size_t>(flat), 1.0);
    prof.insert(prof.end(), fall.begin(), fall.end());
    return prof;
}

struct PlanEntry {
    uint32_t rect_index;
    uint32_t plane_index;
    double weight;
};

struct WedgePlan {
    int rows = 0;
    int cols = 0;
    std::vector<PlanEntry> entries;
};

struct TransformPlan {
    int width = 0;
    int height = 0;
    int n_scales = 0;
    std::vector<std::vector<WedgePlan>> wedges; // [scale][orientation]
    double raw_gain_min = 0.0; // frame gain before renormalization
    double raw_gain_max = 0.0;
};

/// Frequency block in the current quadrant frame: per-cell plane index and
/// accumulated radial window amplitude. Rotating the maps instead of the data
/// lets one wedge routine serve all four quadrants.
struct BlockMaps {
    int rows = 0;
    int cols = 0;
    std::vector<int64_t> plane;
    std::vector<double> amp;

    int64_t plane_at(int r, int c) const { return plane[static_cast<size_t>(r) * cols + c]; }
    double amp_at(int r, int c) const { return amp[static_cast<size_t>(r) * cols + c]; }
};

inline BlockMaps rotate_ccw(const BlockMaps& a) {
    BlockMaps b;
    b.rows = a.cols;
    b.cols = a.rows;
    b.plane.resize(a.plane.size());
    b.amp.resize(a.amp.size());
    for (int i = 0; i < b.rows; ++i)
        for (int j = 0; j < b.cols; ++j) {
            size_t src = static_cast<size_t>(j) * a.cols + (a.cols - 1 - i);
            size_t dst = static_cast<size_t>(i) * b.cols + j;
            b.plane[dst] = a.plane[src];
            b.amp[dst] = a.amp[src];
        }
    return b;
}

inline int imod(long a, int m) {
    long r = a % m;
    return static_cast<int>(r < 0 ? r + m : r);
}

/// (row, col) of a rectangle cell after k clockwise 90-degree turns; dims
/// swap on every turn.
inline void rotate_cw_k(int& i, int& j, int& rows, int& cols, int k) {
    for (int s = 0; s < k; ++s) {
        int ni = j, nj = rows - 1 - i;
        i = ni;
        j = nj;
        std::swap(rows, cols);
    }
}

[[noreturn]] inline void geometry_bug(const char* what) {
    throw std::logic_error(std::string("curvelet plan: ") + what);
}

/// Carves the four quadrant fans of one directional scale out of the annulus
/// block `xhi` (indices + radial amplitudes) into `nangles` wedge plans.
inline void carve_scale(std::vector<WedgePlan>& out, const BlockMaps& xhi, double M1, double M2,
                        int nangles) {
    const int npq = nangles / 4;
    if (npq < 2 || nangles % 4 != 0) geometry_bug("orientation count must be a multiple of 4, >= 8");
    out.resize(nangles);

    BlockMaps cur = xhi;
    for (int q = 1; q <= 4; ++q) {
        const double Mv = (q % 2 == 1) ? M1 : M2; // vertical = rows of current frame
        const double Mh = (q % 2 == 1) ? M2 : M1;
        const int FV = static_cast<int>(std::floor(4 * Mv));
        const int FH = static_cast<int>(std::floor(4 * Mh));
        if (cur.rows != 2 * FV + 1 || cur.cols != 2 * FH + 1)
            geometry_bug("block dims disagree with quadrant frame");

        // Wedge boundaries along the top edge (1-based column positions).
        std::vector<int> ticks_left(npq + 1), ticks;
        for (int k = 0; k <= npq; ++k)
            ticks_left[k] =
                static_cast<int>(std::lround(k / (2.0 * npq) * (2.0 * FH) + 1.0));
        if (npq % 2 == 1) {
            ticks = ticks_left;
            for (int k = npq; k >= 0; --k) ticks.push_back(2 * FH + 2 - ticks_left[k]);
        } else {
            ticks = ticks_left;
            for (int k = npq - 1; k >= 0; --k) ticks.push_back(2 * FH + 2 - ticks_left[k]);
        }
        std::vector<int> e(npq); // endpoints: every second tick
        for (int i = 0; i < npq; ++i) e[i] = ticks[2 * i + 1];
        for (int i = 1; i < npq; ++i)
            if (e[i] <= e[i - 1]) geometry_bug("wedge endpoints not increasing");
        std::vector<double> mid(npq - 1);
        for (int i = 0; i + 1 < npq; ++i) mid[i] = 0.5 * (e[i] + e[i + 1]);

        const int fwev = static_cast<int>(std::lround(2.0 * FV / (2.0 * npq) + 1.0));
        if (fwev <= 1) geometry_bug("first vertical endpoint degenerate");
        const int lcw = FV - static_cast<int>(std::floor(Mv)) +
                        static_cast<int>(std::ceil(fwev / 4.0));
        const int lw = FV - static_cast<int>(std::floor(Mv));
        if (lcw > FV || lw < 1) geometry_bug("wedge length out of range");

        // Corner-window projective constants, shared by both corner wedges.
        const double edge_v = 2.0 * FV / (fwev - 1.0) - 1.0;
        const double edge_h_first = 2.0 * FH / (e[0] - 1.0) - 1.0;
        const double edge_h_last = 2.0 * FH / (e[npq - 1] - 1.0) - 1.0;
        const double C2_left = 1.0 / (1.0 / edge_h_first + 1.0 / edge_v);
        const double C1_left = C2_left / edge_v;
        const double C2_right = -1.0 / (edge_h_last + 1.0 / edge_v);
        const double C1_right = -C2_right * edge_h_last;

        for (int l = 1; l <= npq; ++l) {
            const bool corner_left = (l == 1);
            const bool corner_right = (l == npq);
            const int len = (corner_left || corner_right) ? lcw : lw;
            int ww;
            double slope, anchor;
            if (corner_left) {
                ww = e[0] + e[1] - 1;
                slope = (FH + 1.0 - e[0]) / FV;
                anchor = 2.0 - e[0];
            } else if (corner_right) {
                ww = 4 * FH + 3 - e[npq - 1] - e[npq - 2];
                slope = (FH + 1.0 - e[npq - 1]) / FV;
                anchor = e[npq - 2];
            } else {
                ww = e[l] - e[l - 2] + 1;
                slope = (FH + 1.0 - e[l - 1]) / FV;
                anchor = e[l - 2];
            }
            const int first_row = FV + 2 - (len + 2) / 2 +
                                  ((len + 1) % 2) * ((q == 2 || q == 3) ? 1 : 0);
            const int first_col = FH + 2 - (ww + 2) / 2 +
                                  ((ww + 1) % 2) * ((q == 3 || q == 4) ? 1 : 0);

            WedgePlan wp;
            wp.rows = len;
            wp.cols = ww;
            wp.entries.reserve(static_cast<size_t>(len) * ww);
            for (int row = 1; row <= len; ++row) {
                const long left_line = std::lround(anchor + slope * (row - 1));
                const int new_row = 1 + imod(row - first_row, len);
                for (int t = 0; t < ww; ++t) {
                    const long col = left_line + imod(t - (left_line - first_col), ww);
                    if (corner_left && col < 1) continue;          // outside the plane: zero
                    if (corner_right && col > 2 * FH + 1) continue;
                    if (col < 1 || col > 2 * FH + 1) geometry_bug("wedge column out of range");
                    const int XX = static_cast<int>(col);
                    const int YY = row;
                    const double ydist = FV + 1.0 - YY;

                    double win;
                    if (corner_left) {
                        double slope_r = (FH + 1.0 - mid[0]) / FV;
                        double mid_r = mid[0] + slope_r * (YY - 1);
                        double coord_right = 0.5 + FV / static_cast<double>(e[1] - e[0]) *
                                                       (XX - mid_r) / ydist;
                        double XXn = XX;
                        if ((XX - 1.0) / FH + (YY - 1.0) / FV == 2.0) XXn = XX + 1.0;
                        double xn = (XXn - 1.0) / FH, yn = (YY - 1.0) / FV;
                        double coord_corner = C1_left + C2_left * (xn - yn) / (2.0 - (xn + yn));
                        win = meyer_wl(coord_corner) * meyer_wr(coord_right);
                    } else if (corner_right) {
                        double slope_l = (FH + 1.0 - mid[npq - 2]) / FV;
                        double mid_l = mid[npq - 2] + slope_l * (YY - 1);
                        double coord_left = 0.5 + FV / static_cast<double>(e[npq - 1] - e[npq - 2]) *
                                                      (XX - mid_l) / ydist;
                        double XXn = XX;
                        if ((XX - 1.0) / FH == (YY - 1.0) / FV) XXn = XX - 1.0;
                        double xn = (XXn - 1.0) / FH, yn = (YY - 1.0) / FV;
                        double coord_corner = C1_right + C2_right * (2.0 - (xn + yn)) / (xn - yn);
                        win = meyer_wl(coord_left) * meyer_wr(coord_corner);
                    } else {
                        double slope_l = (FH + 1.0 - mid[l - 2]) / FV;
                        double mid_l = mid[l - 2] + slope_l * (YY - 1);
                        double coord_left = 0.5 + FV / static_cast<double>(e[l - 1] - e[l - 2]) *
                                                      (XX - mid_l) / ydist;
                        double slope_r = (FH + 1.0 - mid[l - 1]) / FV;
                        double mid_r = mid[l - 1] + slope_r * (YY - 1);
                        double coord_right = 0.5 + FV / static_cast<double>(e[l] - e[l - 1]) *
                                                       (XX - mid_r) / ydist;
                        win = meyer_wl(coord_left) * meyer_wr(coord_right);
                    }

                    double w = cur.amp_at(row - 1, XX - 1) * win;
                    if (!std::isfinite(w)) geometry_bug("non-finite wedge weight");
                    if (w == 0.0) continue;

                    // Rectangle cell after undoing the quadrant rotation.
                    int ri = new_row - 1, rj = t, rr = len, rc = ww;
                    rotate_cw_k(ri, rj, rr, rc, q - 1);
                    wp.entries.push_back(
                        {static_cast<uint32_t>(ri * rc + rj),
                         static_cast<uint32_t>(cur.plane_at(row - 1, XX - 1)), w});
                }
            }
            // Final dims after rotation.
            int dr = len, dc = ww;
            if (q % 2 == 0) std::swap(dr, dc);
            wp.rows = dr;
            wp.cols = dc;
            out[static_cast<size_t>(q - 1) * npq + (l - 1)] = std::move(wp);
        }
        if (q < 4) cur = rotate_ccw(cur);
    }
}

inline std::shared_ptr<TransformPlan> build_plan(int width, int height) {
    const int N1 = height, N2 = width; // rows, cols
    const int J = curvelet_scale_count(width, height);
    std::vector<int> nang = curvelet_orientation_counts(width, height);

    auto plan = std::make_shared<TransformPlan>();
    plan->width = width;
    plan->height = height;
    plan->n_scales = J;
    plan->wedges.resize(J);

    double M1 = N1 / 3.0, M2 = N2 / 3.0;

    // Finest scale: wavelet ring over the whole plane outside the low-pass
    // block, high-pass taper inside it.
    M1 /= 2;
    M2 /= 2;
    std::vector<double> lp1 = lowpass_profile(M1);
    std::vector<double> lp2 = lowpass_profile(M2);
    const int R0 = static_cast<int>(std::floor(2 * M1));
    const int C0 = static_cast<int>(std::floor(2 * M2));
    if (static_cast<int>(lp1.size()) != 2 * R0 + 1 || static_cast<int>(lp2.size()) != 2 * C0 + 1)
        geometry_bug("low-pass profile length mismatch");
    const int r0 = N1 / 2 - R0, c0 = N2 / 2 - C0; // top-left of central block (DC at N/2)
    if (r0 < 0 || c0 < 0 || r0 + 2 * R0 >= N1 || c0 + 2 * C0 >= N2)
        geometry_bug("low-pass block exceeds plane");

    {
        WedgePlan wave;
        wave.rows = N1;
        wave.cols = N2;
        wave.entries.reserve(static_cast<size_t>(N1) * N2);
        for (int r = 0; r < N1; ++r)
            for (int c = 0; c < N2; ++c) {
                double w = 1.0;
                int br = r - r0, bc = c - c0;
                if (br >= 0 && br <= 2 * R0 && bc >= 0 && bc <= 2 * C0) {
                    double lp = lp1[br] * lp2[bc];
                    w = std::sqrt(std::max(0.0, 1.0 - lp * lp));
                }
                if (w == 0.0) continue;
                uint32_t idx = static_cast<uint32_t>(r) * N2 + c;
                wave.entries.push_back({idx, idx, w});
            }
        plan->wedges[J - 1].push_back(std::move(wave));
    }

    BlockMaps block;
    block.rows = 2 * R0 + 1;
    block.cols = 2 * C0 + 1;
    block.plane.resize(static_cast<size_t>(block.rows) * block.cols);
    block.amp.resize(block.plane.size());
    for (int i = 0; i <= 2 * R0; ++i)
        for (int k = 0; k <= 2 * C0; ++k) {
            block.plane[static_cast<size_t>(i) * block.cols + k] =
                static_cast<int64_t>(r0 + i) * N2 + (c0 + k);
            block.amp[static_cast<size_t>(i) * block.cols + k] = lp1[i] * lp2[k];
        }

    // Directional scales, finest to coarsest.
    for (int j = J - 2; j >= 1; --j) {
        M1 /= 2;
        M2 /= 2;
        lp1 = lowpass_profile(M1);
        lp2 = lowpass_profile(M2);
        const int Rin = static_cast<int>(std::floor(2 * M1));
        const int Cin = static_cast<int>(std::floor(2 * M2));
        const int FV = static_cast<int>(std::floor(4 * M1));
        const int FH = static_cast<int>(std::floor(4 * M2));
        if (block.rows != 2 * FV + 1 || block.cols != 2 * FH + 1)
            geometry_bug("annulus block dims drifted");
        const int ir0 = FV - Rin, ic0 = FH - Cin;

        BlockMaps xhi = block;
        BlockMaps next;
        next.rows = 2 * Rin + 1;
        next.cols = 2 * Cin + 1;
        next.plane.resize(static_cast<size_t>(next.rows) * next.cols);
        next.amp.resize(next.plane.size());
        for (int i = 0; i <= 2 * Rin; ++i)
            for (int k = 0; k <= 2 * Cin; ++k) {
                double lp = lp1[i] * lp2[k];
                size_t bidx = static_cast<size_t>(ir0 + i) * block.cols + (ic0 + k);
                xhi.amp[bidx] = block.amp[bidx] * std::sqrt(std::max(0.0, 1.0 - lp * lp));
                size_t nidx = static_cast<size_t>(i) * next.cols + k;
                next.plane[nidx] = block.plane[bidx];
                next.amp[nidx] = block.amp[bidx] * lp;
            }

        carve_scale(plan->wedges[j], xhi, M1, M2, nang[j]);
        block = std::move(next);
    }

    // Coarsest scale: the remaining low-pass block verbatim.
    {
        WedgePlan coarse;
        coarse.rows = block.rows;
        coarse.cols = block.cols;
        coarse.entries.reserve(block.plane.size());
        for (int i = 0; i < block.rows; ++i)
            for (int k = 0; k < block.cols; ++k) {
                double w = block.amp_at(i, k);
                if (w == 0.0) continue;
                coarse.entries.push_back({static_cast<uint32_t>(i * block.cols + k),
                                          static_cast<uint32_t>(block.plane_at(i, k)), w});
            }
        plan->wedges[0].push_back(std::move(coarse));
    }

    // Measure the frame gain and renormalize to an exactly tight frame.
    std::vector<double> gain(static_cast<size_t>(N1) * N2, 0.0);
    for (auto& scale : plan->wedges)
        for (auto& wp : scale)
            for (auto& pe : wp.entries) gain[pe.plane_index] += pe.weight * pe.weight;
    double gmin = gain[0], gmax = gain[0];
    for (double g : gain) {
        gmin = std::min(gmin, g);
        gmax = std::max(gmax, g);
    }
    plan->raw_gain_min = gmin;
    plan->raw_gain_max = gmax;
    if (!(gmin > 0.25) || !(gmax < 4.0))
        geometry_bug("frame gain far from 1; wedge geometry is broken");
    std::vector<double> inv_sqrt(gain.size());
    for (size_t i = 0; i < gain.size(); ++i) inv_sqrt[i] = 1.0 / std::sqrt(gain[i]);
    for (auto& scale : plan->wedges)
        for (auto& wp : scale)
            for (auto& pe : wp.entries) pe.weight *= inv_sqrt[pe.plane_index];
    return plan;
}

inline const TransformPlan& get_plan(int width, int height) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<TransformPlan>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(width, height);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_plan(width, height)).first;
    return *it->second;
}

} // namespace curvedetail

/// Frame gain extrema measured before renormalization; both sit near 1 when
/// the wedge geometry tiles the plane correctly.
struct CurveletFrameStats {
    double raw_gain_min;
    double raw_gain_max;
};

inline CurveletFrameStats curvelet_frame_stats(int width, int height) {
    const curvedetail::TransformPlan& plan = curvedetail::get_plan(width, height);
    return {plan.raw_gain_min, plan.raw_gain_max};
}

/// Forward transform. The image enters as the real part of a complex plane;
/// coefficients come back as complex rectangles per (scale, orientation).
inline CurveletCoeffs curvelet_forward(const BandImage& band) {
    band.validate();
    const curvedetail::TransformPlan& plan = curvedetail::get_plan(band.width, band.height);
    const int N1 = band.height, N2 = band.width;

    std::vector<cplx> spatial(band.size());
    for (size_t i = 0; i < band.size(); ++i) spatial[i] = cplx(band.pixels[i], 0.0);
    std::vector<cplx> spectrum(band.size());
    unitary_fft2(N1, N2, spatial.data(), spectrum.data());

    CurveletCoeffs out;
    out.width = band.width;
    out.height = band.height;
    out.dx_um = band.dx_um;
    out.dy_um = band.dy_um;
    out.wavenumber_cm1 = band.wavenumber_cm1;
    out.scales.resize(plan.wedges.size());
    for (size_t j = 0; j < plan.wedges.size(); ++j) {
        out.scales[j].resize(plan.wedges[j].size());
        for (size_t a = 0; a < plan.wedges[j].size(); ++a) {
            const curvedetail::WedgePlan& wp = plan.wedges[j][a];
            CurveletWedge& wedge = out.scales[j][a];
            wedge.rows = wp.rows;
            wedge.cols = wp.cols;
            std::vector<cplx> rect(static_cast<size_t>(wp.rows) * wp.cols, cplx(0.0, 0.0));
            for (const curvedetail::PlanEntry& pe : wp.entries)
                rect[pe.rect_index] += spectrum[pe.plane_index] * pe.weight;
            wedge.data.resize(rect.size());
            unitary_ifft2(wp.rows, wp.cols, rect.data(), wedge.data.data());
        }
    }
    return out;
}

/// Inverse transform (exact, since the renormalized frame is tight: the
/// adjoint of the forward map is its inverse).
inline BandImage curvelet_inverse(const CurveletCoeffs& coeffs) {
    detail::require(coeffs.width > 0 && coeffs.height > 0,
                    "curvelet_inverse: missing original image dimensions");
    const curvedetail::TransformPlan& plan = curvedetail::get_plan(coeffs.width, coeffs.height);
    detail::require(coeffs.scales.size() == plan.wedges.size(),
                    "curvelet_inverse: wrong scale count for these dimensions");
    for (size_t j = 0; j < plan.wedges.size(); ++j) {
        detail::require(coeffs.scales[j].size() == plan.wedges[j].size(),
                        "curvelet_inverse: wrong orientation count at scale " + std::to_string(j));
        for (size_t a = 0; a < plan.wedges[j].size(); ++a) {
            const CurveletWedge& w = coeffs.scales[j][a];
            const curvedetail::WedgePlan& wp = plan.wedges[j][a];
            detail::require(w.rows == wp.rows && w.cols == wp.cols &&
                                w.data.size() == static_cast<size_t>(wp.rows) * wp.cols,
                            "curvelet_inverse: wedge dimensions do not match the pyramid for "
                            "these image dimensions");
        }
    }

    const int N1 = coeffs.height, N2 = coeffs.width;
    std::vector<cplx> spectrum(static_cast<size_t>(N1) * N2, cplx(0.0, 0.0));
    std::vector<cplx> rect;
    for (size_t j = 0; j < plan.wedges.size(); ++j)
        for (size_t a = 0; a < plan.wedges[j].size(); ++a) {
            const curvedetail::WedgePlan& wp = plan.wedges[j][a];
            const CurveletWedge& w = coeffs.scales[j][a];
            rect.assign(w.data.size(), cplx(0.0, 0.0));
            unitary_fft2(wp.rows, wp.cols, w.data.data(), rect.data());
            for (const curvedetail::PlanEntry& pe : wp.entries)
                spectrum[pe.plane_index] += rect[pe.rect_index] * pe.weight;
        }

    std::vector<cplx> spatial(spectrum.size());
    unitary_ifft2(N1, N2, spectrum.data(), spatial.data());
    BandImage out = BandImage::make(coeffs.width, coeffs.height, coeffs.dx_um, coeffs.dy_um,
                                    coeffs.wavenumber_cm1);
    for (size_t i = 0; i < spatial.size(); ++i)
        out.pixels[i] = static_cast<float>(spatial[i].real());
    return out;
}

} // namespace hsfuse

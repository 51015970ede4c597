#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "hsfuse/core/errors.hpp"

namespace hsfuse {

using cplx = std::complex<double>;

/// Process-wide FFTW plan cache. Plans are created with FFTW_ESTIMATE (fully
/// deterministic output, no timing-dependent algorithm choice) and
/// FFTW_UNALIGNED (usable with any buffer), guarded by a mutex because the
/// FFTW planner is not thread-safe. Execution is re-entrant.
class FftEngine {
public:
    static FftEngine& instance() {
        static FftEngine engine;
        return engine;
    }

    /// Out-of-place 2-D c2c transform, unnormalized (FFTW convention).
    /// forward: exp(-i...), backward: exp(+i...). `in` is not modified.
    void dft2(int rows, int cols, const cplx* in, cplx* out, bool forward) {
        detail::require(rows > 0 && cols > 0, "dft2: dimensions must be positive");
        detail::require(static_cast<const void*>(in) != static_cast<void*>(out),
                        "dft2: in-place transform not supported");
        fftw_plan plan = get_plan(rows, cols, forward);
        fftw_execute_dft(plan,
                         reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;

private:
    FftEngine() = default;

    fftw_plan get_plan(int rows, int cols, bool forward) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(rows, cols, forward);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        size_t n = static_cast<size_t>(rows) * cols;
        fftw_complex* a = fftw_alloc_complex(n);
        fftw_complex* b = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_2d(rows, cols, a, b,
                                          forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(a);
        fftw_free(b);
        if (!plan) throw std::runtime_error("dft2: FFTW plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, bool>, fftw_plan> plans_;
};

namespace fftdetail {

/// out[i] = in[(i + shift_r) % rows on rows, ...] for both axes.
inline void cyclic_shift2(int rows, int cols, int shift_r, int shift_c, const cplx* in,
                          cplx* out) {
    for (int r = 0; r < rows; ++r) {
        int sr = (r + shift_r) % rows;
        const cplx* src = in + static_cast<size_t>(sr) * cols;
        cplx* dst = out + static_cast<size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) dst[c] = src[(c + shift_c) % cols];
    }
}

inline void fftshift2(int rows, int cols, const cplx* in, cplx* out) {
    cyclic_shift2(rows, cols, (rows + 1) / 2, (cols + 1) / 2, in, out);
}

inline void ifftshift2(int rows, int cols, const cplx* in, cplx* out) {
    cyclic_shift2(rows, cols, rows / 2, cols / 2, in, out);
}

} // namespace fftdetail

/// Centered unitary 2-D FFT: spectrum = fftshift(FFT(ifftshift(x))) / sqrt(n).
/// The spatial and frequency origins both sit at (floor(rows/2), floor(cols/2)).
inline void unitary_fft2(int rows, int cols, const cplx* in, cplx* out) {
    size_t n = static_cast<size_t>(rows) * cols;
    std::vector<cplx> tmp(n), freq(n);
    fftdetail::ifftshift2(rows, cols, in, tmp.data());
    FftEngine::instance().dft2(rows, cols, tmp.data(), freq.data(), true);
    fftdetail::fftshift2(rows, cols, freq.data(), out);
    double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (size_t i = 0; i < n; ++i) out[i] *= s;
}

/// Inverse of unitary_fft2.
inline void unitary_ifft2(int rows, int cols, const cplx* in, cplx* out) {
    size_t n = static_cast<size_t>(rows) * cols;
    std::vector<cplx> tmp(n), spatial(n);
    fftdetail::ifftshift2(rows, cols, in, tmp.data());
    FftEngine::instance().dft2(rows, cols, tmp.data(), spatial.data(), false);
    fftdetail::fftshift2(rows, cols, spatial.data(), out);
    double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (size_t i = 0; i < n; ++i) out[i] *= s;
}

} // namespace hsfuse

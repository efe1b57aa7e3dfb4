#pragma once

#include <cstddef>
#include <string>

namespace risidd::simd {

// Elementwise double-precision kernels on the simulator's hot paths: the
// belief-propagation tanh/atanh message passes and the soft-symbol / LLR
// transforms. Each kernel has a scalar reference implementation and an AVX2
// variant; the active variant is chosen at runtime from CPU capabilities and
// can be overridden for testing.

enum class Backend {
    auto_detect,
    scalar,
    avx2,
};

/// Backend currently wired into the dispatch table.
Backend active_backend();

/// Override backend selection (tests, benchmarking). Throws ContractError if
/// the requested backend is not supported on this machine. auto_detect
/// restores CPU-based selection.
void force_backend(Backend b);

bool avx2_available();

std::string backend_name(Backend b);

/// dst[i] = tanh(src[i] / 2)
void tanh_half(const double* src, double* dst, std::size_t n);

/// dst[i] = 2 * atanh(t) with t = src[i] clamped to |t| <= 1 - 1e-15.
/// The clamp keeps the result finite when upstream rounding saturates a
/// product of tanh values to exactly +-1.
void atanh2(const double* src, double* dst, std::size_t n);

/// x[i] = clamp(x[i], -limit, +limit)
void clamp_abs(double* x, std::size_t n, double limit);

namespace detail {
// Scalar references, exposed so the equivalence tests can call them directly.
void tanh_half_scalar(const double* src, double* dst, std::size_t n);
void atanh2_scalar(const double* src, double* dst, std::size_t n);
void clamp_abs_scalar(double* x, std::size_t n, double limit);
#if defined(__x86_64__) || defined(_M_X64)
void tanh_half_avx2(const double* src, double* dst, std::size_t n);
void atanh2_avx2(const double* src, double* dst, std::size_t n);
void clamp_abs_avx2(double* x, std::size_t n, double limit);
#endif
}  // namespace detail

}  // namespace risidd::simd

#include "risidd/simd/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>

#include "risidd/types.hpp"

namespace risidd::simd {

namespace detail {

void tanh_half_scalar(const double* src, double* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = std::tanh(0.5 * src[i]);
}

void atanh2_scalar(const double* src, double* dst, std::size_t n) {
    constexpr double lim = 1.0 - 1e-15;
    for (std::size_t i = 0; i < n; ++i) {
        double t = std::clamp(src[i], -lim, lim);
        dst[i] = std::log((1.0 + t) / (1.0 - t));
    }
}

void clamp_abs_scalar(double* x, std::size_t n, double limit) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], -limit, limit);
}

}  // namespace detail

namespace {

struct Table {
    void (*tanh_half)(const double*, double*, std::size_t);
    void (*atanh2)(const double*, double*, std::size_t);
    void (*clamp_abs)(double*, std::size_t, double);
};

constexpr Table kScalar{detail::tanh_half_scalar, detail::atanh2_scalar,
                        detail::clamp_abs_scalar};

#if (defined(__x86_64__) || defined(_M_X64)) && !defined(RISIDD_NO_AVX2_TU)
#define RISIDD_HAVE_AVX2_TU 1
#endif

#ifdef RISIDD_HAVE_AVX2_TU
constexpr Table kAvx2{detail::tanh_half_avx2, detail::atanh2_avx2,
                      detail::clamp_abs_avx2};
#endif

bool detect_avx2() {
#ifdef RISIDD_HAVE_AVX2_TU
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend pick_auto() {
    // Environment override so runs can be pinned without recompiling.
    if (const char* env = std::getenv("RISIDD_KERNELS")) {
        std::string v{env};
        if (v == "scalar") return Backend::scalar;
        if (v == "avx2" && detect_avx2()) return Backend::avx2;
    }
    return detect_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<const Table*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::auto_detect};

const Table* table_for(Backend b) {
#ifdef RISIDD_HAVE_AVX2_TU
    if (b == Backend::avx2) return &kAvx2;
#endif
    return &kScalar;
}

const Table* table() {
    const Table* t = g_table.load(std::memory_order_acquire);
    if (t) return t;
    Backend b = pick_auto();
    g_backend.store(b, std::memory_order_release);
    t = table_for(b);
    g_table.store(t, std::memory_order_release);
    return t;
}

}  // namespace

Backend active_backend() {
    table();
    return g_backend.load(std::memory_order_acquire);
}

void force_backend(Backend b) {
    if (b == Backend::auto_detect) {
        Backend eff = pick_auto();
        g_backend.store(eff, std::memory_order_release);
        g_table.store(table_for(eff), std::memory_order_release);
        return;
    }
    if (b == Backend::avx2 && !detect_avx2())
        throw ContractError("kernels: AVX2 backend requested but not supported on this CPU");
    g_backend.store(b, std::memory_order_release);
    g_table.store(table_for(b), std::memory_order_release);
}

bool avx2_available() { return detect_avx2(); }

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::auto_detect: return "auto";
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "?";
}

void tanh_half(const double* src, double* dst, std::size_t n) {
    table()->tanh_half(src, dst, n);
}

void atanh2(const double* src, double* dst, std::size_t n) {
    table()->atanh2(src, dst, n);
}

void clamp_abs(double* x, std::size_t n, double limit) {
    table()->clamp_abs(x, n, limit);
}

}  // namespace risidd::simd

// AVX2+FMA variants of the elementwise kernels. exp/log cores follow the
// classic Cephes rational approximations (~1 ulp over the ranges used here).
// This translation unit is the only one compiled with -mavx2 -mfma; callers
// go through the runtime dispatch table.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "risidd/simd/kernels.hpp"

namespace risidd::simd::detail {

namespace {

inline __m256d poly1(__m256d x, double c1, double c0) {
    return _mm256_fmadd_pd(_mm256_set1_pd(c1), x, _mm256_set1_pd(c0));
}

inline __m256d fma(__m256d a, __m256d x, double c) {
    return _mm256_fmadd_pd(a, x, _mm256_set1_pd(c));
}

// e^x for x in [-708, 709]; inputs are pre-clamped by the callers.
inline __m256d exp_pd(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);

    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, c1, x);
    r = _mm256_fnmadd_pd(n, c2, r);

    __m256d z = _mm256_mul_pd(r, r);
    __m256d p = poly1(z, 1.26177193074810590878e-4, 3.02994407707441961300e-2);
    p = fma(p, z, 9.99999999999999999910e-1);
    __m256d rp = _mm256_mul_pd(r, p);
    __m256d q = poly1(z, 3.00198505138664455042e-6, 2.52448340349684104192e-3);
    q = fma(q, z, 2.27265548208155028766e-1);
    q = fma(q, z, 2.0);
    __m256d e = _mm256_add_pd(
        _mm256_set1_pd(1.0),
        _mm256_div_pd(_mm256_add_pd(rp, rp), _mm256_sub_pd(q, rp)));

    // scale by 2^n through the exponent field
    __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    __m256i bits = _mm256_slli_epi64(
        _mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
}

// ln(x) for positive normal x.
inline __m256d log_pd(__m256d x) {
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d sqrth = _mm256_set1_pd(0.70710678118654752440);
    const __m256d magic = _mm256_set1_pd(0x1.0p52);

    __m256i bits = _mm256_castpd_si256(x);
    __m256i ebits = _mm256_and_si256(_mm256_srli_epi64(bits, 52),
                                     _mm256_set1_epi64x(0x7ff));
    __m256d e = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(ebits, _mm256_castpd_si256(magic))),
        magic);
    e = _mm256_sub_pd(e, _mm256_set1_pd(1022.0));

    __m256i mbits = _mm256_or_si256(
        _mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
        _mm256_castpd_si256(half));
    __m256d m = _mm256_castsi256_pd(mbits);

    __m256d lt = _mm256_cmp_pd(m, sqrth, _CMP_LT_OQ);
    m = _mm256_add_pd(m, _mm256_and_pd(lt, m));
    e = _mm256_sub_pd(e, _mm256_and_pd(lt, one));
    __m256d f = _mm256_sub_pd(m, one);

    __m256d p = poly1(f, 1.01875663804580931796e-4, 4.97494994976747001425e-1);
    p = fma(p, f, 4.70579119878881725854e0);
    p = fma(p, f, 1.44989225341610930846e1);
    p = fma(p, f, 1.79368678507819816313e1);
    p = fma(p, f, 7.70838733755885391666e0);
    __m256d q = poly1(f, 1.0, 1.12873587189167450590e1);
    q = fma(q, f, 4.52279145837532221105e1);
    q = fma(q, f, 8.29875266912776603211e1);
    q = fma(q, f, 7.11544750618563894466e1);
    q = fma(q, f, 2.31251620126765340583e1);

    __m256d z = _mm256_mul_pd(f, f);
    __m256d y = _mm256_mul_pd(_mm256_mul_pd(f, z), _mm256_div_pd(p, q));
    y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
    y = _mm256_fnmadd_pd(half, z, y);
    __m256d r = _mm256_add_pd(f, y);
    return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), r);
}

const __m256d kSignMask = _mm256_set1_pd(-0.0);

}  // namespace

void tanh_half_avx2(const double* src, double* dst, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d cap = _mm256_set1_pd(700.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d x = _mm256_loadu_pd(src + i);
        __m256d ax = _mm256_min_pd(_mm256_andnot_pd(kSignMask, x), cap);
        __m256d ex = exp_pd(ax);
        // tanh(a/2) = (e^a - 1) / (e^a + 1), exact identity
        __m256d t = _mm256_div_pd(_mm256_sub_pd(ex, one), _mm256_add_pd(ex, one));
        t = _mm256_or_pd(t, _mm256_and_pd(kSignMask, x));
        _mm256_storeu_pd(dst + i, t);
    }
    if (i < n) tanh_half_scalar(src + i, dst + i, n - i);
}

void atanh2_avx2(const double* src, double* dst, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d lim = _mm256_set1_pd(1.0 - 1e-15);
    const __m256d neglim = _mm256_set1_pd(-(1.0 - 1e-15));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_loadu_pd(src + i);
        t = _mm256_min_pd(lim, _mm256_max_pd(neglim, t));
        __m256d u = _mm256_div_pd(_mm256_add_pd(one, t), _mm256_sub_pd(one, t));
        _mm256_storeu_pd(dst + i, log_pd(u));
    }
    if (i < n) atanh2_scalar(src + i, dst + i, n - i);
}

void clamp_abs_avx2(double* x, std::size_t n, double limit) {
    const __m256d lo = _mm256_set1_pd(-limit);
    const __m256d hi = _mm256_set1_pd(limit);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        v = _mm256_min_pd(hi, _mm256_max_pd(lo, v));
        _mm256_storeu_pd(x + i, v);
    }
    if (i < n) clamp_abs_scalar(x + i, n - i, limit);
}

}  // namespace risidd::simd::detail

#endif  // x86_64

// AVX2+FMA variants of the inner-loop kernels. This TU is the only one built
// with -mavx2; callers reach it through the runtime dispatcher.

#include "nsv/simd/kernels.hpp"

#include <immintrin.h>

namespace nsv::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

const __m256d ABS_MASK = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
const __m256d SIGN_MASK = _mm256_castsi256_pd(_mm256_set1_epi64x(0x8000000000000000LL));

} // namespace

void scale(double* out, double a, const double* x, std::size_t n) {
    std::size_t i = 0;
    __m256d va = _mm256_set1_pd(a);
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = a * x[i];
}

void axpby(double* out, double a, const double* x, double b, const double* y, std::size_t n) {
    std::size_t i = 0;
    __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b);
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
        r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), r);
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void axpbypcz(double* out, double a, const double* x, double b, const double* y,
              double c, const double* z, std::size_t n) {
    std::size_t i = 0;
    __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b), vc = _mm256_set1_pd(c);
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_mul_pd(vc, _mm256_loadu_pd(z + i));
        r = _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), r);
        r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), r);
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < n; ++i) out[i] = a * x[i] + b * y[i] + c * z[i];
}

void mul(double* out, const double* x, const double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) out[i] = x[i] * y[i];
}

void prod_axpz(double* out, double a, const double* x, const double* y, const double* z,
               std::size_t n) {
    std::size_t i = 0;
    __m256d va = _mm256_set1_pd(a);
    for (; i + 4 <= n; i += 4) {
        __m256d xy = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, xy, _mm256_loadu_pd(z + i)));
    }
    for (; i < n; ++i) out[i] = a * x[i] * y[i] + z[i];
}

void recip_clamped(double* out, const double* x, double lo, std::size_t n) {
    std::size_t i = 0;
    __m256d vlo = _mm256_set1_pd(lo), one = _mm256_set1_pd(1.0);
    for (; i + 4 <= n; i += 4) {
        __m256d c = _mm256_max_pd(_mm256_loadu_pd(x + i), vlo);
        _mm256_storeu_pd(out + i, _mm256_div_pd(one, c));
    }
    for (; i < n; ++i) out[i] = 1.0 / std::max(x[i], lo);
}

double sum(const double* x, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* x, const double* y, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sum_abs_pow(const double* x, double p, std::size_t n) {
    int ip = static_cast<int>(p);
    if (!(p == static_cast<double>(ip) && ip >= 1 && ip <= 8))
        return scalar::sum_abs_pow(x, p, n);
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_and_pd(_mm256_loadu_pd(x + i), ABS_MASK);
        __m256d t = a;
        for (int k = 1; k < ip; ++k) t = _mm256_mul_pd(t, a);
        acc = _mm256_add_pd(acc, t);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double a = std::fabs(x[i]), t = a;
        for (int k = 1; k < ip; ++k) t *= a;
        s += t;
    }
    return s;
}

double max_abs(const double* x, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4)
        acc = _mm256_max_pd(acc, _mm256_and_pd(_mm256_loadu_pd(x + i), ABS_MASK));
    __m128d lo = _mm_max_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    double m = _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

double min(const double* x, std::size_t n) {
    std::size_t i = 0;
    double m = x[0];
    if (n >= 4) {
        __m256d acc = _mm256_loadu_pd(x);
        for (i = 4; i + 4 <= n; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(x + i));
        __m128d lo = _mm_min_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
        m = _mm_cvtsd_f64(_mm_min_sd(lo, _mm_unpackhi_pd(lo, lo)));
    }
    for (; i < n; ++i) m = std::min(m, x[i]);
    return m;
}

void cmul_real(double* z, const double* m, std::size_t nc) {
    std::size_t i = 0;
    for (; i + 2 <= nc; i += 2) {
        __m128d m2 = _mm_loadu_pd(m + i);
        __m256d mm = _mm256_permute4x64_pd(_mm256_castpd128_pd256(m2), 0x50);  // m0 m0 m1 m1
        _mm256_storeu_pd(z + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(z + 2 * i), mm));
    }
    for (; i < nc; ++i) {
        z[2 * i] *= m[i];
        z[2 * i + 1] *= m[i];
    }
}

void muscl_flux(double* flux, const double* rm, const double* r0, const double* rp,
                const double* rq, const double* uf, std::size_t n) {
    std::size_t i = 0;
    const __m256d half = _mm256_set1_pd(0.5), zero = _mm256_setzero_pd();
    auto minmodv = [&](__m256d a, __m256d b) {
        __m256d same = _mm256_cmp_pd(_mm256_mul_pd(a, b), zero, _CMP_GT_OQ);
        __m256d mag = _mm256_min_pd(_mm256_and_pd(a, ABS_MASK), _mm256_and_pd(b, ABS_MASK));
        __m256d signed_m = _mm256_or_pd(mag, _mm256_and_pd(a, SIGN_MASK));
        return _mm256_and_pd(signed_m, same);
    };
    for (; i + 4 <= n; i += 4) {
        __m256d vm = _mm256_loadu_pd(rm + i), v0 = _mm256_loadu_pd(r0 + i);
        __m256d vp = _mm256_loadu_pd(rp + i), vq = _mm256_loadu_pd(rq + i);
        __m256d d0 = _mm256_sub_pd(v0, vm), d1 = _mm256_sub_pd(vp, v0), d2 = _mm256_sub_pd(vq, vp);
        __m256d qL = _mm256_fmadd_pd(half, minmodv(d0, d1), v0);
        __m256d qR = _mm256_fnmadd_pd(half, minmodv(d1, d2), vp);
        __m256d u = _mm256_loadu_pd(uf + i);
        __m256d pos = _mm256_cmp_pd(u, zero, _CMP_GE_OQ);
        _mm256_storeu_pd(flux + i, _mm256_mul_pd(u, _mm256_blendv_pd(qR, qL, pos)));
    }
    for (; i < n; ++i) {
        double qL = r0[i] + 0.5 * scalar::minmod(r0[i] - rm[i], rp[i] - r0[i]);
        double qR = rp[i] - 0.5 * scalar::minmod(rp[i] - r0[i], rq[i] - rp[i]);
        flux[i] = uf[i] >= 0.0 ? uf[i] * qL : uf[i] * qR;
    }
}

} // namespace nsv::simd::avx2

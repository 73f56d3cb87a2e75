#pragma once
// Data-parallel inner-loop kernels: scalar reference implementations plus
// AVX2 variants selected at runtime. Scalar is the semantic reference; the
// AVX2 path must agree to reduction-reordering tolerance (see equivalence
// tests). Field code calls the dispatching wrappers only.

#include <cstddef>
#include <cmath>
#include <algorithm>

namespace nsv::simd {

enum class Backend { scalar = 0, avx2 = 1 };

// Selection: NSV_SIMD=scalar|avx2|auto env override, else CPU detection.
Backend active_backend();
const char* backend_name();
void force_backend(Backend b);   // test hook
bool avx2_compiled();
bool avx2_supported();

namespace scalar {

inline void scale(double* out, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

inline void axpby(double* out, double a, const double* x, double b, const double* y,
                  std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

inline void axpbypcz(double* out, double a, const double* x, double b, const double* y,
                     double c, const double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i] + c * z[i];
}

inline void mul(double* out, const double* x, const double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

// out = a*x*y + z
inline void prod_axpz(double* out, double a, const double* x, const double* y,
                      const double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] * y[i] + z[i];
}

inline void recip_clamped(double* out, const double* x, double lo, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / std::max(x[i], lo);
}

inline double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

inline double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

inline double sum_abs_pow(const double* x, double p, std::size_t n) {
    double s = 0.0;
    int ip = static_cast<int>(p);
    if (p == static_cast<double>(ip) && ip >= 1 && ip <= 8) {
        for (std::size_t i = 0; i < n; ++i) {
            double a = std::fabs(x[i]), t = a;
            for (int k = 1; k < ip; ++k) t *= a;
            s += t;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) s += std::pow(std::fabs(x[i]), p);
    }
    return s;
}

inline double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

inline double min(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = std::min(m, x[i]);
    return m;
}

// Interleaved complex array scaled in place by a real multiplier per element.
inline void cmul_real(double* z, const double* m, std::size_t nc) {
    for (std::size_t i = 0; i < nc; ++i) {
        z[2 * i]     *= m[i];
        z[2 * i + 1] *= m[i];
    }
}

inline double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::fabs(a) < std::fabs(b) ? a : b;
}

// Second-order slope-limited upwind face flux. Inputs are the caller-shifted
// views of the transported field around face i+1/2 (rm: cell i-1, r0: cell i,
// rp: cell i+1, rq: cell i+2) and the face-normal velocity uf.
inline void muscl_flux(double* flux, const double* rm, const double* r0, const double* rp,
                       const double* rq, const double* uf, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double qL = r0[i] + 0.5 * minmod(r0[i] - rm[i], rp[i] - r0[i]);
        double qR = rp[i] - 0.5 * minmod(rp[i] - r0[i], rq[i] - rp[i]);
        flux[i] = uf[i] >= 0.0 ? uf[i] * qL : uf[i] * qR;
    }
}

} // namespace scalar

#ifdef NSV_HAVE_AVX2_TU
namespace avx2 {
void scale(double* out, double a, const double* x, std::size_t n);
void axpby(double* out, double a, const double* x, double b, const double* y, std::size_t n);
void axpbypcz(double* out, double a, const double* x, double b, const double* y,
              double c, const double* z, std::size_t n);
void mul(double* out, const double* x, const double* y, std::size_t n);
void prod_axpz(double* out, double a, const double* x, const double* y, const double* z,
               std::size_t n);
void recip_clamped(double* out, const double* x, double lo, std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sum_abs_pow(const double* x, double p, std::size_t n);
double max_abs(const double* x, std::size_t n);
double min(const double* x, std::size_t n);
void cmul_real(double* z, const double* m, std::size_t nc);
void muscl_flux(double* flux, const double* rm, const double* r0, const double* rp,
                const double* rq, const double* uf, std::size_t n);
} // namespace avx2
#endif

#ifdef NSV_HAVE_AVX2_TU
#define NSV_DISPATCH(fn, ...) \
    do { if (active_backend() == Backend::avx2) { avx2::fn(__VA_ARGS__); return; } \
         scalar::fn(__VA_ARGS__); } while (0)
#define NSV_DISPATCH_R(fn, ...) \
    return active_backend() == Backend::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define NSV_DISPATCH(fn, ...) do { scalar::fn(__VA_ARGS__); } while (0)
#define NSV_DISPATCH_R(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

inline void scale(double* out, double a, const double* x, std::size_t n) {
    NSV_DISPATCH(scale, out, a, x, n);
}
inline void axpby(double* out, double a, const double* x, double b, const double* y,
                  std::size_t n) {
    NSV_DISPATCH(axpby, out, a, x, b, y, n);
}
inline void axpbypcz(double* out, double a, const double* x, double b, const double* y,
                     double c, const double* z, std::size_t n) {
    NSV_DISPATCH(axpbypcz, out, a, x, b, y, c, z, n);
}
inline void mul(double* out, const double* x, const double* y, std::size_t n) {
    NSV_DISPATCH(mul, out, x, y, n);
}
inline void prod_axpz(double* out, double a, const double* x, const double* y,
                      const double* z, std::size_t n) {
    NSV_DISPATCH(prod_axpz, out, a, x, y, z, n);
}
inline void recip_clamped(double* out, const double* x, double lo, std::size_t n) {
    NSV_DISPATCH(recip_clamped, out, x, lo, n);
}
inline double sum(const double* x, std::size_t n) { NSV_DISPATCH_R(sum, x, n); }
inline double dot(const double* x, const double* y, std::size_t n) { NSV_DISPATCH_R(dot, x, y, n); }
inline double sum_abs_pow(const double* x, double p, std::size_t n) {
    NSV_DISPATCH_R(sum_abs_pow, x, p, n);
}
inline double max_abs(const double* x, std::size_t n) { NSV_DISPATCH_R(max_abs, x, n); }
inline double min(const double* x, std::size_t n) { NSV_DISPATCH_R(min, x, n); }
inline void cmul_real(double* z, const double* m, std::size_t nc) {
    NSV_DISPATCH(cmul_real, z, m, nc);
}
inline void muscl_flux(double* flux, const double* rm, const double* r0, const double* rp,
                       const double* rq, const double* uf, std::size_t n) {
    NSV_DISPATCH(muscl_flux, flux, rm, r0, rp, rq, uf, n);
}

#undef NSV_DISPATCH
#undef NSV_DISPATCH_R

} // namespace nsv::simd

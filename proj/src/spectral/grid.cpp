#include "nsv/spectral/ops.hpp"
#include "nsv/simd/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace nsv::spectral {

double mean(const ScalarField& f) {
    return simd::sum(f.data(), f.size()) / static_cast<double>(f.size());
}

double mass(const ScalarField& f) {
    const double h = f.grid().h();
    return h * h * simd::sum(f.data(), f.size());
}

double norm_l2(const ScalarField& f) {
    const double h = f.grid().h();
    return std::sqrt(h * h * simd::dot(f.data(), f.data(), f.size()));
}

double norm_lp(const ScalarField& f, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("norm_lp: p must be >= 1");
    const double h = f.grid().h();
    return std::pow(h * h * simd::sum_abs_pow(f.data(), p, f.size()), 1.0 / p);
}

double norm_linf(const ScalarField& f) {
    return simd::max_abs(f.data(), f.size());
}

double min_value(const ScalarField& f) { return simd::min(f.data(), f.size()); }

double max_value(const ScalarField& f) {
    // max(f) = -min(-f); cheap enough to do directly
    double m = f[0];
    for (std::size_t i = 1; i < f.size(); ++i) m = std::max(m, f[i]);
    return m;
}

} // namespace nsv::spectral

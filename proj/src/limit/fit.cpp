#include "nsv/limit/limit.hpp"

#include "nsv/util/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nsv::limit {

namespace {

double reduce_over(const std::vector<double>& series, const std::vector<std::size_t>& idx,
                   double span, TimeReduce reduce) {
    if (reduce == TimeReduce::sup) {
        double m = 0.0;
        for (std::size_t k : idx) m = std::max(m, series[k]);
        return m;
    }
    double s = 0.0;
    for (std::size_t k : idx) s += series[k] * series[k];
    return std::sqrt(span * s / static_cast<double>(idx.size()));
}

// least squares slope of log(metric) on log(nu); points with metric <= 0 are
// dropped. Returns false when fewer than two points survive.
bool lsq_loglog(const std::vector<double>& nus, const std::vector<double>& metric,
                double& slope, double& intercept, std::vector<int>* excluded) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (std::size_t i = 0; i < nus.size(); ++i) {
        if (!(metric[i] > 0.0) || !std::isfinite(metric[i])) {
            if (excluded) excluded->push_back(static_cast<int>(i));
            continue;
        }
        const double x = std::log(nus[i]), y = std::log(metric[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) return false;
    const double denom = m * sxx - sx * sx;
    if (!(std::fabs(denom) > 0.0)) return false;
    slope = (m * sxy - sx * sy) / denom;
    intercept = (sy - slope * sx) / m;
    return true;
}

} // namespace

ScalingFit fit_scaling(const std::vector<double>& nus,
                       const std::vector<std::vector<double>>& series_per_nu,
                       const std::vector<double>& times, TimeReduce reduce,
                       std::uint64_t seed, int nboot) {
    if (series_per_nu.size() != nus.size())
        throw std::invalid_argument("fit: one series per viscosity required");
    const std::size_t nt = times.size();
    if (nt == 0) throw std::invalid_argument("fit: empty time axis");
    for (const auto& s : series_per_nu)
        if (s.size() != nt) throw std::invalid_argument("fit: series/time length mismatch");
    for (std::size_t i = 1; i < nus.size(); ++i)
        if (!(nus[i] > nus[i - 1]))
            throw std::invalid_argument("fit: viscosities must be strictly increasing");

    const double span = nt > 1 ? times.back() - times.front() : 1.0;

    std::vector<std::size_t> all(nt);
    for (std::size_t k = 0; k < nt; ++k) all[k] = k;

    ScalingFit fit;
    std::vector<double> metric(nus.size());
    for (std::size_t i = 0; i < nus.size(); ++i)
        metric[i] = reduce_over(series_per_nu[i], all, span, reduce);

    if (!lsq_loglog(nus, metric, fit.slope, fit.intercept, &fit.excluded)) return fit;
    fit.used = static_cast<int>(nus.size()) - static_cast<int>(fit.excluded.size());
    fit.valid = fit.used >= 3;

    // slope uncertainty from resampling the time axis with replacement
    util::Rng rng(util::mix(seed, 0xb007u));
    std::vector<double> slopes;
    slopes.reserve(static_cast<std::size_t>(nboot));
    std::vector<std::size_t> idx(nt);
    std::vector<double> bmetric(nus.size());
    for (int b = 0; b < nboot; ++b) {
        for (std::size_t k = 0; k < nt; ++k)
            idx[k] = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(nt)));
        for (auto& k : idx) k = std::min(k, nt - 1);
        for (std::size_t i = 0; i < nus.size(); ++i)
            bmetric[i] = reduce_over(series_per_nu[i], idx, span, reduce);
        double s, c;
        if (lsq_loglog(nus, bmetric, s, c, nullptr)) slopes.push_back(s);
    }
    if (!slopes.empty()) {
        std::sort(slopes.begin(), slopes.end());
        auto pick = [&](double q) {
            const double pos = q * (static_cast<double>(slopes.size()) - 1.0);
            const std::size_t lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, slopes.size() - 1);
            const double w = pos - static_cast<double>(lo);
            return (1.0 - w) * slopes[lo] + w * slopes[hi];
        };
        fit.ci_lo = pick(0.025);
        fit.ci_hi = pick(0.975);
    } else {
        fit.ci_lo = fit.ci_hi = fit.slope;
    }
    return fit;
}

} // namespace nsv::limit

#include "nsv/striated/striated.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsv::striated {

Nondegeneracy compute_nondegeneracy(const std::vector<VectorField>& members) {
    if (members.empty()) throw std::invalid_argument("nondegeneracy: empty family");
    const auto& g = members.front().grid();
    for (const auto& m : members) spectral::require_same(g, m.grid());
    Nondegeneracy out;
    out.value = -1.0;
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            double best = 0.0;
            for (const auto& m : members) {
                const double vx = m.x(ix, iy), vy = m.y(ix, iy);
                best = std::max(best, vx * vx + vy * vy);
            }
            if (out.value < 0.0 || best < out.value) {
                out.value = best;
                out.ix = ix;
                out.iy = iy;
            }
        }
    out.value = std::sqrt(out.value);
    return out;
}

double nondegeneracy(const std::vector<VectorField>& members) {
    return compute_nondegeneracy(members).value;
}

double nondegeneracy(const VectorFieldFamily& fam) { return nondegeneracy(fam.members()); }

VectorFieldFamily::VectorFieldFamily(std::vector<VectorField> members, double p, double i_tol)
    : members_(std::move(members)), p_(p) {
    if (!(p_ > 2.0)) throw std::invalid_argument("family: exponent p must exceed d = 2");
    const Nondegeneracy nd = compute_nondegeneracy(members_);
    if (!(nd.value > i_tol))
        throw std::invalid_argument("family: degenerate, I = " + std::to_string(nd.value) +
                                    " at node (" + std::to_string(nd.ix) + ", " +
                                    std::to_string(nd.iy) + ")");
}

double linf_p_norm(Workspace& ws, const VectorField& y, double p) {
    spectral::GradTensor gt(y.grid());
    spectral::SpecField c1 = spectral::fft(ws, y.x), c2 = spectral::fft(ws, y.y);
    spectral::grad_tensor(ws, c1, c2, gt);
    ScalarField frob(y.grid());
    for (std::size_t i = 0; i < frob.size(); ++i)
        frob[i] = std::sqrt(gt.dxux[i] * gt.dxux[i] + gt.dyux[i] * gt.dyux[i] +
                            gt.dxuy[i] * gt.dxuy[i] + gt.dyuy[i] * gt.dyuy[i]);
    double linf = 0.0;
    for (std::size_t i = 0; i < y.x.size(); ++i)
        linf = std::max(linf, y.x[i] * y.x[i] + y.y[i] * y.y[i]);
    return std::sqrt(linf) + spectral::norm_lp(frob, p);
}

double family_norm(Workspace& ws, const VectorFieldFamily& fam) {
    double s = 0.0;
    for (const auto& m : fam.members()) s = std::max(s, linf_p_norm(ws, m, fam.p()));
    return s;
}

double BoundSeries::min_margin() const {
    double m = rhs.empty() ? 0.0 : rhs[0] - lhs[0];
    for (std::size_t i = 1; i < rhs.size(); ++i) m = std::min(m, rhs[i] - lhs[i]);
    return m;
}

double BoundSeries::min_rel_margin() const {
    double m = 1.0;
    bool first = true;
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        const double r = (rhs[i] - lhs[i]) / std::max(std::fabs(rhs[i]), 1e-300);
        if (first || r < m) m = r;
        first = false;
    }
    return m;
}

namespace {

// trapezoid of a sampled series up to each sample
std::vector<double> cumtrap(const std::vector<double>& t, const std::vector<double>& f) {
    std::vector<double> acc(t.size(), 0.0);
    for (std::size_t i = 1; i < t.size(); ++i)
        acc[i] = acc[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    return acc;
}

void check_series(const std::vector<double>& t, std::size_t a, std::size_t b, const char* who) {
    if (t.size() < 2 || t.size() != a || t.size() != b)
        throw std::invalid_argument(std::string(who) + ": need >= 2 aligned samples");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw std::invalid_argument(std::string(who) + ": times must increase");
}

} // namespace

BoundSeries i_lower_bound_check(const std::vector<double>& t, const std::vector<double>& i_of_t,
                                const std::vector<double>& gradu_inf) {
    check_series(t, i_of_t.size(), gradu_inf.size(), "i_lower_bound_check");
    BoundSeries out;
    out.t = t;
    const std::vector<double> acc = cumtrap(t, gradu_inf);
    out.lhs.resize(t.size());
    out.rhs = i_of_t;
    for (std::size_t i = 0; i < t.size(); ++i) out.lhs[i] = i_of_t[0] * std::exp(-acc[i]);
    return out;
}

BoundSeries div_rho_x_conservation(const std::vector<double>& t,
                                   const std::vector<double>& div_rho_x_lp,
                                   const std::vector<double>& divu_inf) {
    check_series(t, div_rho_x_lp.size(), divu_inf.size(), "div_rho_x_conservation");
    BoundSeries out;
    out.t = t;
    const std::vector<double> acc = cumtrap(t, divu_inf);
    out.lhs = div_rho_x_lp;
    out.rhs.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out.rhs[i] = div_rho_x_lp[0] * std::exp(acc[i]);
    return out;
}

} // namespace nsv::striated

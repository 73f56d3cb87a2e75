#include "nsv/thermo/energy_moments.hpp"
#include "nsv/util/quadrature.hpp"
#include "nsv/simd/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace nsv::thermo {

namespace {

double signed_pow(double g, double l) {
    if (g == 0.0) return 0.0;
    const double m = std::pow(std::fabs(g), l - 1.0);
    return m * g;
}

} // namespace

HlEvaluator::HlEvaluator(const PressureLaw& law, double l, int knots) : l_(l) {
    if (!(l >= 1.0)) throw std::invalid_argument("H_l: l must be >= 1");
    if (knots < 100) throw std::invalid_argument("H_l: too few spline knots");
    rho_max_ = law.rho_max();
    const double rt = law.rho_tilde();

    auto psi = [&](double s) { return signed_pow(law.p(s) - law.p_tilde(), l) / (s * s); };

    std::vector<double> x(knots + 1), H(knots + 1);
    const double dr = rho_max_ / knots;
    for (int i = 0; i <= knots; ++i) x[i] = i * dr;

    // antiderivative Phi accumulated outward from rho_tilde, segment by segment;
    // knot 0 (rho = 0) is set from the exact limit, never integrated to
    int i_t = static_cast<int>(rt / dr);
    if (i_t < 1) i_t = 1;
    double phi = util::integrate_gk(psi, rt, x[i_t]).value;
    H[i_t] = x[i_t] * phi;
    for (int i = i_t - 1; i >= 1; --i) {
        phi += util::integrate_gk(psi, x[i + 1], x[i]).value;
        H[i] = x[i] * phi;
    }
    // rho -> 0 limit of rho * Phi(rho): |G(0)|^{l-1} (Pt - P(0))
    H[0] = -signed_pow(law.p(0.0) - law.p_tilde(), l);
    phi = util::integrate_gk(psi, rt, x[i_t]).value;
    for (int i = i_t + 1; i <= knots; ++i) {
        phi += util::integrate_gk(psi, x[i - 1], x[i]).value;
        H[i] = x[i] * phi;
    }
    spline_ = util::CubicSpline::natural(std::move(x), std::move(H));
}

double HlEvaluator::operator()(double rho) const {
    if (rho <= 0.0) return spline_.eval(0.0);
    if (rho >= rho_max_) return spline_.eval(rho_max_);
    return spline_.eval(rho);
}

double HlEvaluator::integral(const spectral::ScalarField& rho) const {
    const double h = rho.grid().h();
    double s = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) s += (*this)(rho[i]);
    return h * h * s;
}

spectral::ScalarField HlEvaluator::field(const spectral::ScalarField& rho) const {
    spectral::ScalarField out(rho.grid());
    for (std::size_t i = 0; i < rho.size(); ++i) out[i] = (*this)(rho[i]);
    return out;
}

spectral::ScalarField effective_flux(spectral::Workspace& ws, const spectral::VectorField& u,
                                     const spectral::ScalarField& rho, const PressureLaw& law,
                                     double mu, double lambda) {
    spectral::require_same(u.grid(), rho.grid());
    const double nu = 2.0 * mu + lambda;
    if (!(nu > 0.0)) throw std::invalid_argument("effective flux: 2*mu + lambda must be positive");
    spectral::ScalarField F = spectral::div(ws, u);
    spectral::ScalarField G = law.g_field(rho);
    simd::axpby(F.data(), nu, F.data(), -1.0, G.data(), F.size());
    return F;
}

std::vector<double> h_l_balance_residual(const std::vector<HlBalanceSample>& s, double l,
                                         double nu) {
    if (!(l >= 1.0)) throw std::invalid_argument("balance residual: l must be >= 1");
    if (!(nu > 0.0)) throw std::invalid_argument("balance residual: nu must be positive");
    const std::size_t n = s.size();
    if (n < 3) throw std::invalid_argument("balance residual: need >= 3 samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(s[i].t > s[i - 1].t))
            throw std::invalid_argument("balance residual: samples must increase in t");

    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        double dH;
        if (i == 0) {
            dH = (s[1].hl_l1 - s[0].hl_l1) / (s[1].t - s[0].t);
        } else if (i == n - 1) {
            dH = (s[i].hl_l1 - s[i - 1].hl_l1) / (s[i].t - s[i - 1].t);
        } else {
            // three-point formula valid for uneven spacing
            const double h0 = s[i].t - s[i - 1].t, h1 = s[i + 1].t - s[i].t;
            dH = (s[i + 1].hl_l1 * h0 * h0 + s[i].hl_l1 * (h1 * h1 - h0 * h0) -
                  s[i - 1].hl_l1 * h1 * h1) /
                 (h0 * h1 * (h0 + h1));
        }
        const double gp = std::pow(s[i].g_lp, l + 1.0);
        const double gl = std::pow(s[i].g_lp, l);
        r[i] = dH + gp / nu - gl * s[i].f_lp / nu;
    }
    return r;
}

} // namespace nsv::thermo

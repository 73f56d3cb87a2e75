#pragma once
// The nonnegative pressure-potential moments
//   H_l(rho) = rho * integral_{rho_tilde}^{rho} s^{-2} |P(s)-Pt|^{l-1} (P(s)-Pt) ds,
// their grid integrals, the effective viscous flux F = nu*div(u) - G, and the
// discrete residual of the L1(H_l) dissipation balance.

#include "nsv/spectral/ops.hpp"
#include "nsv/thermo/pressure_law.hpp"
#include "nsv/util/spline.hpp"

#include <vector>

namespace nsv::thermo {

// Memoizes H_l on a 10^4-knot spline over [0, rho_max]. The s^-2 endpoint
// behavior is handled by accumulating the antiderivative outward from
// rho_tilde and taking the exact rho->0 limit |G(0)|^l at the origin knot.
class HlEvaluator {
public:
    HlEvaluator(const PressureLaw& law, double l, int knots = 10000);
    double operator()(double rho) const;
    double l() const { return l_; }
    // h^2 sum H_l(rho)
    double integral(const spectral::ScalarField& rho) const;
    spectral::ScalarField field(const spectral::ScalarField& rho) const;

private:
    util::CubicSpline spline_;
    double l_ = 1.0;
    double rho_max_ = 0.0;
};

// F = nu * div(u) - (P(rho) - P(rho_tilde)), nu = 2*mu + lambda
spectral::ScalarField effective_flux(spectral::Workspace& ws, const spectral::VectorField& u,
                                     const spectral::ScalarField& rho, const PressureLaw& law,
                                     double mu, double lambda);

struct HlBalanceSample {
    double t;
    double hl_l1;   // ||H_l(rho)||_L1
    double g_lp;    // ||G||_{L^{l+1}}
    double f_lp;    // ||F||_{L^{l+1}}
};

// residual_i = d/dt ||H_l||_L1 + nu^{-1}||G||^{l+1} - nu^{-1}||G||^l ||F||;
// nonpositive (up to discretization slack) along solutions. Centered
// differences inside, one-sided at the ends; needs >= 3 samples.
std::vector<double> h_l_balance_residual(const std::vector<HlBalanceSample>& samples,
                                         double l, double nu);

} // namespace nsv::thermo

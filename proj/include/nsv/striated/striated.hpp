#pragma once
// Vector-field families carrying tangential regularity: nondegeneracy, the
// directional derivative d_Y g = div(gY) - g div Y, striated norms, and
// transport of the family by the flow (dX/dt + u.grad X = (X.grad)u).

#include "nsv/spectral/ops.hpp"

#include <vector>

namespace nsv::striated {

using spectral::ScalarField;
using spectral::VectorField;
using spectral::Workspace;

struct Nondegeneracy {
    double value = 0.0;   // grid min over x of max over members |X(x)|
    int ix = 0, iy = 0;   // minimizing node
};

Nondegeneracy compute_nondegeneracy(const std::vector<VectorField>& members);
double nondegeneracy(const std::vector<VectorField>& members);

// m >= 1 grid-sampled fields with a shared Lebesgue exponent p > d = 2.
// Construction enforces nondegeneracy: I > tol, else throws naming the
// minimizing node.
class VectorFieldFamily {
public:
    VectorFieldFamily(std::vector<VectorField> members, double p, double i_tol = 0.0);

    int size() const { return static_cast<int>(members_.size()); }
    double p() const { return p_; }
    const spectral::Grid& grid() const { return members_.front().grid(); }
    const VectorField& member(int i) const { return members_[i]; }
    VectorField& member(int i) { return members_[i]; }
    const std::vector<VectorField>& members() const { return members_; }

private:
    std::vector<VectorField> members_;
    double p_;
};

double nondegeneracy(const VectorFieldFamily& fam);

// |Y|_{L^{inf,p}} = |Y|_inf + |grad Y|_{L^p} (Frobenius on the gradient)
double linf_p_norm(Workspace& ws, const VectorField& y, double p);
// sup over members of linf_p_norm
double family_norm(Workspace& ws, const VectorFieldFamily& fam);

enum class DerivForm {
    conservative,   // limited finite-volume fluxes; defined for rough g
    spectral        // Fourier products; preferred for smooth g
};

// div(gY) in the selected discretization
ScalarField div_gy(Workspace& ws, const ScalarField& g, const VectorField& y, DerivForm form);
// d_Y g = div(gY) - g div Y (div Y always spectral: members are smooth fields)
ScalarField directional_derivative(Workspace& ws, const ScalarField& g, const VectorField& y,
                                   DerivForm form);

// I^{-1} sup_v [ |g|_inf |Y_v|_{L^{inf,p}} + |div(g Y_v)|_{L^p} ]
double striated_norm(Workspace& ws, const ScalarField& g, const VectorFieldFamily& fam,
                     DerivForm form);

struct A3Report {
    double family_norm = 0.0;      // |X|_{L^{inf,p}}
    double sup_dxrho = 0.0;        // sup_v |d_{X_v} rho|_{L^p}
    double sup_div_rho_x = 0.0;    // sup_v |div(rho X_v)|_{L^p}
    double value = 0.0;            // family_norm + sup_dxrho
    double value_variant = 0.0;    // family_norm + sup_div_rho_x
};
A3Report a3(Workspace& ws, const ScalarField& rho, const VectorFieldFamily& fam, DerivForm form);

// One SSP-RK3 step of dX/dt + div(u X) = (X.grad)u + X div u for every member,
// under u frozen over the step (co-timed with the fluid step).
void transport_family(Workspace& ws, VectorFieldFamily& fam, const VectorField& u, double dt);

// Sampled-trajectory bound checks. Series are aligned with t.
struct BoundSeries {
    std::vector<double> t, lhs, rhs;
    double min_margin() const;        // min over samples of rhs - lhs
    double min_rel_margin() const;    // min of (rhs - lhs)/max(|rhs|, eps)
};

// I(X(t)) >= I(X_0) exp(-int_0^t |grad u|_inf): lhs = rhs bound, rhs = I(t)
BoundSeries i_lower_bound_check(const std::vector<double>& t, const std::vector<double>& i_of_t,
                                const std::vector<double>& gradu_inf);

// |div(rho X)(t)|_p <= |div(rho_0 X_0)|_p exp(int_0^t |div u|_inf)
BoundSeries div_rho_x_conservation(const std::vector<double>& t,
                                   const std::vector<double>& div_rho_x_lp,
                                   const std::vector<double>& divu_inf);

} // namespace nsv::striated

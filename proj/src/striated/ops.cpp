#include "nsv/striated/striated.hpp"

#include "nsv/simd/kernels.hpp"
#include "nsv/solver/muscl.hpp"

#include <cmath>
#include <stdexcept>

namespace nsv::striated {

ScalarField div_gy(Workspace& ws, const ScalarField& g, const VectorField& y, DerivForm form) {
    spectral::require_same(g.grid(), y.grid());
    ScalarField out(g.grid());
    if (form == DerivForm::conservative) {
        solver::flux_divergence(g, y, out);
        return out;
    }
    VectorField gy(g.grid());
    simd::mul(gy.x.data(), g.data(), y.x.data(), g.size());
    simd::mul(gy.y.data(), g.data(), y.y.data(), g.size());
    return spectral::div(ws, gy);
}

ScalarField directional_derivative(Workspace& ws, const ScalarField& g, const VectorField& y,
                                   DerivForm form) {
    ScalarField out = div_gy(ws, g, y, form);
    const ScalarField divy = spectral::div(ws, y);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= g[i] * divy[i];
    return out;
}

double striated_norm(Workspace& ws, const ScalarField& g, const VectorFieldFamily& fam,
                     DerivForm form) {
    const double i_val = nondegeneracy(fam);
    if (!(i_val > 0.0)) throw std::invalid_argument("striated_norm: degenerate family");
    const double ginf = spectral::norm_linf(g);
    double s = 0.0;
    for (const auto& y : fam.members()) {
        const double term = ginf * linf_p_norm(ws, y, fam.p()) +
                            spectral::norm_lp(div_gy(ws, g, y, form), fam.p());
        s = std::max(s, term);
    }
    return s / i_val;
}

A3Report a3(Workspace& ws, const ScalarField& rho, const VectorFieldFamily& fam, DerivForm form) {
    A3Report rep;
    rep.family_norm = family_norm(ws, fam);
    for (const auto& y : fam.members()) {
        rep.sup_div_rho_x =
            std::max(rep.sup_div_rho_x, spectral::norm_lp(div_gy(ws, rho, y, form), fam.p()));
        rep.sup_dxrho = std::max(
            rep.sup_dxrho, spectral::norm_lp(directional_derivative(ws, rho, y, form), fam.p()));
    }
    rep.value = rep.family_norm + rep.sup_dxrho;
    rep.value_variant = rep.family_norm + rep.sup_div_rho_x;
    return rep;
}

} // namespace nsv::striated

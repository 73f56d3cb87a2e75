#pragma once
// Internal scratch and the per-stage nonlinear tendency shared by step.cpp.

#include "nsv/solver/stepper.hpp"

namespace nsv::solver::detail {

using spectral::ScalarField;
using spectral::SpecField;
using spectral::VectorField;
using spectral::Workspace;

struct TendencyScratch {
    spectral::GradTensor gt;
    VectorField gg;
    ScalarField g, l0x, l0y, w, adv;
    SpecField gh, tmp, l0xh, l0yh;

    explicit TendencyScratch(const spectral::Grid& grid)
        : gt(grid), gg(grid), g(grid), l0x(grid), l0y(grid), w(grid), adv(grid),
          gh(grid), tmp(grid), l0xh(grid), l0yh(grid) {}
};

// N_i = -mask(u.grad u_i) - w d_i G + (w - beta) (mu Lap u + (mu+lambda) grad div u)_i
// with w = 1/max(rho, floor). Writes spectral N into (n1h, n2h); adds the L2^2
// content removed by the advective mask to *removed when dealiasing is on.
void nonlinear_tendency(Workspace& ws, TendencyScratch& s, const ScalarField& rho,
                        const VectorField& u, const SpecField& u1h, const SpecField& u2h,
                        const thermo::PressureLaw& law, double mu, double lambda, double beta,
                        double rho_floor, bool dealias, double* removed, SpecField& n1h,
                        SpecField& n2h);

// masks spec in place, accumulating the discarded L2^2 energy
double mask_energy(Workspace& ws, SpecField& spec);

} // namespace nsv::solver::detail

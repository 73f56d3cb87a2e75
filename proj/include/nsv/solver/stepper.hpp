#pragma once
// Compressible barotropic time stepper. One step advances
//   rho_t + div(rho u) = 0
//   u_t + (u.grad)u + grad(P(rho))/rho = (mu*Lap(u) + (mu+lambda)*grad(div u))/rho
// with: MUSCL/SSP-RK3 flux-form transport for rho; for u a three-stage
// exponential scheme whose linear part beta*(mu*Lap + (mu+lambda)*grad div),
// beta = max(1/rho), is applied exactly per Hodge component (solenoidal rate
// beta*mu*|k|^2, gradient rate beta*nu*|k|^2, nu = 2mu+lambda) while
// advection, pressure gradient and the (1/rho - beta) viscous remainder are
// explicit. The 2/3-rule mask is applied to the advective product only.

#include "nsv/solver/state.hpp"
#include "nsv/spectral/ops.hpp"
#include "nsv/thermo/pressure_law.hpp"

#include <memory>

namespace nsv::solver {

// mu*Lap(u) + (mu+lambda)*grad(div u) - grad(P(rho) - P(rho_tilde)); the
// right-hand side of the momentum balance, equal to rho*du/dt pointwise.
spectral::VectorField momentum_rhs(spectral::Workspace& ws, const spectral::ScalarField& rho,
                                   const spectral::VectorField& u,
                                   const thermo::PressureLaw& law, double mu, double lambda);

// du/dt = momentum_rhs / max(rho, floor); zeroed (and counted) where
// rho < floor since velocity carries no information in vacuum.
spectral::VectorField material_derivative(spectral::Workspace& ws,
                                          const spectral::ScalarField& rho,
                                          const spectral::VectorField& u,
                                          const thermo::PressureLaw& law, double mu,
                                          double lambda, double rho_floor,
                                          long* vacuum_cells = nullptr);

struct StepperOptions {
    double mu = 0.1;
    double lambda = 1.0;
    double cfl_advective = 0.4;
    double cfl_acoustic = 0.5;
    double dt_override = 0.0;       // > 0 replaces the CFL choice
    bool dealias = true;
    double rho_floor_solver = 0.0;  // 0 -> 1e-3 * rho_tilde
    bool freeze_transport = false;  // validation hook: no advection, rho frozen
};

class Stepper {
public:
    Stepper(const spectral::Grid& g, const thermo::PressureLaw& law, const StepperOptions& opt);
    ~Stepper();
    Stepper(const Stepper&) = delete;
    Stepper& operator=(const Stepper&) = delete;

    double mu() const;
    double lambda() const;
    double nu() const;
    const StepperOptions& options() const;
    spectral::Workspace& workspace();

    // min(cfl_adv*h/max|u|, cfl_ac*h/c*), or dt_override when set; binding
    // (if non-null) receives which constraint produced the value
    double cfl_dt(const FluidState& s, const char** binding = nullptr) const;
    // advances s by exactly dt; throws StepError on negative density / NaN
    StepReport step(FluidState& s, double dt);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace nsv::solver

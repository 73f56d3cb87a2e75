#pragma once
// Simulation state and per-step bookkeeping.

#include "nsv/spectral/field.hpp"

#include <stdexcept>
#include <string>

namespace nsv::solver {

struct FluidState {
    double t = 0.0;
    spectral::ScalarField rho;
    spectral::VectorField u;

    FluidState() = default;
    explicit FluidState(const spectral::Grid& g) : rho(g), u(g) {}
    const spectral::Grid& grid() const { return rho.grid(); }
};

struct StepReport {
    double t_after = 0.0;
    double dt = 0.0;
    double max_speed = 0.0;        // grid max |u|
    double cstar = 0.0;            // sqrt(max P')
    double mass = 0.0;             // h^2 sum rho
    double rho_min = 0.0;
    double rho_max = 0.0;
    double beta = 0.0;             // max 1/max(rho, floor) used by the exponential
    double dealias_energy_removed = 0.0;  // L2 mass masked off the advective tendency
    // which constraint produced dt: "advective", "acoustic", "override", "clip", "direct"
    const char* dt_binding = "direct";
};

// Unrecoverable integration failure (negative density, non-finite values).
class StepError : public std::runtime_error {
public:
    StepError(const std::string& what, double t, int ix, int iy, double value)
        : std::runtime_error(what), t(t), ix(ix), iy(iy), value(value) {}
    double t;
    int ix, iy;
    double value;
};

} // namespace nsv::solver

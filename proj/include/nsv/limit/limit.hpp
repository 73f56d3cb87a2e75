#pragma once
// Large-bulk-viscosity study: a variable-density incompressible reference
// solver, nu-sweeps of the compressible system at fixed mu, log-log scaling
// fits with bootstrap confidence intervals, and the convergence table
// comparing the sweep against the reference.

#include "nsv/diag/diag.hpp"
#include "nsv/solver/run.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace nsv::limit {

using spectral::Grid;
using spectral::ScalarField;
using spectral::VectorField;
using spectral::Workspace;

// --- incompressible reference ---
//   drho/dt + div(rho v) = 0,  rho (dv/dt + v.grad v) = mu Lap v - grad Pi,
//   div v = 0
// Second-order: finite-volume density transport, Lawson-Heun velocity update
// with exact per-mode viscous factors, variable-density pressure projection
//   div((1/rho) grad Pi) = div(v*)
// solved by conjugate gradients with a constant-coefficient spectral
// preconditioner.

struct IncompOptions {
    double mu = 0.1;
    double cfl_advective = 0.4;
    double dt_override = 0.0;      // > 0 replaces the CFL choice
    double rho_floor = 0.0;        // 0 -> 1e-3 * min(rho0) scale handled at use
    double pcg_tol = 1e-10;        // relative residual
    int pcg_max_iter = 500;
    bool dealias = true;
};

class IncompressibleSolver {
public:
    IncompressibleSolver(const Grid& g, const IncompOptions& opt);
    ~IncompressibleSolver();
    IncompressibleSolver(const IncompressibleSolver&) = delete;
    IncompressibleSolver& operator=(const IncompressibleSolver&) = delete;

    // projects u to its solenoidal part when |div u|_L2 > 1e-12
    void prepare(solver::FluidState& s);

    double cfl_dt(const solver::FluidState& s, const char** binding = nullptr) const;
    solver::StepReport step(solver::FluidState& s, double dt);

    double div_linf_last() const;   // grid max |div v| after the last step
    int pcg_iters_last() const;     // projection iterations of the last step
    const IncompOptions& options() const;
    Workspace& workspace();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// --- sweep ---

struct SweepConfig {
    std::vector<double> nus;       // strictly increasing; >= 1 entry
    double mu = 0.1;
    double t_end = 1.0;
    double sample_dt = 0.05;
    double dt_shared = 0.0;        // 0: 0.8x the initial CFL bound, shared by all runs
    bool with_reference = true;
    bool track_decomposition = false;
    double rho_max = 4.0;          // pressure-law table ceiling
    int workers = 1;               // member runs in parallel; construction stays serial
};

struct SweepMember {
    double nu = 0.0;
    double lambda = 0.0;
    bool completed = false;
    std::string error;
    std::vector<diag::DiagnosticsRecord> records;
    // metrics over the sampled trajectory
    double sup_divu_l2 = 0.0;
    double l2_time_divu = 0.0;         // sqrt(int |div u|_L2^2 dt)
    double sup_u_minus_ref = 0.0;
    double e0_nu = 0.0;                // E0 + mu|grad u0|^2 + nu|div u0|^2 + |G0|^2/nu
    double a1_max = 0.0;
    double sup_nu_divu_sq = 0.0;       // sup_t nu |div u|_L2^2, monitored <= e0_nu
    std::vector<double> u_minus_ref_l2;        // per sample time
    std::vector<double> divu_l2_series;        // per sample time
    std::vector<double> hminus1_residual;      // per interior sample time
};

struct SweepResult {
    std::vector<double> sample_times;
    std::vector<SweepMember> members;
    std::vector<diag::DiagnosticsRecord> reference_records;
    std::vector<VectorField> reference_velocity;   // at sample times
    double dt_shared = 0.0;
    bool partial = false;          // some member failed; its metrics are absent
};

// Isolated compressible runs at nu in cfg.nus (lambda = nu - 2 mu) plus one
// incompressible reference, all from the same initial state (velocity
// projected solenoidal first) and the same dt.
SweepResult run_sweep(const Grid& g, const thermo::PressureLaw& law,
                      const solver::FluidState& initial, const SweepConfig& cfg);

// --- scaling fit ---

enum class TimeReduce { sup, l2 };

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;   // bootstrap percentile CI on the slope
    int used = 0;
    std::vector<int> excluded;         // indices whose metric was <= 0
    bool valid = false;                // >= 3 usable points
};

// Least squares of log(metric) against log(nu). series_per_nu[i][k] is the
// metric of nus[i] at sample time k; the reduction collapses the time axis
// and the bootstrap resamples it.
ScalingFit fit_scaling(const std::vector<double>& nus,
                       const std::vector<std::vector<double>>& series_per_nu,
                       const std::vector<double>& times, TimeReduce reduce,
                       std::uint64_t seed, int nboot = 200);

// --- convergence table ---

struct ConvergenceRow {
    double nu = 0.0;
    std::vector<double> u_minus_v_l2;
    double sup_u_minus_v = 0.0;
    double sup_hminus1 = 0.0;
    bool resampled = false;
};

struct ConvergenceTable {
    std::vector<double> times;
    std::vector<ConvergenceRow> rows;
    bool monotone = false;        // discrepancy nonincreasing in nu, 10% slack
    ScalingFit residual_fit;      // slope of sup Hminus1 residual vs nu
};

ConvergenceTable compare_limit(const SweepResult& sweep, std::uint64_t seed);

} // namespace nsv::limit

#pragma once
// Time loop driver. Chooses dt from the CFL bound, clips it so the trajectory
// lands exactly on sample boundaries and on t_end, and hands the state to the
// caller's observers. The solver never learns what the observers compute.

#include "nsv/solver/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace nsv::solver {

struct RunOptions {
    double t_end = 1.0;
    double sample_dt = 0.0;     // <= 0: invoke the sample observer every step
    long max_steps = 2000000;
};

struct RunResult {
    long steps = 0;
    double t_final = 0.0;
    double min_dt = 0.0;
    double max_dt = 0.0;
};

using StepObserver = std::function<void(const FluidState&, const StepReport&)>;
using SampleObserver = std::function<void(const FluidState&)>;
// sees the pre-step state and the dt about to be taken; lets passive objects
// (marker curves, vector-field families) advance with the same dt and the
// same frozen velocity the fluid step uses
using PreStepObserver = std::function<void(const FluidState&, double dt)>;

// Integrates s to opt.t_end. on_sample fires on the initial state, at every
// crossing of the sample cadence, and at t_end; on_step after every step.
RunResult run(Stepper& st, FluidState& s, const RunOptions& opt,
              const StepObserver& on_step = {}, const SampleObserver& on_sample = {},
              const PreStepObserver& before_step = {});

// Same loop for any integrator exposing cfl_dt(state, const char**) and
// step(state, dt) -> StepReport; the incompressible reference shares it.
template <class Integrator>
RunResult run_loop(Integrator& st, FluidState& s, const RunOptions& opt,
                   const StepObserver& on_step = {}, const SampleObserver& on_sample = {},
                   const PreStepObserver& before_step = {}) {
    if (!(opt.t_end > s.t)) throw std::invalid_argument("run: t_end must exceed state time");
    const double t0 = s.t;
    const double span = opt.t_end - t0;
    const double eps = 1e-12 * std::max(1.0, std::fabs(opt.t_end));

    RunResult res;
    res.min_dt = span;

    if (on_sample) on_sample(s);
    long next_sample = 1;
    while (s.t < opt.t_end - eps) {
        if (res.steps >= opt.max_steps) throw std::runtime_error("run: max step count exceeded");
        const char* binding = "direct";
        double dt = st.cfl_dt(s, &binding);
        if (opt.t_end - s.t < dt) {
            dt = opt.t_end - s.t;
            binding = "clip";
        }
        if (opt.sample_dt > 0.0) {
            const double t_next = std::min(t0 + next_sample * opt.sample_dt, opt.t_end);
            if (t_next - s.t < dt) {
                dt = t_next - s.t;
                binding = "clip";
            }
        }
        if (!(dt > eps)) throw std::runtime_error("run: time step collapsed");

        if (before_step) before_step(s, dt);
        StepReport rep = st.step(s, dt);
        rep.dt_binding = binding;
        ++res.steps;
        res.min_dt = std::min(res.min_dt, dt);
        res.max_dt = std::max(res.max_dt, dt);
        if (on_step) on_step(s, rep);

        if (opt.sample_dt > 0.0) {
            const double t_next = std::min(t0 + next_sample * opt.sample_dt, opt.t_end);
            if (s.t >= t_next - eps) {
                if (on_sample) on_sample(s);
                ++next_sample;
            }
        } else if (on_sample) {
            on_sample(s);
        }
    }
    res.t_final = s.t;
    return res;
}

} // namespace nsv::solver

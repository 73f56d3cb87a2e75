#include "nsv/solver/run.hpp"

namespace nsv::solver {

RunResult run(Stepper& st, FluidState& s, const RunOptions& opt, const StepObserver& on_step,
              const SampleObserver& on_sample, const PreStepObserver& before_step) {
    return run_loop(st, s, opt, on_step, on_sample, before_step);
}

} // namespace nsv::solver

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nsv/diag/diag.hpp"
#include "nsv/simd/kernels.hpp"
#include "nsv/solver/muscl.hpp"
#include "nsv/solver/run.hpp"
#include "nsv/solver/stepper.hpp"

#include <cmath>
#include <vector>

using namespace nsv;
using namespace nsv::solver;
using spectral::Grid;
using spectral::ScalarField;
using spectral::VectorField;

namespace {

const double kPi = 3.14159265358979323846;

FluidState smooth_state(const Grid& g, double rho_amp = 0.1, double u_amp = 1.0) {
    FluidState s(g);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const double x = ix * g.h(), y = iy * g.h();
            s.rho(ix, iy) = 1.0 + rho_amp * std::sin(x) * std::cos(y);
            s.u.x(ix, iy) = u_amp * std::sin(x) * std::cos(y);
            s.u.y(ix, iy) = -u_amp * std::cos(x) * std::sin(y);
        }
    return s;
}

} // namespace

TEST_CASE("finite volume transport conserves mass exactly") {
    const Grid g(64, 2.0 * kPi);
    FluidState s = smooth_state(g, 0.3, 1.0);
    const double m0 = spectral::mass(s.rho);
    ScalarField next = advect_density(s.rho, s.u, 0.01);
    CHECK(spectral::mass(next) == doctest::Approx(m0).epsilon(1e-14));

    // flux divergence telescopes to zero
    ScalarField fd(g);
    flux_divergence(s.rho, s.u, fd);
    CHECK(std::fabs(spectral::mass(fd)) < 1e-13);
}

TEST_CASE("transport preserves constants and positivity") {
    const Grid g(32, 2.0 * kPi);
    FluidState s = smooth_state(g);
    s.rho.fill(1.7);
    ScalarField next = advect_density(s.rho, s.u, 0.02);
    for (std::size_t i = 0; i < next.size(); ++i)
        CHECK(next.data()[i] == doctest::Approx(1.7).epsilon(1e-14));

    // a step profile under uniform advection stays within its initial bounds
    // (one-dimensional sweeps with minmod are TVD at this CFL)
    s.u.x.fill(1.0);
    s.u.y.fill(0.0);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix)
            s.rho(ix, iy) = (std::fabs(ix * g.h() - kPi) < 1.0) ? 2.0 : 1.0;
    ScalarField adv = s.rho;
    for (int k = 0; k < 20; ++k) adv = advect_density(adv, s.u, 0.01);
    CHECK(spectral::min_value(adv) >= 1.0 - 1e-12);
    CHECK(spectral::max_value(adv) <= 2.0 + 1e-12);
}

TEST_CASE("momentum rhs matches the analytic balance on a manufactured field") {
    const Grid g(64, 2.0 * kPi);
    spectral::Workspace ws(g);
    const auto law = thermo::PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    const double mu = 0.1, lambda = 1.0;

    // rho = 1 + 0.2 sin x, u = (sin y, 0):
    //   mu Lap u = (-mu sin y, 0), div u = 0, grad G = (0.4 cos x (1+0.2 sin x), 0)
    FluidState s(g);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const double x = ix * g.h(), y = iy * g.h();
            s.rho(ix, iy) = 1.0 + 0.2 * std::sin(x);
            s.u.x(ix, iy) = std::sin(y);
        }
    VectorField rhs = momentum_rhs(ws, s.rho, s.u, law, mu, lambda);
    double worst = 0.0;
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const double x = ix * g.h(), y = iy * g.h();
            const double ex = -mu * std::sin(y) - 0.4 * std::cos(x) * (1.0 + 0.2 * std::sin(x));
            worst = std::max(worst, std::fabs(rhs.x(ix, iy) - ex));
            worst = std::max(worst, std::fabs(rhs.y(ix, iy)));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("material derivative floors vacuum cells") {
    const Grid g(32, 2.0 * kPi);
    spectral::Workspace ws(g);
    const auto law = thermo::PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    FluidState s = smooth_state(g);
    s.rho(3, 4) = 0.0;
    s.rho(3, 5) = 1e-9;
    long vac = 0;
    VectorField ud = material_derivative(ws, s.rho, s.u, law, 0.1, 1.0, 1e-3, &vac);
    CHECK(vac == 2);
    CHECK(ud.x(3, 4) == 0.0);
    CHECK(ud.y(3, 5) == 0.0);
}

TEST_CASE("a short smooth run holds the energy identity") {
    const Grid g(64, 2.0 * kPi);
    const auto law = thermo::PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    StepperOptions so;
    Stepper st(g, law, so);
    FluidState s = smooth_state(g);

    diag::TrajectoryMonitor mon(g, law, so.mu, so.lambda);
    RunOptions ro;
    ro.t_end = 0.5;
    ro.sample_dt = 0.05;
    run(st, s, ro, {}, [&](const FluidState& fs) { mon.sample(fs); });

    const auto& recs = mon.records();
    REQUIRE(recs.size() == 11);
    const double e0 = recs.front().e_total;
    for (const auto& r : recs)
        CHECK(std::fabs(r.e_total - e0) / e0 < 1e-3);
    // dissipation really happened and was accounted for
    CHECK(recs.back().e_dissipated > 0.05 * recs.back().e_kinetic);
}

TEST_CASE("step reports carry conserved mass and sane extrema") {
    const Grid g(64, 2.0 * kPi);
    const auto law = thermo::PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    Stepper st(g, law, {});
    FluidState s = smooth_state(g);
    const double m0 = spectral::mass(s.rho);

    double t_prev = 0.0;
    RunOptions ro;
    ro.t_end = 0.3;
    run(st, s, ro, [&](const FluidState&, const StepReport& rep) {
        CHECK(rep.mass == doctest::Approx(m0).epsilon(1e-13));
        CHECK(rep.rho_min > 0.0);
        CHECK(rep.rho_min <= rep.rho_max);
        CHECK(rep.rho_max < 2.0);
        CHECK(rep.beta == doctest::Approx(1.0 / rep.rho_min).epsilon(0.02));
        CHECK(rep.cstar == doctest::Approx(std::sqrt(2.0 * rep.rho_max)).epsilon(0.02));
        CHECK(rep.max_speed > 0.5);
        CHECK(rep.dealias_energy_removed >= 0.0);
        CHECK(rep.t_after == doctest::Approx(t_prev + rep.dt).epsilon(1e-12));
        t_prev = rep.t_after;
        const std::string b = rep.dt_binding;
        CHECK((b == "advective" || b == "acoustic" || b == "clip"));
    });
    CHECK(spectral::mass(s.rho) == doctest::Approx(m0).epsilon(1e-13));
}

TEST_CASE("dt self-convergence of the full step") {
    const Grid g(32, 2.0 * kPi);
    const auto law = thermo::PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    const double t_end = 0.1;

    auto solve = [&](double dt) {
        StepperOptions so;
        so.dt_override = dt;
        Stepper st(g, law, so);
        FluidState s = smooth_state(g, 0.15, 0.8);
        RunOptions ro;
        ro.t_end = t_end;
        run(st, s, ro);
        return s;
    };
    const FluidState fine = solve(0.1 / 64.0);
    std::vector<double> errs;
    for (double dt : {0.1 / 4.0, 0.1 / 8.0, 0.1 / 16.0}) {
        const FluidState c = solve(dt);
        ScalarField d(g);
        nsv::simd::axpby(d.data(), 1.0, c.u.x.data(), -1.0, fine.u.x.data(), d.size());
        errs.push_back(spectral::norm_l2(d));
    }
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    CHECK(order1 > 1.7);
    CHECK(order2 > 1.7);
}

TEST_CASE("freeze_transport pins the density") {
    const Grid g(32, 2.0 * kPi);
    const auto law = thermo::PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    StepperOptions so;
    so.freeze_transport = true;
    Stepper st(g, law, so);
    FluidState s = smooth_state(g);
    const ScalarField rho0 = s.rho;
    RunOptions ro;
    ro.t_end = 0.1;
    run(st, s, ro);
    for (std::size_t i = 0; i < rho0.size(); ++i)
        CHECK(s.rho.data()[i] == rho0.data()[i]);
}

TEST_CASE("cfl reporting names the binding constraint") {
    const Grid g(32, 2.0 * kPi);
    const auto law = thermo::PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    Stepper st(g, law, {});

    FluidState still(g);
    still.rho.fill(1.0);
    const char* binding = nullptr;
    const double dt_ac = st.cfl_dt(still, &binding);
    CHECK(binding == std::string("acoustic"));  // no advection: sound speed binds
    CHECK(dt_ac == doctest::Approx(0.5 * g.h() / std::sqrt(2.0)));

    FluidState fast = smooth_state(g, 0.0, 50.0);
    st.cfl_dt(fast, &binding);
    CHECK(binding == std::string("advective"));

    StepperOptions so;
    so.dt_override = 1e-3;
    Stepper fixed(g, law, so);
    CHECK(fixed.cfl_dt(still, &binding) == 1e-3);
    CHECK(binding == std::string("override"));
}

TEST_CASE("blowup raises StepError with location data") {
    const Grid g(32, 2.0 * kPi);
    const auto law = thermo::PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    StepperOptions so;
    so.dt_override = 0.5;  // far beyond stability for this data
    Stepper st(g, law, so);
    FluidState s = smooth_state(g, 0.3, 8.0);
    bool threw = false;
    try {
        for (int k = 0; k < 200; ++k) st.step(s, 0.5);
    } catch (const StepError& e) {
        threw = true;
        CHECK(e.t >= 0.0);
        CHECK(e.ix >= 0);
        CHECK(e.ix < g.n);
        CHECK(e.iy >= 0);
        CHECK(e.iy < g.n);
        CHECK((e.value < 0.0 || !std::isfinite(e.value)));
    }
    CHECK(threw);
}

TEST_CASE("run loop lands exactly on sample boundaries and t_end") {
    const Grid g(32, 2.0 * kPi);
    const auto law = thermo::PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    Stepper st(g, law, {});
    FluidState s = smooth_state(g);
    std::vector<double> sample_times;
    RunOptions ro;
    ro.t_end = 0.2;
    ro.sample_dt = 0.06;  // not a divisor of t_end
    run(st, s, ro, {}, [&](const FluidState& fs) { sample_times.push_back(fs.t); });
    REQUIRE(sample_times.size() == 5);
    CHECK(sample_times[0] == 0.0);
    CHECK(sample_times[1] == doctest::Approx(0.06).epsilon(1e-12));
    CHECK(sample_times[2] == doctest::Approx(0.12).epsilon(1e-12));
    CHECK(sample_times[3] == doctest::Approx(0.18).epsilon(1e-12));
    CHECK(sample_times[4] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(s.t == doctest::Approx(0.2).epsilon(1e-14));

    CHECK_THROWS_AS(run(st, s, ro), std::invalid_argument);  // t_end <= current t
}

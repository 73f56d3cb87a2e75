#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nsv/spectral/ops.hpp"
#include "nsv/thermo/energy_moments.hpp"
#include "nsv/thermo/pressure_law.hpp"

#include <cmath>
#include <vector>

using namespace nsv;
using thermo::HlEvaluator;
using thermo::PressureLaw;

TEST_CASE("gamma law evaluation, clamping, derivatives") {
    const PressureLaw law = PressureLaw::gamma_law(1.5, 2.0, 1.0, 4.0);
    CHECK(law.p(1.0) == doctest::Approx(1.5));
    CHECK(law.p(2.0) == doctest::Approx(6.0));
    CHECK(law.dp(2.0) == doctest::Approx(6.0));  // a*gamma*rho = 1.5*2*2
    CHECK(law.p_tilde() == doctest::Approx(1.5));
    CHECK(law.g(1.0) == doctest::Approx(0.0));
    CHECK(law.g(2.0) == doctest::Approx(4.5));

    law.reset_clamp_count();
    CHECK(law.p(5.0) == doctest::Approx(law.p(4.0)));  // above rho_max: clamped
    CHECK(law.p(-0.5) == doctest::Approx(0.0));        // below vacuum: clamped
    CHECK(law.clamp_count() == 2);
    law.reset_clamp_count();
    CHECK(law.clamp_count() == 0);
}

TEST_CASE("sound speed and field evaluation") {
    const PressureLaw law = PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    const spectral::Grid g(16, 1.0);
    spectral::ScalarField rho(g);
    rho.fill(1.0);
    rho(3, 5) = 2.25;  // dominates: c = sqrt(2a rho) = sqrt(4.5)
    CHECK(law.sound_speed_max(rho) == doctest::Approx(std::sqrt(4.5)));

    spectral::ScalarField gf = law.g_field(rho);
    CHECK(gf(0, 0) == doctest::Approx(0.0));
    CHECK(gf(3, 5) == doctest::Approx(2.25 * 2.25 - 1.0));
    spectral::ScalarField dpf = law.dp_field(rho);
    CHECK(dpf(3, 5) == doctest::Approx(4.5));
}

TEST_CASE("H_1 equals (rho-1)^2 for the quadratic law") {
    // exact antiderivative: rho * (s + 1/s) between 1 and rho = (rho-1)^2
    const PressureLaw law = PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    const HlEvaluator h1(law, 1.0);
    for (double rho : {0.0, 0.05, 0.3, 0.8, 1.0, 1.1, 1.7, 2.0, 3.0, 3.9}) {
        const double exact = (rho - 1.0) * (rho - 1.0);
        CHECK(h1(rho) == doctest::Approx(exact).epsilon(5e-7));
    }
}

TEST_CASE("H_3 matches the closed-form values") {
    // (s^2-1)^3 / s^2 integrates to s^5/5 - s^3 + 3s + 1/s; frozen evaluations:
    //   H_3(2)   = 2 * (4.9 - 3.2)      = 3.4
    //   H_3(0.5) = 0.5 * (3.38125-3.2)  = 0.090625
    //   H_3(0)   = |P(0) - 1|^3         = 1
    const PressureLaw law = PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    const HlEvaluator h3(law, 3.0);
    CHECK(h3(2.0) == doctest::Approx(3.4).epsilon(1e-6));
    CHECK(h3(0.5) == doctest::Approx(0.090625).epsilon(1e-5));
    CHECK(h3(0.0) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(h3(1.0) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("H_l stays nonnegative across laws and exponents") {
    const PressureLaw laws[] = {PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0),
                                PressureLaw::gamma_law(0.5, 1.4, 1.2, 4.0)};
    for (const auto& law : laws)
        for (double l : {1.0, 2.0, 3.0}) {
            const HlEvaluator hl(law, l);
            for (int i = 0; i <= 40; ++i) {
                const double rho = 3.95 * i / 40.0;
                CHECK(hl(rho) >= -1e-12);
            }
            CHECK(hl(law.rho_tilde()) == doctest::Approx(0.0).epsilon(1e-12));
        }
}

TEST_CASE("H_l grid integral") {
    const PressureLaw law = PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    const HlEvaluator h1(law, 1.0);
    const spectral::Grid g(16, 2.0 * 3.14159265358979323846);
    spectral::ScalarField rho(g);
    rho.fill(2.0);
    // H_1(2) = 1 on every node, so the integral is the box area
    CHECK(h1.integral(rho) == doctest::Approx(g.L * g.L).epsilon(1e-6));
    spectral::ScalarField f = h1.field(rho);
    CHECK(f(7, 9) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("tabulated law reproduces the gamma law it was sampled from") {
    const PressureLaw ref = PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    std::vector<double> knots, pk;
    for (int i = 0; i <= 200; ++i) {
        const double r = 4.0 * i / 200.0;
        knots.push_back(r);
        pk.push_back(ref.p(r));
    }
    const PressureLaw tab = PressureLaw::tabulated(knots, pk, 1.0, 4.0);
    for (double r : {0.1, 0.77, 1.0, 1.9, 3.5})
        CHECK(tab.p(r) == doctest::Approx(ref.p(r)).epsilon(1e-6));
    CHECK(tab.p_tilde() == doctest::Approx(1.0).epsilon(1e-9));

    // non-monotone knots must be rejected
    std::vector<double> bad_p = pk;
    bad_p[100] = bad_p[120];
    CHECK_THROWS_AS(PressureLaw::tabulated(knots, bad_p, 1.0, 4.0), std::invalid_argument);
}

TEST_CASE("effective flux reduces to -G for a still fluid") {
    const spectral::Grid g(32, 2.0 * 3.14159265358979323846);
    spectral::Workspace ws(g);
    const PressureLaw law = PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);
    spectral::ScalarField rho(g);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix)
            rho(ix, iy) = 1.0 + 0.3 * std::sin(ix * g.h()) * std::sin(iy * g.h());
    spectral::VectorField u(g);
    spectral::ScalarField f = thermo::effective_flux(ws, u, rho, law, 0.1, 1.0);
    spectral::ScalarField gf = law.g_field(rho);
    for (std::size_t m = 0; m < f.size(); ++m)
        CHECK(f.data()[m] == doctest::Approx(-gf.data()[m]).epsilon(1e-12));
}

TEST_CASE("balance residual arithmetic") {
    // hl decays linearly, no flux terms: residual is the slope everywhere
    std::vector<thermo::HlBalanceSample> s;
    for (int i = 0; i <= 4; ++i) s.push_back({0.1 * i, 1.0 - 0.1 * i, 0.0, 0.0});
    auto r = thermo::h_l_balance_residual(s, 1.0, 1.2);
    REQUIRE(r.size() == s.size());
    for (double v : r) CHECK(v == doctest::Approx(-1.0).epsilon(1e-12));

    // constant hl with G active: residual = nu^{-1} g^2 - nu^{-1} g*f
    std::vector<thermo::HlBalanceSample> s2;
    for (int i = 0; i <= 2; ++i) s2.push_back({0.1 * i, 1.0, 0.5, 0.25});
    auto r2 = thermo::h_l_balance_residual(s2, 1.0, 2.0);
    for (double v : r2) CHECK(v == doctest::Approx(0.5 * (0.25 - 0.125)).epsilon(1e-12));

    CHECK_THROWS_AS(thermo::h_l_balance_residual({s2[0], s2[1]}, 1.0, 2.0),
                    std::invalid_argument);
}

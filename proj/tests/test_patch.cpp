#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nsv/patch/patch.hpp"
#include "nsv/util/rng.hpp"

#include <cmath>

using namespace nsv;
using namespace nsv::patch;

namespace {

const double kPi = 3.14159265358979323846;

PatchSpec wavy_disc() {
    PatchSpec spec = PatchSpec::disc(kPi, kPi, 1.2);
    spec.x_modes.push_back({3, 0.15, 0.0});
    spec.y_modes.push_back({3, 0.0, 0.15});
    return spec;
}

double shoelace_area(const MarkerCurve& c) {
    double a = 0.0;
    for (int i = 0; i < c.size(); ++i) {
        const int j = (i + 1) % c.size();
        a += c.x[i] * c.y[j] - c.x[j] * c.y[i];
    }
    return 0.5 * a;
}

VectorField swirl(const spectral::Grid& g, double amp) {
    VectorField u(g);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const double x = ix * g.h(), y = iy * g.h();
            u.x(ix, iy) = amp * std::sin(x) * std::cos(y);
            u.y(ix, iy) = -amp * std::cos(x) * std::sin(y);
        }
    return u;
}

} // namespace

TEST_CASE("boundary curve evaluation") {
    const PatchSpec disc = PatchSpec::disc(kPi, kPi, 1.2);
    double x, y, dx, dy;
    disc.eval(0.7, x, y);
    CHECK(x == doctest::Approx(kPi + 1.2 * std::cos(0.7)).epsilon(1e-14));
    CHECK(y == doctest::Approx(kPi + 1.2 * std::sin(0.7)).epsilon(1e-14));
    disc.eval_deriv(0.7, dx, dy);
    CHECK(dx == doctest::Approx(-1.2 * std::sin(0.7)).epsilon(1e-13));
    CHECK(dy == doctest::Approx(1.2 * std::cos(0.7)).epsilon(1e-13));

    const PatchSpec ell = PatchSpec::ellipse(kPi, kPi, 1.0, 0.6);
    ell.eval(1.3, x, y);
    CHECK(x == doctest::Approx(kPi + std::cos(1.3)).epsilon(1e-14));
    CHECK(y == doctest::Approx(kPi + 0.6 * std::sin(1.3)).epsilon(1e-14));
}

TEST_CASE("marker sampling is uniform in arclength and lies on the curve") {
    const spectral::Grid g(64, 2.0 * kPi);
    const PatchSpec ell = PatchSpec::ellipse(kPi, kPi, 1.0, 0.6);
    const MarkerCurve c = sample_markers(ell, g, 400);
    REQUIRE(c.size() == 400);
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i < c.size(); ++i) {
        const int j = (i + 1) % c.size();
        const double d = std::hypot(c.x[j] - c.x[i], c.y[j] - c.y[i]);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
        const double on = std::pow(c.x[i] - kPi, 2) + std::pow((c.y[i] - kPi) / 0.6, 2);
        CHECK(on == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(hi / lo < 1.0 + 1e-3);
    CHECK(shoelace_area(c) > 0.0);  // counterclockwise

    // default count comes from the grid spacing with a hard floor
    CHECK(sample_markers(ell, g).size() == 256);

    // an eight-shaped series must be rejected, as must one touching the margin
    PatchSpec eight;
    eight.cx = eight.cy = kPi;
    eight.x_modes.push_back({2, 0.0, 0.8});
    eight.y_modes.push_back({1, 0.0, 0.8});
    CHECK_THROWS_AS(sample_markers(eight, g), std::invalid_argument);
    CHECK_THROWS_AS(sample_markers(PatchSpec::disc(kPi, kPi, 2.9), g), std::invalid_argument);
}

TEST_CASE("signed distance field of a disc matches the radial formula") {
    const spectral::Grid g(64, 2.0 * kPi);
    const double band = 0.3;
    const MarkerCurve c = sample_markers(PatchSpec::disc(kPi, kPi, 1.2), g, 1024);
    const SignedDistance sd = signed_distance(c, g, band);

    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const double px = ix * g.h() - kPi, py = iy * g.h() - kPi;
            const double r = std::hypot(px, py);
            const double exact = 1.2 - r;
            if (std::fabs(exact) <= band - g.h()) {
                CHECK(sd.d(ix, iy) == doctest::Approx(exact).epsilon(1e-4));
                // distance gradient points at the centre, tangent is orthogonal
                CHECK(sd.grad_d.x(ix, iy) == doctest::Approx(-px / r).epsilon(0.02));
                CHECK(sd.grad_d.y(ix, iy) == doctest::Approx(-py / r).epsilon(0.02));
                const double dot = sd.tangent.x(ix, iy) * sd.grad_d.x(ix, iy) +
                                   sd.tangent.y(ix, iy) * sd.grad_d.y(ix, iy);
                CHECK(std::fabs(dot) < 0.02);
                const double tn = std::hypot(sd.tangent.x(ix, iy), sd.tangent.y(ix, iy));
                CHECK(tn == doctest::Approx(1.0).epsilon(1e-6));
            } else if (std::fabs(exact) >= band + 2.0 * g.h()) {
                CHECK(std::fabs(sd.d(ix, iy)) == doctest::Approx(band + g.h()).epsilon(1e-12));
                CHECK((sd.d(ix, iy) > 0.0) == (exact > 0.0));
                CHECK(sd.grad_d.x(ix, iy) == 0.0);
                CHECK(sd.tangent.y(ix, iy) == 0.0);
            }
        }
}

TEST_CASE("patch density hits its plateaus exactly") {
    const spectral::Grid g(64, 2.0 * kPi);
    PatchSpec spec = PatchSpec::disc(kPi, kPi, 1.2);
    spec.alpha = 2.0;
    const ScalarField rho = build_patch_density(spec, g);
    const double w = 3.0 * g.h();

    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const double r = std::hypot(ix * g.h() - kPi, iy * g.h() - kPi);
            const double d = 1.2 - r;
            if (d >= 0.5 * w + 0.01) CHECK(rho(ix, iy) == 2.0);
            if (d <= -0.5 * w - 0.01) CHECK(rho(ix, iy) == 1.0);
            CHECK(rho(ix, iy) >= 1.0 - 1e-12);
            CHECK(rho(ix, iy) <= 2.0 + 1e-12);
        }

    // the ramp is centred on the curve, so the excess mass is the disc area
    // up to a ramp-moment correction of order w^2
    const double expected = g.L * g.L + (spec.alpha - 1.0) * kPi * 1.2 * 1.2;
    CHECK(spectral::mass(rho) == doctest::Approx(expected).epsilon(0.01));

    // vacuum patch: alpha 0 floors the interior at zero
    spec.alpha = 0.0;
    const ScalarField hole = build_patch_density(spec, g);
    CHECK(spectral::min_value(hole) == 0.0);
    CHECK(spectral::max_value(hole) == 1.0);
}

TEST_CASE("interface metrics reproduce circle values") {
    const spectral::Grid g(128, 2.0 * kPi);
    const double r = 1.2, p = 4.0;
    const MarkerCurve c = sample_markers(PatchSpec::disc(kPi, kPi, r), g, 512);
    const RegularityReport rep = interface_regularity(c, p);
    CHECK(rep.arclength == doctest::Approx(2.0 * kPi * r).epsilon(1e-4));
    CHECK(rep.curvature_max == doctest::Approx(1.0 / r).epsilon(1e-2));
    // |gamma''| = 1/r on the whole curve: seminorm (2 pi r)^(1/p) / r
    CHECK(rep.w2p_seminorm == doctest::Approx(std::pow(2.0 * kPi * r, 1.0 / p) / r).epsilon(1e-2));
    CHECK_FALSE(rep.self_intersecting);

    MarkerCurve eight;
    for (int i = 0; i < 200; ++i) {
        const double t = 2.0 * kPi * i / 200;
        eight.x.push_back(kPi + 0.8 * std::sin(2.0 * t));
        eight.y.push_back(kPi + 0.8 * std::sin(t));
    }
    CHECK(interface_regularity(eight, p).self_intersecting);
    CHECK_THROWS_AS(interface_regularity(c, 0.5), std::invalid_argument);
}

TEST_CASE("built family stays tangent to the interface") {
    const spectral::Grid g(64, 2.0 * kPi);
    const PatchSpec spec = wavy_disc();
    const striated::VectorFieldFamily fam = build_tangential_family(spec, g);
    REQUIRE(fam.size() == 2);
    const MarkerCurve c = sample_markers(spec, g, 512);
    CHECK(tangency_error(c, fam.member(0)) < 2e-2);
}

TEST_CASE("bicubic interpolation is node-exact and third-order accurate") {
    auto sample_err = [](int n) {
        const spectral::Grid g(n, 2.0 * kPi);
        ScalarField f(g);
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix)
                f(ix, iy) = std::sin(2.0 * ix * g.h()) * std::cos(iy * g.h());
        CHECK(interp_bicubic(f, 5 * g.h(), 9 * g.h()) ==
              doctest::Approx(f(5, 9)).epsilon(1e-13));
        util::Rng rng(0xfeedbeefULL, 3);
        double worst = 0.0;
        for (int k = 0; k < 200; ++k) {
            const double x = rng.uniform(0.0, g.L), y = rng.uniform(0.0, g.L);
            const double exact = std::sin(2.0 * x) * std::cos(y);
            worst = std::max(worst, std::fabs(interp_bicubic(f, x, y) - exact));
        }
        return worst;
    };
    const double e64 = sample_err(64), e128 = sample_err(128);
    CHECK(e64 < 2e-3);
    CHECK(e64 / e128 > 5.0);
}

TEST_CASE("marker advection conserves area under a divergence-free flow") {
    const spectral::Grid g(64, 2.0 * kPi);
    const VectorField u = swirl(g, 0.5);
    MarkerCurve c = sample_markers(PatchSpec::disc(kPi, kPi, 1.2), g, 256);
    const double a0 = shoelace_area(c);
    CHECK(a0 == doctest::Approx(kPi * 1.2 * 1.2).epsilon(1e-3));
    for (int k = 0; k < 20; ++k) {
        const AdvectReport rep = advect_markers(c, u, 0.01);
        CHECK(rep.n_markers == c.size());
    }
    CHECK(shoelace_area(c) == doctest::Approx(a0).epsilon(1e-3));
}

TEST_CASE("markers drifting into the margin abort the advection") {
    const spectral::Grid g(64, 2.0 * kPi);
    VectorField u(g);
    u.x.fill(10.0);
    MarkerCurve c = sample_markers(PatchSpec::disc(kPi, kPi, 1.2), g, 256);
    CHECK_THROWS_AS(
        [&] {
            for (int k = 0; k < 10; ++k) advect_markers(c, u, 0.05);
        }(),
        std::runtime_error);
}

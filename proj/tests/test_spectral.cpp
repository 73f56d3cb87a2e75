#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nsv/diag/diag.hpp"
#include "nsv/simd/kernels.hpp"
#include "nsv/spectral/ops.hpp"
#include "nsv/util/rng.hpp"

#include <cmath>

using namespace nsv;
using namespace nsv::spectral;

namespace {

const double kPi = 3.14159265358979323846;

ScalarField trig_field(const Grid& g, int kx, int ky, double amp = 1.0) {
    ScalarField f(g);
    const double w = 2.0 * kPi / g.L;
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix)
            f(ix, iy) = amp * std::sin(w * kx * ix * g.h()) * std::cos(w * ky * iy * g.h());
    return f;
}

double rel_diff(const ScalarField& a, const ScalarField& b) {
    ScalarField d(a.grid());
    simd::axpby(d.data(), 1.0, a.data(), -1.0, b.data(), d.size());
    const double nb = norm_l2(b);
    return nb > 0.0 ? norm_l2(d) / nb : norm_l2(d);
}

} // namespace

TEST_CASE("grid geometry and mode bookkeeping") {
    const Grid g(32, 4.0);
    CHECK(g.h() == doctest::Approx(0.125));
    CHECK(g.size() == 1024);
    CHECK(g.nkx() == 17);
    CHECK(g.spec_size() == 32u * 17u);
    CHECK(g.mode(0) == 0);
    CHECK(g.mode(16) == 16);
    CHECK(g.mode(17) == -15);
    CHECK(g.mode(31) == -1);
    CHECK(g.wave(1) == doctest::Approx(2.0 * kPi / 4.0));
    CHECK_THROWS_AS(Grid(24, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(8, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(32, 0.0), std::invalid_argument);

    const Grid g2(32, 5.0);
    CHECK_THROWS_AS(require_same(g, g2), std::invalid_argument);
}

TEST_CASE("transform round trip and derivatives of trig modes") {
    const Grid g(64, 2.0 * kPi);
    Workspace ws(g);
    ScalarField f = trig_field(g, 3, 2, 1.3);

    SpecField c = fft(ws, f);
    ScalarField back = ifft(ws, c);
    CHECK(rel_diff(back, f) < 1e-14);

    // grad(sin(3x)cos(2y)) = (3cos(3x)cos(2y), -2sin(3x)sin(2y))
    VectorField gr(g);
    grad(ws, f, gr);
    ScalarField ex(g), ey(g);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const double x = ix * g.h(), y = iy * g.h();
            ex(ix, iy) = 1.3 * 3.0 * std::cos(3.0 * x) * std::cos(2.0 * y);
            ey(ix, iy) = -1.3 * 2.0 * std::sin(3.0 * x) * std::sin(2.0 * y);
        }
    CHECK(rel_diff(gr.x, ex) < 1e-12);
    CHECK(rel_diff(gr.y, ey) < 1e-12);

    // div(grad f).= laplacian f = -(9+4) f
    ScalarField lap = laplacian(ws, f);
    ScalarField divgrad = div(ws, gr);
    CHECK(rel_diff(divgrad, lap) < 1e-12);
    ScalarField scaled(g);
    simd::scale(scaled.data(), -13.0, f.data(), f.size());
    CHECK(rel_diff(lap, scaled) < 1e-12);

    // perp_grad = (d2 f, -d1 f), so div(perp_grad) = 0 and rot(perp_grad) = -lap
    VectorField pg = perp_grad(ws, f);
    CHECK(rel_diff(pg.x, gr.y) < 1e-12);
    CHECK(norm_l2(div(ws, pg)) < 1e-12);
    ScalarField rpg = rot(ws, pg);
    ScalarField neg_lap(g);
    simd::scale(neg_lap.data(), -1.0, lap.data(), lap.size());
    CHECK(rel_diff(rpg, neg_lap) < 1e-12);
}

TEST_CASE("norm semantics") {
    const Grid g(32, 2.0 * kPi);
    ScalarField f(g);
    f.fill(-1.5);
    const double area = g.L * g.L;
    CHECK(mean(f) == doctest::Approx(-1.5));
    CHECK(mass(f) == doctest::Approx(-1.5 * area));
    CHECK(norm_l2(f) == doctest::Approx(1.5 * std::sqrt(area)));
    CHECK(norm_lp(f, 4.0) == doctest::Approx(1.5 * std::pow(area, 0.25)));
    CHECK(norm_linf(f) == 1.5);
    CHECK(min_value(f) == -1.5);
    CHECK(max_value(f) == -1.5);

    // |sin|_L2^2 over the box is area/2
    ScalarField s = trig_field(g, 1, 0);
    CHECK(norm_l2(s) == doctest::Approx(std::sqrt(area / 2.0)).epsilon(1e-12));
}

TEST_CASE("identities on random fields") {
    const Grid g(64, 2.0 * kPi);
    Workspace ws(g);
    for (int i = 0; i < 20; ++i) {
        const std::uint64_t si = util::mix(99, i);
        util::Rng rng(util::mix(si, 7));
        ScalarField f = diag::random_scalar_sample(ws, util::mix(si, 1), rng.uniform(2.0, 9.0));
        VectorField u = diag::random_vector_sample(ws, util::mix(si, 2), rng.uniform(2.0, 9.0));

        // R11 + R22 = identity minus mean
        ScalarField r11 = riesz(ws, 1, 1, f);
        ScalarField r22 = riesz(ws, 2, 2, f);
        ScalarField ref = f;
        const double fm = mean(f);
        for (std::size_t m = 0; m < ref.size(); ++m) ref.data()[m] -= fm;
        ScalarField sum(g);
        simd::axpby(sum.data(), 1.0, r11.data(), 1.0, r22.data(), sum.size());
        CHECK(rel_diff(sum, ref) < 1e-10);

        // Riesz products commute: R12 = R21
        ScalarField r12 = riesz(ws, 1, 2, f);
        ScalarField r21 = riesz(ws, 2, 1, f);
        CHECK(rel_diff(r12, r21) < 1e-12);

        // (-Lap)^{-1} then -Lap returns the mean-free part
        ScalarField w = inverse_neg_laplacian(ws, f);
        ScalarField lap = laplacian(ws, w);
        simd::scale(lap.data(), -1.0, lap.data(), lap.size());
        CHECK(rel_diff(lap, ref) < 1e-10);

        // hodge: parts recombine, grad part is curl-free, sol part div-free
        VectorField gp(g), sp(g);
        hodge(ws, u, gp, sp);
        VectorField rec(g);
        simd::axpby(rec.x.data(), 1.0, gp.x.data(), 1.0, sp.x.data(), rec.x.size());
        simd::axpby(rec.y.data(), 1.0, gp.y.data(), 1.0, sp.y.data(), rec.y.size());
        CHECK(rel_diff(rec.x, u.x) < 1e-10);
        CHECK(rel_diff(rec.y, u.y) < 1e-10);
        const double uscale = std::max(norm_l2(u.x), norm_l2(u.y));
        CHECK(norm_l2(rot(ws, gp)) < 1e-10 * uscale);
        CHECK(norm_l2(div(ws, sp)) < 1e-10 * uscale);

        // parseval on the r2c layout
        SpecField c(g);
        ws.forward(f, c);
        const double spec_sq = parseval_l2_sq(ws, c);
        const double grid_sq = norm_l2(f) * norm_l2(f);
        CHECK(std::fabs(spec_sq - grid_sq) <= 1e-10 * grid_sq);
    }
}

TEST_CASE("projection removes divergence, keeps the mean") {
    const Grid g(64, 2.0 * kPi);
    Workspace ws(g);
    VectorField u = diag::random_vector_sample(ws, 1234, 5.0);
    u.x.data()[0] += 0.7;  // grid delta: content on every mode, nyquist included
    const double mx = mean(u.x), my = mean(u.y);
    const double div_before = norm_l2(div(ws, u));
    project_solenoidal(ws, u);
    CHECK(norm_l2(div(ws, u)) < 1e-11 * div_before);
    CHECK(mean(u.x) == doctest::Approx(mx).epsilon(1e-12));
    CHECK(mean(u.y) == doctest::Approx(my).epsilon(1e-12));
}

TEST_CASE("dealias and nyquist masks") {
    const Grid g(32, 2.0 * kPi);
    Workspace ws(g);

    // a mode beyond 2/3 cutoff dies, a low mode survives
    ScalarField hi = trig_field(g, 13, 0);
    ScalarField lo = trig_field(g, 3, 1);
    ScalarField mixd(g);
    simd::axpby(mixd.data(), 1.0, hi.data(), 1.0, lo.data(), mixd.size());
    dealias(ws, mixd);
    CHECK(rel_diff(mixd, lo) < 1e-12);

    // nyquist row/column zeroing
    SpecField c(g);
    for (std::size_t m = 0; m < c.modes(); ++m) c.set(m, {1.0, 1.0});
    zero_nyquist_spec(c);
    for (int iy = 0; iy < g.n; ++iy) CHECK(c.at(c.midx(g.n / 2, iy)) == std::complex<double>{});
    for (int ix = 0; ix < g.nkx(); ++ix) CHECK(c.at(c.midx(ix, g.n / 2)) == std::complex<double>{});
    CHECK(c.at(c.midx(1, 1)) == std::complex<double>(1.0, 1.0));
}

TEST_CASE("hminus1 norm scales as 1/|k|") {
    const Grid g(64, 2.0 * kPi);
    Workspace ws(g);
    ScalarField s1 = trig_field(g, 1, 0);
    ScalarField s2 = trig_field(g, 2, 0);
    const double n1 = norm_hminus1(ws, s1);
    const double n2 = norm_hminus1(ws, s2);
    CHECK(n1 == doctest::Approx(norm_l2(s1)).epsilon(1e-12));  // |k| = 1
    CHECK(n2 == doctest::Approx(0.5 * norm_l2(s2)).epsilon(1e-12));

    ScalarField c0(g);
    c0.fill(3.0);  // pure mean: dropped entirely
    CHECK(norm_hminus1(ws, c0) == 0.0);
}

TEST_CASE("top third fraction separates scales") {
    const Grid g(64, 2.0 * kPi);
    Workspace ws(g);
    ScalarField lo = trig_field(g, 2, 1);
    ScalarField hi = trig_field(g, 25, 0);
    CHECK(top_third_fraction(ws, lo) < 1e-12);
    CHECK(top_third_fraction(ws, hi) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grad_tensor matches componentwise gradients") {
    const Grid g(32, 2.0 * kPi);
    Workspace ws(g);
    VectorField u = diag::random_vector_sample(ws, 777, 4.0);
    SpecField c1 = fft(ws, u.x), c2 = fft(ws, u.y);
    GradTensor gt(g);
    grad_tensor(ws, c1, c2, gt);
    VectorField gx(g), gy(g);
    grad(ws, u.x, gx);
    grad(ws, u.y, gy);
    CHECK(rel_diff(gt.dxux, gx.x) < 1e-12);
    CHECK(rel_diff(gt.dyux, gx.y) < 1e-12);
    CHECK(rel_diff(gt.dxuy, gy.x) < 1e-12);
    CHECK(rel_diff(gt.dyuy, gy.y) < 1e-12);
}

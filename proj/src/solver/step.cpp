#include "detail.hpp"

#include "nsv/simd/kernels.hpp"
#include "nsv/solver/muscl.hpp"

#include <cmath>
#include <cstring>

namespace nsv::solver {

using namespace spectral;

namespace {

// phi_j(z) = (e^z - sum_{k<j} z^k/k!) / z^j, evaluated by Taylor series near 0
// where the direct form cancels catastrophically.
void phi123(double z, double& p1, double& p2, double& p3) {
    if (std::fabs(z) < 0.25) {
        double f = 1.0;     // k!
        double zk = 1.0;    // z^k
        p1 = p2 = p3 = 0.0;
        for (int k = 0; k < 14; ++k) {
            p1 += zk / (f * (k + 1));
            p2 += zk / (f * (k + 1) * (k + 2));
            p3 += zk / (f * (k + 1) * (k + 2) * (k + 3));
            zk *= z;
            f *= (k + 1);
        }
        return;
    }
    const double ez = std::exp(z);
    p1 = (ez - 1.0) / z;
    p2 = (ez - 1.0 - z) / (z * z);
    p3 = (ez - 1.0 - z - 0.5 * z * z) / (z * z * z);
}

// Stage densities feed the pressure law, which rejects negative input with a
// generic error. Convert that failure mode into a located StepError here so
// the caller always sees the same type when the integration breaks.
void require_stage_density(const ScalarField& rho, double t, int n) {
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double r = rho.data()[i];
        if (!(r >= 0.0) || !std::isfinite(r))
            throw StepError("negative density in transport stage", t, int(i % std::size_t(n)),
                            int(i / std::size_t(n)), r);
    }
}

// Exponential-integrator weights for one damping family (rate per mode
// rate*k^2, rate > 0). All dt factors are baked in.
struct FamilyTables {
    Buffer e1, eh, c1h, c1, b1, b2, b3;

    void build(const Workspace& ws, double rate, double dt) {
        const std::size_t m = ws.grid().spec_size();
        for (Buffer* b : {&e1, &eh, &c1h, &c1, &b1, &b2, &b3}) b->resize(m);
        const double* k2 = ws.k2();
        for (std::size_t i = 0; i < m; ++i) {
            const double z = -rate * k2[i] * dt;
            e1[i] = std::exp(z);
            eh[i] = std::exp(0.5 * z);
            double p1, p2, p3, q1, q2, q3;
            phi123(z, p1, p2, p3);
            phi123(0.5 * z, q1, q2, q3);
            c1h[i] = 0.5 * dt * q1;
            c1[i] = dt * p1;
            b1[i] = dt * (p1 - 3.0 * p2 + 4.0 * p3);
            b2[i] = dt * (4.0 * p2 - 8.0 * p3);
            b3[i] = dt * (-p2 + 4.0 * p3);
        }
    }
};

} // namespace

struct Stepper::Impl {
    Grid g;
    thermo::PressureLaw law;
    StepperOptions opt;
    double nu;
    double floor;
    Workspace ws;
    detail::TendencyScratch scr;

    SpecField u1h, u2h, f11, f12, f21, f22, f31, f32, s1, s2, t1, t2;
    VectorField ue, av, bv;
    ScalarField r1, r2, rnew;

    double tab_dt = -1.0, tab_beta = -1.0;
    FamilyTables sol, grd;   // rates beta*mu and beta*nu

    Impl(const Grid& grid, const thermo::PressureLaw& l, const StepperOptions& o)
        : g(grid), law(l), opt(o), nu(2.0 * o.mu + o.lambda),
          floor(o.rho_floor_solver > 0.0 ? o.rho_floor_solver : 1e-3 * l.rho_tilde()),
          ws(grid), scr(grid), u1h(grid), u2h(grid), f11(grid), f12(grid), f21(grid),
          f22(grid), f31(grid), f32(grid), s1(grid), s2(grid), t1(grid), t2(grid),
          ue(grid), av(grid), bv(grid), r1(grid), r2(grid), rnew(grid) {
        if (!(o.mu > 0.0)) throw std::invalid_argument("stepper: mu must be positive");
        if (!(nu > 0.0)) throw std::invalid_argument("stepper: 2*mu + lambda must be positive");
    }

    void tables(double dt, double beta) {
        if (dt == tab_dt && beta == tab_beta) return;
        sol.build(ws, beta * opt.mu, dt);
        grd.build(ws, beta * nu, dt);
        tab_dt = dt;
        tab_beta = beta;
    }

    // picks e1 / eh / ... of both families by member pointer
    using Tab = Buffer FamilyTables::*;

    // (c1, c2) <- T applied through the Hodge splitting: the gradient part of
    // the mode sees the grd table, the rest the sol table. Zero mode is
    // treated as solenoidal (z = 0 there for both, equal entries).
    void apply_split(Tab t, SpecField& c1, SpecField& c2) const {
        const Buffer& tg = grd.*t;
        const Buffer& ts = sol.*t;
        const int nkx = g.nkx();
        const double* k2 = ws.k2();
        const double* ik2 = ws.inv_k2();
        for (int iy = 0; iy < g.n; ++iy) {
            const double ky = ws.ky_of(iy);
            for (int ikx = 0; ikx < nkx; ++ikx) {
                const std::size_t m = c1.midx(ikx, iy);
                const std::complex<double> a = c1.at(m), b = c2.at(m);
                if (k2[m] == 0.0) {
                    c1.set(m, ts[m] * a);
                    c2.set(m, ts[m] * b);
                    continue;
                }
                const double kx = ws.kx_of(ikx);
                const std::complex<double> kc = (kx * a + ky * b) * ik2[m];
                const double d = tg[m] - ts[m];
                c1.set(m, ts[m] * a + d * kx * kc);
                c2.set(m, ts[m] * b + d * ky * kc);
            }
        }
    }

    void tendency(const ScalarField& rho, const VectorField& u, const SpecField& uh1,
                  const SpecField& uh2, double beta, double* removed, SpecField& n1,
                  SpecField& n2) {
        detail::nonlinear_tendency(ws, scr, rho, u, uh1, uh2, law, opt.mu, opt.lambda, beta,
                                   floor, opt.dealias, removed, n1, n2);
    }
};

Stepper::Stepper(const Grid& g, const thermo::PressureLaw& law, const StepperOptions& opt)
    : impl_(std::make_unique<Impl>(g, law, opt)) {}
Stepper::~Stepper() = default;

double Stepper::mu() const { return impl_->opt.mu; }
double Stepper::lambda() const { return impl_->opt.lambda; }
double Stepper::nu() const { return impl_->nu; }
const StepperOptions& Stepper::options() const { return impl_->opt; }
Workspace& Stepper::workspace() { return impl_->ws; }

double Stepper::cfl_dt(const FluidState& s, const char** binding) const {
    if (binding) *binding = "acoustic";
    if (impl_->opt.dt_override > 0.0) {
        if (binding) *binding = "override";
        return impl_->opt.dt_override;
    }
    require_same(s.grid(), impl_->g);
    const std::size_t n = s.rho.size();
    double v2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q = s.u.x[i] * s.u.x[i] + s.u.y[i] * s.u.y[i];
        if (!std::isfinite(q)) throw StepError("non-finite velocity in cfl_dt", s.t,
                                               int(i % impl_->g.n), int(i / impl_->g.n), q);
        v2 = std::max(v2, q);
    }
    const double h = impl_->g.h();
    double dt = impl_->opt.cfl_acoustic * h / impl_->law.sound_speed_max(s.rho);
    if (v2 > 0.0) {
        const double adv = impl_->opt.cfl_advective * h / std::sqrt(v2);
        if (adv < dt) {
            dt = adv;
            if (binding) *binding = "advective";
        }
    }
    return dt;
}

StepReport Stepper::step(FluidState& s, double dt) {
    Impl& im = *impl_;
    require_same(s.grid(), im.g);
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const std::size_t n = s.rho.size();
    const std::size_t m2 = 2 * im.u1h.modes();
    const bool freeze = im.opt.freeze_transport;

    simd::recip_clamped(im.scr.w.data(), s.rho.data(), im.floor, n);
    const double beta = simd::max_abs(im.scr.w.data(), n);
    im.tables(dt, beta);

    im.ws.forward(s.u.x, im.u1h);
    im.ws.forward(s.u.y, im.u2h);

    double removed = 0.0;
    im.tendency(s.rho, s.u, im.u1h, im.u2h, beta, &removed, im.f11, im.f12);

    // Euler endpoint velocity, used only as the second density stage speed
    simd::axpby(im.t1.raw(), 1.0, im.u1h.raw(), dt, im.f11.raw(), m2);
    simd::axpby(im.t2.raw(), 1.0, im.u2h.raw(), dt, im.f12.raw(), m2);
    im.apply_split(&FamilyTables::e1, im.t1, im.t2);
    im.ws.inverse(im.t1, im.ue.x);
    im.ws.inverse(im.t2, im.ue.y);

    // midpoint stage a = Eh u + (dt/2) phi1(z/2) F1
    im.s1 = im.u1h;
    im.s2 = im.u2h;
    im.apply_split(&FamilyTables::eh, im.s1, im.s2);
    im.t1 = im.f11;
    im.t2 = im.f12;
    im.apply_split(&FamilyTables::c1h, im.t1, im.t2);
    simd::axpby(im.s1.raw(), 1.0, im.s1.raw(), 1.0, im.t1.raw(), m2);
    simd::axpby(im.s2.raw(), 1.0, im.s2.raw(), 1.0, im.t2.raw(), m2);
    im.ws.inverse(im.s1, im.av.x);
    im.ws.inverse(im.s2, im.av.y);

    if (!freeze) {
        fv_euler(s.rho, s.u, dt, im.r1);
        fv_euler(im.r1, im.ue, dt, im.r2);
        simd::axpby(im.r2.data(), 0.75, s.rho.data(), 0.25, im.r2.data(), n);
    }
    const ScalarField& rho_mid = freeze ? s.rho : im.r2;
    if (!freeze) require_stage_density(rho_mid, s.t, im.g.n);

    im.tendency(rho_mid, im.av, im.s1, im.s2, beta, &removed, im.f21, im.f22);

    // endpoint stage b = E1 u + dt phi1(z) (2 F2 - F1)
    simd::axpby(im.f31.raw(), 2.0, im.f21.raw(), -1.0, im.f11.raw(), m2);
    simd::axpby(im.f32.raw(), 2.0, im.f22.raw(), -1.0, im.f12.raw(), m2);
    im.apply_split(&FamilyTables::c1, im.f31, im.f32);
    im.t1 = im.u1h;
    im.t2 = im.u2h;
    im.apply_split(&FamilyTables::e1, im.t1, im.t2);
    simd::axpby(im.t1.raw(), 1.0, im.t1.raw(), 1.0, im.f31.raw(), m2);
    simd::axpby(im.t2.raw(), 1.0, im.t2.raw(), 1.0, im.f32.raw(), m2);
    im.ws.inverse(im.t1, im.bv.x);
    im.ws.inverse(im.t2, im.bv.y);

    if (!freeze) {
        fv_euler(im.r2, im.av, dt, im.r1);
        simd::axpby(im.rnew.data(), 1.0 / 3.0, s.rho.data(), 2.0 / 3.0, im.r1.data(), n);
    }
    const ScalarField& rho_end = freeze ? s.rho : im.rnew;
    if (!freeze) require_stage_density(rho_end, s.t, im.g.n);

    im.tendency(rho_end, im.bv, im.t1, im.t2, beta, &removed, im.f31, im.f32);

    im.apply_split(&FamilyTables::e1, im.u1h, im.u2h);
    im.apply_split(&FamilyTables::b1, im.f11, im.f12);
    im.apply_split(&FamilyTables::b2, im.f21, im.f22);
    im.apply_split(&FamilyTables::b3, im.f31, im.f32);
    simd::axpbypcz(im.u1h.raw(), 1.0, im.u1h.raw(), 1.0, im.f11.raw(), 1.0, im.f21.raw(), m2);
    simd::axpby(im.u1h.raw(), 1.0, im.u1h.raw(), 1.0, im.f31.raw(), m2);
    simd::axpbypcz(im.u2h.raw(), 1.0, im.u2h.raw(), 1.0, im.f12.raw(), 1.0, im.f22.raw(), m2);
    simd::axpby(im.u2h.raw(), 1.0, im.u2h.raw(), 1.0, im.f32.raw(), m2);
    im.ws.inverse(im.u1h, s.u.x);
    im.ws.inverse(im.u2h, s.u.y);

    if (!freeze) s.rho = im.rnew;
    s.t += dt;

    StepReport rep;
    rep.t_after = s.t;
    rep.dt = dt;
    rep.beta = beta;
    rep.dealias_energy_removed = removed;
    double v2 = 0.0, rmin = s.rho[0], rmax = s.rho[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double r = s.rho[i], ux = s.u.x[i], uy = s.u.y[i];
        if (!std::isfinite(r) || !std::isfinite(ux) || !std::isfinite(uy))
            throw StepError("non-finite state after step", s.t, int(i % im.g.n),
                            int(i / im.g.n), r);
        if (r < 0.0)
            throw StepError("negative density after step", s.t, int(i % im.g.n),
                            int(i / im.g.n), r);
        v2 = std::max(v2, ux * ux + uy * uy);
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    rep.max_speed = std::sqrt(v2);
    rep.cstar = im.law.sound_speed_max(s.rho);
    rep.mass = mass(s.rho);
    rep.rho_min = rmin;
    rep.rho_max = rmax;
    return rep;
}

} // namespace nsv::solver

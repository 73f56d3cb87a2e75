#include "nsv/limit/limit.hpp"

#include "nsv/simd/kernels.hpp"
#include "nsv/solver/muscl.hpp"

#include <cmath>
#include <stdexcept>

namespace nsv::limit {

using namespace spectral;

struct IncompressibleSolver::Impl {
    Grid g;
    IncompOptions opt;
    Workspace ws;

    // exponential viscous factor, cached on (dt, beta)
    Buffer e1;
    double tab_dt = -1.0, tab_beta = -1.0;

    // scratch
    GradTensor gt;
    ScalarField w, adv, lap, divv, r, z, p, q, pi, r1, r2, rmid;
    VectorField gp, vstar, vmid;
    SpecField u1h, u2h, a1h, a2h, f11, f12, f21, f22, s1, s2, t1;

    double div_linf_last = 0.0;
    int pcg_iters_last = 0;

    Impl(const Grid& gg, const IncompOptions& o)
        : g(gg), opt(o), ws(gg), e1(gg.spec_size(), 0.0), gt(gg), w(gg), adv(gg), lap(gg),
          divv(gg), r(gg), z(gg), p(gg), q(gg), pi(gg), r1(gg), r2(gg), rmid(gg), gp(gg),
          vstar(gg), vmid(gg), u1h(gg), u2h(gg), a1h(gg), a2h(gg), f11(gg), f12(gg),
          f21(gg), f22(gg), s1(gg), s2(gg), t1(gg) {}

    double floor_for(const ScalarField& rho) const {
        return opt.rho_floor > 0.0 ? opt.rho_floor : 1e-3 * mean(rho);
    }

    void build_tables(double dt, double beta) {
        if (dt == tab_dt && beta == tab_beta) return;
        const double* k2 = ws.k2();
        for (std::size_t i = 0; i < e1.size(); ++i)
            e1[i] = std::exp(-beta * opt.mu * k2[i] * dt);
        tab_dt = dt;
        tab_beta = beta;
    }

    // N = -mask(v.grad v) + (1/rho - beta) mu Lap v, per component, spectral.
    // vh1/vh2 are the transforms of v, supplied by the caller.
    void tendency(const ScalarField& rho, const VectorField& v, const SpecField& vh1,
                  const SpecField& vh2, double beta, SpecField& n1, SpecField& n2) {
        const std::size_t n = rho.size();
        grad_tensor(ws, vh1, vh2, gt);
        simd::recip_clamped(w.data(), rho.data(), floor_for(rho), n);

        const ScalarField* du[2][2] = {{&gt.dxux, &gt.dyux}, {&gt.dxuy, &gt.dyuy}};
        const SpecField* vh[2] = {&vh1, &vh2};
        SpecField* out[2] = {&n1, &n2};
        for (int c = 0; c < 2; ++c) {
            simd::mul(adv.data(), v.x.data(), du[c][0]->data(), n);
            simd::prod_axpz(adv.data(), 1.0, v.y.data(), du[c][1]->data(), adv.data(), n);
            ws.forward(adv, *out[c]);
            if (opt.dealias) dealias_spec(ws, *out[c]);

            // (1/rho - beta) mu Lap v, with the Laplacian taken spectrally
            t1 = *vh[c];
            const double* k2 = ws.k2();
            for (std::size_t m = 0; m < t1.modes(); ++m) {
                t1.raw()[2 * m] *= -opt.mu * k2[m];
                t1.raw()[2 * m + 1] *= -opt.mu * k2[m];
            }
            ws.inverse(t1, lap);
            for (std::size_t i = 0; i < n; ++i)
                adv[i] = (w[i] - beta) * lap[i];
            ws.forward(adv, t1);
            simd::axpby(out[c]->raw(), 1.0, t1.raw(), -1.0, out[c]->raw(),
                        2 * t1.modes());
            zero_nyquist_spec(*out[c]);
        }
    }

    // solve div((1/rho) grad Pi) = div v, then v -= (1/rho) grad Pi
    void project(VectorField& v, const ScalarField& rho, double t) {
        const std::size_t n = rho.size();
        ws.forward(v.x, s1);
        ws.forward(v.y, s2);
        divv = div_from_spec(ws, s1, s2);

        const double b_norm = std::sqrt(simd::dot(divv.data(), divv.data(), n));
        pcg_iters_last = 0;
        if (b_norm > 0.0) {
            simd::recip_clamped(w.data(), rho.data(), floor_for(rho), n);
            const double cbar = mean(w);

            // PCG on A x = b, A = -div((1/rho) grad .), b = -div v,
            // preconditioner (cbar * -Lap)^{-1} spectral
            auto apply_a = [&](const ScalarField& x, ScalarField& out) {
                ws.forward(x, t1);
                grad_from_spec(ws, t1, gp);
                simd::mul(gp.x.data(), gp.x.data(), w.data(), n);
                simd::mul(gp.y.data(), gp.y.data(), w.data(), n);
                ws.forward(gp.x, s1);
                ws.forward(gp.y, s2);
                out = div_from_spec(ws, s1, s2);
                simd::scale(out.data(), -1.0, out.data(), n);
            };
            auto precond = [&](const ScalarField& x, ScalarField& out) {
                ws.forward(x, t1);
                const double* ik2 = ws.inv_k2();
                for (std::size_t m = 0; m < t1.modes(); ++m) {
                    t1.raw()[2 * m] *= ik2[m] / cbar;
                    t1.raw()[2 * m + 1] *= ik2[m] / cbar;
                }
                ws.inverse(t1, out);
            };

            pi.fill(0.0);
            simd::scale(r.data(), -1.0, divv.data(), n);
            precond(r, z);
            p = z;
            double rz = simd::dot(r.data(), z.data(), n);
            bool done = false;
            for (int it = 0; it < opt.pcg_max_iter; ++it) {
                apply_a(p, q);
                const double pq = simd::dot(p.data(), q.data(), n);
                if (!(pq > 0.0))
                    throw solver::StepError("projection: operator lost definiteness", t, -1,
                                            -1, pq);
                const double alpha = rz / pq;
                simd::axpby(pi.data(), 1.0, pi.data(), alpha, p.data(), n);
                simd::axpby(r.data(), 1.0, r.data(), -alpha, q.data(), n);
                const double rn = std::sqrt(simd::dot(r.data(), r.data(), n));
                pcg_iters_last = it + 1;
                if (rn <= opt.pcg_tol * b_norm) {
                    done = true;
                    break;
                }
                precond(r, z);
                const double rz_new = simd::dot(r.data(), z.data(), n);
                simd::axpby(p.data(), 1.0, z.data(), rz_new / rz, p.data(), n);
                rz = rz_new;
            }
            if (!done) {
                const double rel =
                    std::sqrt(simd::dot(r.data(), r.data(), n)) / b_norm;
                throw solver::StepError("projection: no convergence", t, -1, -1, rel);
            }

            ws.forward(pi, t1);
            grad_from_spec(ws, t1, gp);
            for (std::size_t i = 0; i < n; ++i) {
                v.x[i] -= w[i] * gp.x[i];
                v.y[i] -= w[i] * gp.y[i];
            }
        }

        ws.forward(v.x, s1);
        ws.forward(v.y, s2);
        divv = div_from_spec(ws, s1, s2);
        div_linf_last = norm_linf(divv);
    }
};

IncompressibleSolver::IncompressibleSolver(const Grid& g, const IncompOptions& opt)
    : impl_(std::make_unique<Impl>(g, opt)) {
    if (!(opt.mu > 0.0)) throw std::invalid_argument("incompressible: mu must be positive");
}

IncompressibleSolver::~IncompressibleSolver() = default;

void IncompressibleSolver::prepare(solver::FluidState& s) {
    require_same(impl_->g, s.grid());
    ScalarField d = div(impl_->ws, s.u);
    if (norm_l2(d) > 1e-12) project_solenoidal(impl_->ws, s.u);
}

double IncompressibleSolver::cfl_dt(const solver::FluidState& s, const char** binding) const {
    if (impl_->opt.dt_override > 0.0) {
        if (binding) *binding = "override";
        return impl_->opt.dt_override;
    }
    double vmax = 0.0;
    for (std::size_t i = 0; i < s.u.x.size(); ++i) {
        const double sp = s.u.x[i] * s.u.x[i] + s.u.y[i] * s.u.y[i];
        if (sp > vmax) vmax = sp;
    }
    vmax = std::sqrt(vmax);
    if (!(vmax > 1e-14)) {
        if (binding) *binding = "direct";
        return 1e6;
    }
    if (binding) *binding = "advective";
    return impl_->opt.cfl_advective * impl_->g.h() / vmax;
}

solver::StepReport IncompressibleSolver::step(solver::FluidState& s, double dt) {
    Impl& m = *impl_;
    require_same(m.g, s.grid());
    if (!(dt > 0.0)) throw std::invalid_argument("incompressible: dt must be positive");
    const std::size_t n = s.rho.size();

    const double floor = m.floor_for(s.rho);
    double rmin = s.rho[0];
    for (std::size_t i = 0; i < n; ++i) rmin = std::min(rmin, s.rho[i]);
    const double beta = 1.0 / std::max(rmin, floor);
    m.build_tables(dt, beta);

    // F1 and the Lawson predictor v* = E(v + dt F1)
    m.ws.forward(s.u.x, m.u1h);
    m.ws.forward(s.u.y, m.u2h);
    m.tendency(s.rho, s.u, m.u1h, m.u2h, beta, m.f11, m.f12);
    m.s1 = m.u1h;
    m.s2 = m.u2h;
    simd::axpby(m.s1.raw(), 1.0, m.s1.raw(), dt, m.f11.raw(), 2 * m.s1.modes());
    simd::axpby(m.s2.raw(), 1.0, m.s2.raw(), dt, m.f12.raw(), 2 * m.s2.modes());
    simd::cmul_real(m.s1.raw(), m.e1.data(), m.s1.modes());
    simd::cmul_real(m.s2.raw(), m.e1.data(), m.s2.modes());
    m.ws.inverse(m.s1, m.vstar.x);
    m.ws.inverse(m.s2, m.vstar.y);

    // density predictor and predictor projection
    solver::fv_euler(s.rho, s.u, dt, m.r1);
    m.project(m.vstar, m.r1, s.t);

    // corrector tendency at the predicted endpoint
    m.ws.forward(m.vstar.x, m.a1h);
    m.ws.forward(m.vstar.y, m.a2h);
    m.tendency(m.r1, m.vstar, m.a1h, m.a2h, beta, m.f21, m.f22);

    // v+ = E v + dt/2 (E F1 + F2)
    simd::cmul_real(m.f11.raw(), m.e1.data(), m.f11.modes());
    simd::cmul_real(m.f12.raw(), m.e1.data(), m.f12.modes());
    simd::cmul_real(m.u1h.raw(), m.e1.data(), m.u1h.modes());
    simd::cmul_real(m.u2h.raw(), m.e1.data(), m.u2h.modes());
    simd::axpbypcz(m.s1.raw(), 1.0, m.u1h.raw(), 0.5 * dt, m.f11.raw(), 0.5 * dt, m.f21.raw(),
                   2 * m.s1.modes());
    simd::axpbypcz(m.s2.raw(), 1.0, m.u2h.raw(), 0.5 * dt, m.f12.raw(), 0.5 * dt, m.f22.raw(),
                   2 * m.s2.modes());
    VectorField vnew(m.g);
    m.ws.inverse(m.s1, vnew.x);
    m.ws.inverse(m.s2, vnew.y);

    // density corrector: SSP-RK3 with stage velocities v, v*, (v+v*)/2
    simd::axpby(m.vmid.x.data(), 0.5, s.u.x.data(), 0.5, m.vstar.x.data(), n);
    simd::axpby(m.vmid.y.data(), 0.5, s.u.y.data(), 0.5, m.vstar.y.data(), n);
    solver::fv_euler(m.r1, m.vstar, dt, m.r2);
    simd::axpby(m.r2.data(), 0.75, s.rho.data(), 0.25, m.r2.data(), n);
    solver::fv_euler(m.r2, m.vmid, dt, m.rmid);
    simd::axpby(s.rho.data(), 1.0 / 3.0, s.rho.data(), 2.0 / 3.0, m.rmid.data(), n);

    m.project(vnew, s.rho, s.t + dt);
    s.u = vnew;
    s.t += dt;

    solver::StepReport rep;
    rep.t_after = s.t;
    rep.dt = dt;
    rep.beta = beta;
    rep.cstar = 0.0;
    double mass_sum = 0.0, vmax = 0.0;
    rep.rho_min = s.rho[0];
    rep.rho_max = s.rho[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double rv = s.rho[i];
        if (!std::isfinite(rv) || !std::isfinite(s.u.x[i]) || !std::isfinite(s.u.y[i]))
            throw solver::StepError("incompressible: non-finite state", s.t,
                                    static_cast<int>(i % m.g.n), static_cast<int>(i / m.g.n),
                                    rv);
        if (rv < 0.0)
            throw solver::StepError("incompressible: negative density", s.t,
                                    static_cast<int>(i % m.g.n), static_cast<int>(i / m.g.n),
                                    rv);
        mass_sum += rv;
        rep.rho_min = std::min(rep.rho_min, rv);
        rep.rho_max = std::max(rep.rho_max, rv);
        const double sp = s.u.x[i] * s.u.x[i] + s.u.y[i] * s.u.y[i];
        if (sp > vmax) vmax = sp;
    }
    rep.mass = m.g.h() * m.g.h() * mass_sum;
    rep.max_speed = std::sqrt(vmax);
    return rep;
}

double IncompressibleSolver::div_linf_last() const { return impl_->div_linf_last; }
int IncompressibleSolver::pcg_iters_last() const { return impl_->pcg_iters_last; }
const IncompOptions& IncompressibleSolver::options() const { return impl_->opt; }
Workspace& IncompressibleSolver::workspace() { return impl_->ws; }

} // namespace nsv::limit

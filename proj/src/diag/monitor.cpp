#include "nsv/diag/diag.hpp"

#include "nsv/simd/kernels.hpp"
#include "nsv/solver/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace nsv::diag {

using namespace spectral;

namespace {

double l2_sq(const ScalarField& f) {
    const double h2 = f.grid().h() * f.grid().h();
    return h2 * simd::dot(f.data(), f.data(), f.size());
}

} // namespace

const char* DiagnosticsRecord::csv_header() {
    return "t,e_total,e_kinetic,e_potential,e_dissipated,a1,a2,"
           "g_l2,f_l2,f_linf,divu_l2,divu_linf,gradu_l2,gradu_linf,"
           "sqrho_udot_l2,udot_l2,fdot_l2,gradf_l2,rhoudot_l2,"
           "decomp_residual_rel,grad_ug_linf,mass,mom_x,mom_y,"
           "rho_min,rho_max,inv_rho_linf,rho_dev_inf,vacuum_fraction,"
           "i_x,family_norm,a3,a3_variant,dxrho_lp,divrhox_lp,"
           "arclength,w2p,kappa_max,tangency,"
           "int_gradu_inf,int_divu_inf,int_f_inf,quartic_g_time,quartic_f_time,"
           "h1_l1,h3_l1,g_l4,f_l4,a2_unreliable,selfint,n_markers";
}

std::string DiagnosticsRecord::csv_row() const {
    const double cols[] = {
        t, e_total, e_kinetic, e_potential, e_dissipated, a1, a2,
        g_l2, f_l2, f_linf, divu_l2, divu_linf, gradu_l2, gradu_linf,
        sqrho_udot_l2, udot_l2, fdot_l2, gradf_l2, rhoudot_l2,
        decomp_residual_rel, grad_ug_linf, mass, mom_x, mom_y,
        rho_min, rho_max, inv_rho_linf, rho_dev_inf, vacuum_fraction,
        i_x, family_norm, a3, a3_variant, dxrho_lp, divrhox_lp,
        arclength, w2p, kappa_max, tangency,
        int_gradu_inf, int_divu_inf, int_f_inf, quartic_g_time, quartic_f_time,
        h1_l1, h3_l1, g_l4, f_l4,
    };
    std::string s;
    char buf[40];
    for (double v : cols) {
        std::snprintf(buf, sizeof buf, "%.17g,", v);
        s += buf;
    }
    std::snprintf(buf, sizeof buf, "%ld,%ld,%ld", a2_unreliable, selfint, n_markers);
    s += buf;
    return s;
}

TrajectoryMonitor::TrajectoryMonitor(const Grid& g, const thermo::PressureLaw& law, double mu,
                                     double lambda, MonitorOptions opt)
    : g_(g),
      law_(law),
      mu_(mu),
      lambda_(lambda),
      opt_(opt),
      ws_(g),
      h1_(law, 1.0),
      h3_(law, 3.0) {
    if (!(mu > 0.0) || !(2.0 * mu + lambda > 0.0))
        throw std::invalid_argument("monitor: need mu > 0 and nu > 0");
}

void TrajectoryMonitor::attach_family(const striated::VectorFieldFamily* fam) { fam_ = fam; }
void TrajectoryMonitor::attach_markers(const patch::MarkerCurve* c) { markers_ = c; }

void TrajectoryMonitor::accumulate(double t, double rate, double sqrho_sq, double a2_integrand,
                                   double gradu_inf, double divu_inf, double f_inf, double g4q,
                                   double f4q) {
    if (have_prev_) {
        const double dt = t - t_prev_;
        if (dt < 0.0) throw std::logic_error("monitor: samples must advance in time");
        acc_dissipated_ += 0.5 * dt * (rate_prev_ + rate);
        acc_sqrho_ += 0.5 * dt * (sqrho_sq_prev_ + sqrho_sq);
        acc_a2_ += 0.5 * dt * (a2_int_prev_ + a2_integrand);
        acc_gradu_inf_ += 0.5 * dt * (gradu_inf_prev_ + gradu_inf);
        acc_divu_inf_ += 0.5 * dt * (divu_inf_prev_ + divu_inf);
        acc_f_inf_ += 0.5 * dt * (f_inf_prev_ + f_inf);
        acc_g4q_ += 0.5 * dt * (g4q_prev_ + g4q);
        acc_f4q_ += 0.5 * dt * (f4q_prev_ + f4q);
    }
    have_prev_ = true;
    t_prev_ = t;
    rate_prev_ = rate;
    sqrho_sq_prev_ = sqrho_sq;
    a2_int_prev_ = a2_integrand;
    gradu_inf_prev_ = gradu_inf;
    divu_inf_prev_ = divu_inf;
    f_inf_prev_ = f_inf;
    g4q_prev_ = g4q;
    f4q_prev_ = f4q;
}

void TrajectoryMonitor::sample(const solver::FluidState& s) {
    require_same(g_, s.grid());
    DiagnosticsRecord r;
    r.t = s.t;
    const double h2 = g_.h() * g_.h();
    const double nuv = nu();
    const double floor = opt_.rho_floor_rel * law_.rho_tilde();
    const std::size_t nn = s.rho.size();

    r.mass = mass(s.rho);
    r.rho_min = min_value(s.rho);
    r.rho_max = max_value(s.rho);
    r.inv_rho_linf = 1.0 / std::max(r.rho_min, floor);
    {
        double mx = 0.0, my = 0.0, dev = 0.0;
        long vac = 0;
        for (std::size_t i = 0; i < nn; ++i) {
            mx += s.rho[i] * s.u.x[i];
            my += s.rho[i] * s.u.y[i];
            dev = std::max(dev, std::fabs(s.rho[i] - law_.rho_tilde()));
            if (s.rho[i] < floor) ++vac;
        }
        r.mom_x = h2 * mx;
        r.mom_y = h2 * my;
        r.rho_dev_inf = dev;
        r.vacuum_fraction = static_cast<double>(vac) / static_cast<double>(nn);
    }

    SpecField u1h = fft(ws_, s.u.x), u2h = fft(ws_, s.u.y);
    GradTensor gt(g_);
    grad_tensor(ws_, u1h, u2h, gt);
    ScalarField divu(g_);
    simd::axpby(divu.data(), 1.0, gt.dxux.data(), 1.0, gt.dyuy.data(), nn);
    const double gradu_sq =
        l2_sq(gt.dxux) + l2_sq(gt.dyux) + l2_sq(gt.dxuy) + l2_sq(gt.dyuy);
    const double divu_sq = l2_sq(divu);
    r.gradu_l2 = std::sqrt(gradu_sq);
    r.divu_l2 = std::sqrt(divu_sq);
    r.divu_linf = norm_linf(divu);
    {
        double m = 0.0;
        for (std::size_t i = 0; i < nn; ++i) {
            const double q = gt.dxux[i] * gt.dxux[i] + gt.dyux[i] * gt.dyux[i] +
                             gt.dxuy[i] * gt.dxuy[i] + gt.dyuy[i] * gt.dyuy[i];
            if (q > m) m = q;
        }
        r.gradu_linf = std::sqrt(m);
    }

    ScalarField G = law_.g_field(s.rho);
    ScalarField F(g_);
    simd::axpby(F.data(), nuv, divu.data(), -1.0, G.data(), nn);
    r.g_l2 = norm_l2(G);
    r.f_l2 = norm_l2(F);
    r.f_linf = norm_linf(F);
    r.g_l4 = norm_lp(G, 4.0);
    r.f_l4 = norm_lp(F, 4.0);

    VectorField m = solver::momentum_rhs(ws_, s.rho, s.u, law_, mu_, lambda_);
    r.rhoudot_l2 = std::sqrt(l2_sq(m.x) + l2_sq(m.y));
    VectorField udot(g_);
    double sqrho_sq = 0.0;
    for (std::size_t i = 0; i < nn; ++i) {
        if (s.rho[i] >= floor) {
            udot.x[i] = m.x[i] / s.rho[i];
            udot.y[i] = m.y[i] / s.rho[i];
            sqrho_sq += s.rho[i] * (udot.x[i] * udot.x[i] + udot.y[i] * udot.y[i]);
        }
    }
    sqrho_sq *= h2;
    r.sqrho_udot_l2 = std::sqrt(sqrho_sq);
    r.udot_l2 = std::sqrt(l2_sq(udot.x) + l2_sq(udot.y));

    {
        VectorField gf(g_);
        grad(ws_, F, gf);
        r.gradf_l2 = std::sqrt(l2_sq(gf.x) + l2_sq(gf.y));
    }

    ScalarField fd = fdot_field(ws_, s.rho, s.u, udot, law_, mu_, lambda_);
    r.fdot_l2 = norm_l2(fd);
    double grad_udot_sq = 0.0;
    {
        SpecField a1h = fft(ws_, udot.x), a2h = fft(ws_, udot.y);
        GradTensor gd(g_);
        grad_tensor(ws_, a1h, a2h, gd);
        grad_udot_sq = l2_sq(gd.dxux) + l2_sq(gd.dyux) + l2_sq(gd.dxuy) + l2_sq(gd.dyuy);
    }

    if (opt_.track_decomposition) {
        GradDecomposition d = grad_decomposition(ws_, s.rho, s.u, law_, mu_, lambda_);
        r.decomp_residual_rel = d.residual_rel;
        r.grad_ug_linf = d.grad_ug_linf;
    }

    r.h1_l1 = h1_.integral(s.rho);
    r.h3_l1 = h3_.integral(s.rho);

    if (fam_) {
        striated::A3Report a = striated::a3(ws_, s.rho, *fam_, opt_.form);
        r.i_x = striated::nondegeneracy(*fam_);
        r.family_norm = a.family_norm;
        r.a3 = a.value;
        r.a3_variant = a.value_variant;
        r.dxrho_lp = a.sup_dxrho;
        r.divrhox_lp = a.sup_div_rho_x;
    }
    if (markers_) {
        patch::RegularityReport ir = patch::interface_regularity(*markers_, opt_.p);
        r.arclength = ir.arclength;
        r.w2p = ir.w2p_seminorm;
        r.kappa_max = ir.curvature_max;
        r.selfint = ir.self_intersecting ? 1 : 0;
        r.n_markers = static_cast<long>(markers_->size());
        if (fam_) r.tangency = patch::tangency_error(*markers_, fam_->member(0));
    }

    const double sigma = std::min(1.0, s.t);
    const double rate = mu_ * gradu_sq + (mu_ + lambda_) * divu_sq;
    const double a2_integrand =
        sigma * (mu_ * grad_udot_sq + (mu_ + lambda_) / (nuv * nuv) * r.fdot_l2 * r.fdot_l2);
    accumulate(s.t, rate, sqrho_sq, a2_integrand, r.gradu_linf, r.divu_linf, r.f_linf,
               std::pow(r.g_l4, 4.0), std::pow(r.f_l4, 4.0));

    EnergyParts e = energy(s, h1_, acc_dissipated_);
    r.e_kinetic = e.kinetic;
    r.e_potential = e.potential;
    r.e_dissipated = e.dissipated;
    r.e_total = e.total();
    r.a1 = 0.5 * mu_ * gradu_sq + 0.5 * (mu_ + lambda_) * divu_sq + acc_sqrho_;
    r.a2 = sigma * sqrho_sq + acc_a2_;
    r.a2_unreliable = r.vacuum_fraction > opt_.vacuum_trust_fraction ? 1 : 0;
    r.int_gradu_inf = acc_gradu_inf_;
    r.int_divu_inf = acc_divu_inf_;
    r.int_f_inf = acc_f_inf_;
    r.quartic_g_time = acc_g4q_;
    r.quartic_f_time = acc_f4q_;

    records_.push_back(std::move(r));
}

std::vector<thermo::HlBalanceSample> TrajectoryMonitor::balance_samples(double l) const {
    if (l != 1.0 && l != 3.0)
        throw std::invalid_argument("monitor: balance samples recorded for l = 1 and l = 3");
    std::vector<thermo::HlBalanceSample> out;
    out.reserve(records_.size());
    for (const auto& r : records_) {
        if (l == 1.0)
            out.push_back({r.t, r.h1_l1, r.g_l2, r.f_l2});
        else
            out.push_back({r.t, r.h3_l1, r.g_l4, r.f_l4});
    }
    return out;
}

striated::BoundSeries TrajectoryMonitor::i_lower_bound() const {
    if (!fam_) throw std::logic_error("monitor: no family attached");
    std::vector<double> t, iv, gi;
    for (const auto& r : records_) {
        t.push_back(r.t);
        iv.push_back(r.i_x);
        gi.push_back(r.gradu_linf);
    }
    return striated::i_lower_bound_check(t, iv, gi);
}

striated::BoundSeries TrajectoryMonitor::div_rho_x_bound() const {
    if (!fam_) throw std::logic_error("monitor: no family attached");
    std::vector<double> t, dv, di;
    for (const auto& r : records_) {
        t.push_back(r.t);
        dv.push_back(r.divrhox_lp);
        di.push_back(r.divu_linf);
    }
    return striated::div_rho_x_conservation(t, dv, di);
}

CheckResult TrajectoryMonitor::density_deviation_bound() const {
    if (records_.empty()) throw std::logic_error("monitor: no samples");
    CheckResult worst;
    worst.rhs = std::numeric_limits<double>::max();
    double rho_star = 0.0;
    const double dev0 = records_.front().rho_dev_inf;
    for (const auto& r : records_) {
        rho_star = std::max(rho_star, r.rho_max);
        const double rhs = dev0 + rho_star / nu() * r.int_f_inf;
        if (rhs - r.rho_dev_inf < worst.rhs - worst.lhs) {
            worst.lhs = r.rho_dev_inf;
            worst.rhs = rhs;
        }
    }
    return worst;
}

CheckResult TrajectoryMonitor::quartic_flux_balance(double c) const {
    if (records_.empty()) throw std::logic_error("monitor: no samples");
    CheckResult r;
    r.lhs = records_.back().quartic_g_time / nu();
    r.rhs = 2.0 * records_.front().h3_l1 + c * records_.back().quartic_f_time / nu();
    return r;
}

BlowupReport TrajectoryMonitor::blowup_report() const {
    if (records_.empty()) throw std::logic_error("monitor: no samples");
    BlowupReport b;
    const DiagnosticsRecord& r0 = records_.front();
    const double factor = 1.0 + (r0.i_x > 0.0 ? r0.a3 / r0.i_x : 0.0);
    const double t0 = r0.t;

    // smallest c with c*factor*exp(c*(t - t0)) >= int |grad u|_inf at every
    // sample; the left side is increasing in c, so bisect
    auto feasible = [&](double c) {
        for (const auto& r : records_)
            if (c * factor * std::exp(c * (r.t - t0)) < r.int_gradu_inf) return false;
        return true;
    };
    double hi = 1.0;
    while (!feasible(hi) && hi < 1e12) hi *= 2.0;
    if (hi >= 1e12) {
        b.c0 = hi;
    } else {
        double lo = 0.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (feasible(mid) ? hi : lo) = mid;
        }
        b.c0 = hi;
    }

    for (const auto& r : records_) {
        b.sup_family_norm = std::max(b.sup_family_norm, r.family_norm);
        if (r.i_x > 0.0) b.sup_inv_i = std::max(b.sup_inv_i, 1.0 / r.i_x);
        b.sup_rho = std::max(b.sup_rho, r.rho_max);
        b.sup_inv_rho = std::max(b.sup_inv_rho, r.inv_rho_linf);
        b.sup_dxrho = std::max(b.sup_dxrho, r.dxrho_lp);
        b.sup_gradu_l2 = std::max(b.sup_gradu_l2, r.gradu_l2);
        b.sup_udot_l2 = std::max(b.sup_udot_l2, r.udot_l2);
    }
    b.bounded = std::isfinite(b.sup_family_norm) && std::isfinite(b.sup_inv_i) &&
                std::isfinite(b.sup_rho) && std::isfinite(b.sup_inv_rho) &&
                std::isfinite(b.sup_dxrho) && std::isfinite(b.sup_gradu_l2) &&
                std::isfinite(b.sup_udot_l2) && b.c0 < 1e12;
    return b;
}

} // namespace nsv::diag

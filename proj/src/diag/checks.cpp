#include "nsv/diag/diag.hpp"

#include "nsv/simd/kernels.hpp"
#include "nsv/solver/run.hpp"
#include "nsv/util/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nsv::diag {

using namespace spectral;
using util::mix;
using util::Rng;

namespace {

double l2_sq(const ScalarField& f) {
    const double h2 = f.grid().h() * f.grid().h();
    return h2 * simd::dot(f.data(), f.data(), f.size());
}

double qstep(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

// shared curve draw so density samples and their tangential families pair up
// by seed; retries (deterministically) until the curve is simple
patch::PatchSpec draw_patch_spec(const Grid& g, std::uint64_t seed) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Rng rng(mix(seed, 0xc0ffee00u + static_cast<std::uint64_t>(attempt)));
        patch::PatchSpec s;
        const double L = g.L;
        s.cx = L * rng.uniform(0.42, 0.58);
        s.cy = L * rng.uniform(0.42, 0.58);
        const double r0 = L * rng.uniform(0.12, 0.2);
        s.x_modes = {{1, r0, 0.0}};
        s.y_modes = {{1, 0.0, r0}};
        const int nh = 2 + static_cast<int>(rng.u01() * 3.0);
        for (int k = 2; k < 2 + nh; ++k) {
            const double sc = r0 * 0.08 / k;
            s.x_modes.push_back({k, sc * rng.uniform(-1.0, 1.0), sc * rng.uniform(-1.0, 1.0)});
            s.y_modes.push_back({k, sc * rng.uniform(-1.0, 1.0), sc * rng.uniform(-1.0, 1.0)});
        }
        s.edge_width = g.h() * rng.uniform(2.0, 6.0);
        s.chi_radius = std::max(0.25 * r0, 3.5 * g.h());
        try {
            (void)patch::sample_markers(s, g);
            return s;
        } catch (const std::exception&) {
            continue;
        }
    }
    throw std::runtime_error("draw_patch_spec: no simple curve in 64 attempts");
}

} // namespace

CheckResult log_riesz_check(Workspace& ws, const ScalarField& g,
                            const striated::VectorFieldFamily& fam, double q, double c,
                            striated::DerivForm form) {
    CheckResult r;
    const int pairs[3][2] = {{1, 1}, {1, 2}, {2, 2}};
    for (const auto& jk : pairs) {
        ScalarField rr = riesz(ws, jk[0], jk[1], g);
        dealias(ws, rr);
        r.lhs = std::max(r.lhs, norm_linf(rr));
    }
    const double ginf = norm_linf(g);
    if (ginf == 0.0) return r;
    const double sn = striated::striated_norm(ws, g, fam, form);
    r.rhs = c * (norm_lp(g, q) +
                 ginf * (1.0 + std::log(std::exp(1.0) + sn / ginf)));
    return r;
}

CheckResult clms_check(Workspace& ws, const ScalarField& f, const ScalarField& v,
                       const ScalarField& w, double c) {
    const Grid& g = f.grid();
    VectorField gv(g), gw(g), gf(g);
    grad(ws, v, gv);
    grad(ws, w, gw);
    grad(ws, f, gf);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += f[i] * (gv.x[i] * gw.y[i] - gv.y[i] * gw.x[i]);
    CheckResult r;
    r.lhs = std::fabs(g.h() * g.h() * s);
    const double nf = std::sqrt(l2_sq(gf.x) + l2_sq(gf.y));
    const double nv = std::sqrt(l2_sq(gv.x) + l2_sq(gv.y));
    const double nw = std::sqrt(l2_sq(gw.x) + l2_sq(gw.y));
    r.rhs = c * nf * nv * nw;
    return r;
}

InterpChecks interp_check(Workspace& ws, const ScalarField& rho, const VectorField& v,
                          double rho_tilde, double p, const Calibration& cal) {
    const Grid& g = rho.grid();
    const double h2 = g.h() * g.h();

    ScalarField dev(g);
    for (std::size_t i = 0; i < dev.size(); ++i) dev[i] = rho[i] - rho_tilde;
    const double devp = norm_lp(dev, p);

    double vsq = 0.0, wsq = 0.0, w4 = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double s = v.x[i] * v.x[i] + v.y[i] * v.y[i];
        const double r = std::max(rho[i], 0.0);
        vsq += s;
        wsq += r * s;
        w4 += std::cbrt(r * r) * s * s;
    }
    const double v_l2 = std::sqrt(h2 * vsq);
    const double sq_rho_v = std::sqrt(h2 * wsq);
    const double weighted_l4 = std::pow(h2 * w4, 0.25);

    GradTensor gt(g);
    SpecField v1h = fft(ws, v.x), v2h = fft(ws, v.y);
    grad_tensor(ws, v1h, v2h, gt);
    const double grad_v =
        std::sqrt(l2_sq(gt.dxux) + l2_sq(gt.dyux) + l2_sq(gt.dxuy) + l2_sq(gt.dyuy));

    InterpChecks out;
    out.l2.lhs = v_l2;
    out.l2.rhs = cal.c_interp_l2 * (std::pow(devp, p / 2.0) * grad_v + sq_rho_v);
    out.weighted_l4.lhs = weighted_l4;
    out.weighted_l4.rhs =
        cal.c_interp_weighted *
        (std::sqrt(sq_rho_v * grad_v) +
         std::pow(devp, p / 12.0) * std::cbrt(sq_rho_v) * std::pow(grad_v, 2.0 / 3.0));
    return out;
}

ScalarField random_scalar_sample(Workspace& ws, std::uint64_t seed, double kpeak) {
    const Grid& g = ws.grid();
    Rng rng(mix(seed, 0x5ca1ab1eull));
    ScalarField w(g);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.normal();
    SpecField wh = fft(ws, w);
    const double ik = 1.0 / (kpeak * kpeak);
    for (std::size_t m = 0; m < wh.modes(); ++m) {
        const double amp = ws.k2()[m] == 0.0 ? 0.0 : std::exp(-ws.k2()[m] * ik);
        wh.raw()[2 * m] *= amp;
        wh.raw()[2 * m + 1] *= amp;
    }
    ScalarField out(g);
    ws.inverse(wh, out);
    const double m = simd::max_abs(out.data(), out.size());
    if (m > 0.0) simd::scale(out.data(), 1.0 / m, out.data(), out.size());
    return out;
}

VectorField random_vector_sample(Workspace& ws, std::uint64_t seed, double kpeak) {
    VectorField v(ws.grid());
    v.x = random_scalar_sample(ws, mix(seed, 1), kpeak);
    v.y = random_scalar_sample(ws, mix(seed, 2), kpeak);
    return v;
}

ScalarField mollified_indicator_sample(const Grid& g, std::uint64_t seed, double alpha,
                                       double rho_tilde) {
    patch::PatchSpec s = draw_patch_spec(g, seed);
    s.alpha = alpha;
    s.rho_tilde = rho_tilde;
    return patch::build_patch_density(s, g);
}

ScalarField vacuum_pocket_sample(const Grid& g, std::uint64_t seed, double alpha) {
    ScalarField rho = mollified_indicator_sample(g, seed, alpha, 1.0);
    Rng rng(mix(seed, 0x90cce7ull));
    const int np = 1 + static_cast<int>(rng.u01() * 3.0);
    const double L = g.L;
    for (int q = 0; q < np; ++q) {
        const double cx = L * rng.u01(), cy = L * rng.u01();
        const double rp = L * rng.uniform(0.04, 0.09);
        for (int iy = 0; iy < g.n; ++iy) {
            double dy = std::fabs(g.x(iy) - cy);
            dy = std::min(dy, L - dy);
            for (int ix = 0; ix < g.n; ++ix) {
                double dx = std::fabs(g.x(ix) - cx);
                dx = std::min(dx, L - dx);
                const double d = std::sqrt(dx * dx + dy * dy);
                rho[g.idx(ix, iy)] *= qstep(2.0 * (d / rp - 0.5));
            }
        }
    }
    return rho;
}

striated::VectorFieldFamily tangential_family_sample(const Grid& g, std::uint64_t seed,
                                                     double p) {
    patch::PatchSpec s = draw_patch_spec(g, seed);
    return patch::build_tangential_family(s, g, p);
}

Calibration calibrate(int n, int samples, std::uint64_t seed) {
    const Grid g{n, 6.283185307179586476925286766559};
    Workspace ws(g);
    const thermo::PressureLaw law = thermo::PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);

    Calibration cal;
    cal.seed = seed;
    cal.samples = samples;
    cal.grid_n = n;
    const double safety = 1.1;

    double worst_lr = 0.0;
    for (int i = 0; i < samples; ++i) {
        const std::uint64_t si = mix(seed, 0x100000ull + i);
        Rng rng(mix(si, 7));
        const double alpha = rng.uniform(1.2, 2.5);
        ScalarField rho = mollified_indicator_sample(g, si, alpha, 1.0);
        striated::VectorFieldFamily fam = tangential_family_sample(g, si, 4.0);
        ScalarField gf = law.g_field(rho);
        CheckResult r = log_riesz_check(ws, gf, fam, 4.0, 1.0, striated::DerivForm::conservative);
        if (r.rhs > 0.0) worst_lr = std::max(worst_lr, r.lhs / r.rhs);
    }
    cal.c_log_riesz = safety * worst_lr;

    double worst_cl = 0.0;
    for (int i = 0; i < samples; ++i) {
        const std::uint64_t si = mix(seed, 0x200000ull + i);
        Rng rng(mix(si, 7));
        const double kp = rng.uniform(2.0, 8.0);
        ScalarField f = random_scalar_sample(ws, mix(si, 11), kp);
        ScalarField v = random_scalar_sample(ws, mix(si, 12), kp);
        ScalarField w = random_scalar_sample(ws, mix(si, 13), kp);
        CheckResult r = clms_check(ws, f, v, w, 1.0);
        if (r.rhs > 1e-300) worst_cl = std::max(worst_cl, r.lhs / r.rhs);
    }
    cal.c_clms = safety * worst_cl;

    Calibration unit;
    unit.c_interp_l2 = 1.0;
    unit.c_interp_weighted = 1.0;
    double worst_l2 = 0.0, worst_w4 = 0.0;
    for (int i = 0; i < samples; ++i) {
        const std::uint64_t si = mix(seed, 0x300000ull + i);
        Rng rng(mix(si, 7));
        const double alpha = rng.uniform(1.2, 2.5);
        ScalarField rho = (i % 2 == 0) ? vacuum_pocket_sample(g, si, alpha)
                                       : mollified_indicator_sample(g, si, alpha, 1.0);
        VectorField v = random_vector_sample(ws, mix(si, 21), rng.uniform(2.0, 8.0));
        InterpChecks r = interp_check(ws, rho, v, 1.0, 4.0, unit);
        if (r.l2.rhs > 1e-300) worst_l2 = std::max(worst_l2, r.l2.lhs / r.l2.rhs);
        if (r.weighted_l4.rhs > 1e-300)
            worst_w4 = std::max(worst_w4, r.weighted_l4.lhs / r.weighted_l4.rhs);
    }
    cal.c_interp_l2 = safety * worst_l2;
    cal.c_interp_weighted = safety * worst_w4;

    // quartic flux balance constant from a few short trajectories spanning nu
    double worst_bal = 0.05;
    const double nus[3] = {1.0, 4.0, 16.0};
    for (int r = 0; r < 3; ++r) {
        const double mu = 0.1, lambda = nus[r] - 2.0 * mu;
        const std::uint64_t si = mix(seed, 0x400000ull + r);
        solver::FluidState s(g);
        s.rho = mollified_indicator_sample(g, si, 1.6, 1.0);
        VectorField v = random_vector_sample(ws, mix(si, 31), 3.0);
        simd::scale(s.u.x.data(), 0.5, v.x.data(), v.x.size());
        simd::scale(s.u.y.data(), 0.5, v.y.data(), v.y.size());
        solver::StepperOptions so;
        so.mu = mu;
        so.lambda = lambda;
        solver::Stepper st(g, law, so);
        MonitorOptions mo;
        mo.track_decomposition = false;
        TrajectoryMonitor mon(g, law, mu, lambda, mo);
        solver::RunOptions ro;
        ro.t_end = 0.25;
        ro.sample_dt = 0.0125;
        solver::run(st, s, ro, {}, [&](const solver::FluidState& fs) { mon.sample(fs); });
        const DiagnosticsRecord& last = mon.records().back();
        const double h30 = mon.records().front().h3_l1;
        if (last.quartic_f_time > 1e-300) {
            const double need =
                (last.quartic_g_time - 2.0 * nus[r] * h30) / last.quartic_f_time;
            worst_bal = std::max(worst_bal, need);
        }
    }
    cal.c_balance_quartic = safety * worst_bal;
    return cal;
}

Calibration load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("calibration: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
        Calibration c;
        c.c_log_riesz = j.at("c_log_riesz").get<double>();
        c.c_clms = j.at("c_clms").get<double>();
        c.c_interp_l2 = j.at("c_interp_l2").get<double>();
        c.c_interp_weighted = j.at("c_interp_weighted").get<double>();
        c.c_balance_quartic = j.at("c_balance_quartic").get<double>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.samples = j.at("samples").get<int>();
        c.grid_n = j.at("grid_n").get<int>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("calibration: bad file " + path + ": " + e.what());
    }
}

void save_calibration(const Calibration& c, const std::string& path) {
    nlohmann::json j;
    j["c_log_riesz"] = c.c_log_riesz;
    j["c_clms"] = c.c_clms;
    j["c_interp_l2"] = c.c_interp_l2;
    j["c_interp_weighted"] = c.c_interp_weighted;
    j["c_balance_quartic"] = c.c_balance_quartic;
    j["seed"] = c.seed;
    j["samples"] = c.samples;
    j["grid_n"] = c.grid_n;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("calibration: cannot write " + tmp);
        out << j.dump(2) << '\n';
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("calibration: rename failed for " + path);
}

} // namespace nsv::diag

// Command-line front end. Subcommands:
//   run        integrate one configuration, write diagnostics/summary/snapshot
//   resume     continue a run from a snapshot (config hash must match)
//   sweep      bulk-viscosity sweep plus incompressible reference comparison
//   verify     self-contained property suites (spectral-identities, inequalities)
//   calibrate  refit the inequality constants and write the calibration file
//   patch-demo canned density-patch run with interface tracking
//
// Exit codes: 0 success, 1 configuration or usage error, 2 a run failed
// mid-flight (partial outputs are still written).

#include "nsv/diag/diag.hpp"
#include "nsv/io/io.hpp"
#include "nsv/limit/limit.hpp"
#include "nsv/patch/patch.hpp"
#include "nsv/simd/kernels.hpp"
#include "nsv/solver/run.hpp"
#include "nsv/striated/striated.hpp"
#include "nsv/util/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace {

using nsv::io::ConfigError;
using nsv::io::RunConfig;
using nsv::solver::FluidState;
using nsv::spectral::Grid;
using nsv::spectral::ScalarField;
using nsv::spectral::VectorField;
using nsv::spectral::Workspace;
using nsv::util::mix;
using nsv::util::Rng;
using json = nlohmann::json;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string resolve_out_dir(const std::string& flag, const std::string& cfg_dir) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("NSV_OUTPUT_DIR"); env && *env) return env;
    return cfg_dir;
}

int resolve_workers(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("NSV_WORKERS"); env && *env) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    return 1;
}

// --- initial data -----------------------------------------------------------

struct InitialData {
    FluidState state;
    std::optional<nsv::striated::VectorFieldFamily> family;
    nsv::patch::MarkerCurve markers;
    double edge_width = 0.0;  // mollification width actually used (0: no patch)
};

void fill_swirl(VectorField& u, double amp) {
    const Grid& g = u.grid();
    const double k = 2.0 * M_PI / g.L;
    for (int iy = 0; iy < g.n; ++iy) {
        const double y = iy * g.h();
        for (int ix = 0; ix < g.n; ++ix) {
            const double x = ix * g.h();
            const std::size_t m = static_cast<std::size_t>(iy) * g.n + ix;
            u.x.data()[m] = amp * std::sin(k * x) * std::cos(k * y);
            u.y.data()[m] = -amp * std::cos(k * x) * std::sin(k * y);
        }
    }
}

InitialData make_initial(const RunConfig& cfg, const Grid& g) {
    InitialData out;
    out.state = FluidState(g);

    if (cfg.initial_type == "equilibrium") {
        out.state.rho.fill(cfg.rho_tilde);
    } else if (cfg.initial_type == "smooth") {
        const double k = 2.0 * M_PI / g.L;
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix) {
                const std::size_t m = static_cast<std::size_t>(iy) * g.n + ix;
                out.state.rho.data()[m] =
                    cfg.rho_tilde +
                    cfg.rho_amp * std::sin(k * ix * g.h()) * std::cos(k * iy * g.h());
            }
        fill_swirl(out.state.u, cfg.u_amp);
    } else if (cfg.initial_type == "taylor-green") {
        out.state.rho.fill(cfg.rho_tilde);
        fill_swirl(out.state.u, cfg.u_amp);
    } else if (cfg.initial_type == "patch") {
        out.state.rho = nsv::patch::build_patch_density(cfg.patch, g);
        fill_swirl(out.state.u, cfg.u_amp);
        out.edge_width = cfg.patch.edge_width > 0.0 ? cfg.patch.edge_width : 3.0 * g.h();
        if (cfg.markers > 0) out.markers = nsv::patch::sample_markers(cfg.patch, g, cfg.markers);
        if (cfg.family)
            out.family = nsv::patch::build_tangential_family(cfg.patch, g, cfg.p);
    } else {
        throw ConfigError("initial.type: unknown type '" + cfg.initial_type + "'");
    }
    return out;
}

// --- output writers ---------------------------------------------------------

void write_diagnostics_csv(const std::string& path, const std::string& hash,
                           double edge_width,
                           const std::vector<nsv::diag::DiagnosticsRecord>& records) {
    nsv::io::CsvWriter csv(path);
    csv.comment("config_hash " + hash);
    csv.comment("edge_width " + fmt(edge_width));
    csv.line(nsv::diag::DiagnosticsRecord::csv_header());
    for (const auto& r : records) csv.line(r.csv_row());
    csv.close();
}

void write_interface_csv(const std::string& path, const std::string& hash,
                         const nsv::patch::MarkerCurve& c) {
    nsv::io::CsvWriter csv(path);
    csv.comment("config_hash " + hash);
    csv.line("theta,x,y");
    const int m = c.size();
    for (int i = 0; i < m; ++i)
        csv.line(fmt(2.0 * M_PI * i / m) + "," + fmt(c.x[i]) + "," + fmt(c.y[i]));
    csv.close();
}

// --- run / resume -----------------------------------------------------------

struct RunOutcome {
    int rc = 0;
    json summary;
};

RunOutcome execute_run(const RunConfig& cfg, const std::string& dir, InitialData& init) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string hash = cfg.config_hash();
    const std::string base = dir + "/" + cfg.prefix;

    const Grid& g = init.state.grid();
    const auto law = nsv::thermo::PressureLaw::gamma_law(cfg.a, cfg.gamma, cfg.rho_tilde,
                                                         cfg.rho_max);

    nsv::solver::StepperOptions so;
    so.mu = cfg.mu;
    so.lambda = cfg.lambda;
    so.cfl_advective = cfg.cfl_advective;
    so.cfl_acoustic = cfg.cfl_acoustic;
    so.dt_override = cfg.dt_override;
    so.dealias = cfg.dealias;
    nsv::solver::Stepper st(g, law, so);

    nsv::diag::MonitorOptions mo;
    mo.p = cfg.p;
    mo.track_decomposition = cfg.track_decomposition;
    nsv::diag::TrajectoryMonitor mon(g, law, cfg.mu, cfg.lambda, mo);
    if (init.family) mon.attach_family(&*init.family);
    if (init.markers.size() > 0) mon.attach_markers(&init.markers);

    const double eps = 1e-12 * std::max(1.0, std::fabs(cfg.t_end));
    // snapshot numbering keyed to the cadence so a resumed run continues it
    long snap_idx = 0;
    double next_snap = 0.0;
    if (cfg.snapshot_dt > 0.0) {
        snap_idx = static_cast<long>(std::floor(init.state.t / cfg.snapshot_dt + eps));
        next_snap = (snap_idx + 1) * cfg.snapshot_dt;
    }
    const auto before_step = [&](const FluidState& s, double dt) {
        if (init.family) nsv::striated::transport_family(st.workspace(), *init.family, s.u, dt);
        if (init.markers.size() > 0) nsv::patch::advect_markers(init.markers, s.u, dt);
    };
    const auto on_sample = [&](const FluidState& s) {
        mon.sample(s);
        // periodic snapshots land on the first sample at or past the cadence
        if (cfg.snapshot_dt > 0.0 && s.t < cfg.t_end - eps && s.t + eps >= next_snap) {
            ++snap_idx;
            char name[32];
            std::snprintf(name, sizeof(name), "_%04ld.snsv", snap_idx);
            nsv::io::snapshot_write(base + name, s, hash,
                                    init.family ? init.family->members()
                                                : std::vector<VectorField>{},
                                    init.markers);
            do next_snap += cfg.snapshot_dt;
            while (next_snap <= s.t + eps);
        }
    };

    nsv::solver::RunResult rr;
    bool partial = false;
    std::string error;
    if (cfg.t_end > init.state.t + eps) {
        nsv::solver::RunOptions ro;
        ro.t_end = cfg.t_end;
        ro.sample_dt = cfg.sample_dt;
        try {
            rr = nsv::solver::run(st, init.state, ro, {}, on_sample, before_step);
        } catch (const std::exception& e) {
            partial = true;
            error = e.what();
        }
    } else {
        mon.sample(init.state);  // already at or past t_end: record and save as-is
        rr.t_final = init.state.t;
    }

    const auto& recs = mon.records();
    write_diagnostics_csv(base + "_diagnostics.csv", hash, init.edge_width, recs);
    nsv::io::snapshot_write(base + "_final.snsv", init.state, hash,
                            init.family ? init.family->members() : std::vector<VectorField>{},
                            init.markers);
    if (init.markers.size() > 0) write_interface_csv(base + "_interface.csv", hash, init.markers);

    json j;
    j["config_hash"] = hash;
    j["grid_n"] = cfg.n;
    j["edge_width"] = init.edge_width;
    j["steps"] = rr.steps;
    j["t_final"] = init.state.t;
    j["min_dt"] = rr.min_dt;
    j["max_dt"] = rr.max_dt;
    j["samples"] = recs.size();
    j["partial"] = partial;
    if (partial) j["error"] = error;
    if (!recs.empty()) {
        const auto& r0 = recs.front();
        const auto& rl = recs.back();
        j["energy"] = {{"initial", r0.e_total},
                       {"final", rl.e_total},
                       {"kinetic", rl.e_kinetic},
                       {"potential", rl.e_potential},
                       {"dissipated", rl.e_dissipated},
                       {"drift_rel", r0.e_total > 0.0
                                         ? std::fabs(rl.e_total - r0.e_total) / r0.e_total
                                         : 0.0}};
        j["extrema"] = {{"rho_min", rl.rho_min}, {"rho_max", rl.rho_max}};
        const auto dev = mon.density_deviation_bound();
        j["bounds"] = {{"density_deviation",
                        {{"lhs", dev.lhs}, {"rhs", dev.rhs}, {"margin", dev.margin()}}}};
        if (init.family) {
            const auto il = mon.i_lower_bound();
            const auto dx = mon.div_rho_x_bound();
            j["bounds"]["i_lower_min_margin"] = il.min_margin();
            j["bounds"]["i_lower_min_rel_margin"] = il.min_rel_margin();
            j["bounds"]["div_rho_x_min_margin"] = dx.min_margin();
            j["bounds"]["div_rho_x_min_rel_margin"] = dx.min_rel_margin();
            const auto bl = mon.blowup_report();
            j["blowup"] = {{"c0", bl.c0},
                           {"sup_family_norm", bl.sup_family_norm},
                           {"sup_inv_i", bl.sup_inv_i},
                           {"sup_rho", bl.sup_rho},
                           {"sup_inv_rho", bl.sup_inv_rho},
                           {"sup_dxrho", bl.sup_dxrho},
                           {"sup_gradu_l2", bl.sup_gradu_l2},
                           {"sup_udot_l2", bl.sup_udot_l2},
                           {"bounded", bl.bounded}};
        }
        if (init.markers.size() > 0)
            j["interface"] = {{"markers", rl.n_markers},
                              {"arclength", rl.arclength},
                              {"w2p", rl.w2p},
                              {"curvature_max", rl.kappa_max},
                              {"tangency", rl.tangency},
                              {"self_intersecting", rl.selfint != 0}};
    }
    nsv::io::write_file_atomic(base + "_summary.json", j.dump(2) + "\n");

    RunOutcome out;
    out.rc = partial ? 2 : 0;
    out.summary = std::move(j);
    return out;
}

int cmd_run(const std::string& cfg_path, const std::string& out_flag) {
    const RunConfig cfg = nsv::io::load_config(cfg_path);
    const Grid g(cfg.n, cfg.L);
    InitialData init = make_initial(cfg, g);
    const std::string dir = resolve_out_dir(out_flag, cfg.out_dir);
    const RunOutcome out = execute_run(cfg, dir, init);
    std::printf("%s: t_final=%.6g steps=%ld -> %s\n", out.rc == 0 ? "done" : "FAILED",
                out.summary["t_final"].get<double>(), out.summary["steps"].get<long>(),
                dir.c_str());
    if (out.rc != 0)
        std::fprintf(stderr, "run failed: %s\n",
                     out.summary.value("error", std::string("unknown")).c_str());
    return out.rc;
}

int cmd_resume(const std::string& cfg_path, const std::string& snap_path,
               const std::string& out_flag) {
    const RunConfig cfg = nsv::io::load_config(cfg_path);
    nsv::io::Snapshot snap = nsv::io::snapshot_read(snap_path);
    if (snap.config_hash != cfg.config_hash()) {
        std::fprintf(stderr,
                     "resume: snapshot was produced by a different configuration\n"
                     "  snapshot %s\n  config   %s\n",
                     snap.config_hash.c_str(), cfg.config_hash().c_str());
        return 1;
    }
    const Grid g(cfg.n, cfg.L);
    InitialData init;
    init.state = FluidState(g);
    init.state.t = snap.t;
    init.state.rho = std::move(snap.rho);
    init.state.u = std::move(snap.u);
    if (!snap.families.empty())
        init.family.emplace(std::move(snap.families), cfg.p);
    init.markers = std::move(snap.markers);
    if (cfg.initial_type == "patch")
        init.edge_width = cfg.patch.edge_width > 0.0 ? cfg.patch.edge_width : 3.0 * g.h();

    const std::string dir = resolve_out_dir(out_flag, cfg.out_dir);
    const RunOutcome out = execute_run(cfg, dir, init);
    std::printf("%s: resumed t=%.6g, t_final=%.6g -> %s\n", out.rc == 0 ? "done" : "FAILED",
                snap.t, out.summary["t_final"].get<double>(), dir.c_str());
    return out.rc;
}

// --- sweep ------------------------------------------------------------------

json fit_json(const nsv::limit::ScalingFit& f) {
    return {{"slope", f.slope},   {"intercept", f.intercept}, {"ci_lo", f.ci_lo},
            {"ci_hi", f.ci_hi},   {"used", f.used},           {"valid", f.valid},
            {"excluded", f.excluded}};
}

int cmd_sweep(const std::string& cfg_path, const std::string& out_flag, int workers_flag) {
    const RunConfig cfg = nsv::io::load_config(cfg_path);
    if (cfg.sweep_nus.empty()) {
        std::fprintf(stderr, "sweep.nus: no viscosities listed in '%s'\n", cfg_path.c_str());
        return 1;
    }
    const Grid g(cfg.n, cfg.L);
    const auto law = nsv::thermo::PressureLaw::gamma_law(cfg.a, cfg.gamma, cfg.rho_tilde,
                                                         cfg.rho_max);
    InitialData init = make_initial(cfg, g);

    nsv::limit::SweepConfig sc;
    sc.nus = cfg.sweep_nus;
    sc.mu = cfg.mu;
    sc.t_end = cfg.t_end;
    sc.sample_dt = cfg.sample_dt;
    sc.dt_shared = cfg.dt_override;
    sc.with_reference = cfg.sweep_with_reference;
    sc.track_decomposition = cfg.track_decomposition;
    sc.rho_max = cfg.rho_max;
    sc.workers = resolve_workers(workers_flag);

    const nsv::limit::SweepResult res = nsv::limit::run_sweep(g, law, init.state, sc);
    const nsv::limit::ConvergenceTable table = nsv::limit::compare_limit(res, cfg.seed);

    namespace fs = std::filesystem;
    const std::string dir = resolve_out_dir(out_flag, cfg.out_dir);
    fs::create_directories(dir);
    const std::string hash = cfg.config_hash();
    const std::string base = dir + "/" + cfg.prefix;

    {
        nsv::io::CsvWriter csv(base + "_sweep.csv");
        csv.comment("config_hash " + hash);
        csv.comment("dt_shared " + fmt(res.dt_shared));
        csv.line("nu,lambda,completed,sup_divu_l2,l2_time_divu,sup_u_minus_ref,e0_nu,a1_max,"
                 "sup_nu_divu_sq,error");
        for (const auto& m : res.members)
            csv.line(fmt(m.nu) + "," + fmt(m.lambda) + "," + (m.completed ? "1" : "0") + "," +
                     fmt(m.sup_divu_l2) + "," + fmt(m.l2_time_divu) + "," +
                     fmt(m.sup_u_minus_ref) + "," + fmt(m.e0_nu) + "," + fmt(m.a1_max) + "," +
                     fmt(m.sup_nu_divu_sq) + "," + csv_quote(m.error));
        csv.close();
    }

    if (!table.rows.empty()) {
        nsv::io::CsvWriter csv(base + "_convergence.csv");
        csv.comment("config_hash " + hash);
        std::string header = "t";
        for (const auto& row : table.rows) header += ",u_minus_v_nu" + fmt(row.nu);
        csv.line(header);
        for (std::size_t k = 0; k < table.times.size(); ++k) {
            std::string line = fmt(table.times[k]);
            for (const auto& row : table.rows)
                line += "," + (k < row.u_minus_v_l2.size() ? fmt(row.u_minus_v_l2[k]) : "");
            csv.line(line);
        }
        csv.close();
    }

    // sup_t |div u|_L2 against nu, completed members only
    std::vector<double> fit_nus;
    std::vector<std::vector<double>> divu_series;
    for (const auto& m : res.members)
        if (m.completed && m.divu_l2_series.size() == res.sample_times.size()) {
            fit_nus.push_back(m.nu);
            divu_series.push_back(m.divu_l2_series);
        }
    nsv::limit::ScalingFit divu_fit;
    if (fit_nus.size() >= 2)
        divu_fit = nsv::limit::fit_scaling(fit_nus, divu_series, res.sample_times,
                                           nsv::limit::TimeReduce::sup, cfg.seed);

    json j;
    j["config_hash"] = hash;
    j["dt_shared"] = res.dt_shared;
    j["sample_times"] = res.sample_times;
    j["partial"] = res.partial;
    j["monotone_convergence"] = table.monotone;
    j["divu_fit"] = fit_json(divu_fit);
    j["residual_fit"] = fit_json(table.residual_fit);
    json members = json::array();
    for (const auto& m : res.members) {
        json e = {{"nu", m.nu},
                  {"lambda", m.lambda},
                  {"completed", m.completed},
                  {"sup_divu_l2", m.sup_divu_l2},
                  {"l2_time_divu", m.l2_time_divu},
                  {"sup_u_minus_ref", m.sup_u_minus_ref},
                  {"e0_nu", m.e0_nu},
                  {"a1_max", m.a1_max},
                  {"sup_nu_divu_sq", m.sup_nu_divu_sq},
                  {"nu_divu_sq_within_e0", m.sup_nu_divu_sq <= m.e0_nu},
                  {"divu_l2", m.divu_l2_series},
                  {"u_minus_ref_l2", m.u_minus_ref_l2},
                  {"hminus1_residual", m.hminus1_residual}};
        if (!m.completed) e["error"] = m.error;
        members.push_back(std::move(e));
    }
    j["members"] = std::move(members);
    nsv::io::write_file_atomic(base + "_sweep_summary.json", j.dump(2) + "\n");

    std::printf("sweep: %zu members, dt=%.3g%s\n", res.members.size(), res.dt_shared,
                res.partial ? " (PARTIAL)" : "");
    if (divu_fit.valid)
        std::printf("  sup|div u|_L2 ~ nu^%.3f  (CI [%.3f, %.3f])\n", divu_fit.slope,
                    divu_fit.ci_lo, divu_fit.ci_hi);
    if (table.residual_fit.valid)
        std::printf("  Hminus1 residual ~ nu^%.3f  monotone=%s\n", table.residual_fit.slope,
                    table.monotone ? "yes" : "no");
    std::printf("  -> %s\n", dir.c_str());
    return res.partial ? 2 : 0;
}

// --- verify -----------------------------------------------------------------

double rel_l2_diff(const ScalarField& a, const ScalarField& b) {
    ScalarField d(a.grid());
    nsv::simd::axpby(d.data(), 1.0, a.data(), -1.0, b.data(), d.size());
    const double nb = nsv::spectral::norm_l2(b);
    return nb > 0.0 ? nsv::spectral::norm_l2(d) / nb : nsv::spectral::norm_l2(d);
}

struct PropertyResult {
    const char* name;
    double worst;
    double threshold;
    bool pass() const { return worst <= threshold; }
};

int report_properties(const std::vector<PropertyResult>& props) {
    bool all_ok = true;
    for (const auto& p : props) {
        std::printf("%-18s worst %.3e  thr %.1e  %s\n", p.name, p.worst, p.threshold,
                    p.pass() ? "PASS" : "FAIL");
        all_ok = all_ok && p.pass();
    }
    return all_ok ? 0 : 2;
}

int verify_spectral(int n, std::uint64_t seed) {
    const Grid g(n, 2.0 * M_PI);
    Workspace ws(g);
    double w_riesz = 0.0, w_hodge = 0.0, w_invlap = 0.0, w_parseval = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t si = mix(seed, 0x900000ull + i);
        Rng rng(mix(si, 7));
        const double kp = rng.uniform(2.0, 10.0);
        ScalarField f = nsv::diag::random_scalar_sample(ws, mix(si, 1), kp);
        VectorField u = nsv::diag::random_vector_sample(ws, mix(si, 2), kp);

        // R11 + R22 reproduces the mean-free part
        ScalarField r11 = nsv::spectral::riesz(ws, 1, 1, f);
        ScalarField r22 = nsv::spectral::riesz(ws, 2, 2, f);
        ScalarField ref = f;
        const double fm = nsv::spectral::mean(f);
        for (std::size_t m = 0; m < ref.size(); ++m) ref.data()[m] -= fm;
        nsv::simd::axpby(r11.data(), 1.0, r11.data(), 1.0, r22.data(), r11.size());
        w_riesz = std::max(w_riesz, rel_l2_diff(r11, ref));

        // gradient + solenoidal parts reassemble the field
        VectorField gp(g), sp(g);
        nsv::spectral::hodge(ws, u, gp, sp);
        nsv::simd::axpby(gp.x.data(), 1.0, gp.x.data(), 1.0, sp.x.data(), gp.x.size());
        nsv::simd::axpby(gp.y.data(), 1.0, gp.y.data(), 1.0, sp.y.data(), gp.y.size());
        w_hodge = std::max(w_hodge, std::max(rel_l2_diff(gp.x, u.x), rel_l2_diff(gp.y, u.y)));

        // -Lap (-Lap)^{-1} f = f - mean f
        ScalarField w = nsv::spectral::inverse_neg_laplacian(ws, f);
        ScalarField lap = nsv::spectral::laplacian(ws, w);
        for (std::size_t m = 0; m < lap.size(); ++m) lap.data()[m] = -lap.data()[m];
        w_invlap = std::max(w_invlap, rel_l2_diff(lap, ref));

        // plancherel on the r2c layout
        nsv::spectral::SpecField c(g);
        ws.forward(f, c);
        const double spec_sq = nsv::spectral::parseval_l2_sq(ws, c);
        const double grid_sq = std::pow(nsv::spectral::norm_l2(f), 2);
        w_parseval = std::max(w_parseval, std::fabs(spec_sq - grid_sq) / grid_sq);
    }
    return report_properties({{"riesz-sum", w_riesz, 1e-10},
                              {"hodge-recon", w_hodge, 1e-10},
                              {"neg-laplacian", w_invlap, 1e-10},
                              {"parseval", w_parseval, 1e-10}});
}

int verify_inequalities(const std::string& data_dir, std::uint64_t seed, int samples) {
    const nsv::diag::Calibration cal = nsv::diag::load_calibration(data_dir +
                                                                   "/calibration.json");
    const Grid g(cal.grid_n, 2.0 * M_PI);
    Workspace ws(g);
    const auto law = nsv::thermo::PressureLaw::gamma_law(1.0, 2.0, 1.0, 4.0);

    // fresh draws from the calibration corpora's law; margins must stay >= 0
    double m_lr = 1e300, m_cl = 1e300, m_l2 = 1e300, m_w4 = 1e300;
    for (int i = 0; i < samples; ++i) {
        const std::uint64_t si = mix(seed, 0x100000ull + i);
        Rng rng(mix(si, 7));
        const double alpha = rng.uniform(1.2, 2.5);
        ScalarField rho = nsv::diag::mollified_indicator_sample(g, si, alpha, 1.0);
        auto fam = nsv::diag::tangential_family_sample(g, si, 4.0);
        ScalarField gf = law.g_field(rho);
        m_lr = std::min(m_lr, nsv::diag::log_riesz_check(ws, gf, fam, 4.0, cal.c_log_riesz,
                                                         nsv::striated::DerivForm::conservative)
                                  .margin());
    }
    for (int i = 0; i < samples; ++i) {
        const std::uint64_t si = mix(seed, 0x200000ull + i);
        Rng rng(mix(si, 7));
        const double kp = rng.uniform(2.0, 8.0);
        ScalarField f = nsv::diag::random_scalar_sample(ws, mix(si, 11), kp);
        ScalarField v = nsv::diag::random_scalar_sample(ws, mix(si, 12), kp);
        ScalarField w = nsv::diag::random_scalar_sample(ws, mix(si, 13), kp);
        m_cl = std::min(m_cl, nsv::diag::clms_check(ws, f, v, w, cal.c_clms).margin());
    }
    for (int i = 0; i < samples; ++i) {
        const std::uint64_t si = mix(seed, 0x300000ull + i);
        Rng rng(mix(si, 7));
        const double alpha = rng.uniform(1.2, 2.5);
        ScalarField rho = (i % 2 == 0) ? nsv::diag::vacuum_pocket_sample(g, si, alpha)
                                       : nsv::diag::mollified_indicator_sample(g, si, alpha, 1.0);
        VectorField v = nsv::diag::random_vector_sample(ws, mix(si, 21), rng.uniform(2.0, 8.0));
        const auto r = nsv::diag::interp_check(ws, rho, v, 1.0, 4.0, cal);
        m_l2 = std::min(m_l2, r.l2.margin());
        m_w4 = std::min(m_w4, r.weighted_l4.margin());
    }

    bool all_ok = true;
    const auto line = [&](const char* name, double margin) {
        const bool ok = margin >= 0.0;
        std::printf("%-18s %d samples  min margin %+.4e  %s\n", name, samples, margin,
                    ok ? "PASS" : "FAIL");
        all_ok = all_ok && ok;
    };
    line("log-riesz", m_lr);
    line("clms", m_cl);
    line("interp-l2", m_l2);
    line("interp-weighted", m_w4);
    std::printf("constants from %s/calibration.json (n=%d, %d samples, seed %llu)\n",
                data_dir.c_str(), cal.grid_n, cal.samples,
                static_cast<unsigned long long>(cal.seed));
    return all_ok ? 0 : 2;
}

int cmd_verify(const std::string& suite, int n, std::uint64_t seed,
               const std::string& data_dir, int samples) {
    if (suite == "spectral-identities") return verify_spectral(n, seed);
    if (suite == "inequalities") return verify_inequalities(data_dir, seed, samples);
    std::fprintf(stderr,
                 "verify: unknown suite '%s' (expected spectral-identities or inequalities)\n",
                 suite.c_str());
    return 1;
}

// --- calibrate --------------------------------------------------------------

int cmd_calibrate(int n, int samples, std::uint64_t seed, const std::string& out_path) {
    namespace fs = std::filesystem;
    const auto cal = nsv::diag::calibrate(n, samples, seed);
    const fs::path p(out_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    nsv::diag::save_calibration(cal, out_path);
    std::printf("calibration written to %s\n", out_path.c_str());
    std::printf("  c_log_riesz       %.6g\n", cal.c_log_riesz);
    std::printf("  c_clms            %.6g\n", cal.c_clms);
    std::printf("  c_interp_l2       %.6g\n", cal.c_interp_l2);
    std::printf("  c_interp_weighted %.6g\n", cal.c_interp_weighted);
    std::printf("  c_balance_quartic %.6g\n", cal.c_balance_quartic);
    return 0;
}

// --- patch-demo -------------------------------------------------------------

int cmd_patch_demo(int n, const std::string& out_flag, double t_end) {
    RunConfig cfg;
    cfg.n = n;
    cfg.initial_type = "patch";
    cfg.patch = nsv::patch::PatchSpec::disc(M_PI, M_PI, 1.2);
    cfg.patch.x_modes.push_back({3, 0.15, 0.0});
    cfg.patch.y_modes.push_back({3, 0.0, 0.15});
    cfg.patch.alpha = 2.0;
    cfg.u_amp = 0.5;
    cfg.family = true;
    cfg.markers = 512;
    cfg.t_end = t_end;
    cfg.sample_dt = 0.05;
    cfg.prefix = "demo";
    cfg.out_dir = "out/patch-demo";

    const Grid g(cfg.n, cfg.L);
    InitialData init = make_initial(cfg, g);
    const std::string dir = resolve_out_dir(out_flag, cfg.out_dir);
    std::filesystem::create_directories(dir);
    write_interface_csv(dir + "/demo_interface_initial.csv", cfg.config_hash(), init.markers);

    const RunOutcome out = execute_run(cfg, dir, init);
    if (out.summary.contains("interface")) {
        const auto& itf = out.summary["interface"];
        std::printf("interface after t=%.3g: markers=%ld arclength=%.4f curvature_max=%.3f\n",
                    cfg.t_end, itf["markers"].get<long>(), itf["arclength"].get<double>(),
                    itf["curvature_max"].get<double>());
        std::printf("  w2p=%.4f tangency=%.3e self_intersecting=%s\n",
                    itf["w2p"].get<double>(), itf["tangency"].get<double>(),
                    itf["self_intersecting"].get<bool>() ? "yes" : "no");
    }
    std::printf("%s -> %s\n", out.rc == 0 ? "done" : "FAILED", dir.c_str());
    return out.rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral compressible flow simulator with density-patch "
                 "and bulk-viscosity-limit diagnostics"};
    app.require_subcommand(1);

    std::string cfg_path, out_flag, snap_path, suite, data_dir = "data";
    std::string cal_out = "data/calibration.json";
    int workers = 0, vn = 128, cal_n = 64, cal_samples = 1000, vsamples = 1000, demo_n = 128;
    std::uint64_t vseed = 1, cal_seed = 2026;
    double demo_t_end = 0.3;

    auto* c_run = app.add_subcommand("run", "integrate a configuration");
    c_run->add_option("config", cfg_path, "TOML or JSON configuration file")->required();
    c_run->add_option("--out-dir", out_flag, "output directory (beats NSV_OUTPUT_DIR and config)");

    auto* c_resume = app.add_subcommand("resume", "continue a run from a snapshot");
    c_resume->add_option("config", cfg_path, "configuration the snapshot came from")->required();
    c_resume->add_option("snapshot", snap_path, "snapshot file (.snsv)")->required();
    c_resume->add_option("--out-dir", out_flag, "output directory");

    auto* c_sweep = app.add_subcommand("sweep", "bulk-viscosity sweep against the "
                                                "incompressible reference");
    c_sweep->add_option("config", cfg_path, "configuration with a [sweep] section")->required();
    c_sweep->add_option("--out-dir", out_flag, "output directory");
    c_sweep->add_option("--workers", workers, "parallel member runs (default NSV_WORKERS or 1)");

    auto* c_verify = app.add_subcommand("verify", "run a self-contained property suite");
    c_verify->add_option("suite", suite, "spectral-identities | inequalities")->required();
    c_verify->add_option("--n", vn, "grid size for spectral-identities (default 128)");
    c_verify->add_option("--seed", vseed, "sample seed (default 1)");
    c_verify->add_option("--samples", vsamples, "draws per inequality (default 1000)");
    c_verify->add_option("--data-dir", data_dir, "calibration directory (default data)");

    auto* c_cal = app.add_subcommand("calibrate", "refit inequality constants");
    c_cal->add_option("--n", cal_n, "corpus grid size (default 64)");
    c_cal->add_option("--samples", cal_samples, "corpus size per check (default 1000)");
    c_cal->add_option("--seed", cal_seed, "corpus seed (default 2026)");
    c_cal->add_option("--out", cal_out, "output path (default data/calibration.json)");

    auto* c_demo = app.add_subcommand("patch-demo", "short density-patch run with "
                                                    "interface tracking");
    c_demo->add_option("--n", demo_n, "grid size (default 128)");
    c_demo->add_option("--t-end", demo_t_end, "integration time (default 0.3)");
    c_demo->add_option("--out-dir", out_flag, "output directory (default out/patch-demo)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed()) return cmd_run(cfg_path, out_flag);
        if (c_resume->parsed()) return cmd_resume(cfg_path, snap_path, out_flag);
        if (c_sweep->parsed()) return cmd_sweep(cfg_path, out_flag, workers);
        if (c_verify->parsed()) return cmd_verify(suite, vn, vseed, data_dir, vsamples);
        if (c_cal->parsed()) return cmd_calibrate(cal_n, cal_samples, cal_seed, cal_out);
        if (c_demo->parsed()) return cmd_patch_demo(demo_n, out_flag, demo_t_end);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

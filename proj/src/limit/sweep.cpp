#include "nsv/limit/limit.hpp"

#include "nsv/solver/run.hpp"
#include "nsv/simd/kernels.hpp"

#include <cmath>
#include <atomic>
#include <deque>
#include <memory>
#include <thread>
#include <stdexcept>

namespace nsv::limit {

using namespace spectral;

namespace {

struct RingEntry {
    double t;
    ScalarField rho;
    VectorField u;
};

// H^-1 norm of d_t(rho u) + div(rho u x u) - grad F - mu Lap u at the middle
// ring entry, the time derivative taken by the centered difference of the
// sampled momentum fields.
double momentum_residual(Workspace& ws, const RingEntry& prev, const RingEntry& mid,
                         const RingEntry& next, const thermo::PressureLaw& law, double mu,
                         double nu) {
    const Grid& g = mid.rho.grid();
    const std::size_t n = mid.rho.size();
    const double inv_span = 1.0 / (next.t - prev.t);

    VectorField res(g);
    for (std::size_t i = 0; i < n; ++i) {
        res.x[i] = (next.rho[i] * next.u.x[i] - prev.rho[i] * prev.u.x[i]) * inv_span;
        res.y[i] = (next.rho[i] * next.u.y[i] - prev.rho[i] * prev.u.y[i]) * inv_span;
    }

    ScalarField t11(g), t12(g), t22(g);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = mid.rho[i];
        t11[i] = r * mid.u.x[i] * mid.u.x[i];
        t12[i] = r * mid.u.x[i] * mid.u.y[i];
        t22[i] = r * mid.u.y[i] * mid.u.y[i];
    }
    SpecField c11(g), c12(g), c22(g);
    ws.forward(t11, c11);
    ws.forward(t12, c12);
    ws.forward(t22, c22);
    ScalarField row = div_from_spec(ws, c11, c12);
    for (std::size_t i = 0; i < n; ++i) res.x[i] += row[i];
    row = div_from_spec(ws, c12, c22);
    for (std::size_t i = 0; i < n; ++i) res.y[i] += row[i];

    SpecField u1h(g), u2h(g);
    ws.forward(mid.u.x, u1h);
    ws.forward(mid.u.y, u2h);
    ScalarField f = div_from_spec(ws, u1h, u2h);
    ScalarField gfield = law.g_field(mid.rho);
    simd::axpby(f.data(), nu, f.data(), -1.0, gfield.data(), n);
    VectorField gradf(g);
    grad(ws, f, gradf);

    const double* k2 = ws.k2();
    for (std::size_t m = 0; m < u1h.modes(); ++m) {
        u1h.raw()[2 * m] *= -mu * k2[m];
        u1h.raw()[2 * m + 1] *= -mu * k2[m];
        u2h.raw()[2 * m] *= -mu * k2[m];
        u2h.raw()[2 * m + 1] *= -mu * k2[m];
    }
    ScalarField lap(g);
    ws.inverse(u1h, lap);
    for (std::size_t i = 0; i < n; ++i) res.x[i] -= gradf.x[i] + lap[i];
    ws.inverse(u2h, lap);
    for (std::size_t i = 0; i < n; ++i) res.y[i] -= gradf.y[i] + lap[i];

    return norm_hminus1_vec(ws, res);
}

// kinematic part of the diagnostics row for the reference trajectory, which
// has no pressure law attached
diag::DiagnosticsRecord reference_record(Workspace& ws, const solver::FluidState& s) {
    const Grid& g = s.rho.grid();
    const std::size_t n = s.rho.size();
    const double cell = g.h() * g.h();

    diag::DiagnosticsRecord rec{};
    rec.t = s.t;
    double ke = 0.0, mass = 0.0, mx = 0.0, my = 0.0;
    rec.rho_min = s.rho[0];
    rec.rho_max = s.rho[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double r = s.rho[i];
        ke += 0.5 * r * (s.u.x[i] * s.u.x[i] + s.u.y[i] * s.u.y[i]);
        mass += r;
        mx += r * s.u.x[i];
        my += r * s.u.y[i];
        rec.rho_min = std::min(rec.rho_min, r);
        rec.rho_max = std::max(rec.rho_max, r);
        rec.rho_dev_inf = std::max(rec.rho_dev_inf, std::fabs(r - 1.0));
    }
    rec.e_kinetic = ke * cell;
    rec.e_total = rec.e_kinetic;
    rec.mass = mass * cell;
    rec.mom_x = mx * cell;
    rec.mom_y = my * cell;
    rec.inv_rho_linf = rec.rho_min > 0.0 ? 1.0 / rec.rho_min : 0.0;

    SpecField u1h(g), u2h(g);
    ws.forward(s.u.x, u1h);
    ws.forward(s.u.y, u2h);
    GradTensor gt(g);
    grad_tensor(ws, u1h, u2h, gt);
    double gsq = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        gsq += gt.dxux[i] * gt.dxux[i] + gt.dyux[i] * gt.dyux[i] + gt.dxuy[i] * gt.dxuy[i] +
               gt.dyuy[i] * gt.dyuy[i];
    rec.gradu_l2 = std::sqrt(gsq * cell);
    ScalarField dv = div_from_spec(ws, u1h, u2h);
    rec.divu_l2 = norm_l2(dv);
    rec.divu_linf = norm_linf(dv);
    double ginf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fr = gt.dxux[i] * gt.dxux[i] + gt.dyux[i] * gt.dyux[i] +
                          gt.dxuy[i] * gt.dxuy[i] + gt.dyuy[i] * gt.dyuy[i];
        ginf = std::max(ginf, fr);
    }
    rec.gradu_linf = std::sqrt(ginf);
    return rec;
}

double l2_diff(const VectorField& a, const VectorField& b) {
    const double cell = a.x.grid().h() * a.x.grid().h();
    double s = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) {
        const double dx = a.x[i] - b.x[i], dy = a.y[i] - b.y[i];
        s += dx * dx + dy * dy;
    }
    return std::sqrt(s * cell);
}

} // namespace

SweepResult run_sweep(const Grid& g, const thermo::PressureLaw& law,
                      const solver::FluidState& initial, const SweepConfig& cfg) {
    if (cfg.nus.empty()) throw std::invalid_argument("sweep: empty viscosity list");
    for (std::size_t i = 1; i < cfg.nus.size(); ++i)
        if (!(cfg.nus[i] > cfg.nus[i - 1]))
            throw std::invalid_argument("sweep: viscosities must be strictly increasing");
    for (double nu : cfg.nus)
        if (!(nu >= cfg.mu))
            throw std::invalid_argument("sweep: nu below mu makes mu+lambda negative");
    if (!(cfg.t_end > initial.t)) throw std::invalid_argument("sweep: t_end before start");
    if (!(cfg.sample_dt > 0.0)) throw std::invalid_argument("sweep: sample_dt must be positive");
    require_same(g, initial.grid());

    // shared initial state: all runs start from the same solenoidal velocity
    solver::FluidState shared = initial;
    {
        Workspace ws(g);
        ScalarField dv = div(ws, shared.u);
        if (norm_l2(dv) > 1e-12) project_solenoidal(ws, shared.u);
    }

    SweepResult out;
    const double t0 = shared.t;
    for (long k = 0;; ++k) {
        const double t = t0 + static_cast<double>(k) * cfg.sample_dt;
        if (t >= cfg.t_end - 1e-12 * std::max(1.0, cfg.t_end)) break;
        out.sample_times.push_back(t);
    }
    out.sample_times.push_back(cfg.t_end);

    // one dt for every run; the CFL bound does not depend on nu (advective
    // speed and sound speed only), so probe it with the first member
    if (cfg.dt_shared > 0.0) {
        out.dt_shared = cfg.dt_shared;
    } else {
        solver::StepperOptions popt;
        popt.mu = cfg.mu;
        popt.lambda = cfg.nus.front() - 2.0 * cfg.mu;
        solver::Stepper probe(g, law, popt);
        out.dt_shared = 0.8 * probe.cfl_dt(shared);
    }

    solver::RunOptions ro;
    ro.t_end = cfg.t_end;
    ro.sample_dt = cfg.sample_dt;

    if (cfg.with_reference) {
        IncompOptions iopt;
        iopt.mu = cfg.mu;
        iopt.dt_override = out.dt_shared;
        IncompressibleSolver ref(g, iopt);
        solver::FluidState s = shared;
        ref.prepare(s);
        solver::run_loop(ref, s, ro, {}, [&](const solver::FluidState& st) {
            out.reference_records.push_back(reference_record(ref.workspace(), st));
            out.reference_velocity.push_back(st.u);
        });
    }

    // FFTW planning is not reentrant, so solvers and monitors are built in
    // one serial pass; the run loops afterwards only execute existing plans
    // and may proceed concurrently.
    struct MemberJob {
        SweepMember mem;
        std::unique_ptr<solver::Stepper> st;
        std::unique_ptr<diag::TrajectoryMonitor> mon;
    };
    std::vector<MemberJob> jobs(cfg.nus.size());
    for (std::size_t i = 0; i < cfg.nus.size(); ++i) {
        MemberJob& job = jobs[i];
        job.mem.nu = cfg.nus[i];
        job.mem.lambda = cfg.nus[i] - 2.0 * cfg.mu;
        solver::StepperOptions sopt;
        sopt.mu = cfg.mu;
        sopt.lambda = job.mem.lambda;
        sopt.dt_override = out.dt_shared;
        try {
            job.st = std::make_unique<solver::Stepper>(g, law, sopt);
            diag::MonitorOptions mopt;
            mopt.track_decomposition = cfg.track_decomposition;
            job.mon = std::make_unique<diag::TrajectoryMonitor>(g, law, cfg.mu,
                                                                job.mem.lambda, mopt);
        } catch (const std::exception& e) {
            job.mem.error = e.what();
            job.st.reset();
        }
    }

    auto run_member = [&](MemberJob& job) {
        if (!job.st) return;
        SweepMember& mem = job.mem;
        try {
            solver::FluidState s = shared;
            std::deque<RingEntry> ring;
            std::size_t sample_idx = 0;
            solver::run_loop(*job.st, s, ro, {}, [&](const solver::FluidState& cur) {
                job.mon->sample(cur);
                ring.push_back({cur.t, cur.rho, cur.u});
                if (ring.size() == 3) {
                    mem.hminus1_residual.push_back(momentum_residual(
                        job.st->workspace(), ring[0], ring[1], ring[2], law, cfg.mu, mem.nu));
                    ring.pop_front();
                }
                if (cfg.with_reference && sample_idx < out.reference_velocity.size())
                    mem.u_minus_ref_l2.push_back(
                        l2_diff(cur.u, out.reference_velocity[sample_idx]));
                ++sample_idx;
            });
            mem.records = job.mon->records();
            mem.completed = true;
        } catch (const std::exception& e) {
            mem.error = e.what();
            mem.records = job.mon->records();
        }
    };

    const int workers = std::max(1, std::min<int>(cfg.workers,
                                                  static_cast<int>(jobs.size())));
    if (workers == 1) {
        for (auto& job : jobs) run_member(job);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < jobs.size();
                     i = next.fetch_add(1))
                    run_member(jobs[i]);
            });
        for (auto& th : pool) th.join();
    }

    for (auto& job : jobs) {
        SweepMember mem = std::move(job.mem);
        if (!mem.completed) out.partial = true;
        const double nu = mem.nu;

        if (!mem.records.empty()) {
            const auto& r0 = mem.records.front();
            mem.e0_nu = r0.e_kinetic + r0.e_potential + cfg.mu * r0.gradu_l2 * r0.gradu_l2 +
                        nu * r0.divu_l2 * r0.divu_l2 + r0.g_l2 * r0.g_l2 / nu;
            for (std::size_t k = 0; k < mem.records.size(); ++k) {
                const auto& r = mem.records[k];
                mem.divu_l2_series.push_back(r.divu_l2);
                mem.sup_divu_l2 = std::max(mem.sup_divu_l2, r.divu_l2);
                mem.a1_max = std::max(mem.a1_max, r.a1);
                mem.sup_nu_divu_sq = std::max(mem.sup_nu_divu_sq, nu * r.divu_l2 * r.divu_l2);
                if (k > 0) {
                    const auto& p = mem.records[k - 1];
                    mem.l2_time_divu += 0.5 * (r.t - p.t) *
                                        (r.divu_l2 * r.divu_l2 + p.divu_l2 * p.divu_l2);
                }
            }
            mem.l2_time_divu = std::sqrt(mem.l2_time_divu);
            for (double d : mem.u_minus_ref_l2)
                mem.sup_u_minus_ref = std::max(mem.sup_u_minus_ref, d);
        }
        out.members.push_back(std::move(mem));
    }
    return out;
}

ConvergenceTable compare_limit(const SweepResult& sweep, std::uint64_t seed) {
    ConvergenceTable tab;
    tab.times = sweep.sample_times;

    std::vector<double> nus;
    std::vector<std::vector<double>> resid_series;
    for (const auto& mem : sweep.members) {
        if (!mem.completed) continue;
        ConvergenceRow row;
        row.nu = mem.nu;
        row.u_minus_v_l2 = mem.u_minus_ref_l2;
        row.sup_u_minus_v = mem.sup_u_minus_ref;
        for (double r : mem.hminus1_residual)
            row.sup_hminus1 = std::max(row.sup_hminus1, r);
        tab.rows.push_back(std::move(row));
        nus.push_back(mem.nu);
        resid_series.push_back(mem.hminus1_residual);
    }

    tab.monotone = true;
    for (std::size_t i = 1; i < tab.rows.size(); ++i)
        if (tab.rows[i].sup_u_minus_v > 1.1 * tab.rows[i - 1].sup_u_minus_v) {
            tab.monotone = false;
            break;
        }

    if (!nus.empty() && !resid_series.front().empty()) {
        // residuals live at the interior sample times
        std::vector<double> interior(sweep.sample_times.begin() + 1,
                                     sweep.sample_times.end() - 1);
        interior.resize(resid_series.front().size());
        tab.residual_fit = fit_scaling(nus, resid_series, interior, TimeReduce::sup, seed);
    }
    return tab;
}

} // namespace nsv::limit

#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>

#include "fsns/config.hpp"
#include "fsns/diagnostics.hpp"
#include "fsns/mms.hpp"
#include "fsns/presets.hpp"
#include "fsns/snapshot.hpp"

namespace fsns {

namespace harnessdetail {

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);  // binary: byte-identical across platforms
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << text;
}

/// Output times: multiples of output_every, with t_end always included.
inline std::vector<double> output_times(const StepperConfig& sc) {
    std::vector<double> ts = {0.0};
    const double tol = 1e-12;
    for (int k = 1; k * sc.output_every < sc.t_end - tol; ++k) ts.push_back(k * sc.output_every);
    if (sc.t_end > tol) ts.push_back(sc.t_end);
    return ts;
}

inline double sup_diff(const Field& a, const Field& b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
    return s;
}

}  // namespace harnessdetail

inline const char* series_csv_header =
    "t,dt,e_total,e_kinetic,e_internal,e_external,e_capillary,dissipation_rate,"
    "bottom_flux_rate,balance_defect,theta,x_sq,taylor_min,taylor_degenerate,min_j,"
    "dzz_v_sup,eps_dzz_v,delta_p_h1co,layer_width,sn_trace_sup,zeta_trace_sup,"
    "div_res_sup,vort_res_sup";

struct RunOutput {
    int exit_code = 0;  // 0 success, 3 health abort
    std::string abort_reason;
    long steps = 0;
    std::vector<double> out_times;  // achieved output times
    // Captured fields at every output time (sweep comparisons), if requested.
    std::vector<Field> rho_series, h_series;
    std::vector<std::vector<Field>> v_series;
    ConormalReport theta;
    bool theta_valid = false;
    EnergyLedger first_energy, last_energy;
    double balance_defect = 0.0;
    LayerProbe last_probe;
    double dzz_v_sup_last = 0.0, dzz_v_sup_max = 0.0;
    std::string series_csv;
};

/// Single deterministic run: integrates the configured preset, emits the
/// diagnostics series (CSV), the final snapshot, and a short report. On a
/// health abort the last good state is written and exit_code is 3.
inline RunOutput run(const RunConfig& cfg, const std::string& outdir, bool quiet = true,
                     bool capture = false) {
    cfg.validate();
    std::filesystem::create_directories(outdir);

    Domain dom(cfg.grid);
    FlowState s = build_initial_state(cfg, dom);
    const PhysParams& par = cfg.physics;

    RunOutput out;
    EnergyTracker energy;
    ThetaAccumulator theta(cfg.diag.m, cfg.diag.m_cap, par);
    std::ostringstream csv;
    csv << series_csv_header << "\n";

    const auto times = harnessdetail::output_times(cfg.stepper);
    FlowState last_good = s;
    double last_dt = 0.0;
    bool taylor_warned = false;

    auto emit = [&](size_t k) {
        // capture at every output time; the series vectors double as the
        // sweep alignment grid
        if (capture) {
            out.rho_series.push_back(s.rho);
            out.v_series.push_back(s.v);
            out.h_series.push_back(s.h.values);
        }
        out.out_times.push_back(s.t);
        if (k % static_cast<size_t>(cfg.diag.cadence) != 0 && k + 1 != times.size()) return;

        EnergyLedger el = energy_ledger(s, par, dom);
        energy.push(el, s.t);
        theta.push(s, dom);
        TaylorSign ts = taylor_sign(s, par, dom);
        LayerProbe lp = layer_probe(s, par, dom);
        auto dc = check_diffeomorphism(s.metric, par.c0_health, dom);
        double dzz_sup = 0.0;
        for (const auto& c : s.v) dzz_sup = std::max(dzz_sup, sup_norm(dom.dzz(c)));

        if (par.sigma == 0.0 && ts.degenerate && !taylor_warned) {
            if (!quiet)
                std::cerr << "warning: Taylor sign condition degenerate at t = " << s.t
                          << " (min " << ts.min_value << "); continuing\n";
            taylor_warned = true;
        }

        out.first_energy = energy.first();
        out.last_energy = el;
        out.balance_defect = energy.balance_defect();
        out.theta = theta.report();
        out.theta_valid = true;
        out.last_probe = lp;
        out.dzz_v_sup_last = dzz_sup;
        out.dzz_v_sup_max = std::max(out.dzz_v_sup_max, dzz_sup);

        const auto& rep = out.theta;
        const double cols[] = {s.t,
                               last_dt,
                               el.total,
                               el.kinetic,
                               el.internal,
                               el.external,
                               el.capillary,
                               el.dissipation_rate,
                               el.bottom_flux_rate,
                               out.balance_defect,
                               rep.theta,
                               rep.last.x_sq,
                               ts.min_value,
                               ts.degenerate ? 1.0 : 0.0,
                               dc.min_J,
                               dzz_sup,
                               lp.eps_dzz_v,
                               lp.delta_p_norm,
                               lp.layer_width,
                               lp.sn_trace_sup,
                               lp.identity_residuals.zeta_trace_sup,
                               lp.identity_residuals.div_identity_sup,
                               lp.identity_residuals.vort_identity_sup};
        for (size_t i = 0; i < std::size(cols); ++i) csv << (i ? "," : "") << fmt_g17(cols[i]);
        csv << "\n";
    };

    try {
        emit(0);
        for (size_t k = 1; k < times.size(); ++k) {
            const double t_next = times[k];
            while (s.t < t_next - 1e-12) {
                const double dt = std::min(cfl_dt(s, par, cfg.stepper, dom), t_next - s.t);
                advance(s, par, cfg.stepper, dt, dom, {}, {});
                last_dt = dt;
                ++out.steps;
                last_good = s;
            }
            emit(k);
        }
        write_snapshot(outdir + "/final.fscn", snapshot_of(s, dom));
    } catch (const HealthError& e) {
        out.exit_code = 3;
        out.abort_reason = e.what();
        write_snapshot(outdir + "/last_good.fscn", snapshot_of(last_good, dom));
        if (!quiet) std::cerr << "health abort: " << e.what() << "\n";
    }

    out.series_csv = csv.str();
    harnessdetail::write_text(outdir + "/series.csv", out.series_csv);

    std::ostringstream rep;
    rep << "status: " << (out.exit_code == 0 ? "completed" : "health abort") << "\n";
    if (!out.abort_reason.empty()) rep << "reason: " << out.abort_reason << "\n";
    rep << "steps: " << out.steps << "\n";
    rep << "final_t: " << fmt_g17(s.t) << "\n";
    if (out.theta_valid) {
        rep << "theta_m" << cfg.diag.m << ": " << fmt_g17(out.theta.theta) << "\n";
        rep << "energy_balance_defect: " << fmt_g17(out.balance_defect) << "\n";
        rep << "taylor_min: " << fmt_g17(out.theta.taylor_min)
            << (out.theta.taylor_degenerate ? " (degenerate)" : "") << "\n";
    }
    harnessdetail::write_text(outdir + "/report.txt", rep.str());
    return out;
}

struct SweepMember {
    double value = 0.0;  // axis value; the limit member has value 0
    bool aborted = false;
    std::string abort_reason;
    RunOutput out;
};

struct SweepReport {
    std::vector<SweepMember> members;  // plan order, then the limit member
    // sup over aligned output times and space, consecutive member pairs:
    std::vector<double> cauchy_v, cauchy_rho, cauchy_h;
    // each positive member against the limit (axis value 0) run:
    std::vector<double> limit_v, limit_rho, limit_h;
    double theta_max = 0.0, theta_min = 0.0, theta_ratio = 0.0;
    double dzz_growth = 0.0;  // dzz_v sup: smallest / largest axis value
    double slope_eps_dzz = 0.0, slope_width = 0.0;  // log-log slopes vs axis
    std::string csv;
};

/// Runs every member of the plan (shared grid, initial data, and output
/// grid), plus the limit member at axis value 0, then compares survivors.
inline SweepReport sweep(const SweepPlan& plan, const std::string& outdir, bool quiet = true) {
    plan.base.validate();
    plan.validate();
    std::filesystem::create_directories(outdir);

    SweepReport rep;
    std::vector<double> values = plan.values;
    values.push_back(0.0);  // the limit run

    for (size_t i = 0; i < values.size(); ++i) {
        RunConfig cfg = plan.base;
        if (plan.axis == SweepAxis::Eps)
            cfg.physics.eps = values[i];
        else
            cfg.physics.sigma = values[i];
        const std::string sub =
            outdir + (values[i] > 0 ? "/member_" + std::to_string(i) : "/limit");
        SweepMember m;
        m.value = values[i];
        m.out = run(cfg, sub, quiet, /*capture=*/true);
        m.aborted = m.out.exit_code != 0;
        m.abort_reason = m.out.abort_reason;
        rep.members.push_back(std::move(m));
    }

    const size_t n = plan.values.size();
    const SweepMember& limit = rep.members.back();

    auto whole_series_sup = [&](const RunOutput& a, const RunOutput& b, int what) {
        // what: 0 = v (all components), 1 = rho, 2 = h in W^{1,inf}
        const size_t nt = std::min(a.out_times.size(), b.out_times.size());
        Domain dom(plan.base.grid);
        double s = 0.0;
        for (size_t k = 0; k < nt; ++k) {
            if (what == 0) {
                for (size_t j = 0; j < a.v_series[k].size(); ++j)
                    s = std::max(s, harnessdetail::sup_diff(a.v_series[k][j], b.v_series[k][j]));
            } else if (what == 1) {
                s = std::max(s, harnessdetail::sup_diff(a.rho_series[k], b.rho_series[k]));
            } else {
                Field d(dom.nh());
                for (int q = 0; q < dom.nh(); ++q)
                    d[q] = a.h_series[k][q] - b.h_series[k][q];
                double w = sup_norm(d);
                for (int dir = 0; dir < dom.grid.dim_h(); ++dir)
                    w += sup_norm(dom.spec.deriv_level(d, dir));
                s = std::max(s, w);
            }
        }
        return s;
    };

    auto ok = [&](size_t i) { return !rep.members[i].aborted; };

    for (size_t i = 0; i + 1 < n; ++i) {
        if (ok(i) && ok(i + 1)) {
            rep.cauchy_v.push_back(whole_series_sup(rep.members[i].out, rep.members[i + 1].out, 0));
            rep.cauchy_rho.push_back(
                whole_series_sup(rep.members[i].out, rep.members[i + 1].out, 1));
            rep.cauchy_h.push_back(whole_series_sup(rep.members[i].out, rep.members[i + 1].out, 2));
        } else {
            rep.cauchy_v.push_back(-1.0);
            rep.cauchy_rho.push_back(-1.0);
            rep.cauchy_h.push_back(-1.0);
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (ok(i) && !limit.aborted) {
            rep.limit_v.push_back(whole_series_sup(rep.members[i].out, limit.out, 0));
            rep.limit_rho.push_back(whole_series_sup(rep.members[i].out, limit.out, 1));
            rep.limit_h.push_back(whole_series_sup(rep.members[i].out, limit.out, 2));
        } else {
            rep.limit_v.push_back(-1.0);
            rep.limit_rho.push_back(-1.0);
            rep.limit_h.push_back(-1.0);
        }
    }

    // Theta bounded-family ratio and layer scalings over surviving positive
    // members.
    std::vector<double> vs, eps_dzz, widths;
    bool first = true;
    for (size_t i = 0; i < n; ++i) {
        if (!ok(i) || !rep.members[i].out.theta_valid) continue;
        const double th = rep.members[i].out.theta.theta;
        rep.theta_max = first ? th : std::max(rep.theta_max, th);
        rep.theta_min = first ? th : std::min(rep.theta_min, th);
        first = false;
        vs.push_back(rep.members[i].value);
        eps_dzz.push_back(std::max(rep.members[i].out.last_probe.eps_dzz_v, 1e-300));
        widths.push_back(std::max(rep.members[i].out.last_probe.layer_width, 1e-300));
    }
    if (!first && rep.theta_min > 0) rep.theta_ratio = rep.theta_max / rep.theta_min;
    if (vs.size() >= 2) {
        const double g_first = rep.members.front().out.dzz_v_sup_last;
        double g_last = 0.0;
        for (size_t i = n; i-- > 0;)
            if (ok(i)) {
                g_last = rep.members[i].out.dzz_v_sup_last;
                break;
            }
        if (g_first > 0) rep.dzz_growth = g_last / g_first;
        // log-log slopes against the axis value (values decrease, so reuse
        // the least-squares fit with x = value)
        rep.slope_eps_dzz = -fit_order(vs, eps_dzz);
        rep.slope_width = -fit_order(vs, widths);
    }

    std::ostringstream csv;
    csv << "value,aborted,theta,x_sq,dzz_v_sup,eps_dzz_v,delta_p_h1co,layer_width,"
           "cauchy_v,cauchy_rho,cauchy_h,limit_v,limit_rho,limit_h\n";
    for (size_t i = 0; i < rep.members.size(); ++i) {
        const auto& m = rep.members[i];
        const bool pos = i < n;
        const double cv = pos && i < rep.cauchy_v.size() ? rep.cauchy_v[i] : -1.0;
        const double cr = pos && i < rep.cauchy_rho.size() ? rep.cauchy_rho[i] : -1.0;
        const double ch = pos && i < rep.cauchy_h.size() ? rep.cauchy_h[i] : -1.0;
        const double lv = pos ? rep.limit_v[i] : 0.0;
        const double lr = pos ? rep.limit_rho[i] : 0.0;
        const double lh = pos ? rep.limit_h[i] : 0.0;
        const double cols[] = {m.value,
                               m.aborted ? 1.0 : 0.0,
                               m.out.theta_valid ? m.out.theta.theta : -1.0,
                               m.out.theta_valid ? m.out.theta.last.x_sq : -1.0,
                               m.out.dzz_v_sup_last,
                               m.out.last_probe.eps_dzz_v,
                               m.out.last_probe.delta_p_norm,
                               m.out.last_probe.layer_width,
                               cv,
                               cr,
                               ch,
                               lv,
                               lr,
                               lh};
        for (size_t q = 0; q < std::size(cols); ++q) csv << (q ? "," : "") << fmt_g17(cols[q]);
        csv << "\n";
    }
    rep.csv = csv.str();
    harnessdetail::write_text(outdir + "/sweep.csv", rep.csv);

    std::ostringstream txt;
    txt << "axis: " << (plan.axis == SweepAxis::Eps ? "eps" : "sigma") << "\n";
    txt << "members: " << n << " + limit\n";
    for (const auto& m : rep.members)
        if (m.aborted) txt << "aborted member value " << fmt_g17(m.value) << ": " << m.abort_reason << "\n";
    txt << "theta_ratio: " << fmt_g17(rep.theta_ratio) << "\n";
    txt << "dzz_growth: " << fmt_g17(rep.dzz_growth) << "\n";
    txt << "slope_eps_dzz: " << fmt_g17(rep.slope_eps_dzz) << "\n";
    txt << "slope_width: " << fmt_g17(rep.slope_width) << "\n";
    harnessdetail::write_text(outdir + "/sweep_report.txt", txt.str());
    return rep;
}

struct MmsVerifyResult {
    std::vector<MmsErrors> table;  // per resolution
    double order_rho = 0.0, order_v1 = 0.0, order_v3 = 0.0, order_h = 0.0;
    bool exact = false;   // all errors at round-off (identity solution)
    int exit_code = 0;    // 0 pass, 4 verification failure
    std::string csv;
};

/// Convergence verification against a manufactured solution: three vertical
/// resolutions (nz, 3nz/2, 9nz/4), per-variable least-squares order.
inline MmsVerifyResult mms_verify(const RunConfig& cfg, const std::string& solution_id,
                                  const std::string& outdir) {
    cfg.validate();
    std::filesystem::create_directories(outdir);
    const ManufacturedSolution sol = ManufacturedSolution::by_id(solution_id);

    MmsVerifyResult res;
    std::vector<double> ns, er, eu, ew, eh;
    for (int level = 0; level < 3; ++level) {
        GridConfig gc = cfg.grid;
        gc.nz = cfg.grid.nz * (level == 0 ? 4 : level == 1 ? 6 : 9) / 4;
        MmsErrors e = mms_run(sol, cfg.physics, gc, cfg.stepper.t_end, cfg.stepper.cfl);
        res.table.push_back(e);
        ns.push_back(gc.nz);
        er.push_back(e.rho);
        eu.push_back(e.v1);
        ew.push_back(e.v3);
        eh.push_back(e.h);
    }

    double emax = 0.0;
    for (const auto& e : res.table)
        emax = std::max({emax, e.rho, e.v1, e.v3, e.h});
    res.exact = emax < 1e-10;
    if (!res.exact) {
        res.order_rho = fit_order(ns, er);
        res.order_v1 = fit_order(ns, eu);
        res.order_v3 = fit_order(ns, ew);
        res.order_h = fit_order(ns, eh);
        const double omin =
            std::min({res.order_rho, res.order_v1, res.order_v3, res.order_h});
        if (omin < 1.5) res.exit_code = 4;
    }

    std::ostringstream csv;
    csv << "nz,err_rho,err_v1,err_v3,err_h\n";
    for (const auto& e : res.table)
        csv << e.nz << "," << fmt_g17(e.rho) << "," << fmt_g17(e.v1) << "," << fmt_g17(e.v3) << ","
            << fmt_g17(e.h) << "\n";
    csv << "order," << fmt_g17(res.order_rho) << "," << fmt_g17(res.order_v1) << ","
        << fmt_g17(res.order_v3) << "," << fmt_g17(res.order_h) << "\n";
    res.csv = csv.str();
    harnessdetail::write_text(outdir + "/mms.csv", res.csv);
    return res;
}

}  // namespace fsns

// Acceptance gate: one self-contained check per acceptance criterion,
// printing a single [PASS]/[FAIL] line each. Exits nonzero if any fail.
// Built as a plain executable (no test framework) so the output stays a
// readable ledger; helpers.hpp is included only for the closed-form
// surface/state generators.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fsns/harness.hpp"
#include "helpers.hpp"

using namespace fsns;
using namespace testutil;

namespace {

int g_failures = 0;

std::string out_dir(const std::string& leaf) {
    const auto dir = std::filesystem::temp_directory_path() / "fsns_acceptance" / leaf;
    std::filesystem::remove_all(dir);
    return dir.string();
}

/// Runs one criterion, catching anything it throws, and prints the verdict.
void criterion(int number, const std::string& label, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", number,
                label.c_str(), secs, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// --- criterion bodies -------------------------------------------------------

bool extension_exactness(std::string& detail) {
    Domain dom = make_domain_1d(64, 128, 3.0, 2.0);
    ModeSurface surf;
    surf.modes = {{3, 0.2, 0.1}};
    SurfaceHeight sh = make_surface_height(dom, surf.sample_h(dom));
    Field eta = extend_height(sh, dom);

    double rel = 0.0, trace = 0.0, scale = 0.0;
    const int nz = dom.nz();
    for (int ih = 0; ih < dom.nh(); ++ih) {
        const double y = dom.grid.y_of(ih);
        for (int j = 0; j < nz; ++j) {
            const double want = surf.eta(y, dom.grid.z[j]);
            rel = std::max(rel, std::abs(eta[static_cast<size_t>(ih) * nz + j] - want));
            scale = std::max(scale, std::abs(want));
        }
        trace = std::max(trace, std::abs(eta[static_cast<size_t>(ih) * nz + nz - 1] - surf.h(y)));
    }
    rel /= scale;
    detail = "rel " + fmt(rel) + ", trace " + fmt(trace);
    return rel <= 1e-12 && trace <= 1e-13;
}

bool identity_suite(std::string& detail) {
    // 20 seeded random band-limited states over curved charts; residuals of
    // the divergence and vorticity structure identities must sit at the
    // truncation floor and shrink by >= 4x when N_z doubles. The generators
    // draw closed-form parameters, so replaying the per-trial seed samples
    // the identical state on the doubled grid.
    GridConfig gc;
    gc.ny = 16;
    gc.nz = 256;
    gc.z_max = 3.0;
    gc.stretch = 1.0;
    Domain coarse(gc);
    gc.nz = 512;
    Domain fine(gc);

    auto residuals = [](const Domain& dom, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        auto surf = random_surface(rng, 1e-3);
        Field v0 = random_volume(dom, rng, 2, 1e-3);
        Field v1 = random_volume(dom, rng, 2, 1e-3);
        auto s = make_state(Field(dom.volume_size(), 1.0), {std::move(v0), std::move(v1)},
                            surf.sample_h(dom), 1.0, dom);
        auto r = structural_residuals(s, dom);
        return std::pair<double, double>{r.div_identity_sup, r.vort_identity_sup};
    };

    double worst = 0.0, worst_ratio = 1e300;
    for (int trial = 0; trial < 20; ++trial) {
        const std::uint64_t seed = 9000 + trial;
        auto [dc, vc] = residuals(coarse, seed);
        worst = std::max(worst, std::max(dc, vc));
        if (trial < 4) {
            auto [df, vf] = residuals(fine, seed);
            worst_ratio = std::min(worst_ratio, std::min(dc / df, vc / vf));
        }
    }
    detail = "sup residual " + fmt(worst) + ", refinement ratio " + fmt(worst_ratio);
    return worst <= 1e-8 && worst_ratio >= 4.0;
}

bool commutator_two_route(std::string& detail) {
    Domain dom = make_domain_1d(32, 128);
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        auto surf = random_surface(rng, 0.05, 3);
        auto h = make_surface_height(dom, surf.sample_h(dom));
        Field dh(dom.nh());
        for (int i = 0; i < dom.nh(); ++i) dh[i] = 0.03 * std::cos(2 * dom.grid.y_of(i));
        auto m = assemble_chart(h, make_surface_height(dom, dh), 1.0, dom);
        TimeStack fs(random_volume(dom, rng, 3, 0.5), random_volume(dom, rng, 3, 0.5));
        for (int zw : {0, 1, 3}) {
            MultiIndex a{zw == 0 ? 1 : 0, zw == 1 ? 1 : 0, 0, zw == 3 ? 1 : 0};
            for (int i : {0, 1, 3}) {
                if (i == 0 && zw == 0) continue;  // needs second time derivatives
                Field r1 = commutator_residual(fs, a, i, m, dom);
                Field r2 = commutator_expanded(fs, zw, i, m, dom);
                worst = std::max(worst, max_abs_diff(r1, r2));
            }
        }
    }
    detail = "two-route sup gap " + fmt(worst);
    return worst <= 1e-6;
}

bool energy_balance(std::string& detail) {
    RunConfig c;
    c.grid.ny = 64;
    c.grid.nz = 96;
    c.grid.z_max = 3.0;
    c.grid.stretch = 1.0;
    c.physics.eps = 1e-2;
    c.physics.sigma = 0.1;
    c.stepper.t_end = 1.0;
    c.stepper.output_every = 0.25;
    c.initial.preset = "capillary_wave";
    c.initial.amplitude = 0.02;
    RunOutput out = run(c, out_dir("energy_balance"));
    const double e0 = out.first_energy.total;
    detail = "defect " + fmt(out.balance_defect) + " vs bound " + fmt(1e-3 * e0);
    return out.exit_code == 0 && out.balance_defect <= 1e-3 * e0;
}

bool mms_orders(std::string& detail) {
    RunConfig c;
    c.grid.ny = 16;
    c.grid.nz = 32;
    c.grid.z_max = 3.0;
    c.grid.stretch = 1.0;
    c.physics.mu = 1.0;
    c.physics.lambda = 0.4;
    c.physics.sigma = 0.0;
    c.stepper.t_end = 0.25;

    double min_order = 1e300;
    for (double eps : {1e-2, 0.0}) {
        c.physics.eps = eps;
        MmsVerifyResult r =
            mms_verify(c, "moving_surface", out_dir(eps > 0 ? "mms_visc" : "mms_invisc"));
        for (double o : {r.order_rho, r.order_v1, r.order_v3, r.order_h})
            min_order = std::min(min_order, o);
    }
    detail = "min observed order " + fmt(min_order);
    return min_order >= 1.8;
}

/// Shared eps-sweep for criteria 6 and 7: transverse shear step under a
/// capillary ripple (see the shear_layer preset notes).
const SweepReport& layer_sweep() {
    static const SweepReport rep = [] {
        SweepPlan p;
        RunConfig& c = p.base;
        c.grid.dim_h = 2;
        c.grid.ny = 8;
        c.grid.nz = 320;
        c.grid.z_max = 3.0;
        c.grid.stretch = 2.0;
        c.physics.sigma = 0.05;
        c.physics.mu = 1.0;
        c.physics.lambda = 0.4;
        c.stepper.t_end = 0.5;
        c.stepper.output_every = 0.1;
        c.initial.preset = "shear_layer";
        c.initial.amplitude = 0.01;
        c.initial.speed = 0.005;
        c.initial.width = 0.025;
        c.initial.depth = 0.35;
        c.diag.m = 2;
        c.diag.m_cap = 2;
        p.axis = SweepAxis::Eps;
        p.values = {1e-2, 3e-3, 1e-3};
        p.comparison = SweepComparison::LayerScaling;
        return sweep(p, out_dir("layer_sweep"));
    }();
    return rep;
}

bool theta_uniform(std::string& detail) {
    const SweepReport& rep = layer_sweep();
    for (const auto& m : rep.members)
        if (m.aborted) {
            detail = "member at value " + fmt(m.value) + " aborted";
            return false;
        }
    detail = "theta ratio " + fmt(rep.theta_ratio) + ", dzz growth " + fmt(rep.dzz_growth);
    return rep.theta_ratio > 0.0 && rep.theta_ratio <= 2.0 && rep.dzz_growth >= 3.0;
}

bool density_layer_weaker(std::string& detail) {
    const SweepReport& rep = layer_sweep();
    double dp_min = 1e300, dp_max = 0.0, ed_min = 1e300, ed_max = 0.0;
    for (const auto& m : rep.members) {
        if (m.value <= 0.0) continue;  // the eps = 0 limit member
        if (m.aborted) {
            detail = "member at value " + fmt(m.value) + " aborted";
            return false;
        }
        const auto& lp = m.out.last_probe;
        dp_min = std::min(dp_min, lp.delta_p_norm);
        dp_max = std::max(dp_max, lp.delta_p_norm);
        ed_min = std::min(ed_min, lp.eps_dzz_v);
        ed_max = std::max(ed_max, lp.eps_dzz_v);
    }
    const double dp_ratio = dp_max / dp_min, ed_ratio = ed_max / ed_min;
    detail = "|lap p| ratio " + fmt(dp_ratio) + ", eps*dzz ratio " + fmt(ed_ratio) +
             ", dzz growth " + fmt(rep.dzz_growth);
    return dp_ratio <= 2.0 && ed_ratio <= 2.0 && rep.dzz_growth >= 3.0;
}

bool vanishing_viscosity(std::string& detail) {
    SweepPlan p;
    RunConfig& c = p.base;
    c.grid.ny = 32;
    c.grid.nz = 64;
    c.grid.z_max = 3.0;
    c.grid.stretch = 1.0;
    c.physics.sigma = 0.1;
    c.stepper.t_end = 0.5;
    c.stepper.output_every = 0.1;
    c.initial.preset = "capillary_wave";
    c.initial.amplitude = 0.02;
    p.axis = SweepAxis::Eps;
    p.values = {1e-3, 5e-4, 2.5e-4, 1.25e-4};
    SweepReport rep = sweep(p, out_dir("vanishing_viscosity"));

    auto strictly_down = [](const std::vector<double>& v) {
        for (size_t i = 0; i + 1 < v.size(); ++i)
            if (!(v[i] > v[i + 1])) return false;
        return !v.empty();
    };
    const bool cauchy = strictly_down(rep.cauchy_v) && strictly_down(rep.cauchy_rho) &&
                        strictly_down(rep.cauchy_h);
    const bool limit = strictly_down(rep.limit_v) && strictly_down(rep.limit_rho) &&
                       strictly_down(rep.limit_h);
    detail = "cauchy_v";
    for (double d : rep.cauchy_v) detail += " " + fmt(d);
    detail += "; limit_v";
    for (double d : rep.limit_v) detail += " " + fmt(d);
    return cauchy && limit;
}

bool zero_surface_tension(std::string& detail) {
    SweepPlan p;
    RunConfig& c = p.base;
    c.grid.ny = 32;
    c.grid.nz = 64;
    c.grid.z_max = 3.0;
    c.grid.stretch = 1.0;
    c.physics.eps = 1e-3;
    c.stepper.t_end = 0.5;
    c.stepper.output_every = 0.1;
    c.initial.preset = "capillary_wave";
    c.initial.amplitude = 0.02;
    p.axis = SweepAxis::Sigma;
    p.values = {1e-1, 1e-2, 1e-3};
    SweepReport rep = sweep(p, out_dir("zero_surface_tension"));

    auto down = [](const std::vector<double>& v) {
        for (size_t i = 0; i + 1 < v.size(); ++i)
            if (!(v[i] > v[i + 1])) return false;
        return !v.empty();
    };
    const bool ok = down(rep.limit_v) && down(rep.limit_rho) && down(rep.limit_h);
    detail = "limit distances (v)";
    for (double d : rep.limit_v) detail += " " + fmt(d);
    return ok;
}

bool health_monitors(std::string& detail) {
    // Steep surface: the chart monitor must abort with a valid last-good
    // snapshot. Equilibrium: no monitor may trip over >= 1e4 steps.
    RunConfig c;
    c.grid.ny = 16;
    c.grid.nz = 24;
    c.grid.z_max = 3.0;
    c.grid.stretch = 1.0;
    c.physics.sigma = 0.0;
    c.stepper.t_end = 0.5;
    c.stepper.output_every = 0.1;
    c.initial.preset = "steep_surface";
    c.initial.amplitude = 0.8;
    const std::string dir = out_dir("steep");
    RunOutput steep = run(c, dir);
    bool abort_ok = steep.exit_code == 3 && !steep.abort_reason.empty();
    if (abort_ok) {
        Snapshot sn = read_snapshot(dir + "/last_good.fscn");
        abort_ok = sn.fields.size() == 4 && sn.grid.ny == c.grid.ny;
    }

    c.initial.preset = "equilibrium";
    c.initial.amplitude = 0.01;
    c.stepper.t_end = 400.0;
    c.stepper.output_every = 100.0;
    RunOutput eq = run(c, out_dir("equilibrium_long"));
    const bool eq_ok = eq.exit_code == 0 && eq.steps >= 10000 && eq.abort_reason.empty();
    detail = "steep exit " + std::to_string(steep.exit_code) + ", equilibrium steps " +
             std::to_string(eq.steps);
    return abort_ok && eq_ok;
}

}  // namespace

int main() {
    criterion(1, "extension exactness", extension_exactness);
    criterion(2, "structure identity suite", identity_suite);
    criterion(3, "commutator two-route agreement", commutator_two_route);
    criterion(4, "energy balance on a capillary run", energy_balance);
    criterion(5, "MMS convergence orders", mms_orders);
    criterion(6, "uniform conormal boundedness across eps", theta_uniform);
    criterion(7, "density layer weaker than velocity layer", density_layer_weaker);
    criterion(8, "vanishing-viscosity convergence", vanishing_viscosity);
    criterion(9, "zero-surface-tension limit", zero_surface_tension);
    criterion(10, "health monitors", health_monitors);
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}

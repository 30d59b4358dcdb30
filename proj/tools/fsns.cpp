// Command line front end for the free-surface compressible flow harness.
//
// Subcommands:
//   run <config>                 integrate one configured run
//   sweep <plan>                 run a parameter sweep with comparisons
//   mms <config> --solution <id> manufactured-solution order verification
//   inspect <snapshot>           print a snapshot summary
//
// Exit codes: 0 success, 2 configuration error, 3 health abort,
// 4 verification failure.

#include <optional>

#include <CLI11.hpp>

#include "fsns/harness.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fsns::ConfigError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void apply_seed(fsns::RunConfig& cfg, const std::optional<std::uint64_t>& seed) {
    if (seed) cfg.initial.seed = *seed;
}

int do_run(const std::string& path, const std::string& outdir,
           const std::optional<std::uint64_t>& seed, bool quiet) {
    fsns::RunConfig cfg = fsns::parse_run_config(slurp(path));
    apply_seed(cfg, seed);
    fsns::RunOutput out = fsns::run(cfg, outdir, quiet);
    if (!quiet) {
        std::cout << (out.exit_code == 0 ? "completed" : "aborted") << " after " << out.steps
                  << " steps; outputs in " << outdir << "\n";
    }
    return out.exit_code;
}

int do_sweep(const std::string& path, const std::string& outdir,
             const std::optional<std::uint64_t>& seed, bool quiet) {
    fsns::SweepPlan plan = fsns::parse_sweep_plan(slurp(path));
    apply_seed(plan.base, seed);
    fsns::SweepReport rep = fsns::sweep(plan, outdir, quiet);
    bool any_abort = false;
    for (const auto& m : rep.members) any_abort |= m.aborted;
    if (!quiet) {
        std::cout << "sweep of " << rep.members.size() << " members (incl. limit); theta ratio "
                  << rep.theta_ratio << "; outputs in " << outdir << "\n";
    }
    return any_abort ? 3 : 0;
}

int do_mms(const std::string& path, const std::string& solution, const std::string& outdir,
           bool quiet) {
    fsns::RunConfig cfg = fsns::parse_run_config(slurp(path));
    fsns::MmsVerifyResult res = fsns::mms_verify(cfg, solution, outdir);
    if (!quiet) {
        if (res.exact) {
            std::cout << "all errors at round-off (exact solution)\n";
        } else {
            std::cout << "orders: rho " << res.order_rho << ", v1 " << res.order_v1 << ", v3 "
                      << res.order_v3 << ", h " << res.order_h << "\n";
        }
    }
    return res.exit_code;
}

int do_inspect(const std::string& path) {
    fsns::Snapshot sn = fsns::read_snapshot(path);
    std::cout << "snapshot: " << path << "\n";
    std::cout << "grid: dim_h " << sn.grid.dim_h << ", ny " << sn.grid.ny << ", nz " << sn.grid.nz
              << ", length " << fsns::fmt_g17(sn.grid.length) << ", z_max "
              << fsns::fmt_g17(sn.grid.z_max) << ", stretch " << fsns::fmt_g17(sn.grid.stretch)
              << "\n";
    std::cout << "t " << fsns::fmt_g17(sn.t) << ", chart slope " << fsns::fmt_g17(sn.A) << "\n";
    for (const auto& [name, f] : sn.fields) {
        double lo = f.empty() ? 0 : f[0], hi = lo, sum = 0;
        for (double x : f) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            sum += x;
        }
        std::cout << name << ": n " << f.size() << ", min " << fsns::fmt_g17(lo) << ", max "
                  << fsns::fmt_g17(hi) << ", mean "
                  << fsns::fmt_g17(f.empty() ? 0.0 : sum / static_cast<double>(f.size())) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"free-surface compressible flow simulator"};
    app.require_subcommand(1);

    std::string output_dir = "out";
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    app.add_option("--output-dir", output_dir, "directory for run artifacts");
    app.add_option("--seed", seed, "override the config RNG seed");
    app.add_flag("--quiet", quiet, "suppress progress output");

    std::string run_cfg, sweep_cfg, mms_cfg, mms_solution = "moving_surface", snap_path;
    auto* c_run = app.add_subcommand("run", "integrate one configured run");
    c_run->add_option("config", run_cfg, "run config file")->required();
    auto* c_sweep = app.add_subcommand("sweep", "run a parameter sweep");
    c_sweep->add_option("plan", sweep_cfg, "sweep plan file")->required();
    auto* c_mms = app.add_subcommand("mms", "manufactured-solution verification");
    c_mms->add_option("config", mms_cfg, "base config file")->required();
    c_mms->add_option("--solution", mms_solution, "manufactured solution id");
    auto* c_inspect = app.add_subcommand("inspect", "print a snapshot summary");
    c_inspect->add_option("snapshot", snap_path, "snapshot file")->required();

    // let --output-dir/--seed/--quiet appear after the subcommand too
    for (auto* sc : {c_run, c_sweep, c_mms, c_inspect}) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (c_run->parsed()) return do_run(run_cfg, output_dir, seed, quiet);
        if (c_sweep->parsed()) return do_sweep(sweep_cfg, output_dir, seed, quiet);
        if (c_mms->parsed()) return do_mms(mms_cfg, mms_solution, output_dir, quiet);
        return do_inspect(snap_path);
    } catch (const fsns::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fsns::HealthError& e) {
        std::cerr << "health abort: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

// cnlslab: stationary CNLS boundary-value laboratory.
//
//   cnlslab solve     --dim 2 --repulsive --psi0 0.7
//   cnlslab sweep     --preset fig3 --out-dir runs/fig3
//   cnlslab criterion --dim 2 --repulsive --psi0 0.7
//   cnlslab qualify
//
// Every flag can also come from a flat key=value config file (--config).

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cnlslab/commands.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    bool repulsive = false;
    bool attractive = false;
    std::vector<double> grid;
    cnlslab::RunConfig cfg;
    bool dim_set = false, psi0_set = false, dpsi0_set = false;
    int dim = 2;
    double psi0 = 0.0, dpsi0 = 0.0;
    double xmax = 0.0, rtol = 0.0, atol = 0.0, snap = -1.0;
    bool xmax_set = false, rtol_set = false, atol_set = false, snap_set = false;
    std::string preset, out_dir, potential;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--config", o.config_path, "flat key=value config file");
    cmd->add_option("--dim", o.dim, "spatial dimension N (1, 2 or 3)")
        ->check(CLI::IsMember({1, 2, 3}))
        ->each([&](const std::string&) { o.dim_set = true; });
    cmd->add_flag("--repulsive", o.repulsive, "repulsive interaction (g > 0)");
    cmd->add_flag("--attractive", o.attractive, "attractive interaction (g < 0)");
    cmd->add_option("--psi0", o.psi0, "boundary value psi(0)")->each([&](const std::string&) {
        o.psi0_set = true;
    });
    cmd->add_option("--dpsi0", o.dpsi0, "boundary slope psi'(0), N=1 only for nonzero")
        ->each([&](const std::string&) { o.dpsi0_set = true; });
    cmd->add_option("--xmax", o.xmax, "integration range end")->each([&](const std::string&) {
        o.xmax_set = true;
    });
    cmd->add_option("--rtol", o.rtol, "relative tolerance")->each([&](const std::string&) {
        o.rtol_set = true;
    });
    cmd->add_option("--atol", o.atol, "absolute tolerance")->each([&](const std::string&) {
        o.atol_set = true;
    });
    cmd->add_option("--snap-tol", o.snap, "snap psi0 to a trivial solution within this distance")
        ->each([&](const std::string&) { o.snap_set = true; });
    cmd->add_option("--preset", o.preset, "figure preset: fig1, fig2 or fig3");
    cmd->add_option("--out-dir", o.out_dir, "output directory (must exist)");
    cmd->add_option("--potential", o.potential, "potential hook: none or quadratic:<a>");
    cmd->add_option("--jobs", o.jobs, "parallel sweep workers")->check(CLI::PositiveNumber);
    cmd->add_option("--psi0-grid", o.grid, "sweep grid of boundary values")->delimiter(',');
}

int resolve(CliOptions& o, cnlslab::RunConfig& cfg, std::ostream& err) {
    try {
        if (!o.config_path.empty()) cfg = cnlslab::load_config(o.config_path);
        if (!o.preset.empty()) cnlslab::apply_preset(cfg, o.preset);
        if (o.repulsive && o.attractive) {
            err << "error: --repulsive and --attractive are mutually exclusive\n";
            return cnlslab::kExitUsage;
        }
        if (o.repulsive) cfg.interaction = cnlslab::Interaction::Repulsive;
        if (o.attractive) cfg.interaction = cnlslab::Interaction::Attractive;
        if (o.dim_set) cfg.dimension = o.dim;
        if (o.psi0_set) cfg.psi0 = o.psi0;
        if (o.dpsi0_set) cfg.dpsi0 = o.dpsi0;
        if (o.xmax_set) cfg.integrator.x_max = o.xmax;
        if (o.rtol_set) cfg.integrator.rel_tol = o.rtol;
        if (o.atol_set) cfg.integrator.abs_tol = o.atol;
        if (o.snap_set) cfg.snap_tol = o.snap;
        if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
        if (!o.potential.empty()) cfg.potential = o.potential;
        if (o.jobs > 0) cfg.jobs = o.jobs;
        if (!o.grid.empty()) cfg.psi0_grid = o.grid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return cnlslab::kExitUsage;
    }
    return cnlslab::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary cubic nonlinear Schrodinger laboratory"};
    app.require_subcommand(1);

    CliOptions solve_opts, sweep_opts, crit_opts, qual_opts;
    CLI::App* solve = app.add_subcommand("solve", "integrate one boundary value and classify it");
    add_common(solve, solve_opts);
    CLI::App* sweep = app.add_subcommand("sweep", "classify a grid of boundary values");
    add_common(sweep, sweep_opts);
    CLI::App* criterion =
        app.add_subcommand("criterion", "oscillation-criterion map along a solution");
    add_common(criterion, crit_opts);
    CLI::App* qualify = app.add_subcommand("qualify", "integrator order check and oracle suite");
    add_common(qualify, qual_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cnlslab::kExitUsage;
    }

    const auto dispatch = [&](CLI::App* cmd, CliOptions& opts,
                              int (*fn)(const cnlslab::RunConfig&, std::ostream&,
                                        std::ostream&)) -> int {
        if (!cmd->parsed()) return -1;
        cnlslab::RunConfig cfg;
        const int rc = resolve(opts, cfg, std::cerr);
        if (rc != cnlslab::kExitOk) return rc;
        return fn(cfg, std::cout, std::cerr);
    };

    int rc = dispatch(solve, solve_opts, &cnlslab::cmd_solve);
    if (rc < 0) rc = dispatch(sweep, sweep_opts, &cnlslab::cmd_sweep);
    if (rc < 0) rc = dispatch(criterion, crit_opts, &cnlslab::cmd_criterion);
    if (rc < 0) rc = dispatch(qualify, qual_opts, &cnlslab::cmd_qualify);
    return rc < 0 ? cnlslab::kExitUsage : rc;
}

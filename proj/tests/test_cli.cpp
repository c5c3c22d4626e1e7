#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cnlslab/commands.hpp"
#include "cnlslab/run_config.hpp"

using namespace cnlslab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cnlslab_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> csv_column(const std::string& csv, std::size_t col) {
    std::vector<std::string> out;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        std::istringstream row(line);
        std::string field;
        for (std::size_t i = 0; i <= col; ++i) std::getline(row, field, ',');
        out.push_back(field);
    }
    return out;
}

}  // namespace

TEST_CASE("config defaults mirror the module defaults") {
    const RunConfig cfg = parse_config("");
    const IntegratorConfig ref;
    CHECK(cfg.dimension == 2);
    CHECK(cfg.interaction == Interaction::Repulsive);
    CHECK(cfg.integrator.rel_tol == ref.rel_tol);
    CHECK(cfg.integrator.abs_tol == ref.abs_tol);
    CHECK(cfg.integrator.x_max == ref.x_max);
    CHECK(cfg.integrator.epsilon_start == ref.epsilon_start);
    CHECK(cfg.integrator.max_steps == ref.max_steps);
    CHECK(cfg.integrator.tangency_tol == ref.tangency_tol);
    CHECK(cfg.snap_tol == 1e-4);
    CHECK(cfg.jobs == 1);
}

TEST_CASE("config parsing: values, comments, unknown keys") {
    const RunConfig cfg = parse_config(
        "# a comment\n"
        "dim = 3\n"
        "interaction = attractive\n"
        "psi0 = 0.75\n"
        "rtol = 1e-8\n"
        "psi0_grid = 0.1, 0.2,0.3\n"
        "jobs = 4\n");
    CHECK(cfg.dimension == 3);
    CHECK(cfg.interaction == Interaction::Attractive);
    CHECK(cfg.psi0 == 0.75);
    CHECK(cfg.integrator.rel_tol == 1e-8);
    CHECK(cfg.psi0_grid == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(cfg.jobs == 4);

    CHECK_THROWS_WITH_AS(parse_config("bogus_key = 1\n"),
                         doctest::Contains("bogus_key"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("dim 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("rtol = fast\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("interaction = both\n"), std::invalid_argument);
}

TEST_CASE("presets bundle the figure boundary values") {
    RunConfig cfg = parse_config("preset = fig3\n");
    CHECK(cfg.interaction == Interaction::Attractive);
    CHECK(cfg.dimension == 2);
    CHECK(cfg.psi0_grid == std::vector<double>{1.0, 3.0, 5.0});
    // Explicit keys override the preset.
    cfg = parse_config("preset = fig1\npsi0_grid = 0.5\n");
    CHECK(cfg.interaction == Interaction::Repulsive);
    CHECK(cfg.psi0_grid == std::vector<double>{0.5});
    CHECK(preset_grid("fig2") == std::vector<double>{0.65, kPsiPlus, 0.75});
    CHECK_THROWS_AS(preset_grid("fig9"), std::invalid_argument);
}

TEST_CASE("snap_to_trivial") {
    CHECK(snap_to_trivial(0.7071, 1e-4) == kPsiPlus);
    CHECK(snap_to_trivial(0.7071067811865476, 1e-4) == kPsiPlus);
    CHECK(snap_to_trivial(-0.70715, 1e-4) == -kPsiPlus);
    CHECK(snap_to_trivial(5e-5, 1e-4) == 0.0);
    CHECK(snap_to_trivial(0.71, 1e-4) == 0.71);    // outside the window
    CHECK(snap_to_trivial(0.7071, 0.0) == 0.7071);  // snapping disabled
}

TEST_CASE("cmd_solve writes trace, events and report") {
    TempDir tmp;
    RunConfig cfg;
    cfg.psi0 = 0.7;
    cfg.out_dir = tmp.path.string();
    std::ostringstream out, err;
    const int rc = cmd_solve(cfg, out, err);
    CHECK(rc == kExitOk);

    const std::string trace = slurp(tmp.path / "trace.csv");
    CHECK(trace.rfind("x,psi,dpsi\n", 0) == 0);

    const auto events = nlohmann::json::parse(slurp(tmp.path / "events.json"));
    CHECK(events.is_array());
    CHECK(!events.empty());

    const auto report = nlohmann::json::parse(slurp(tmp.path / "report.json"));
    CHECK(report.at("label") == "OscillatoryAboutZero");
    CHECK(report.at("zero_crossings").get<long>() >= 5);
}

TEST_CASE("cmd_solve classifies the snapped trivial boundary value as constant") {
    TempDir tmp;
    RunConfig cfg;
    cfg.psi0 = 0.7071067811865476;  // one ulp off the stored constant
    cfg.interaction = Interaction::Attractive;
    cfg.out_dir = tmp.path.string();
    std::ostringstream out, err;
    CHECK(cmd_solve(cfg, out, err) == kExitOk);
    const auto report = nlohmann::json::parse(slurp(tmp.path / "report.json"));
    CHECK(report.at("label") == "Constant");
}

TEST_CASE("cmd_solve exit codes: divergent ok, undetermined and usage nonzero") {
    TempDir tmp;
    RunConfig cfg;
    cfg.psi0 = 0.71;
    cfg.out_dir = tmp.path.string();
    std::ostringstream out, err;
    CHECK(cmd_solve(cfg, out, err) == kExitOk);  // Divergent is a classification

    RunConfig no_psi;
    no_psi.out_dir = tmp.path.string();
    CHECK(cmd_solve(no_psi, out, err) == kExitUsage);

    RunConfig trunc = cfg;
    trunc.psi0 = 0.7;
    trunc.integrator.max_steps = 60;
    CHECK(cmd_solve(trunc, out, err) == kExitNumerical);

    RunConfig bad_dim = cfg;
    bad_dim.dimension = 7;
    CHECK(cmd_solve(bad_dim, out, err) == kExitUsage);
}

TEST_CASE("cmd_solve with a potential writes files but no report") {
    TempDir tmp;
    RunConfig cfg;
    cfg.psi0 = 0.3;
    cfg.potential = "quadratic:0.05";
    cfg.integrator.x_max = 10.0;
    cfg.out_dir = tmp.path.string();
    std::ostringstream out, err;
    CHECK(cmd_solve(cfg, out, err) == kExitOk);
    CHECK(fs::exists(tmp.path / "trace.csv"));
    CHECK(fs::exists(tmp.path / "events.json"));
    CHECK_FALSE(fs::exists(tmp.path / "report.json"));
}

TEST_CASE("cmd_sweep reproduces the classification boundaries") {
    TempDir tmp;
    RunConfig cfg;
    cfg.out_dir = tmp.path.string();
    cfg.psi0_grid = {0.69, 0.70, 0.7071, 0.71, 0.72};
    std::ostringstream out, err;
    REQUIRE(cmd_sweep(cfg, out, err) == kExitOk);
    const auto labels = csv_column(slurp(tmp.path / "sweep.csv"), 1);
    const std::vector<std::string> expected{"OscillatoryAboutZero", "OscillatoryAboutZero",
                                            "Constant", "Divergent", "Divergent"};
    CHECK(labels == expected);
}

TEST_CASE("cmd_sweep on the attractive grid finds the exotic cases") {
    TempDir tmp;
    RunConfig cfg;
    cfg.interaction = Interaction::Attractive;
    cfg.out_dir = tmp.path.string();
    cfg.psi0_grid = {0.65, 0.7071, 0.75, 1.0, 3.0, 5.0};
    cfg.jobs = 3;
    std::ostringstream out, err;
    REQUIRE(cmd_sweep(cfg, out, err) == kExitOk);
    const std::string csv = slurp(tmp.path / "sweep.csv");
    const auto labels = csv_column(csv, 1);
    const std::vector<std::string> expected{"OscillatoryAboutPlus", "Constant",
                                            "OscillatoryAboutPlus", "OscillatoryAboutPlus",
                                            "Exotic", "Exotic"};
    CHECK(labels == expected);
    // Exotic rows carry an inflection location.
    const auto inflections = csv_column(csv, 7);
    CHECK(!inflections[4].empty());
    CHECK(!inflections[5].empty());
}

TEST_CASE("cmd_sweep: empty grid, determinism, jobs-independence, solve coherence") {
    TempDir tmp;
    RunConfig cfg;
    cfg.out_dir = tmp.path.string();
    cfg.psi0_grid = {};
    std::ostringstream out, err;
    REQUIRE(cmd_sweep(cfg, out, err) == kExitOk);
    const std::string empty = slurp(tmp.path / "sweep.csv");
    CHECK(empty ==
          "psi0,label,baseline,zero_crossings,extrema_count,first_lambda,last_lambda,"
          "inflection_x,error\n");

    cfg.psi0_grid = {0.6, 0.7, 0.71};
    const std::string serial = sweep_csv_text(cfg, cfg.psi0_grid);
    const std::string again = sweep_csv_text(cfg, cfg.psi0_grid);
    CHECK(serial == again);  // byte-identical reruns
    RunConfig par = cfg;
    par.jobs = 3;
    CHECK(sweep_csv_text(par, par.psi0_grid) == serial);

    // A sweep row equals the corresponding single solve.
    const SolveOutcome single = run_single(cfg, 0.7);
    REQUIRE(single.report.has_value());
    std::istringstream lines(serial);
    std::string header, row0, row1;
    std::getline(lines, header);
    std::getline(lines, row0);
    std::getline(lines, row1);
    CHECK(row1 == "0.7," + sweep_row_fields(*single.report) + ",");
}

TEST_CASE("cmd_sweep records per-row failures and continues") {
    TempDir tmp;
    RunConfig cfg;
    cfg.out_dir = tmp.path.string();
    cfg.dpsi0 = 0.5;  // invalid for N=2: every row fails, sweep itself succeeds
    cfg.psi0_grid = {0.5, 0.7};
    std::ostringstream out, err;
    REQUIRE(cmd_sweep(cfg, out, err) == kExitOk);
    const std::string csv = slurp(tmp.path / "sweep.csv");
    const auto errors = csv_column(csv, 8);
    REQUIRE(errors.size() == 2);
    CHECK(errors[0].find("psi'(0)") != std::string::npos);
    const auto labels = csv_column(csv, 1);
    CHECK(labels[0].empty());
}

TEST_CASE("cmd_criterion maps the coefficient along the solution") {
    TempDir tmp;
    RunConfig cfg;
    cfg.psi0 = kPsiPlus;
    cfg.interaction = Interaction::Attractive;
    cfg.out_dir = tmp.path.string();
    std::ostringstream out, err;
    REQUIRE(cmd_criterion(cfg, out, err) == kExitOk);
    const std::string csv = slurp(tmp.path / "criterion.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "x,psi,c_eff,criterion_bound,holds");
    // Constant trace on the trivial solution: c_eff exactly 0, never holds.
    while (std::getline(lines, line)) {
        std::istringstream row(line);
        std::string x, psi, c, bound, holds;
        std::getline(row, x, ',');
        std::getline(row, psi, ',');
        std::getline(row, c, ',');
        std::getline(row, bound, ',');
        std::getline(row, holds, ',');
        CHECK(c == "0");
        CHECK(bound == "0");
        CHECK(holds == "0");
    }

    // N = 3: the bound is the inertial floor 1/(4x^2), vanishing at large x.
    RunConfig n3;
    n3.dimension = 3;
    n3.psi0 = 0.7;
    n3.out_dir = tmp.path.string();
    REQUIRE(cmd_criterion(n3, out, err) == kExitOk);
    const std::string csv3 = slurp(tmp.path / "criterion.csv");
    const auto bounds = csv_column(csv3, 3);
    REQUIRE(bounds.size() >= 2);
    CHECK(std::stod(bounds.back()) < 1e-4);  // ~ 1/(4*60^2)
    CHECK(std::stod(bounds.front()) > 1.0);  // near the origin
}

TEST_CASE("the installed CLI binary: exit codes and reproducible files") {
    const std::string exe = CNLSLAB_CLI_PATH;
    TempDir tmp1, tmp2;

    const auto run = [&](const std::string& args) {
        return std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    };
    auto status = [](int rc) { return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1; };

    CHECK(status(run("--help")) == 0);
    CHECK(status(run("solve --dim 2 --repulsive --psi0 0.7 --out-dir " + tmp1.path.string())) ==
          0);
    CHECK(status(run("solve --dim 2 --repulsive --psi0 0.7 --out-dir " + tmp2.path.string())) ==
          0);
    CHECK(slurp(tmp1.path / "trace.csv") == slurp(tmp2.path / "trace.csv"));
    CHECK(slurp(tmp1.path / "report.json") == slurp(tmp2.path / "report.json"));

    CHECK(status(run("solve --psi0 0.7 --no-such-flag")) == 2);
    CHECK(status(run("nonsense")) == 2);
    CHECK(status(run("solve")) == 2);  // psi0 missing
    CHECK(status(run("sweep --preset fig2 --jobs 3 --out-dir " + tmp1.path.string())) == 0);

    // Config file path: equivalent to flags.
    const fs::path cfg_path = tmp1.path / "run.cfg";
    std::ofstream(cfg_path) << "dim = 2\ninteraction = repulsive\npsi0 = 0.7\nout_dir = " +
                                   tmp2.path.string() + "\n";
    CHECK(status(run("solve --config " + cfg_path.string())) == 0);
    CHECK(slurp(tmp1.path / "trace.csv") == slurp(tmp2.path / "trace.csv"));

    std::ofstream(cfg_path) << "walrus = 1\n";
    CHECK(status(run("solve --config " + cfg_path.string())) == 2);
}

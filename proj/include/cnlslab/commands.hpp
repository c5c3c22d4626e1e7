// Command implementations behind the CLI verbs; kept in the library so the
// test suite can drive them in-process.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cnlslab/analysis.hpp"
#include "cnlslab/run_config.hpp"

namespace cnlslab {

// Exit codes shared with the CLI front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

struct SolveOutcome {
    SolutionTrace trace;
    std::optional<ClassificationReport> report;  // absent for potential runs
    double psi0_used = 0.0;
};

/// Integrate one boundary value (after snapping) and classify it when the
/// problem is free.
SolveOutcome run_single(const RunConfig& cfg, double psi0);

/// solve: trace CSV + events JSON (+ report JSON for free problems).
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// sweep: one CSV row per grid boundary value; rows independent, executed
/// up to cfg.jobs at a time, emitted in grid order.
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// criterion: per-sample effective coefficient, dimension-appropriate bound
/// and criterion truth value along a fresh solve.
int cmd_criterion(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// qualify: integrator order check plus the double-precision oracle suite.
int cmd_qualify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// One sweep row, exactly as serialized into the sweep CSV (minus psi0).
std::string sweep_row_fields(const ClassificationReport& report);

std::string sweep_csv_text(const RunConfig& cfg, const std::vector<double>& grid);

}  // namespace cnlslab

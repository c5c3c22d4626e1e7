// Declarative run configuration shared by the CLI flags and the flat
// key=value config files; defaults mirror the library modules exactly.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cnlslab/equations.hpp"
#include "cnlslab/integrate.hpp"

namespace cnlslab {

struct RunConfig {
    int dimension = 2;
    Interaction interaction = Interaction::Repulsive;
    std::optional<double> psi0;
    double dpsi0 = 0.0;
    /// "none" or "quadratic:<coefficient>" (demonstration potential hook).
    std::string potential = "none";

    IntegratorConfig integrator;

    /// Input psi0 within this distance of a trivial solution is replaced by
    /// it exactly; 0 disables snapping.
    double snap_tol = 1e-4;

    std::string out_dir = ".";
    std::optional<std::string> trace_csv;
    std::optional<std::string> events_json;
    std::optional<std::string> report_json;
    std::optional<std::string> criterion_csv;
    std::optional<std::string> sweep_csv;

    std::vector<double> psi0_grid;
    int jobs = 1;
    std::optional<std::string> preset;  // fig1 | fig2 | fig3
};

/// Parse one flat key=value document ('#' comments, blank lines allowed).
/// Unknown keys raise std::invalid_argument naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Apply a figure preset: equation family plus the caption boundary values
/// as the default sweep grid (explicit settings already parsed win).
void apply_preset(RunConfig& cfg, const std::string& preset);

/// The preset's boundary-value grid.
std::vector<double> preset_grid(const std::string& preset);

EquationSpec make_spec(const RunConfig& cfg);
double snap_to_trivial(double psi0, double tol);

/// Effective output path for one artifact kind.
std::string output_path(const RunConfig& cfg, const std::optional<std::string>& override_path,
                        const std::string& default_name);

}  // namespace cnlslab

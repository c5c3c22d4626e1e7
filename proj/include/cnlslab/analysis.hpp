// Trace taxonomy: which trivial solution attracts a computed solution, how
// it oscillates, whether it is the exotic kind, and how well the pointwise
// oscillation criterion agrees with the observed half-cycles.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cnlslab/equations.hpp"
#include "cnlslab/integrate.hpp"

namespace cnlslab {

enum class Label {
    Constant,
    OscillatoryAboutZero,
    OscillatoryAboutPlus,
    OscillatoryAboutMinus,
    Exotic,
    Divergent,
    Undetermined,
};

const char* to_string(Label label);
std::optional<Label> label_from_string(const std::string& s);

struct AnalysisOptions {
    /// Absolute deviation below which a trace counts as constant.
    double const_tol = 1e-6;
    /// Fraction of the trace (by x, from the end) used to pick the baseline.
    double baseline_window = 0.25;
    /// detect_inflection_transition: a qualifying near-tangency needs this
    /// much crossing-free trace after it, or no crossing this close before
    /// it (one-sided grazes).
    double settle_span = 5.0;
};

struct ClassificationReport {
    Label label = Label::Undetermined;
    std::optional<double> baseline;
    long zero_crossings = 0;
    long extrema_count = 0;
    std::vector<std::pair<double, double>> wavelengths;  // (x_mid, lambda)
    std::optional<double> inflection_x;
    std::optional<double> criterion_consistency;
    std::string diagnostic;  // set for Undetermined traces
};

/// Deterministic label assignment; requires a free-particle spec and a trace
/// watched at (at least) the trivial-solution levels.
ClassificationReport classify(const SolutionTrace& trace, const EquationSpec& spec,
                              const AnalysisOptions& opts = {});

/// Trivial solution minimizing the mean |psi - psi*| over the trailing
/// window of the trace (trapezoid mean in x over the samples).
double estimate_baseline(const SolutionTrace& trace, const EquationSpec& spec,
                         double window_fraction = 0.25);

/// Full-period wavelengths: gaps between consecutive same-direction
/// crossings of the baseline, tagged with the gap midpoint, merged over both
/// directions in ascending x_mid. Fewer than 3 same-direction crossings
/// yield an empty list.
std::vector<std::pair<double, double>> wavelength_profile(const SolutionTrace& trace,
                                                          double baseline);

/// x of the last NearTangency(0) record after which psi never crosses zero;
/// see AnalysisOptions::settle_span for the truncation guard. Absent when no
/// tangency qualifies.
std::optional<double> detect_inflection_transition(const SolutionTrace& trace,
                                                   const AnalysisOptions& opts = {});

/// Fraction of consecutive-extrema half-cycles on which the pointwise
/// criterion certifies the observed oscillation: a half-cycle counts as
/// consistent when predicts_oscillation holds at either bounding extremum or
/// at the baseline crossing between them.
double criterion_consistency(const SolutionTrace& trace, const EquationSpec& spec);

/// JSON with stable field names (label, baseline, zero_crossings,
/// extrema_count, wavelengths, inflection_x, criterion_consistency).
std::string report_to_json(const ClassificationReport& report);
ClassificationReport report_from_json(const std::string& text);
bool reports_equal(const ClassificationReport& a, const ClassificationReport& b);

}  // namespace cnlslab

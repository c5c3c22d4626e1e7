// Adaptive integration of the CNLS Cauchy problems with dense output and
// event detection: watched-level crossings, extrema, blow-up and
// near-tangency records, assembled into immutable SolutionTrace values.

#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cnlslab/equations.hpp"
#include "cnlslab/rk_dopri5.hpp"

namespace cnlslab {

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double x_max = 60.0;
    double epsilon_start = 1e-6;
    /// Defaults to 10 * max(1, |psi(0)|) when unset.
    std::optional<double> blowup_threshold;
    long max_steps = 10'000'000;
    /// Bisection tolerance for event locations, in x.
    double event_location_tol = 1e-10;
    /// Box half-width for NearTangency records, in psi and psi'.
    double tangency_tol = 0.2;
};

enum class Termination { ReachedXMax, BlowUp, StepFailure };

enum class EventKind { CrossingUp, CrossingDown, Maximum, Minimum, BlowUp, NearTangency };

struct Event {
    EventKind kind;
    double level;  // watch level for crossings/tangencies, NaN otherwise
    double x;
    double psi;
    double dpsi;

    bool is_crossing() const {
        return kind == EventKind::CrossingUp || kind == EventKind::CrossingDown;
    }
};

struct TracePoint {
    double x;
    double psi;
    double dpsi;
};

class SolutionTrace {
  public:
    const std::vector<TracePoint>& samples() const { return samples_; }
    const std::vector<Event>& events() const { return events_; }
    Termination termination() const { return termination_; }

    double x_begin() const { return samples_.front().x; }
    double x_end() const { return samples_.back().x; }
    double blowup_threshold() const { return blowup_threshold_; }

    /// Continuous (psi, psi') between samples; exact at sample nodes.
    std::pair<double, double> eval(double x) const;
    /// Derivative of the interpolated psi' (an interpolant-quality psi'').
    double eval_ddpsi(double x) const;

    std::vector<Event> events_of_kind(EventKind kind) const;
    long count_crossings(double level) const;

  private:
    friend class TraceBuilder;
    std::vector<TracePoint> samples_;
    std::vector<rk::DenseSegment<double>> segments_;
    std::vector<Event> events_;
    Termination termination_ = Termination::ReachedXMax;
    double blowup_threshold_ = 0.0;
};

using SystemRhs = std::function<std::array<double, 2>(double, const std::array<double, 2>&)>;

/// Integrate the CNLS problem for the given spec from a Taylor-regularized
/// start at cfg.epsilon_start. Watch levels get crossing and tangency
/// events; extrema and blow-up are always watched.
SolutionTrace integrate(const EquationSpec& spec, const BoundaryCondition& bc,
                        const IntegratorConfig& cfg, const std::vector<double>& watch_levels);

/// Same machinery for an arbitrary two-component system (qualification and
/// surrogate tests).
SolutionTrace integrate_system(const SystemRhs& rhs, double x0, const std::array<double, 2>& y0,
                               const IntegratorConfig& cfg,
                               const std::vector<double>& watch_levels);

std::pair<double, double> dense_eval(const SolutionTrace& trace, double x);

/// The free trivial solutions as watch levels: {0, +psi_plus, -psi_plus}.
std::vector<double> default_watch_levels();

/// Measured convergence order on the harmonic oscillator y'' + y = 0
/// (fixed-step mode, three halvings from h = 0.25, log2 error slope).
double measure_convergence_order();

const char* to_string(Termination t);
const char* to_string(EventKind k);

/// CSV export, header "x,psi,dpsi", shortest round-trip number formatting.
void write_trace_csv(const SolutionTrace& trace, std::ostream& out);
/// Events as a JSON array of {kind, level, x, psi, dpsi}.
std::string events_to_json(const SolutionTrace& trace);

}  // namespace cnlslab

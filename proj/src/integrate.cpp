#include "cnlslab/integrate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace cnlslab {

namespace {

constexpr int kSubsamples = 16;  // per-step event scan density
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

void validate(const IntegratorConfig& cfg) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        throw std::invalid_argument("IntegratorConfig: tolerances must be positive");
    if (!(cfg.epsilon_start > 0.0) || !(cfg.epsilon_start < cfg.x_max))
        throw std::invalid_argument("IntegratorConfig: need 0 < epsilon_start < x_max");
    if (cfg.max_steps <= 0)
        throw std::invalid_argument("IntegratorConfig: max_steps must be positive");
    if (!(cfg.event_location_tol > 0.0) || !(cfg.tangency_tol > 0.0))
        throw std::invalid_argument("IntegratorConfig: event tolerances must be positive");
}

}  // namespace

class TraceBuilder {
  public:
    TraceBuilder(const IntegratorConfig& cfg, const std::vector<double>& levels,
                 double blowup_threshold)
        : cfg_(cfg), levels_(levels), blow_(blowup_threshold) {
        tangency_.resize(levels.size());
    }

    SolutionTrace run(const SystemRhs& rhs, double x0, const std::array<double, 2>& y0) {
        trace_.blowup_threshold_ = blow_;
        trace_.samples_.push_back({x0, y0[0], y0[1]});
        feed_tangency({x0, y0[0], y0[1]});

        rk::Dopri5<double, SystemRhs> stepper(rhs, cfg_.rel_tol, cfg_.abs_tol);
        bool blew_up = false;
        const auto status = stepper.run(
            x0, y0, cfg_.x_max, cfg_.max_steps,
            [&](const rk::DenseSegment<double>& seg, double x1, const rk::State<double>& y1,
                const rk::State<double>&) {
                trace_.segments_.push_back(seg);
                trace_.samples_.push_back({x1, y1[0], y1[1]});
                scan_step(seg);
                if (std::abs(y1[0]) >= blow_) {
                    record_blowup(seg);
                    blew_up = true;
                    return false;
                }
                return true;
            });

        flush_tangency();
        std::stable_sort(events_.begin(), events_.end(),
                         [](const Event& a, const Event& b) { return a.x < b.x; });
        trace_.events_ = std::move(events_);
        if (blew_up)
            trace_.termination_ = Termination::BlowUp;
        else if (status == rk::RunStatus::ReachedEnd)
            trace_.termination_ = Termination::ReachedXMax;
        else
            trace_.termination_ = Termination::StepFailure;
        return std::move(trace_);
    }

  private:
    struct TangencyState {
        bool inside = false;
        bool seen_outside = false;  // a graze must be entered, not started in
        double best_metric = 0.0;
        TracePoint best{};
    };

    void scan_step(const rk::DenseSegment<double>& seg) {
        std::array<TracePoint, kSubsamples + 1> pts;
        const std::size_t n0 = trace_.samples_.size();
        pts[0] = trace_.samples_[n0 - 2];
        pts[kSubsamples] = trace_.samples_[n0 - 1];
        for (int j = 1; j < kSubsamples; ++j) {
            const double x = seg.x0 + seg.h * (static_cast<double>(j) / kSubsamples);
            pts[static_cast<std::size_t>(j)] = {x, seg.eval(0, x), seg.eval(1, x)};
        }

        for (int j = 0; j + 1 <= kSubsamples; ++j) {
            const TracePoint& a = pts[static_cast<std::size_t>(j)];
            const TracePoint& b = pts[static_cast<std::size_t>(j + 1)];
            for (double level : levels_) locate_crossing(seg, a, b, level);
            locate_extremum(seg, a, b);
        }
        for (int j = 1; j <= kSubsamples; ++j) feed_tangency(pts[static_cast<std::size_t>(j)]);
    }

    void locate_crossing(const rk::DenseSegment<double>& seg, const TracePoint& a,
                         const TracePoint& b, double level) {
        const int sa = sign_of(a.psi - level);
        const int sb = sign_of(b.psi - level);
        if (sa * sb >= 0) return;
        const double x = bisect(a.x, b.x, [&](double x_) { return seg.eval(0, x_) - level; }, sa);
        events_.push_back({sb > 0 ? EventKind::CrossingUp : EventKind::CrossingDown, level, x,
                           seg.eval(0, x), seg.eval(1, x)});
    }

    void locate_extremum(const rk::DenseSegment<double>& seg, const TracePoint& a,
                         const TracePoint& b) {
        const int sa = sign_of(a.dpsi);
        const int sb = sign_of(b.dpsi);
        if (sa * sb >= 0) return;
        const double x = bisect(a.x, b.x, [&](double x_) { return seg.eval(1, x_); }, sa);
        events_.push_back({sb < 0 ? EventKind::Maximum : EventKind::Minimum, kNaN, x,
                           seg.eval(0, x), seg.eval(1, x)});
    }

    void record_blowup(const rk::DenseSegment<double>& seg) {
        // First point of the step where |psi| reaches the threshold.
        const double x0 = seg.x0;
        const double x1 = seg.x1();
        double x = x1;
        if (std::abs(seg.eval(0, x0)) < blow_) {
            double lo = x0, hi = x1;
            for (int it = 0; it < 200 && hi - lo > cfg_.event_location_tol; ++it) {
                const double mid = 0.5 * (lo + hi);
                (std::abs(seg.eval(0, mid)) >= blow_ ? hi : lo) = mid;
            }
            x = 0.5 * (lo + hi);
        }
        events_.push_back({EventKind::BlowUp, kNaN, x, seg.eval(0, x), seg.eval(1, x)});
    }

    template <class F>
    double bisect(double lo, double hi, F&& g, int sign_lo) const {
        for (int it = 0; it < 200 && hi - lo > cfg_.event_location_tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (sign_of(g(mid)) == sign_lo)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }

    void feed_tangency(const TracePoint& p) {
        for (std::size_t i = 0; i < levels_.size(); ++i) {
            TangencyState& st = tangency_[i];
            const double metric = std::max(std::abs(p.psi - levels_[i]), std::abs(p.dpsi));
            if (metric < cfg_.tangency_tol) {
                if (!st.seen_outside) continue;  // trace started on the level
                if (!st.inside || metric < st.best_metric) {
                    st.best_metric = metric;
                    st.best = p;
                }
                st.inside = true;
            } else {
                if (st.inside) emit_tangency(i);
                st.seen_outside = true;
            }
        }
    }

    void emit_tangency(std::size_t i) {
        TangencyState& st = tangency_[i];
        events_.push_back(
            {EventKind::NearTangency, levels_[i], st.best.x, st.best.psi, st.best.dpsi});
        st.inside = false;
    }

    void flush_tangency() {
        for (std::size_t i = 0; i < levels_.size(); ++i)
            if (tangency_[i].inside) emit_tangency(i);
    }

    IntegratorConfig cfg_;
    std::vector<double> levels_;
    double blow_;
    std::vector<TangencyState> tangency_;
    std::vector<Event> events_;
    SolutionTrace trace_;
};

SolutionTrace integrate_system(const SystemRhs& rhs, double x0, const std::array<double, 2>& y0,
                               const IntegratorConfig& cfg,
                               const std::vector<double>& watch_levels) {
    validate(cfg);
    for (double v : watch_levels)
        if (!std::isfinite(v))
            throw std::invalid_argument("integrate: watch levels must be finite");
    const double blow = cfg.blowup_threshold.value_or(10.0 * std::max(1.0, std::abs(y0[0])));
    if (!(blow > std::abs(y0[0])))
        throw std::invalid_argument("integrate: blowup threshold must exceed |psi(0)|");
    TraceBuilder builder(cfg, watch_levels, blow);
    return builder.run(rhs, x0, y0);
}

SolutionTrace integrate(const EquationSpec& spec, const BoundaryCondition& bc,
                        const IntegratorConfig& cfg, const std::vector<double>& watch_levels) {
    validate(cfg);
    check_compatible(spec, bc);
    const StartState start = taylor_start(spec, bc, cfg.epsilon_start);
    const double blow = cfg.blowup_threshold.value_or(10.0 * std::max(1.0, std::abs(bc.psi0)));
    IntegratorConfig local = cfg;
    local.blowup_threshold = blow;
    const SystemRhs f = [&spec](double x, const std::array<double, 2>& y) {
        return rhs(spec, x, y);
    };
    return integrate_system(f, start.x, {start.psi, start.dpsi}, local, watch_levels);
}

std::pair<double, double> SolutionTrace::eval(double x) const {
    if (samples_.empty() || segments_.empty())
        throw std::out_of_range("dense_eval: trace has no interior");
    if (x < x_begin() || x > x_end())
        throw std::out_of_range("dense_eval: x outside the integrated range");
    // Segment whose [x0, x1] contains x; sample nodes short-circuit exactly.
    auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                               [](double v, const rk::DenseSegment<double>& s) { return v < s.x0; });
    std::size_t idx = (it == segments_.begin()) ? 0 : static_cast<std::size_t>(it - segments_.begin() - 1);
    if (x == samples_[idx].x) return {samples_[idx].psi, samples_[idx].dpsi};
    if (x == samples_[idx + 1].x) return {samples_[idx + 1].psi, samples_[idx + 1].dpsi};
    const auto& seg = segments_[idx];
    return {seg.eval(0, x), seg.eval(1, x)};
}

double SolutionTrace::eval_ddpsi(double x) const {
    if (segments_.empty()) throw std::out_of_range("eval_ddpsi: trace has no interior");
    if (x < x_begin() || x > x_end())
        throw std::out_of_range("eval_ddpsi: x outside the integrated range");
    auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                               [](double v, const rk::DenseSegment<double>& s) { return v < s.x0; });
    std::size_t idx = (it == segments_.begin()) ? 0 : static_cast<std::size_t>(it - segments_.begin() - 1);
    return segments_[idx].eval_derivative(1, x);
}

std::vector<Event> SolutionTrace::events_of_kind(EventKind kind) const {
    std::vector<Event> out;
    for (const Event& e : events_)
        if (e.kind == kind) out.push_back(e);
    return out;
}

long SolutionTrace::count_crossings(double level) const {
    long n = 0;
    for (const Event& e : events_)
        if (e.is_crossing() && e.level == level) ++n;
    return n;
}

std::pair<double, double> dense_eval(const SolutionTrace& trace, double x) {
    return trace.eval(x);
}

std::vector<double> default_watch_levels() { return {0.0, kPsiPlus, -kPsiPlus}; }

double measure_convergence_order() {
    const auto harmonic = [](double, const std::array<double, 2>& y) {
        return std::array<double, 2>{y[1], -y[0]};
    };
    rk::Dopri5<double, decltype(harmonic)> stepper(harmonic, 1e-9, 1e-12);
    const double x_end = 10.0;
    std::array<double, 4> errs{};
    long n = 40;  // h = 0.25 down to 0.03125
    for (std::size_t i = 0; i < errs.size(); ++i, n *= 2) {
        const auto y = stepper.run_fixed(0.0, {1.0, 0.0}, x_end, n);
        errs[i] = std::abs(y[0] - std::cos(x_end)) + std::abs(y[1] + std::sin(x_end));
    }
    double slope_sum = 0.0;
    for (std::size_t i = 0; i + 1 < errs.size(); ++i)
        slope_sum += std::log2(errs[i] / errs[i + 1]);
    return slope_sum / static_cast<double>(errs.size() - 1);
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::ReachedXMax: return "reached-x-max";
        case Termination::BlowUp: return "blow-up";
        case Termination::StepFailure: return "step-failure";
    }
    return "?";
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::CrossingUp: return "crossing-up";
        case EventKind::CrossingDown: return "crossing-down";
        case EventKind::Maximum: return "maximum";
        case EventKind::Minimum: return "minimum";
        case EventKind::BlowUp: return "blow-up";
        case EventKind::NearTangency: return "near-tangency";
    }
    return "?";
}

namespace {

std::string shortest(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

void write_trace_csv(const SolutionTrace& trace, std::ostream& out) {
    out << "x,psi,dpsi\n";
    for (const TracePoint& p : trace.samples())
        out << shortest(p.x) << ',' << shortest(p.psi) << ',' << shortest(p.dpsi) << '\n';
}

std::string events_to_json(const SolutionTrace& trace) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Event& e : trace.events()) {
        nlohmann::json j;
        j["kind"] = to_string(e.kind);
        if (std::isnan(e.level))
            j["level"] = nullptr;
        else
            j["level"] = e.level;
        j["x"] = e.x;
        j["psi"] = e.psi;
        j["dpsi"] = e.dpsi;
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

}  // namespace cnlslab

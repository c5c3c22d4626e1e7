#include "cnlslab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace cnlslab {

const char* to_string(Label label) {
    switch (label) {
        case Label::Constant: return "Constant";
        case Label::OscillatoryAboutZero: return "OscillatoryAboutZero";
        case Label::OscillatoryAboutPlus: return "OscillatoryAboutPlus";
        case Label::OscillatoryAboutMinus: return "OscillatoryAboutMinus";
        case Label::Exotic: return "Exotic";
        case Label::Divergent: return "Divergent";
        case Label::Undetermined: return "Undetermined";
    }
    return "?";
}

std::optional<Label> label_from_string(const std::string& s) {
    for (Label l : {Label::Constant, Label::OscillatoryAboutZero, Label::OscillatoryAboutPlus,
                    Label::OscillatoryAboutMinus, Label::Exotic, Label::Divergent,
                    Label::Undetermined})
        if (s == to_string(l)) return l;
    return std::nullopt;
}

double estimate_baseline(const SolutionTrace& trace, const EquationSpec& spec,
                         double window_fraction) {
    const auto trivials = trivial_solutions(spec);
    const auto& samples = trace.samples();
    const double x_lo = trace.x_end() - window_fraction * (trace.x_end() - trace.x_begin());

    double best = trivials[0];
    double best_mean = std::numeric_limits<double>::infinity();
    for (double level : trivials) {
        // Trapezoid mean of |psi - level| over [x_lo, x_end].
        double area = 0.0, span = 0.0;
        double prev_x = 0.0, prev_v = 0.0;
        bool have_prev = false;
        for (const TracePoint& p : samples) {
            if (p.x < x_lo) continue;
            const double v = std::abs(p.psi - level);
            if (have_prev) {
                area += 0.5 * (v + prev_v) * (p.x - prev_x);
                span += p.x - prev_x;
            }
            prev_x = p.x;
            prev_v = v;
            have_prev = true;
        }
        const double mean = span > 0.0 ? area / span : std::abs(samples.back().psi - level);
        if (mean < best_mean) {
            best_mean = mean;
            best = level;
        }
    }
    return best;
}

ClassificationReport classify(const SolutionTrace& trace, const EquationSpec& spec,
                              const AnalysisOptions& opts) {
    if (spec.has_potential())
        throw std::logic_error("classify: taxonomy is defined for the free-particle problem");

    ClassificationReport report;
    report.zero_crossings = trace.count_crossings(0.0);
    for (const Event& e : trace.events())
        if (e.kind == EventKind::Maximum || e.kind == EventKind::Minimum) ++report.extrema_count;
    report.inflection_x = detect_inflection_transition(trace, opts);

    if (trace.termination() == Termination::BlowUp) {
        report.label = Label::Divergent;
        return report;
    }

    const double psi0 = trace.samples().front().psi;
    double sup_dev = 0.0;
    for (const TracePoint& p : trace.samples())
        sup_dev = std::max(sup_dev, std::abs(p.psi - psi0));
    const auto trivials = trivial_solutions(spec);
    double trivial_dist = std::numeric_limits<double>::infinity();
    double nearest_trivial = 0.0;
    for (double t : trivials)
        if (std::abs(psi0 - t) < trivial_dist) {
            trivial_dist = std::abs(psi0 - t);
            nearest_trivial = t;
        }
    if (sup_dev < opts.const_tol && trivial_dist < opts.const_tol) {
        report.label = Label::Constant;
        report.baseline = nearest_trivial;
        return report;
    }

    if (report.extrema_count < 2) {
        report.label = Label::Undetermined;
        report.diagnostic = trace.termination() == Termination::StepFailure
                                ? "step failure with fewer than 2 extrema"
                                : "fewer than 2 extrema; not constant or divergent";
        return report;
    }

    const double baseline = estimate_baseline(trace, spec, opts.baseline_window);
    report.baseline = baseline;
    report.wavelengths = wavelength_profile(trace, baseline);
    if (baseline == 0.0) {
        report.label = Label::OscillatoryAboutZero;
    } else if (report.zero_crossings >= 1) {
        report.label = Label::Exotic;
    } else {
        report.label = baseline > 0.0 ? Label::OscillatoryAboutPlus : Label::OscillatoryAboutMinus;
    }

    if (report.extrema_count >= 2 && trace.termination() != Termination::BlowUp)
        report.criterion_consistency = criterion_consistency(trace, spec);
    return report;
}

std::vector<std::pair<double, double>> wavelength_profile(const SolutionTrace& trace,
                                                          double baseline) {
    std::vector<double> ups, downs;
    for (const Event& e : trace.events()) {
        if (e.level != baseline) continue;
        if (e.kind == EventKind::CrossingUp) ups.push_back(e.x);
        if (e.kind == EventKind::CrossingDown) downs.push_back(e.x);
    }
    if (ups.size() + downs.size() < 3) return {};

    std::vector<std::pair<double, double>> out;
    for (const auto* dir : {&ups, &downs})
        for (std::size_t i = 0; i + 1 < dir->size(); ++i)
            out.emplace_back(0.5 * ((*dir)[i] + (*dir)[i + 1]), (*dir)[i + 1] - (*dir)[i]);
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<double> detect_inflection_transition(const SolutionTrace& trace,
                                                   const AnalysisOptions& opts) {
    std::vector<double> zero_crossings;
    std::vector<const Event*> tangencies;
    for (const Event& e : trace.events()) {
        if (e.is_crossing() && e.level == 0.0) zero_crossings.push_back(e.x);
        if (e.kind == EventKind::NearTangency && e.level == 0.0) tangencies.push_back(&e);
    }
    const double x_end = trace.x_end();
    for (auto it = tangencies.rbegin(); it != tangencies.rend(); ++it) {
        const double xt = (*it)->x;
        const bool crossing_after =
            std::any_of(zero_crossings.begin(), zero_crossings.end(),
                        [&](double xc) { return xc > xt; });
        if (crossing_after) continue;
        const bool crossing_just_before =
            std::any_of(zero_crossings.begin(), zero_crossings.end(),
                        [&](double xc) { return xc > xt - opts.settle_span && xc <= xt; });
        // Enough settled trace after the graze, unless nothing crossed near
        // it in the first place (a one-sided graze).
        if (x_end - xt >= opts.settle_span || !crossing_just_before) return xt;
    }
    return std::nullopt;
}

double criterion_consistency(const SolutionTrace& trace, const EquationSpec& spec) {
    if (trace.termination() == Termination::BlowUp)
        throw std::invalid_argument("criterion_consistency: divergent trace");

    std::vector<const Event*> extrema;
    for (const Event& e : trace.events())
        if (e.kind == EventKind::Maximum || e.kind == EventKind::Minimum) extrema.push_back(&e);
    if (extrema.size() < 2)
        throw std::invalid_argument("criterion_consistency: needs at least 2 extrema");

    const double baseline = estimate_baseline(trace, spec);
    std::vector<const Event*> crossings;
    for (const Event& e : trace.events())
        if (e.is_crossing() && e.level == baseline) crossings.push_back(&e);

    long consistent = 0;
    const long pairs = static_cast<long>(extrema.size()) - 1;
    for (std::size_t i = 0; i + 1 < extrema.size(); ++i) {
        bool ok = predicts_oscillation(spec, extrema[i]->psi) ||
                  predicts_oscillation(spec, extrema[i + 1]->psi);
        if (!ok) {
            for (const Event* c : crossings) {
                if (c->x <= extrema[i]->x) continue;
                if (c->x >= extrema[i + 1]->x) break;
                if (predicts_oscillation(spec, c->psi)) {
                    ok = true;
                    break;
                }
            }
        }
        if (ok) ++consistent;
    }
    return static_cast<double>(consistent) / static_cast<double>(pairs);
}

std::string report_to_json(const ClassificationReport& report) {
    nlohmann::json j;
    j["label"] = to_string(report.label);
    if (report.baseline)
        j["baseline"] = *report.baseline;
    else
        j["baseline"] = nullptr;
    j["zero_crossings"] = report.zero_crossings;
    j["extrema_count"] = report.extrema_count;
    nlohmann::json waves = nlohmann::json::array();
    for (const auto& [x_mid, lambda] : report.wavelengths)
        waves.push_back({{"x_mid", x_mid}, {"lambda", lambda}});
    j["wavelengths"] = std::move(waves);
    if (report.inflection_x)
        j["inflection_x"] = *report.inflection_x;
    else
        j["inflection_x"] = nullptr;
    if (report.criterion_consistency)
        j["criterion_consistency"] = *report.criterion_consistency;
    else
        j["criterion_consistency"] = nullptr;
    if (!report.diagnostic.empty()) j["diagnostic"] = report.diagnostic;
    return j.dump(2);
}

ClassificationReport report_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ClassificationReport r;
    const auto label = label_from_string(j.at("label").get<std::string>());
    if (!label) throw std::invalid_argument("report_from_json: unknown label");
    r.label = *label;
    if (!j.at("baseline").is_null()) r.baseline = j.at("baseline").get<double>();
    r.zero_crossings = j.at("zero_crossings").get<long>();
    r.extrema_count = j.at("extrema_count").get<long>();
    for (const auto& w : j.at("wavelengths"))
        r.wavelengths.emplace_back(w.at("x_mid").get<double>(), w.at("lambda").get<double>());
    if (!j.at("inflection_x").is_null()) r.inflection_x = j.at("inflection_x").get<double>();
    if (!j.at("criterion_consistency").is_null())
        r.criterion_consistency = j.at("criterion_consistency").get<double>();
    if (j.contains("diagnostic")) r.diagnostic = j.at("diagnostic").get<std::string>();
    return r;
}

bool reports_equal(const ClassificationReport& a, const ClassificationReport& b) {
    return a.label == b.label && a.baseline == b.baseline &&
           a.zero_crossings == b.zero_crossings && a.extrema_count == b.extrema_count &&
           a.wavelengths == b.wavelengths && a.inflection_x == b.inflection_x &&
           a.criterion_consistency == b.criterion_consistency && a.diagnostic == b.diagnostic;
}

}  // namespace cnlslab

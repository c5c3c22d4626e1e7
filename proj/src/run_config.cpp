#include "cnlslab/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cnlslab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + v);
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer value for '" + key + "': " + v);
    }
}

std::vector<double> parse_grid(const std::string& key, const std::string& v) {
    std::vector<double> grid;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) grid.push_back(parse_double(key, item));
    }
    return grid;
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "dim" || key == "dimension") {
        cfg.dimension = static_cast<int>(parse_long(key, value));
    } else if (key == "interaction") {
        if (value == "repulsive")
            cfg.interaction = Interaction::Repulsive;
        else if (value == "attractive")
            cfg.interaction = Interaction::Attractive;
        else
            throw std::invalid_argument("config: interaction must be repulsive or attractive");
    } else if (key == "psi0") {
        cfg.psi0 = parse_double(key, value);
    } else if (key == "dpsi0") {
        cfg.dpsi0 = parse_double(key, value);
    } else if (key == "potential") {
        cfg.potential = value;
    } else if (key == "rtol") {
        cfg.integrator.rel_tol = parse_double(key, value);
    } else if (key == "atol") {
        cfg.integrator.abs_tol = parse_double(key, value);
    } else if (key == "xmax") {
        cfg.integrator.x_max = parse_double(key, value);
    } else if (key == "epsilon_start") {
        cfg.integrator.epsilon_start = parse_double(key, value);
    } else if (key == "blowup_threshold") {
        cfg.integrator.blowup_threshold = parse_double(key, value);
    } else if (key == "max_steps") {
        cfg.integrator.max_steps = parse_long(key, value);
    } else if (key == "event_tol") {
        cfg.integrator.event_location_tol = parse_double(key, value);
    } else if (key == "tangency_tol") {
        cfg.integrator.tangency_tol = parse_double(key, value);
    } else if (key == "snap_tol") {
        cfg.snap_tol = parse_double(key, value);
    } else if (key == "out_dir") {
        cfg.out_dir = value;
    } else if (key == "trace_csv") {
        cfg.trace_csv = value;
    } else if (key == "events_json") {
        cfg.events_json = value;
    } else if (key == "report_json") {
        cfg.report_json = value;
    } else if (key == "criterion_csv") {
        cfg.criterion_csv = value;
    } else if (key == "sweep_csv") {
        cfg.sweep_csv = value;
    } else if (key == "psi0_grid") {
        cfg.psi0_grid = parse_grid(key, value);
    } else if (key == "jobs") {
        cfg.jobs = static_cast<int>(parse_long(key, value));
    } else if (key == "preset") {
        cfg.preset = value;
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::optional<std::string> preset;
    std::stringstream ss(text);
    std::string line;
    std::vector<std::pair<std::string, std::string>> entries;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got '" + line + "'");
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    // Preset first so explicit keys override it.
    for (const auto& [k, v] : entries)
        if (k == "preset") preset = v;
    if (preset) apply_preset(cfg, *preset);
    for (const auto& [k, v] : entries)
        if (k != "preset") assign(cfg, k, v);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::vector<double> preset_grid(const std::string& preset) {
    if (preset == "fig1") return {0.7, kPsiPlus, 0.71};
    if (preset == "fig2") return {0.65, kPsiPlus, 0.75};
    if (preset == "fig3") return {1.0, 3.0, 5.0};
    throw std::invalid_argument("unknown preset '" + preset + "' (expected fig1|fig2|fig3)");
}

void apply_preset(RunConfig& cfg, const std::string& preset) {
    cfg.preset = preset;
    cfg.dimension = 2;
    cfg.dpsi0 = 0.0;
    cfg.interaction = preset == "fig1" ? Interaction::Repulsive : Interaction::Attractive;
    cfg.psi0_grid = preset_grid(preset);
}

EquationSpec make_spec(const RunConfig& cfg) {
    std::function<double(double)> potential;
    if (cfg.potential != "none" && !cfg.potential.empty()) {
        const std::string prefix = "quadratic:";
        if (cfg.potential.rfind(prefix, 0) == 0) {
            const double a = parse_double("potential", cfg.potential.substr(prefix.size()));
            potential = [a](double x) { return a * x * x; };
        } else {
            throw std::invalid_argument("config: unknown potential '" + cfg.potential +
                                        "' (expected none or quadratic:<a>)");
        }
    }
    return EquationSpec(cfg.dimension, cfg.interaction, std::move(potential));
}

double snap_to_trivial(double psi0, double tol) {
    if (tol <= 0.0) return psi0;
    for (double t : {0.0, kPsiPlus, -kPsiPlus})
        if (std::abs(psi0 - t) <= tol) return t;
    return psi0;
}

std::string output_path(const RunConfig& cfg, const std::optional<std::string>& override_path,
                        const std::string& default_name) {
    if (override_path) return *override_path;
    if (cfg.out_dir.empty() || cfg.out_dir == ".") return default_name;
    return cfg.out_dir + "/" + default_name;
}

}  // namespace cnlslab

// config.cpp — parsing, precedence and validation of experiment configurations
#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "udw/errors.hpp"

namespace udw::cli {

namespace {

const std::vector<std::pair<Experiment, std::string>> kExperimentNames{
    {Experiment::poles, "poles"},
    {Experiment::modes, "modes"},
    {Experiment::cut_terms, "cut_terms"},
    {Experiment::wwa_ratio, "wwa_ratio"},
    {Experiment::s_asymptotic, "s_asymptotic"},
    {Experiment::threshold_scan, "threshold_scan"},
    {Experiment::harvest, "harvest"},
    {Experiment::causality, "causality"},
    {Experiment::validate, "validate"},
    {Experiment::sweep, "sweep"},
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError("key '" + key + "': '" + text + "' is not a finite number");
    }
    return v;
}

long long parse_int(const std::string& key, const std::string& text) {
    long long v = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
    }
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(parse_double(key, item));
        }
    }
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + format_double(v[i]);
    }
    return s;
}

void apply(ExperimentConfig& c, const std::string& key, const std::string& value) {
    if (key == "g") {
        c.params.g = parse_double(key, value);
    } else if (key == "rho") {
        c.params.rho = parse_double(key, value);
    } else if (key == "uv_cutoff") {
        c.params.uv_cutoff = parse_double(key, value);
    } else if (key == "ir_mass") {
        c.params.ir_mass = parse_double(key, value);
    } else if (key == "omega") {
        c.params.omega = parse_double(key, value);
    } else if (key == "t_min") {
        c.t_min = parse_double(key, value);
    } else if (key == "t_max") {
        c.t_max = parse_double(key, value);
    } else if (key == "n_points") {
        c.n_points = static_cast<int>(parse_int(key, value));
    } else if (key == "rho_min") {
        c.rho_min = parse_double(key, value);
    } else if (key == "rho_max") {
        c.rho_max = parse_double(key, value);
    } else if (key == "output") {
        c.output = value;
    } else if (key == "format") {
        c.format = parse_format(value);
    } else if (key == "seed") {
        c.seed = parse_int(key, value);
    } else if (key == "jobs") {
        c.jobs = static_cast<int>(parse_int(key, value));
    } else if (key == "validate_t_max") {
        c.validate_t_max = parse_double(key, value);
    } else if (key == "validate_h") {
        c.validate_h = parse_double(key, value);
    } else if (key == "sweep_experiment") {
        c.sweep_experiment = value;
    } else if (key == "sweep_gamma0_r") {
        c.sweep_gamma0_r = parse_list(key, value);
    } else if (key == "sweep_g") {
        c.sweep_g = parse_list(key, value);
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

Experiment parse_experiment(const std::string& name) {
    for (const auto& [e, n] : kExperimentNames) {
        if (n == name) {
            return e;
        }
    }
    throw ConfigError("unknown experiment '" + name + "'");
}

std::string to_string(Experiment e) {
    for (const auto& [x, n] : kExperimentNames) {
        if (x == e) {
            return n;
        }
    }
    return "unknown";
}

Format parse_format(const std::string& name) {
    if (name == "csv") {
        return Format::csv;
    }
    if (name == "json") {
        return Format::json;
    }
    throw ConfigError("format must be csv or json, got '" + name + "'");
}

std::string to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        }
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

ExperimentConfig resolve_config(Experiment experiment,
                                const std::map<std::string, std::string>& file_values,
                                const std::map<std::string, std::string>& overrides) {
    ExperimentConfig c;
    c.experiment = experiment;
    for (const auto& [k, v] : file_values) {
        apply(c, k, v);
    }
    for (const auto& [k, v] : overrides) {
        apply(c, k, v);
    }
    try {
        c.params.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("invalid model parameters: ") + e.what());
    }
    if (!(c.t_min >= 0.0) || !(c.t_max > c.t_min)) {
        throw ConfigError("time grid requires 0 <= t_min < t_max");
    }
    if (!(c.rho_min > 0.0) || !(c.rho_max > c.rho_min)) {
        throw ConfigError("separation grid requires 0 < rho_min < rho_max");
    }
    if (c.n_points < 2) {
        throw ConfigError("n_points must be >= 2");
    }
    if (c.jobs < 1) {
        throw ConfigError("jobs must be >= 1");
    }
    if (!(c.validate_t_max > 0.0) || !(c.validate_h > 0.0)) {
        throw ConfigError("validate_t_max and validate_h must be positive");
    }
    return c;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::resolved() const {
    return {
        {"experiment", to_string(experiment)},
        {"omega", format_double(params.omega)},
        {"g", format_double(params.g)},
        {"rho", format_double(params.rho)},
        {"uv_cutoff", format_double(params.uv_cutoff)},
        {"ir_mass", format_double(params.ir_mass)},
        {"t_min", format_double(t_min)},
        {"t_max", format_double(t_max)},
        {"n_points", std::to_string(n_points)},
        {"rho_min", format_double(rho_min)},
        {"rho_max", format_double(rho_max)},
        {"format", to_string(format)},
        {"seed", std::to_string(seed)},
        {"validate_t_max", format_double(validate_t_max)},
        {"validate_h", format_double(validate_h)},
        {"sweep_experiment", sweep_experiment},
        {"sweep_gamma0_r", join(sweep_gamma0_r)},
        {"sweep_g", join(sweep_g)},
    };
}

}  // namespace udw::cli

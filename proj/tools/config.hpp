// config.hpp — experiment configuration: flat key=value files plus --set overrides
#pragma once

#include <map>
#include <string>
#include <vector>

#include "udw/kernels.hpp"

namespace udw::cli {

enum class Experiment {
    poles,
    modes,
    cut_terms,
    wwa_ratio,
    s_asymptotic,
    threshold_scan,
    harvest,
    causality,
    validate,
    sweep
};

enum class Format { csv, json };

// Malformed or inconsistent configuration (exit status 2)
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentConfig {
    Experiment experiment = Experiment::poles;
    ModelParams params;              // g, rho, uv_cutoff, ir_mass, omega
    double t_min = 0.0;              // time grid in Γ₀t units
    double t_max = 5.0;
    int n_points = 101;
    double rho_min = 0.5;            // separation scans in Ωr units
    double rho_max = 3.0;
    std::string output;              // path; empty writes to stdout
    Format format = Format::csv;
    long long seed = 0;              // randomized suites only
    int jobs = 1;                    // sweep concurrency bound
    double validate_t_max = 500.0;   // Ωt span of the Volterra cross-check
    double validate_h = 0.01;        // Volterra step
    std::string sweep_experiment = "wwa_ratio";
    std::vector<double> sweep_gamma0_r{0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0};
    std::vector<double> sweep_g;     // empty means {g}

    // Every resolved value as text, in a fixed key order (echoed into outputs)
    std::vector<std::pair<std::string, std::string>> resolved() const;
};

Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);
Format parse_format(const std::string& name);
std::string to_string(Format f);

// Key-value pairs from a file: one `key = value` per line, `#` starts a comment
std::map<std::string, std::string> read_config_file(const std::string& path);

// Defaults, then file values, then command-line overrides; validates the result
ExperimentConfig resolve_config(Experiment experiment,
                                const std::map<std::string, std::string>& file_values,
                                const std::map<std::string, std::string>& overrides);

// Shortest round-trip text for a double
std::string format_double(double x);

}  // namespace udw::cli

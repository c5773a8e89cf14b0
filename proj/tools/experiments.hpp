// experiments.hpp — experiment runners behind the udw command line
#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace udw::cli {

// Absolute accuracy of the sampled mode functions (validated against an independent
// Bromwich-line inversion); the causality experiment compares |u₁₂| against it
inline constexpr double kModeTolerance = 1e-10;

struct ValidationCheck {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

// Runs a single (non-sweep) experiment and returns its table
Table run_experiment(const ExperimentConfig& config);

// The oracle cross-checks behind `validate`
std::vector<ValidationCheck> run_validation(const ExperimentConfig& config);

// Zero crossing of λ₋(S(∞)) in Ωr (NaN when the scan has no sign change)
double threshold_crossing(const ModelParams& base, double rho_min, double rho_max, int n_points,
                          double tolerance);

// Runs every sweep cell and writes one file per cell plus manifest.json into
// config.output; returns the process exit status (0, or 4 on partial failure)
int run_sweep(const ExperimentConfig& config);

}  // namespace udw::cli

// main.cpp — udw command line: udw <experiment> [--config FILE] [--set k=v]... [--out PATH]
//            [--format csv|json] [--jobs N]
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiments.hpp"
#include "output.hpp"
#include "udw/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::map<std::string, std::string> parse_overrides(const std::vector<std::string>& sets) {
    std::map<std::string, std::string> out;
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw udw::cli::ConfigError("--set expects key=value, got '" + s + "'");
        }
        out[s.substr(0, eq)] = s.substr(eq + 1);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace udw::cli;
    CLI::App app{"Two harmonic Unruh-DeWitt detectors in the massless scalar vacuum"};
    std::string experiment;
    std::string config_file;
    std::vector<std::string> sets;
    std::string out_path;
    std::string format;
    int jobs = 0;
    app.add_option("experiment", experiment,
                   "poles | modes | cut_terms | wwa_ratio | s_asymptotic | threshold_scan | "
                   "harvest | causality | validate | sweep")
        ->required();
    app.add_option("--config", config_file, "flat key = value configuration file");
    app.add_option("--set", sets, "override one configuration key (key=value)");
    app.add_option("--out", out_path, "output file (directory for sweep); stdout by default");
    app.add_option("--format", format, "csv or json");
    app.add_option("--jobs", jobs, "concurrent sweep cells");
    app.set_version_flag("--version", std::string("udw ") + kToolVersion);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        write_error("config", e.what());
        return kExitConfig;
    }

    ExperimentConfig config;
    try {
        const Experiment kind = parse_experiment(experiment);
        const auto file_values =
            config_file.empty() ? std::map<std::string, std::string>{} : read_config_file(config_file);
        auto overrides = parse_overrides(sets);
        if (!out_path.empty()) {
            overrides["output"] = out_path;
        }
        if (!format.empty()) {
            overrides["format"] = format;
        }
        if (jobs != 0) {
            overrides["jobs"] = std::to_string(jobs);
        }
        config = resolve_config(kind, file_values, overrides);
        if (kind == Experiment::sweep) {
            return run_sweep(config);
        }
        const Table table = run_experiment(config);
        emit(table, config);
        if (kind == Experiment::validate) {
            for (const auto& [k, v] : table.results) {
                if (k == "all_pass" && v != "true") {
                    return kExitNumerical;
                }
            }
        }
        return 0;
    } catch (const ConfigError& e) {
        write_error("config", e.what());
        return kExitConfig;
    } catch (const udw::PreconditionError& e) {
        write_error("config", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        write_error("numerical", e.what());
        return kExitNumerical;
    }
}

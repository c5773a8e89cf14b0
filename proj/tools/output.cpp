// output.cpp — deterministic CSV/JSON serialization with embedded metadata
#include "output.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace udw::cli {

namespace {

void write_csv(const Table& table, const ExperimentConfig& config, std::ostream& out) {
    out << "# tool: udw " << kToolVersion << "\n";
    out << "# units: " << kUnitsLine << "\n";
    for (const auto& [k, v] : config.resolved()) {
        out << "# config: " << k << " = " << v << "\n";
    }
    for (const auto& [k, v] : table.results) {
        out << "# result: " << k << " = " << v << "\n";
    }
    out << "# column units:";
    for (const auto& c : table.columns) {
        out << " " << c.name << "[" << c.unit << "]";
    }
    out << "\n";
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        out << (j ? "," : "") << table.columns[j].name;
    }
    out << "\n";
    const std::size_t rows = table.columns.empty() ? 0 : table.columns.front().values.size();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            out << (j ? "," : "") << format_double(table.columns[j].values[i]);
        }
        out << "\n";
    }
}

void write_json(const Table& table, const ExperimentConfig& config, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["tool"] = std::string("udw ") + kToolVersion;
    doc["units"] = kUnitsLine;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config.resolved()) {
        cfg[k] = v;
    }
    doc["config"] = cfg;
    nlohmann::ordered_json res = nlohmann::ordered_json::object();
    for (const auto& [k, v] : table.results) {
        res[k] = v;
    }
    doc["results"] = res;
    nlohmann::ordered_json cols = nlohmann::ordered_json::array();
    for (const auto& c : table.columns) {
        nlohmann::ordered_json col;
        col["name"] = c.name;
        col["unit"] = c.unit;
        nlohmann::ordered_json vals = nlohmann::ordered_json::array();
        for (double v : c.values) {
            // JSON has no NaN; unreliable points are emitted as null
            vals.push_back(std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json());
        }
        col["values"] = vals;
        cols.push_back(col);
    }
    doc["columns"] = cols;
    out << doc.dump(1) << "\n";
}

}  // namespace

void write_table(const Table& table, const ExperimentConfig& config, std::ostream& out) {
    if (config.format == Format::csv) {
        write_csv(table, config, out);
    } else {
        write_json(table, config, out);
    }
}

void emit(const Table& table, const ExperimentConfig& config) {
    if (config.output.empty()) {
        write_table(table, config, std::cout);
        return;
    }
    std::ofstream out(config.output);
    if (!out) {
        throw ConfigError("cannot open output file '" + config.output + "'");
    }
    write_table(table, config, out);
}

void write_error(const std::string& kind, const std::string& message) {
    nlohmann::ordered_json e;
    e["error"] = kind;
    e["message"] = message;
    std::cerr << e.dump() << "\n";
}

}  // namespace udw::cli

// output.hpp — column-oriented result tables written as CSV or JSON
#pragma once

#include <deque>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace udw::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kUnitsLine =
    "hbar = 1, Omega = 1, M = 1; times in 1/Omega, frequencies and rates in Omega, "
    "separations in 1/Omega (Omega*r), X in Omega^-1/2, P in Omega^1/2";

struct Column {
    std::string name;
    std::string unit;
    std::vector<double> values;
};

// Results table plus scalar findings (e.g. a located zero crossing)
struct Table {
    std::deque<Column> columns;  // deque: add() references stay valid
    std::vector<std::pair<std::string, std::string>> results;

    Column& add(const std::string& name, const std::string& unit) {
        columns.push_back({name, unit, {}});
        return columns.back();
    }
};

void write_table(const Table& table, const ExperimentConfig& config, std::ostream& out);

// Writes to config.output, or to stdout when it is empty
void emit(const Table& table, const ExperimentConfig& config);

// Machine-readable error record on stderr
void write_error(const std::string& kind, const std::string& message);

}  // namespace udw::cli

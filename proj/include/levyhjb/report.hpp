#pragma once

#include "levyhjb/grid.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace levyhjb {

/// Named columns of doubles, written as CSV.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row);
    bool empty() const { return rows.empty(); }
};

/// Structured record of one solver / simulation / verification run.
struct RunReport {
    static constexpr int schema_version = 1;

    std::string mode;
    std::vector<std::string> labels; // index set I in list order
    double dt = 0.0;
    std::size_t steps = 0;
    double final_time = 0.0;
    std::vector<double> sup_norm_history;
    /// argmax counts per alpha accumulated over all points and steps
    std::vector<std::size_t> argmax_histogram;
    /// argmax per grid point at the last step
    std::vector<std::size_t> final_argmax;
    std::map<std::string, double> metrics;
    std::map<std::string, std::string> info;
    std::vector<std::string> warnings;
    bool passed = true;

    std::string to_json() const;
};

void write_text(const std::string& path, const std::string& text);
std::string table_csv(const Table& t);
/// columns x0[, x1], u
std::string field_csv(const Field& u);
/// %.17g, so that values round-trip exactly
std::string format_double(double v);

} // namespace levyhjb

#include "levyhjb/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace levyhjb {

void Table::add(std::vector<double> row) {
    if (row.size() != columns.size()) throw ValidationError("table row has wrong width");
    rows.push_back(std::move(row));
}

namespace {

nlohmann::json number(double v) {
    // JSON has no infinities or NaN
    if (std::isfinite(v)) return v;
    return format_double(v);
}

} // namespace

std::string RunReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = schema_version;
    j["mode"] = mode;
    j["labels"] = labels;
    j["passed"] = passed;
    j["dt"] = number(dt);
    j["steps"] = steps;
    j["final_time"] = number(final_time);
    auto hist = nlohmann::json::array();
    for (double v : sup_norm_history) hist.push_back(number(v));
    j["sup_norm_history"] = hist;
    j["argmax_histogram"] = argmax_histogram;
    j["final_argmax_counts"] = [&] {
        std::vector<std::size_t> c(labels.size(), 0);
        for (auto a : final_argmax)
            if (a < c.size()) ++c[a];
        return c;
    }();
    auto m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : metrics) m[k] = number(v);
    j["metrics"] = m;
    auto inf = nlohmann::ordered_json::object();
    for (const auto& [k, v] : info) inf[k] = v;
    j["info"] = inf;
    j["warnings"] = warnings;
    return j.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw Error("write failed: " + path);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string table_csv(const Table& t) {
    std::ostringstream s;
    for (std::size_t c = 0; c < t.columns.size(); ++c) s << (c ? "," : "") << t.columns[c];
    s << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) s << (c ? "," : "") << format_double(row[c]);
        s << "\n";
    }
    return s.str();
}

std::string field_csv(const Field& u) {
    const Grid& g = u.grid();
    std::ostringstream s;
    s << (g.dim() == 1 ? "x0,u\n" : "x0,x1,u\n");
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Vector x = g.point(i);
        for (int a = 0; a < g.dim(); ++a) s << format_double(x[a]) << ",";
        s << format_double(u[i]) << "\n";
    }
    return s.str();
}

} // namespace levyhjb

#pragma once

#include "levyhjb/grid.hpp"
#include "levyhjb/hjb.hpp"
#include "levyhjb/mc.hpp"
#include "levyhjb/test_function.hpp"
#include "levyhjb/triplet.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace levyhjb {

/// Problem-file error with its location.
class ParseError : public ValidationError {
public:
    ParseError(int line, std::string field, const std::string& message);
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

struct AtomSpec {
    std::vector<double> location;
    double mass = 0.0;
    bool operator==(const AtomSpec&) const = default;
};

struct StableSpec {
    double index = 1.0;
    double scale = 1.0;
    double tempering = 0.0;
    /// d = 1: (w+, w-); d = 2: weights on equally spaced directions
    std::vector<double> weights;
    bool operator==(const StableSpec&) const = default;
};

enum class FieldForm { Constant, AffineDrift, Sde };
enum class SigmaProfile { Constant, Linear, Sqrt, Tanh };

struct AlphaSpec {
    std::string name;
    FieldForm form = FieldForm::Constant;
    std::vector<double> b;
    std::vector<std::vector<double>> Q;
    std::vector<AtomSpec> atoms;
    std::vector<StableSpec> stables;
    /// affine-drift: b(x) = b + drift_matrix x
    std::vector<std::vector<double>> drift_matrix;
    /// sde: sigma(x) = sigma (1 + sigma_slope phi(|x|)), base triplet in dimension base_dim
    std::vector<std::vector<double>> sigma;
    double sigma_slope = 0.0;
    SigmaProfile sigma_profile = SigmaProfile::Constant;
    double base_cutoff = 1.0;
    int base_dim = 0;

    bool operator==(const AlphaSpec&) const = default;
};

struct InitialSpec {
    std::string kind; // quadratic, cosine, gaussian-bump, mollifier, constant, tabulated
    double sign = 1.0;
    double scale = 1.0;
    double amplitude = 1.0;
    double width = 1.0;
    double phase = 0.0;
    double value = 0.0;
    std::vector<double> center;
    std::vector<double> k;
    std::vector<double> points;
    std::vector<double> values;

    bool operator==(const InitialSpec&) const = default;
};

struct GridSpec {
    double half_width = 0.0;
    int points = 0;
    bool operator==(const GridSpec&) const = default;
};

struct SchemeSpec {
    double final_time = 0.0;
    double dt = 0.0;
    double safety = 0.9;
    double eps_ratio = 1e-3;
    std::string extension = "constant-boundary";
    std::string drift = "adaptive";
    int trace_every = 0;
    bool operator==(const SchemeSpec&) const = default;
};

struct RunSpec {
    std::string mode;
    std::uint64_t seed = 1;
    std::size_t paths = 10000;
    double delta = 1e-3;
    double horizon = 0.0; // 0: scheme final time
    std::vector<double> x;
    std::vector<double> radii;
    std::vector<double> times;
    double radius = 1.0;
    double tolerance = 0.0; // 0: no pass/fail threshold
    double compare_radius = 2.0;
    std::string alpha;      // single-alpha modes; empty = first
    std::string reference;  // solve: "gheat" compares with the closed form
    int probes = 9;
    bool operator==(const RunSpec&) const = default;
};

struct ProblemSpec {
    int dim = 1;
    double cutoff = 1.0;
    std::vector<AlphaSpec> alphas;
    InitialSpec initial;
    GridSpec grid;
    SchemeSpec scheme;
    RunSpec run;

    bool operator==(const ProblemSpec&) const = default;
};

extern const std::vector<std::string> kRunModes;

ProblemSpec parse_problem(const std::string& text);
ProblemSpec load_problem(const std::string& path);
std::string emit_problem(const ProblemSpec& spec);

UncertaintySet build_uncertainty(const ProblemSpec& spec);
LevyTriplet build_base_triplet(const AlphaSpec& a, int dim, double cutoff);
TestFunction build_initial(const ProblemSpec& spec);
Grid build_grid(const ProblemSpec& spec);
SchemeConfig build_scheme(const ProblemSpec& spec);
SimConfig build_sim(const ProblemSpec& spec);

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    bool quiet = false;
};

/// Executes the problem and writes report.json, field.csv and/or table.csv into out_dir.
/// Returns 0 on success, 2 on a failed verification, 1 on a runtime error.
int run(const ProblemSpec& spec, const RunOptions& options);

} // namespace levyhjb

#pragma once

#include "levyhjb/generator.hpp"
#include "levyhjb/grid.hpp"
#include "levyhjb/report.hpp"
#include "levyhjb/test_function.hpp"
#include "levyhjb/triplet.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace levyhjb {

struct SchemeConfig {
    double final_time = 1.0;
    /// 0 selects the CFL step
    double dt = 0.0;
    double safety = 0.9;
    ExtensionPolicy extension{};
    DiscretizationOptions discretization{};
    /// keep every k-th field in the trace (0: none)
    int trace_every = 0;
    /// run hypothesis diagnostics before solving
    bool diagnostics = false;

    void validate() const;
};

/// Stable explicit step for the whole index set on this grid.
double cfl_dt(const UncertaintySet& us, const Grid& grid, double eps, double safety,
              double final_time = 1.0);

/// Explicit monotone operator u -> u + dt max_alpha A^alpha_h u with precomputed stencils.
class HjbOperator {
public:
    HjbOperator(const UncertaintySet& us, const Grid& grid, const SchemeConfig& cfg);

    const Grid& grid() const { return grid_; }
    std::size_t alphas() const { return rows_.size(); }
    /// sup over alpha and points of the total outgoing stencil weight
    double rate() const { return rate_; }
    double stable_dt(double safety) const;

    /// max_alpha A^alpha_h u at every point; argmax (first maximizer) written if non-null.
    std::vector<double> apply(const Field& u, std::vector<std::size_t>* argmax = nullptr) const;
    Field step(const Field& u, double dt, std::vector<std::size_t>* argmax = nullptr) const;

private:
    Grid grid_;
    std::vector<std::vector<StencilRow>> rows_; // [alpha][point]
    double rate_ = 0.0;
    double outside_bound_ = 0.0;
    double outside_weight_ = 0.0;
};

Field step_explicit(const Field& u, const UncertaintySet& us, double dt, const SchemeConfig& cfg);

struct SolveResult {
    Field u;
    std::vector<Field> trace;
    std::vector<double> trace_times;
    RunReport report;
};

SolveResult solve(const Field& f, const UncertaintySet& us, const SchemeConfig& cfg);
/// Samples f on the grid; with initial-condition extension f also supplies outside values.
SolveResult solve(const TestFunction& f, const Grid& grid, const UncertaintySet& us,
                  SchemeConfig cfg);

struct ModulusRow {
    double lag;
    double modulus; // max over pairs and points of |u(t) - u(s)| with |t - s| = lag
};

/// Empirical time-continuity modulus from an equally spaced trace, ordered by decreasing lag.
std::vector<ModulusRow> time_modulus(const std::vector<Field>& trace,
                                     const std::vector<double>& times);

} // namespace levyhjb

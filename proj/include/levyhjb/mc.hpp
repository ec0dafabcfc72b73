#pragma once

#include "levyhjb/grid.hpp"
#include "levyhjb/report.hpp"
#include "levyhjb/rng.hpp"
#include "levyhjb/test_function.hpp"
#include "levyhjb/triplet.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace levyhjb {

struct SimConfig {
    double delta = 1e-3;
    double horizon = 1.0;
    std::size_t paths = 10000;
    std::uint64_t seed = 1;
    /// small-jump split radius as a fraction of the truncation cutoff
    double eps_ratio = 1e-3;
    /// refuse when lambda_eps * delta exceeds this
    double rate_cap = 50.0;
    /// panels per ray for the jump table
    int panels_per_ray = 200;
    MeasureQuadrature quadrature{};

    void validate() const;
    /// Number of skeleton steps; delta is shrunk so that it divides the horizon.
    std::size_t steps(double horizon_override = -1.0) const;
};

struct EmpiricalEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t N = 0;
};

/// Mean and standard error of values, summed in index order.
EmpiricalEstimate summarize(const std::vector<double>& values);

/// Exact sampler of the Euler increment of the Lévy process with triplet (b, Q, nu) over delta:
/// b delta + sqrt(delta) Sigma_eff^{1/2} Z + Σ J_k - delta ∫_{eps<=|y|<=cutoff} y nu(dy).
class IncrementSampler {
public:
    IncrementSampler(const LevyTriplet& t, double delta, const SimConfig& cfg);

    Vector sample(PathRng& rng) const;
    int dim() const { return static_cast<int>(drift_.size()); }
    double delta() const { return delta_; }
    double jump_rate() const { return rate_; }
    const Vector& drift() const { return drift_; }  // b_eff * delta
    const Matrix& root() const { return root_; }    // Sigma_eff^{1/2}
    const Matrix& sigma_eff() const { return sigma_eff_; }
    const std::vector<Atom>& jumps() const { return jumps_; } // |y| >= eps, as a discrete table
    /// no Gaussian part and no jumps: increments are deterministic
    bool deterministic() const { return rate_ == 0.0 && root_.isZero(0.0); }

private:
    double delta_;
    Vector drift_;
    Matrix sigma_eff_;
    Matrix root_;
    double rate_ = 0.0;
    std::vector<Atom> jumps_;
    std::vector<double> cumulative_;
};

Vector sample_increment(const LevyTriplet& t, double delta, PathRng& rng, const SimConfig& cfg = {});

/// E f(x + X_t) for the classical Lévy process, by direct simulation.
EmpiricalEstimate estimate_semigroup_single(const LevyTriplet& t,
                                            const std::function<double(const Vector&)>& f,
                                            const Vector& x, const SimConfig& cfg);

struct DpOptions {
    int hermite_nodes = 12;
    /// Poisson counts are truncated once the tail probability drops below this
    double poisson_tail = 1e-13;
    std::size_t max_support = 20000;
    /// samples per point when the expectation falls back to Monte Carlo
    std::size_t mc_samples = 2000;
};

struct DpResult {
    Field value;
    double delta = 0.0;
    std::size_t steps = 0;
    bool delta_adjusted = false;
    std::vector<std::string> methods; // per alpha: "quadrature" or "monte-carlo"
    std::vector<std::size_t> final_argmax;
};

/// Backward induction v_{k+1}(x) = max_alpha E v_k(x + increment_alpha(x)), v_0 = f.
DpResult dp_sup_semigroup(const UncertaintySet& us, const std::function<double(const Vector&)>& f,
                          const Grid& grid, const SimConfig& cfg, const DpOptions& opts = {});

/// Expectation rule E g(x + increment): offsets with nonnegative weights summing to one.
std::vector<Tap> increment_rule(const LevyTriplet& t, double delta, const SimConfig& cfg,
                                const DpOptions& opts, bool* exact = nullptr,
                                std::uint64_t stream = 0);

struct WilsonInterval {
    double lower;
    double upper;
};

/// Wilson score interval for k successes in n trials at normal quantile z.
WilsonInterval wilson_interval(std::size_t k, std::size_t n, double z = 2.5758293035489004);

struct MaxIneqRow {
    double r;
    double probability;   // max over strategies
    double upper;         // max Wilson upper bound over strategies
    double symbol_sup;
    double bound;         // c t symbol_sup
    bool pass;
};

struct MaxIneqOptions {
    int switching_strategies = 2;
    int switching_blocks = 10;
    int probes = 9;
    /// 0 uses the cached constant for the standard mollifier
    double c = 0.0;
};

struct MaxIneqResult {
    std::vector<MaxIneqRow> rows;
    double c = 0.0;
    bool pass = true;
    std::vector<std::string> strategies;
    Table table() const;
};

/// Empirical sup_P P(sup_{s<=t} |X_s - x| > r) over constant and randomly switched alpha
/// strategies, against c t sup_alpha sup_{|z-x|<=r} sup_{|xi|<=1/r} |q_alpha(z, xi)|.
MaxIneqResult maximal_inequality_check(const UncertaintySet& us, const Vector& x, double t,
                                       const std::vector<double>& radii, const SimConfig& cfg,
                                       const MaxIneqOptions& opts = {});

struct ConstantParts {
    double c = 0.0;      // 2 ∫ (1 + |xi|^2) |u^|
    double c0 = 0.0;     // 2 ∫ |u^|
    double c2 = 0.0;     // 2 ∫ |xi|^2 |u^|
    double integral = 0.0; // ∫ u^ = u(0) under the (2 pi)^{-d} convention
    double tail_fraction = 0.0;
};

struct ConstantOptions {
    /// sample spacing on the support [-1, 1]^d
    double spacing = 1e-3;
    /// zero-padding factor of the transform length
    int padding = 512;
    /// refuse when the outer half band holds more than this share of the integral
    double tail_tol = 1e-8;
};

/// c = 2 ∫ (1 + |xi|^2) |u^(xi)| dxi, u^ = (2 pi)^{-d} ∫ e^{-i x.xi} u(x) dx, by zero-padded DFT.
ConstantParts constant_c_parts(const TestFunction& bump, const ConstantOptions& opts = {});
double constant_c(const TestFunction& bump, const ConstantOptions& opts = {});
/// Cached value for the standard mollifier exp(1 - 1/(1 - |x|^2)) in dimension d.
double standard_constant_c(int dim);

struct DynkinResult {
    EmpiricalEstimate residual;
    double bias_bound = 0.0;
    double exit_fraction = 0.0;
};

/// E f(X_{t∧τ}) - f(x) - E ∫_0^{t∧τ} A f(X_s) ds on the delta skeleton, τ = exit from B(x, r).
DynkinResult dynkin_residual(const LevyTriplet& t, const TestFunction& f, const Vector& x,
                             double t_end, double r, const SimConfig& cfg);

} // namespace levyhjb

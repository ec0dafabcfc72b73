#pragma once

#include "levyhjb/triplet.hpp"

#include <vector>

namespace levyhjb {

/// q(xi) = -i b.xi + 1/2 xi.Q xi + ∫ (1 - e^{i y.xi} + i xi.h(y)) nu(dy)
Complex symbol_eval(const LevyTriplet& t, const Vector& xi, const SymbolOptions& opts = {});
/// q_alpha(x, xi) for a state-dependent field.
Complex symbol_eval(const CoefficientField& field, const Vector& x, const Vector& xi,
                    const SymbolOptions& opts = {});

/// ∫ min(1, |y|^2) nu(dy)
double levy_mass(const LevyMeasure& nu, const MeasureQuadrature& q = {});

/// Deterministic probe points in the closed ball B(center, r): a lattice plus
/// boundary points. `count` controls the density (points per axis ~ count^(1/d)).
std::vector<Vector> ball_probes(const Vector& center, double r, int count);

/// Probe-lattice value of M_r = sup_alpha sup_{|x - x0| <= r} (|b| + |Q| + ∫ min(1,|y|^2) nu).
/// The true supremum is at least this large.
double bound_M_r(const UncertaintySet& us, const Vector& x0, double r, int probe_count,
                 const SymbolOptions& opts = {});

/// Probe-lattice value of sup_alpha sup_{|z - x0| <= r} sup_{|xi| <= 1/r} |q_alpha(z, xi)|.
double symbol_sup_bound(const UncertaintySet& us, const Vector& x0, double r, int probes,
                        const SymbolOptions& opts = {});

struct TightnessOptions {
    double r_min = 1e-8;
    double r_max = 1e8;
    int points_per_decade = 2;
    double small_threshold = 1e-3;
    double tail_threshold = 1e-3;
};

struct TightnessRow {
    double radius;
    double small_mass; // sup_alpha ∫_{|y|<=radius} |y|^2 nu_alpha(dy)
    double tail_mass;  // sup_alpha nu_alpha(|y| > radius)
};

struct TightnessReport {
    bool small_jump_limit_ok = false;
    bool large_jump_limit_ok = false;
    std::vector<TightnessRow> profile;
};

/// Requires x-independent fields.
TightnessReport tightness_report(const UncertaintySet& us, const TightnessOptions& topts = {},
                                 const SymbolOptions& opts = {});

struct DecayRow {
    double radius;
    double sup_symbol; // sup_alpha sup_{|xi| <= radius} |psi_alpha(xi)|
};

struct DecayTable {
    std::vector<DecayRow> rows; // ordered by decreasing radius
    bool nonincreasing = true;
    bool decayed = false;       // last < first
};

/// Requires x-independent fields passing tightness_report.
DecayTable symbol_decay_check(const UncertaintySet& us, std::vector<double> radii,
                              int probes = 41, const TightnessOptions& topts = {},
                              const SymbolOptions& opts = {});

/// Coefficients of Z = ∫ sigma dX for a fixed sigma = sigma(x):
/// b^ = sigma b - ∫ (sigma h(y) - h^(sigma y)) nu(dy), Q^ = sigma Q sigma^T,
/// nu^ = nu o (y -> sigma y)^{-1} restricted to R^k \ {0}.
LevyTriplet sde_pushforward(const LevyTriplet& base, const Matrix& sigma,
                            const Truncation& hat_trunc, const SymbolOptions& opts = {});

/// Smallest C found by dense scan with
/// |1 - e^{i y.xi} + i h(y).xi| <= C min(1, |y|^2) max(1, |xi|^2).
double truncation_kernel_constant(const Truncation& trunc, int samples = 400);

/// Finite-probe diagnostics for the standing hypotheses on the coefficients.
struct HypothesisReport {
    double M_r = 0.0;                  // probe value of the local bound
    double drift_diffusion_modulus = 0.0; // max |b(x)-b(x')| + |Q(x)-Q(x')| over neighbour probes
    double jump_integral_modulus = 0.0;   // same for ∫ g dnu over the finite g-family
    std::vector<double> far_field_symbol; // sup over |z-x0|<=r, |xi|<=1/r for growing r
    bool bounded = false;                 // uniform boundedness over the probed region
    bool far_field_decreasing = false;
    std::string label = "necessary-condition check";
};

HypothesisReport hypothesis_report(const UncertaintySet& us, const Vector& x0, double radius,
                                   int probes = 9, const SymbolOptions& opts = {});

} // namespace levyhjb

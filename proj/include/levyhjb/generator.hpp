#pragma once

#include "levyhjb/grid.hpp"
#include "levyhjb/test_function.hpp"
#include "levyhjb/triplet.hpp"

#include <cstddef>
#include <vector>

namespace levyhjb {

/// A f(x) = b.∇f + 1/2 tr(Q ∇²f) + ∫ (f(x+y) - f(x) - ∇f(x).h(y)) nu(dy) for the triplet at x.
double apply_generator(const LevyTriplet& t, const TestFunction& f, const Vector& x,
                       const SymbolOptions& opts = {});
double apply_generator(const CoefficientField& field, const TestFunction& f, const Vector& x,
                       const SymbolOptions& opts = {});

struct SupGeneratorValue {
    double value = 0.0;
    std::size_t argmax = 0; // first maximizer in list order
};

SupGeneratorValue apply_sup_generator(const UncertaintySet& us, const TestFunction& f,
                                      const Vector& x, const SymbolOptions& opts = {});

enum class DriftDifferencing {
    Adaptive, // central where it stays monotone, upwind otherwise
    Upwind,
    Central,
};

struct DiscretizationOptions {
    /// small-jump split radius; <= 0 means eps_ratio * cutoff
    double eps = 0.0;
    double eps_ratio = 1e-3;
    int panels_per_ray = 200;
    double tail_tol = 1e-10;
    DriftDifferencing drift = DriftDifferencing::Adaptive;
    MeasureQuadrature quadrature{};

    double split_radius(const Truncation& trunc) const {
        return eps > 0.0 ? eps : eps_ratio * trunc.cutoff;
    }
};

/// Finite-difference / jump-quadrature form of the generator at one point:
/// A u(x) ≈ Σ_k w_k (u(x + offset_k) - u(x)) with all w_k >= 0.
struct DiscreteGenerator {
    std::vector<Tap> taps;
    Matrix Q_eff;     // Q + ∫_{|y|<eps} y y^T nu(dy)
    Vector b_eff;     // b - ∫_{eps<=|y|<=cutoff} y nu(dy)
    double jump_rate; // nu(|y| >= eps)
    double center_weight() const;
};

/// Throws ValidationError if Q_eff is not diagonally dominant (no monotone stencil).
DiscreteGenerator discretize_generator(const LevyTriplet& t, double dx,
                                       const DiscretizationOptions& opts = {});

/// The discretized generator of `field` applied to the grid field u at grid index i.
double apply_generator_grid(const CoefficientField& field, const Field& u, std::size_t i,
                            const ExtensionPolicy& ext, const DiscretizationOptions& opts = {});

} // namespace levyhjb

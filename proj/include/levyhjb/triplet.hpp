#pragma once

#include "levyhjb/levy_measure.hpp"
#include "levyhjb/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace levyhjb {

/// h(y) = y for |y| <= cutoff, 0 otherwise.
struct Truncation {
    double cutoff = 1.0;

    Truncation() = default;
    explicit Truncation(double c);

    bool keeps(const Vector& y) const { return y.norm() <= cutoff; }
    Vector apply(const Vector& y) const;
    bool operator==(const Truncation& o) const { return cutoff == o.cutoff; }
};

/// Numerical settings shared by symbol and generator evaluation.
struct SymbolOptions {
    /// small-jump split radius as a fraction of the truncation cutoff
    double eps_ratio = 1e-3;
    MeasureQuadrature quadrature{};
};

/// Lévy triplet (b, Q, nu) with respect to a truncation function.
class LevyTriplet {
public:
    LevyTriplet() = default;
    /// Validates Q = Q^T, Q PSD (tolerance 1e-10), finite b and a finite Lévy mass.
    LevyTriplet(Vector b, Matrix Q, LevyMeasure nu, Truncation trunc = Truncation{});

    static LevyTriplet zero(int dim, Truncation trunc = Truncation{});

    int dim() const { return static_cast<int>(b_.size()); }
    const Vector& b() const { return b_; }
    const Matrix& Q() const { return Q_; }
    const LevyMeasure& nu() const { return nu_; }
    const Truncation& trunc() const { return trunc_; }

    /// Euclidean |b| + spectral |Q| + ∫ min(1,|y|^2) nu(dy).
    double size(const MeasureQuadrature& q = {}) const;

private:
    Vector b_ = Vector::Zero(1);
    Matrix Q_ = Matrix::Zero(1, 1);
    LevyMeasure nu_{1};
    Truncation trunc_{};
};

double spectral_norm(const Matrix& Q);

/// Map x -> sigma(x) for SDE-driven coefficient fields.
using SigmaMap = std::function<Matrix(const Vector&)>;

/// Coefficients x -> (b_alpha(x), Q_alpha(x), nu_alpha(x, dy)) for one index alpha.
class CoefficientField {
public:
    using Evaluator = std::function<LevyTriplet(const Vector&)>;

    static CoefficientField constant(std::string label, LevyTriplet triplet);
    static CoefficientField from_function(std::string label, int dim, Evaluator eval);
    /// Coefficients of an SDE dZ = sigma(Z-) dX driven by a Lévy process with the
    /// given base triplet; the pushed-forward triplet uses `hat_trunc`.
    /// `sigma(x)` must be dim x base.dim().
    static CoefficientField sde(std::string label, int dim, LevyTriplet base, SigmaMap sigma,
                                Truncation hat_trunc, SymbolOptions opts = {});

    const std::string& label() const { return label_; }
    int dim() const { return dim_; }
    bool is_constant() const { return constant_.has_value(); }
    bool is_sde() const { return base_.has_value(); }
    const LevyTriplet& constant_triplet() const;
    const std::optional<LevyTriplet>& sde_base() const { return base_; }

    LevyTriplet at(const Vector& x) const;

private:
    std::string label_;
    int dim_ = 1;
    std::optional<LevyTriplet> constant_;
    std::optional<LevyTriplet> base_;
    Evaluator eval_;
};

/// Finite index set I of coefficient fields sharing one truncation function.
class UncertaintySet {
public:
    UncertaintySet(std::vector<CoefficientField> fields, Truncation trunc);

    std::size_t size() const { return fields_.size(); }
    int dim() const { return fields_.front().dim(); }
    const Truncation& trunc() const { return trunc_; }
    const CoefficientField& operator[](std::size_t i) const { return fields_[i]; }
    const std::vector<CoefficientField>& fields() const { return fields_; }
    bool all_constant() const;

    /// Evaluates field alpha at x and checks it uses the shared truncation.
    LevyTriplet at(std::size_t alpha, const Vector& x) const;

private:
    std::vector<CoefficientField> fields_;
    Truncation trunc_;
};

} // namespace levyhjb

#include "levyhjb/triplet.hpp"
#include "levyhjb/symbols.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace levyhjb {

Truncation::Truncation(double c) : cutoff(c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("truncation cutoff must be > 0");
}

Vector Truncation::apply(const Vector& y) const {
    if (keeps(y)) return y;
    return Vector::Zero(y.size());
}

double spectral_norm(const Matrix& Q) {
    if (Q.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (Q + Q.transpose()), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

LevyTriplet::LevyTriplet(Vector b, Matrix Q, LevyMeasure nu, Truncation trunc)
    : b_(std::move(b)), Q_(std::move(Q)), nu_(std::move(nu)), trunc_(trunc) {
    const auto d = b_.size();
    if (d < 1) throw ValidationError("triplet: dimension must be >= 1");
    if (Q_.rows() != d || Q_.cols() != d) throw ValidationError("triplet: Q must be d x d");
    if (nu_.dim() != d) throw ValidationError("triplet: Lévy measure dimension mismatch");
    if (!b_.allFinite() || !Q_.allFinite()) throw ValidationError("triplet: non-finite b or Q");
    if ((Q_ - Q_.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw ValidationError("triplet: Q must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Q_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10)
        throw ValidationError("triplet: Q must be positive semidefinite");
    const double mass = nu_.levy_mass();
    if (!std::isfinite(mass)) throw ValidationError("triplet: Lévy mass is not finite");
}

LevyTriplet LevyTriplet::zero(int dim, Truncation trunc) {
    return LevyTriplet(Vector::Zero(dim), Matrix::Zero(dim, dim), LevyMeasure::zero(dim), trunc);
}

double LevyTriplet::size(const MeasureQuadrature& q) const {
    return b_.norm() + spectral_norm(Q_) + nu_.levy_mass(q);
}

CoefficientField CoefficientField::constant(std::string label, LevyTriplet triplet) {
    CoefficientField f;
    f.label_ = std::move(label);
    f.dim_ = triplet.dim();
    f.constant_ = std::move(triplet);
    return f;
}

CoefficientField CoefficientField::from_function(std::string label, int dim, Evaluator eval) {
    if (!eval) throw ValidationError("coefficient field needs an evaluator");
    CoefficientField f;
    f.label_ = std::move(label);
    f.dim_ = dim;
    f.eval_ = std::move(eval);
    return f;
}

CoefficientField CoefficientField::sde(std::string label, int dim, LevyTriplet base,
                                       SigmaMap sigma, Truncation hat_trunc, SymbolOptions opts) {
    if (!sigma) throw ValidationError("sde field needs a sigma map");
    const Matrix s0 = sigma(Vector::Zero(dim));
    if (s0.rows() != dim || s0.cols() != base.dim())
        throw ValidationError("sde field: sigma(x) must be " + std::to_string(dim) + " x " +
                              std::to_string(base.dim()));
    CoefficientField f;
    f.label_ = std::move(label);
    f.dim_ = dim;
    f.base_ = base;
    f.eval_ = [base = std::move(base), sigma = std::move(sigma), hat_trunc, opts](const Vector& x) {
        return sde_pushforward(base, sigma(x), hat_trunc, opts);
    };
    return f;
}

const LevyTriplet& CoefficientField::constant_triplet() const {
    if (!constant_) throw PreconditionError("field '" + label_ + "' is not constant in x");
    return *constant_;
}

LevyTriplet CoefficientField::at(const Vector& x) const {
    if (constant_) return *constant_;
    LevyTriplet t = eval_(x);
    if (t.dim() != dim_) throw ValidationError("field '" + label_ + "' returned wrong dimension");
    return t;
}

UncertaintySet::UncertaintySet(std::vector<CoefficientField> fields, Truncation trunc)
    : fields_(std::move(fields)), trunc_(trunc) {
    if (fields_.empty()) throw ValidationError("uncertainty set must be nonempty");
    const int d = fields_.front().dim();
    for (const auto& f : fields_) {
        if (f.dim() != d) throw ValidationError("uncertainty set: mixed dimensions");
        if (f.is_constant() && !(f.constant_triplet().trunc() == trunc_))
            throw ValidationError("uncertainty set: field '" + f.label() +
                                  "' uses a different truncation");
    }
}

bool UncertaintySet::all_constant() const {
    for (const auto& f : fields_)
        if (!f.is_constant()) return false;
    return true;
}

LevyTriplet UncertaintySet::at(std::size_t alpha, const Vector& x) const {
    LevyTriplet t = fields_.at(alpha).at(x);
    if (!(t.trunc() == trunc_))
        throw ValidationError("uncertainty set: field '" + fields_[alpha].label() +
                              "' uses a different truncation");
    return t;
}

} // namespace levyhjb

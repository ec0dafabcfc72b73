#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace levyhjb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Complex = std::complex<double>;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input violates a documented invariant (bad triplet, bad grid, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A call was made outside an operation's precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, Complex previous, Complex last)
        : Error(what), previous_estimate(previous), last_estimate(last) {}

    Complex previous_estimate;
    Complex last_estimate;
};

/// Non-finite values, CFL violations and similar run-time failures.
class NumericalError : public Error {
public:
    using Error::Error;
};

inline Vector vec1(double v) {
    Vector out(1);
    out[0] = v;
    return out;
}

inline Matrix mat1(double v) {
    Matrix out(1, 1);
    out(0, 0) = v;
    return out;
}

} // namespace levyhjb

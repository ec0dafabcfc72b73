#include "levyhjb/quadrature.hpp"

#include <Eigen/Eigenvalues>

namespace levyhjb::quad {

GaussHermite gauss_hermite(int n) {
    if (n < 1) throw ValidationError("gauss_hermite: need at least one node");
    // Golub-Welsch on the Jacobi matrix of the monic probabilists' Hermite polynomials.
    Matrix jacobi = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
        jacobi(k - 1, k) = jacobi(k, k - 1);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
    GaussHermite gh;
    gh.nodes.resize(n);
    gh.weights.resize(n);
    double wsum = 0.0;
    for (int k = 0; k < n; ++k) {
        gh.nodes[k] = eig.eigenvalues()[k];
        const double v0 = eig.eigenvectors()(0, k);
        gh.weights[k] = v0 * v0;
        wsum += gh.weights[k];
    }
    for (auto& w : gh.weights) w /= wsum;
    // Symmetrize so that odd moments vanish to rounding.
    for (int k = 0; k < n / 2; ++k) {
        const double x = 0.5 * (gh.nodes[n - 1 - k] - gh.nodes[k]);
        const double w = 0.5 * (gh.weights[k] + gh.weights[n - 1 - k]);
        gh.nodes[k] = -x;
        gh.nodes[n - 1 - k] = x;
        gh.weights[k] = gh.weights[n - 1 - k] = w;
    }
    if (n % 2 == 1) gh.nodes[n / 2] = 0.0;
    return gh;
}

} // namespace levyhjb::quad

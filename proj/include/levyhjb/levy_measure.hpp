#pragma once

#include "levyhjb/quadrature.hpp"
#include "levyhjb/types.hpp"

#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace levyhjb {

/// A point mass of a Lévy measure. Locations are never 0.
struct Atom {
    Vector location;
    double mass = 0.0;
};

/// Radial kernel k(r) = scale * r^(-1-index) * exp(-tempering * r), r > 0.
struct PowerLawKernel {
    double scale = 1.0;
    double index = 1.0;     // in (0, 2)
    double tempering = 0.0; // >= 0
};

/// User-supplied radial kernel on (0, outer_radius]. Near 0 it is assumed to
/// behave like C r^(-1-small_index) with small_index in [0, 2).
struct ProfileKernel {
    std::function<double(double)> density;
    double small_index = 0.0;
    double outer_radius = 1.0;
};

using RadialKernel = std::variant<PowerLawKernel, ProfileKernel>;

/// Mass spread along the ray {rho * direction : rho > 0}. The radial law is the
/// image of `weight * kernel(r) dr` under r -> stretch * r.
struct Ray {
    Vector direction; // unit length
    double weight = 1.0;
    double stretch = 1.0;
    RadialKernel kernel;
};

struct DirectionWeight {
    Vector direction;
    double weight = 1.0;
};

struct StableLikeParams {
    double index = 1.0;
    double scale = 1.0;
    double tempering = 0.0;
    std::vector<DirectionWeight> directions;

    /// d = 1 convenience: weights on the positive and negative half-lines.
    static StableLikeParams one_dimensional(double index, double scale, double w_plus = 1.0,
                                            double w_minus = 1.0, double tempering = 0.0);
};

struct DensityParams {
    /// density(y) behaves like |y|^(-d-small_index) near 0.
    double small_index = 0.0;
    /// density vanishes for |y| > outer_radius.
    double outer_radius = 1.0;
    /// angular nodes per turn, used for d = 2 only.
    int angular_nodes = 64;
};

/// Panel of a ray discretization: mass located between radii [r0, r1].
struct RayPanel {
    double r0 = 0.0;
    double r1 = 0.0;
    double mass = 0.0;
    double mean_radius = 0.0;
};

struct MeasureQuadrature {
    quad::Options quad{};
    /// radius below which the small-jump integrand is replaced by its leading term
    double inner_radius = 1e-9;
};

/// Lévy measure on R^d \ {0}: a finite atom list plus radial rays.
///
/// Atoms, Density and StableLike inputs are all normalized into these two
/// pieces so that pushforwards under linear maps stay representable.
class LevyMeasure {
public:
    enum class Kind { Zero, Atoms, Density, StableLike, Mixed };

    LevyMeasure() = default;
    explicit LevyMeasure(int dim) : dim_(dim) {}

    static LevyMeasure zero(int dim) { return LevyMeasure(dim); }
    static LevyMeasure atoms(int dim, std::vector<Atom> atoms);
    static LevyMeasure density(int dim, std::function<double(const Vector&)> density,
                               const DensityParams& params);
    static LevyMeasure stable_like(int dim, const StableLikeParams& params);
    static LevyMeasure from_parts(int dim, std::vector<Atom> atoms, std::vector<Ray> rays,
                                  Kind kind);

    int dim() const { return dim_; }
    Kind kind() const { return kind_; }
    const std::vector<Atom>& atom_list() const { return atoms_; }
    const std::vector<Ray>& rays() const { return rays_; }
    bool empty() const { return atoms_.empty() && rays_.empty(); }
    bool atoms_only() const { return rays_.empty(); }

    /// Disjoint union (sum of measures).
    LevyMeasure operator+(const LevyMeasure& other) const;

    /// ∫ min(1, |y|^2) nu(dy)
    double levy_mass(const MeasureQuadrature& q = {}) const;
    /// ∫_{0<|y|<=r} |y|^2 nu(dy)
    double small_mass(double r, const MeasureQuadrature& q = {}) const;
    /// nu({|y| > R})
    double tail_mass(double R, const MeasureQuadrature& q = {}) const;
    /// nu({|y| >= eps}), the compound-Poisson rate of the large jumps.
    double large_jump_rate(double eps, const MeasureQuadrature& q = {}) const;
    /// ∫_{|y|<eps} y y^T nu(dy)
    Matrix small_jump_covariance(double eps, const MeasureQuadrature& q = {}) const;
    /// ∫_{eps<=|y|<=cutoff} y nu(dy)
    Vector compensator(double eps, double cutoff, const MeasureQuadrature& q = {}) const;
    /// ∫ (1 - e^{i y.xi} + i xi.h(y)) nu(dy) for h(y) = y 1{|y| <= cutoff}.
    Complex jump_symbol(const Vector& xi, double cutoff, double eps,
                        const MeasureQuadrature& q = {}) const;

    /// Pushforward under y -> sigma y; mass sent to 0 is dropped.
    LevyMeasure pushforward(const Matrix& sigma) const;

private:
    int dim_ = 1;
    Kind kind_ = Kind::Zero;
    std::vector<Atom> atoms_;
    std::vector<Ray> rays_;
};

std::string to_string(LevyMeasure::Kind kind);

/// Radial integrals along one ray, in effective (stretched) radius, including
/// the ray weight. Exposed for discretization and testing.
namespace ray {

double mass_between(const Ray& ray, double a, double b, const MeasureQuadrature& q = {});
double mass_above(const Ray& ray, double R, const MeasureQuadrature& q = {});
double second_moment_below(const Ray& ray, double r, const MeasureQuadrature& q = {});
double first_moment_between(const Ray& ray, double a, double b, const MeasureQuadrature& q = {});
/// ∫_0^∞ (1 - e^{i rho eta} + i eta rho 1{rho <= cutoff}) k(rho) d rho
Complex radial_symbol(const Ray& ray, double eta, double cutoff, double eps,
                      const MeasureQuadrature& q = {});
/// ∫ g(rho) k(rho) d rho over [a, b] (b may be +inf for power laws).
double integrate(const Ray& ray, const std::function<double(double)>& g, double a, double b,
                 const MeasureQuadrature& q = {});
/// Log-spaced panels covering [eps, rho_max) plus a final tail panel [rho_max, inf).
std::vector<RayPanel> panels(const Ray& ray, double eps, int count, double tail_tol,
                             const MeasureQuadrature& q = {});
/// Effective radius beyond which the ray carries no mass (inf for power laws).
double outer_radius(const Ray& ray);
double kernel_value(const Ray& ray, double rho);

} // namespace ray

} // namespace levyhjb

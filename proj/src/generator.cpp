#include "levyhjb/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace levyhjb {

namespace {

// ∫ (f(x + rho theta) - f(x) - rho g1 1{rho <= c}) along one ray.
double ray_generator(const Ray& r, const TestFunction& f, const Vector& x, double fx,
                     const Vector& grad, const Matrix& hess, double cutoff,
                     const MeasureQuadrature& q) {
    const Vector& th = r.direction;
    const double g1 = grad.dot(th);
    const double g2 = th.dot(hess * th);
    const double lo = std::min(q.inner_radius, 1e-3 * cutoff);
    double total = 0.5 * g2 * ray::second_moment_below(r, lo, q);

    const double outer = ray::outer_radius(r);
    const double top = std::min(cutoff, outer);
    auto inner = [&](double rho) {
        // Below this radius the difference quotient has lost most of its digits.
        if (rho < 1e-5) return 0.5 * g2 * rho * rho;
        return f(Vector(x + rho * th)) - fx - g1 * rho;
    };
    if (top > lo) total += ray::integrate(r, inner, lo, top, q);

    if (cutoff < outer) {
        auto outer_fn = [&](double rho) { return f(Vector(x + rho * th)) - fx; };
        double end = outer;
        if (!std::isfinite(end)) {
            end = std::max(2.0 * cutoff, 1.0);
            while (ray::mass_above(r, end, q) > 1e-12 && end < 1e12) end *= 2.0;
        }
        total += ray::integrate(r, outer_fn, cutoff, end, q);
        if (!std::isfinite(outer)) {
            // Remaining tail mass, with f frozen at its value at the truncation radius.
            total += (f(Vector(x + end * th)) - fx) * ray::mass_above(r, end, q);
        }
    }
    return total;
}

} // namespace

double apply_generator(const LevyTriplet& t, const TestFunction& f, const Vector& x,
                       const SymbolOptions& opts) {
    if (f.dim() != t.dim() || x.size() != t.dim())
        throw ValidationError("apply_generator: dimension mismatch");
    const double fx = f(x);
    const Vector grad = f.gradient(x);
    const Matrix hess = f.hessian(x);
    double value = t.b().dot(grad) + 0.5 * (t.Q() * hess).trace();
    for (const auto& a : t.nu().atom_list())
        value += a.mass * (f(Vector(x + a.location)) - fx - grad.dot(t.trunc().apply(a.location)));
    for (const auto& r : t.nu().rays())
        value += ray_generator(r, f, x, fx, grad, hess, t.trunc().cutoff, opts.quadrature);
    return value;
}

double apply_generator(const CoefficientField& field, const TestFunction& f, const Vector& x,
                       const SymbolOptions& opts) {
    return apply_generator(field.at(x), f, x, opts);
}

SupGeneratorValue apply_sup_generator(const UncertaintySet& us, const TestFunction& f,
                                      const Vector& x, const SymbolOptions& opts) {
    SupGeneratorValue best{-std::numeric_limits<double>::infinity(), 0};
    for (std::size_t a = 0; a < us.size(); ++a) {
        const double v = apply_generator(us.at(a, x), f, x, opts);
        if (v > best.value) best = {v, a};
    }
    return best;
}

double DiscreteGenerator::center_weight() const {
    double s = 0.0;
    for (const auto& t : taps) s += t.weight;
    return s;
}

DiscreteGenerator discretize_generator(const LevyTriplet& t, double dx,
                                       const DiscretizationOptions& opts) {
    if (!(dx > 0.0)) throw PreconditionError("discretize_generator: dx must be positive");
    const int d = t.dim();
    const double cutoff = t.trunc().cutoff;
    const double eps = opts.split_radius(t.trunc());
    if (!(eps > 0.0) || eps > cutoff)
        throw ValidationError("small-jump split radius must lie in (0, cutoff]");
    const auto& q = opts.quadrature;
    const auto& nu = t.nu();

    DiscreteGenerator g;
    g.Q_eff = t.Q() + nu.small_jump_covariance(eps, q);
    g.b_eff = t.b() - nu.compensator(eps, cutoff, q);
    g.jump_rate = nu.large_jump_rate(eps, q);

    const double h2 = dx * dx;
    // Cross terms: Q_kl u_{x_k x_l} on the diagonal neighbours.
    std::vector<double> axis_coeff(d);
    for (int k = 0; k < d; ++k) {
        double off = 0.0;
        for (int l = 0; l < d; ++l)
            if (l != k) off += std::abs(g.Q_eff(k, l));
        axis_coeff[k] = (g.Q_eff(k, k) - off) / (2.0 * h2);
        if (axis_coeff[k] < -1e-14 * (1.0 + std::abs(g.Q_eff(k, k)) / h2))
            throw ValidationError("diffusion matrix is not diagonally dominant; no monotone "
                                  "stencil on this grid");
        axis_coeff[k] = std::max(axis_coeff[k], 0.0);
    }
    for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
            const double qkl = g.Q_eff(k, l);
            if (qkl == 0.0) continue;
            const double w = std::abs(qkl) / (2.0 * h2);
            const double sgn = qkl > 0.0 ? 1.0 : -1.0;
            Vector o = Vector::Zero(d);
            o[k] = dx;
            o[l] = sgn * dx;
            g.taps.push_back({o, w});
            g.taps.push_back({Vector(-o), w});
        }
    }
    for (int k = 0; k < d; ++k) {
        const double b = g.b_eff[k];
        double up = axis_coeff[k], down = axis_coeff[k];
        bool central = false;
        switch (opts.drift) {
        case DriftDifferencing::Central: central = true; break;
        case DriftDifferencing::Upwind: central = false; break;
        case DriftDifferencing::Adaptive: central = axis_coeff[k] >= std::abs(b) / (2.0 * dx); break;
        }
        if (central) {
            up += b / (2.0 * dx);
            down -= b / (2.0 * dx);
        } else if (b > 0.0) {
            up += b / dx;
        } else {
            down -= b / dx;
        }
        Vector e = Vector::Zero(d);
        e[k] = dx;
        if (up != 0.0) g.taps.push_back({e, up});
        if (down != 0.0) g.taps.push_back({Vector(-e), down});
    }
    for (const auto& a : nu.atom_list())
        if (a.location.norm() >= eps) g.taps.push_back({a.location, a.mass});
    for (const auto& r : nu.rays())
        for (const auto& p : ray::panels(r, eps, opts.panels_per_ray, opts.tail_tol, q))
            g.taps.push_back({Vector(p.mean_radius * r.direction), p.mass});
    return g;
}

double apply_generator_grid(const CoefficientField& field, const Field& u, std::size_t i,
                            const ExtensionPolicy& ext, const DiscretizationOptions& opts) {
    const Grid& grid = u.grid();
    if (i >= grid.size()) throw PreconditionError("apply_generator_grid: index out of grid");
    for (double v : u.values())
        if (std::isnan(v)) throw NumericalError("apply_generator_grid: NaN in field");
    const auto gen = discretize_generator(field.at(grid.point(i)), grid.spacing(), opts);
    return resolve_taps(grid, i, gen.taps, ext).apply(u.values(), i);
}

} // namespace levyhjb

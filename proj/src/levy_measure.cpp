#include "levyhjb/levy_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace levyhjb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1 - e^{ix} + ix without cancellation near 0.
Complex compensated_kernel(double x) {
    const double s = std::sin(0.5 * x);
    const double re = 2.0 * s * s;
    double im;
    if (std::abs(x) < 0.5) {
        const double x2 = x * x;
        im = x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
    } else {
        im = x - std::sin(x);
    }
    return {re, im};
}

double base_kernel(const RadialKernel& k, double r) {
    if (const auto* p = std::get_if<PowerLawKernel>(&k))
        return p->scale * std::pow(r, -1.0 - p->index) * std::exp(-p->tempering * r);
    const auto& prof = std::get<ProfileKernel>(k);
    if (r > prof.outer_radius) return 0.0;
    return prof.density(r);
}

double base_outer(const RadialKernel& k) {
    if (const auto* p = std::get_if<ProfileKernel>(&k)) return p->outer_radius;
    return kInf;
}

double small_index(const RadialKernel& k) {
    if (const auto* p = std::get_if<PowerLawKernel>(&k)) return p->index;
    return std::get<ProfileKernel>(k).small_index;
}

bool untempered_power(const RadialKernel& k) {
    const auto* p = std::get_if<PowerLawKernel>(&k);
    return p != nullptr && p->tempering == 0.0;
}

// ∫_a^b g(r) k(r) dr in log-radius, 0 < a < b < inf (base coordinates).
template <class G>
auto log_integral(const RadialKernel& k, G&& g, double a, double b, const quad::Options& opt,
                  std::vector<double> breaks = {}) {
    using T = std::decay_t<decltype(g(a))>;
    if (!(b > a)) return T{};
    const double la = std::log(a), lb = std::log(b);
    for (double x = std::ceil(la); x < lb; x += 1.0) breaks.push_back(x);
    auto integrand = [&](double u) -> T {
        const double r = std::exp(u);
        return g(r) * (base_kernel(k, r) * r);
    };
    return quad::integrate(integrand, la, lb, opt, breaks).value;
}

// End of the effective support of a tempered kernel.
double tempered_end(const PowerLawKernel& p, double from) {
    return std::max(from, 1.0 / p.tempering) + 60.0 / p.tempering;
}

// Base-coordinate mass on (R, inf).
double base_mass_above(const RadialKernel& k, double R, const quad::Options& opt) {
    if (const auto* p = std::get_if<PowerLawKernel>(&k)) {
        if (p->tempering == 0.0) return p->scale * std::pow(R, -p->index) / p->index;
        return log_integral(k, [](double) { return 1.0; }, R, tempered_end(*p, R), opt);
    }
    const double outer = base_outer(k);
    if (R >= outer) return 0.0;
    return log_integral(k, [](double) { return 1.0; }, R, outer, opt);
}

// Base-coordinate ∫_0^r r^2 k(r) dr.
double base_second_moment(const RadialKernel& k, double r, double inner,
                          const quad::Options& opt) {
    if (const auto* p = std::get_if<PowerLawKernel>(&k)) {
        if (p->tempering == 0.0)
            return p->scale * std::pow(r, 2.0 - p->index) / (2.0 - p->index);
    }
    r = std::min(r, base_outer(k));
    const double beta = small_index(k);
    const double lo = std::min(inner, 0.5 * r);
    // Leading-order remainder of ∫_0^lo under k(r) ~ C r^{-1-beta}.
    const double remainder = base_kernel(k, lo) * lo * lo * lo / (2.0 - beta);
    return remainder + log_integral(k, [](double x) { return x * x; }, lo, r, opt);
}

// scale * ∫_R^inf e^{i omega r} r^{-1-alpha} e^{-lambda r} dr by rotating onto the
// steepest-descent ray; the integrand along it decays like e^{-tau}.
Complex power_tail_oscillatory(const PowerLawKernel& p, double omega, double R) {
    const Complex z(p.tempering, -omega);
    const double az = std::abs(z);
    const Complex w = std::conj(z) / (az * az);
    const double s = -1.0 - p.index;
    auto f = [&](double tau) -> Complex { return std::exp(-tau) * std::pow(R + tau * w, s); };
    std::vector<double> breaks{1.0, 5.0, 20.0};
    for (double t = az * R; t < 60.0 && t > 0.0; t *= 10.0) breaks.push_back(t);
    quad::Options opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 0.0;
    opt.max_intervals = 20000;
    const Complex integral = quad::integrate(f, 0.0, 60.0, opt, breaks).value;
    return p.scale * std::exp(-z * R) * w * integral;
}

Complex profile_tail_oscillatory(const ProfileKernel& prof, double omega, double R,
                                 const quad::Options& opt) {
    if (R >= prof.outer_radius) return {};
    std::vector<double> breaks;
    const double period = 2.0 * std::numbers::pi / std::abs(omega);
    const double span = prof.outer_radius - R;
    const int count = static_cast<int>(std::min(4000.0, std::floor(span / period)));
    for (int j = 1; j <= count; ++j) breaks.push_back(R + j * span / (count + 1));
    auto f = [&](double r) -> Complex {
        return prof.density(r) * std::exp(Complex(0.0, omega * r));
    };
    quad::Options o = opt;
    o.max_intervals = std::max(o.max_intervals, 8 * (count + 2));
    return quad::integrate(f, R, prof.outer_radius, o, breaks).value;
}

Vector unit(const Vector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("ray direction must be nonzero");
    return v / n;
}

} // namespace

namespace ray {

double kernel_value(const Ray& ray, double rho) {
    return ray.weight * base_kernel(ray.kernel, rho / ray.stretch) / ray.stretch;
}

double outer_radius(const Ray& ray) { return ray.stretch * base_outer(ray.kernel); }

double mass_above(const Ray& ray, double R, const MeasureQuadrature& q) {
    if (R <= 0.0) return kInf;
    return ray.weight * base_mass_above(ray.kernel, R / ray.stretch, q.quad);
}

double mass_between(const Ray& ray, double a, double b, const MeasureQuadrature& q) {
    if (!(b > a)) return 0.0;
    if (a <= 0.0) return kInf;
    const double s = ray.stretch;
    const double hi = std::min(b / s, base_outer(ray.kernel));
    if (untempered_power(ray.kernel)) {
        const auto& p = std::get<PowerLawKernel>(ray.kernel);
        const double top = std::isfinite(hi) ? std::pow(hi, -p.index) : 0.0;
        return ray.weight * p.scale * (std::pow(a / s, -p.index) - top) / p.index;
    }
    if (!std::isfinite(hi)) return mass_above(ray, a, q);
    return ray.weight * log_integral(ray.kernel, [](double) { return 1.0; }, a / s, hi, q.quad);
}

double second_moment_below(const Ray& ray, double r, const MeasureQuadrature& q) {
    const double s = ray.stretch;
    return ray.weight * s * s *
           base_second_moment(ray.kernel, r / s, q.inner_radius / s, q.quad);
}

double first_moment_between(const Ray& ray, double a, double b, const MeasureQuadrature& q) {
    if (!(b > a)) return 0.0;
    const double s = ray.stretch;
    const double hi = std::min(b / s, base_outer(ray.kernel));
    if (!std::isfinite(hi)) throw ValidationError("first moment over an unbounded range");
    if (untempered_power(ray.kernel)) {
        const auto& p = std::get<PowerLawKernel>(ray.kernel);
        const double lo = a / s;
        const double e = 1.0 - p.index;
        const double val = std::abs(e) < 1e-14 ? std::log(hi / lo)
                                               : (std::pow(hi, e) - std::pow(lo, e)) / e;
        return ray.weight * s * p.scale * val;
    }
    return ray.weight * s *
           log_integral(ray.kernel, [](double x) { return x; }, a / s, hi, q.quad);
}

double integrate(const Ray& ray, const std::function<double(double)>& g, double a, double b,
                 const MeasureQuadrature& q) {
    const double s = ray.stretch;
    double hi = std::min(b / s, base_outer(ray.kernel));
    if (!std::isfinite(hi)) {
        const auto& p = std::get<PowerLawKernel>(ray.kernel);
        if (p.tempering > 0.0) {
            hi = tempered_end(p, a / s);
        } else {
            throw ValidationError("ray::integrate needs a finite upper limit for power tails");
        }
    }
    return ray.weight * log_integral(ray.kernel, [&](double r) { return g(s * r); }, a / s, hi,
                                     q.quad);
}

Complex radial_symbol(const Ray& ray, double eta, double cutoff, double eps,
                      const MeasureQuadrature& q) {
    if (eta == 0.0) return {};
    if (eta < 0.0) return std::conj(radial_symbol(ray, -eta, cutoff, eps, q));
    const double s = ray.stretch;
    const double omega = eta * s;
    const double cb = cutoff / s;
    const double eb = std::min(eps / s, cb);
    const double lo = std::min(q.inner_radius / s, 1e-3 * eb);
    const double outer = base_outer(ray.kernel);

    // (0, lo]: leading Taylor term of the compensated integrand.
    Complex total = 0.5 * omega * omega *
                    base_second_moment(ray.kernel, lo, 0.5 * lo, q.quad);

    // (lo, cb]: compensated integrand in log-radius, split at eps.
    const double top = std::min(cb, outer);
    if (top > lo) {
        std::vector<double> breaks{std::log(eb)};
        const double period = 2.0 * std::numbers::pi / omega;
        for (int k = 1; k <= 400 && k * period < top; ++k)
            if (k * period > lo) breaks.push_back(std::log(k * period));
        total += log_integral(
            ray.kernel, [&](double r) { return compensated_kernel(omega * r); }, lo, top,
            q.quad, breaks);
    }

    // (cb, inf): uncompensated, = mass - oscillatory part.
    if (cb < outer) {
        const double mass = base_mass_above(ray.kernel, cb, q.quad);
        Complex osc;
        if (const auto* p = std::get_if<PowerLawKernel>(&ray.kernel)) {
            osc = power_tail_oscillatory(*p, omega, cb);
        } else {
            osc = profile_tail_oscillatory(std::get<ProfileKernel>(ray.kernel), omega, cb,
                                           q.quad);
        }
        total += mass - osc;
    }
    return ray.weight * total;
}

std::vector<RayPanel> panels(const Ray& ray, double eps, int count, double tail_tol,
                             const MeasureQuadrature& q) {
    std::vector<RayPanel> out;
    if (count < 1) throw ValidationError("ray::panels needs count >= 1");
    const double total = mass_above(ray, eps, q);
    if (!(total > 0.0)) return out;
    double top = outer_radius(ray);
    if (!std::isfinite(top)) {
        top = std::max(2.0 * eps, 1.0);
        while (mass_above(ray, top, q) > tail_tol * total) top *= 2.0;
    }
    if (top <= eps) return out;
    const double ratio = std::pow(top / eps, 1.0 / count);
    double r0 = eps;
    for (int j = 0; j < count; ++j) {
        const double r1 = (j + 1 == count) ? top : r0 * ratio;
        const double m = mass_between(ray, r0, r1, q);
        if (m > 0.0) {
            const double mean = first_moment_between(ray, r0, r1, q) / m;
            out.push_back({r0, r1, m, std::clamp(mean, r0, r1)});
        }
        r0 = r1;
    }
    if (std::isinf(outer_radius(ray))) {
        const double m = mass_above(ray, top, q);
        if (m > 0.0) {
            const auto* p = std::get_if<PowerLawKernel>(&ray.kernel);
            const double index = p ? p->index : 1.0;
            out.push_back({top, kInf, m, top * std::pow(2.0, 1.0 / index)});
        }
    }
    return out;
}

} // namespace ray

StableLikeParams StableLikeParams::one_dimensional(double index, double scale, double w_plus,
                                                   double w_minus, double tempering) {
    StableLikeParams p;
    p.index = index;
    p.scale = scale;
    p.tempering = tempering;
    if (w_plus > 0.0) p.directions.push_back({vec1(1.0), w_plus});
    if (w_minus > 0.0) p.directions.push_back({vec1(-1.0), w_minus});
    return p;
}

LevyMeasure LevyMeasure::atoms(int dim, std::vector<Atom> atoms) {
    LevyMeasure m(dim);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const auto& a = atoms[i];
        const std::string tag = "atom #" + std::to_string(i + 1);
        if (a.location.size() != dim) throw ValidationError(tag + ": dimension mismatch");
        if (!a.location.allFinite()) throw ValidationError(tag + ": non-finite location");
        if (a.location.norm() == 0.0) throw ValidationError(tag + ": mass placed at 0");
        if (!(a.mass > 0.0) || !std::isfinite(a.mass))
            throw ValidationError(tag + ": mass must be positive and finite");
    }
    m.atoms_ = std::move(atoms);
    m.kind_ = m.atoms_.empty() ? Kind::Zero : Kind::Atoms;
    return m;
}

LevyMeasure LevyMeasure::density(int dim, std::function<double(const Vector&)> density,
                                 const DensityParams& params) {
    if (dim != 1 && dim != 2) throw ValidationError("density measures support d in {1, 2}");
    if (!(params.small_index >= 0.0 && params.small_index < 2.0))
        throw ValidationError("density small_index must lie in [0, 2)");
    if (!(params.outer_radius > 0.0) || !std::isfinite(params.outer_radius))
        throw ValidationError("density outer_radius must be positive and finite");
    LevyMeasure m(dim);
    m.kind_ = Kind::Density;
    auto make_ray = [&](Vector dir, double weight, std::function<double(double)> radial) {
        m.rays_.push_back(
            {std::move(dir), weight, 1.0,
             ProfileKernel{std::move(radial), params.small_index, params.outer_radius}});
    };
    if (dim == 1) {
        for (double sgn : {1.0, -1.0}) {
            make_ray(vec1(sgn), 1.0, [density, sgn](double r) { return density(vec1(sgn * r)); });
        }
    } else {
        const int n = std::max(4, params.angular_nodes);
        const double w = 2.0 * std::numbers::pi / n;
        for (int j = 0; j < n; ++j) {
            const double th = w * j;
            Vector dir(2);
            dir << std::cos(th), std::sin(th);
            make_ray(dir, w, [density, dir](double r) { return density(Vector(r * dir)) * r; });
        }
    }
    const double mass = m.levy_mass();
    if (!std::isfinite(mass)) throw ValidationError("density: ∫ min(1,|y|^2) nu(dy) diverges");
    return m;
}

LevyMeasure LevyMeasure::stable_like(int dim, const StableLikeParams& params) {
    if (!(params.index > 0.0 && params.index < 2.0))
        throw ValidationError("stable-like index must lie in (0, 2); the small-jump integral "
                              "diverges otherwise");
    if (!(params.scale > 0.0)) throw ValidationError("stable-like scale must be positive");
    if (!(params.tempering >= 0.0)) throw ValidationError("tempering rate must be >= 0");
    if (params.directions.empty()) throw ValidationError("stable-like needs direction weights");
    LevyMeasure m(dim);
    m.kind_ = Kind::StableLike;
    for (const auto& d : params.directions) {
        if (d.direction.size() != dim) throw ValidationError("direction dimension mismatch");
        if (!(d.weight >= 0.0)) throw ValidationError("direction weights must be >= 0");
        if (d.weight == 0.0) continue;
        m.rays_.push_back({unit(d.direction), d.weight, 1.0,
                           PowerLawKernel{params.scale, params.index, params.tempering}});
    }
    return m;
}

LevyMeasure LevyMeasure::from_parts(int dim, std::vector<Atom> atoms, std::vector<Ray> rays,
                                    Kind kind) {
    LevyMeasure m = LevyMeasure::atoms(dim, std::move(atoms));
    for (auto& r : rays) {
        if (r.direction.size() != dim) throw ValidationError("ray dimension mismatch");
        if (!(r.weight > 0.0) || !(r.stretch > 0.0))
            throw ValidationError("ray weight and stretch must be positive");
        r.direction = unit(r.direction);
    }
    m.rays_ = std::move(rays);
    m.kind_ = m.empty() ? Kind::Zero : kind;
    return m;
}

LevyMeasure LevyMeasure::operator+(const LevyMeasure& other) const {
    if (dim_ != other.dim_) throw ValidationError("measure dimension mismatch");
    LevyMeasure m(dim_);
    m.atoms_ = atoms_;
    m.atoms_.insert(m.atoms_.end(), other.atoms_.begin(), other.atoms_.end());
    m.rays_ = rays_;
    m.rays_.insert(m.rays_.end(), other.rays_.begin(), other.rays_.end());
    if (kind_ == Kind::Zero) m.kind_ = other.kind_;
    else if (other.kind_ == Kind::Zero || other.kind_ == kind_) m.kind_ = kind_;
    else m.kind_ = Kind::Mixed;
    return m;
}

double LevyMeasure::levy_mass(const MeasureQuadrature& q) const {
    double total = 0.0;
    for (const auto& a : atoms_) total += std::min(1.0, a.location.squaredNorm()) * a.mass;
    for (const auto& r : rays_) total += ray::second_moment_below(r, 1.0, q) + ray::mass_above(r, 1.0, q);
    return total;
}

double LevyMeasure::small_mass(double r, const MeasureQuadrature& q) const {
    double total = 0.0;
    for (const auto& a : atoms_) {
        const double n2 = a.location.squaredNorm();
        if (n2 <= r * r) total += n2 * a.mass;
    }
    for (const auto& ry : rays_) total += ray::second_moment_below(ry, r, q);
    return total;
}

double LevyMeasure::tail_mass(double R, const MeasureQuadrature& q) const {
    double total = 0.0;
    for (const auto& a : atoms_)
        if (a.location.norm() > R) total += a.mass;
    for (const auto& ry : rays_) total += ray::mass_above(ry, R, q);
    return total;
}

double LevyMeasure::large_jump_rate(double eps, const MeasureQuadrature& q) const {
    double total = 0.0;
    for (const auto& a : atoms_)
        if (a.location.norm() >= eps) total += a.mass;
    for (const auto& ry : rays_) total += ray::mass_above(ry, eps, q);
    return total;
}

Matrix LevyMeasure::small_jump_covariance(double eps, const MeasureQuadrature& q) const {
    Matrix cov = Matrix::Zero(dim_, dim_);
    for (const auto& a : atoms_)
        if (a.location.norm() < eps) cov += a.mass * a.location * a.location.transpose();
    for (const auto& ry : rays_)
        cov += ray::second_moment_below(ry, eps, q) * ry.direction * ry.direction.transpose();
    return cov;
}

Vector LevyMeasure::compensator(double eps, double cutoff, const MeasureQuadrature& q) const {
    Vector c = Vector::Zero(dim_);
    for (const auto& a : atoms_) {
        const double n = a.location.norm();
        if (n >= eps && n <= cutoff) c += a.mass * a.location;
    }
    for (const auto& ry : rays_) c += ray::first_moment_between(ry, eps, cutoff, q) * ry.direction;
    return c;
}

Complex LevyMeasure::jump_symbol(const Vector& xi, double cutoff, double eps,
                                 const MeasureQuadrature& q) const {
    Complex total{};
    for (const auto& a : atoms_) {
        const double yx = a.location.dot(xi);
        const double hx = a.location.norm() <= cutoff ? yx : 0.0;
        // 1 - e^{i y.xi} + i xi.h(y)
        total += a.mass * (hx == yx ? compensated_kernel(yx)
                                    : Complex(1.0 - std::cos(yx), hx - std::sin(yx)));
    }
    for (const auto& ry : rays_) total += ray::radial_symbol(ry, ry.direction.dot(xi), cutoff, eps, q);
    return total;
}

LevyMeasure LevyMeasure::pushforward(const Matrix& sigma) const {
    if (sigma.cols() != dim_) throw ValidationError("pushforward: sigma has wrong column count");
    if (!sigma.allFinite()) throw ValidationError("pushforward: sigma not finite");
    const int out_dim = static_cast<int>(sigma.rows());
    LevyMeasure m(out_dim);
    for (const auto& a : atoms_) {
        Vector y = sigma * a.location;
        if (y.norm() > 1e-300) m.atoms_.push_back({std::move(y), a.mass});
    }
    for (const auto& ry : rays_) {
        const Vector v = sigma * ry.direction;
        const double n = v.norm();
        if (n > 1e-300) m.rays_.push_back({v / n, ry.weight, ry.stretch * n, ry.kernel});
    }
    m.kind_ = m.empty() ? Kind::Zero : kind_;
    return m;
}

std::string to_string(LevyMeasure::Kind kind) {
    switch (kind) {
    case LevyMeasure::Kind::Zero: return "zero";
    case LevyMeasure::Kind::Atoms: return "atoms";
    case LevyMeasure::Kind::Density: return "density";
    case LevyMeasure::Kind::StableLike: return "stable-like";
    case LevyMeasure::Kind::Mixed: return "mixed";
    }
    return "unknown";
}

} // namespace levyhjb

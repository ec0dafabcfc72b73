#include "levyhjb/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace levyhjb {

namespace {

double eps_of(const Truncation& trunc, const SymbolOptions& opts) {
    return opts.eps_ratio * trunc.cutoff;
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
    std::vector<double> out;
    const int n = std::max(1, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)));
    for (int i = 0; i <= n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / n));
    return out;
}

// ∫ g dnu for bounded g with |g(y)| <= min(1, |y|^2).
double integrate_bounded(const LevyMeasure& nu, const std::function<double(const Vector&)>& g,
                         const MeasureQuadrature& q) {
    double total = 0.0;
    for (const auto& a : nu.atom_list()) total += a.mass * g(a.location);
    for (const auto& r : nu.rays()) {
        double top = ray::outer_radius(r);
        if (!std::isfinite(top)) {
            top = 1.0;
            while (ray::mass_above(r, top, q) > 1e-12) top *= 2.0;
        }
        const double lo = std::min(q.inner_radius, 0.5 * top);
        total += ray::integrate(
            r, [&](double rho) { return g(Vector(rho * r.direction)); }, lo, top, q);
    }
    return total;
}

} // namespace

Complex symbol_eval(const LevyTriplet& t, const Vector& xi, const SymbolOptions& opts) {
    if (xi.size() != t.dim()) throw ValidationError("symbol_eval: xi has wrong dimension");
    const Complex drift(0.0, -t.b().dot(xi));
    const double diffusion = 0.5 * xi.dot(t.Q() * xi);
    return drift + diffusion +
           t.nu().jump_symbol(xi, t.trunc().cutoff, eps_of(t.trunc(), opts), opts.quadrature);
}

Complex symbol_eval(const CoefficientField& field, const Vector& x, const Vector& xi,
                    const SymbolOptions& opts) {
    return symbol_eval(field.at(x), xi, opts);
}

double levy_mass(const LevyMeasure& nu, const MeasureQuadrature& q) { return nu.levy_mass(q); }

std::vector<Vector> ball_probes(const Vector& center, double r, int count) {
    const int d = static_cast<int>(center.size());
    std::vector<Vector> pts;
    if (count <= 1 || r <= 0.0) {
        pts.push_back(center);
        return pts;
    }
    if (d == 1) {
        for (int k = 0; k < count; ++k)
            pts.push_back(center + vec1(r * (-1.0 + 2.0 * k / (count - 1))));
        return pts;
    }
    const int k = std::max(2, static_cast<int>(std::ceil(std::pow(count, 1.0 / d))));
    std::vector<int> idx(d, 0);
    while (true) {
        Vector p(d);
        for (int a = 0; a < d; ++a) p[a] = -r + 2.0 * r * idx[a] / (k - 1);
        if (p.norm() <= r * (1.0 + 1e-12)) pts.push_back(center + p);
        int a = 0;
        while (a < d && ++idx[a] == k) idx[a++] = 0;
        if (a == d) break;
    }
    pts.push_back(center);
    const int nb = 4 * k;
    if (d == 2) {
        for (int j = 0; j < nb; ++j) {
            const double th = 2.0 * std::numbers::pi * j / nb;
            Vector p(2);
            p << std::cos(th), std::sin(th);
            pts.push_back(center + r * p);
        }
    } else {
        // Fibonacci points on the sphere (first three coordinates).
        const int n = nb * k;
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < n; ++j) {
            const double z = 1.0 - 2.0 * (j + 0.5) / n;
            const double rad = std::sqrt(1.0 - z * z);
            Vector p = Vector::Zero(d);
            p[0] = rad * std::cos(golden * j);
            p[1] = rad * std::sin(golden * j);
            p[2] = z;
            pts.push_back(center + r * p);
        }
    }
    return pts;
}

double bound_M_r(const UncertaintySet& us, const Vector& x0, double r, int probe_count,
                 const SymbolOptions& opts) {
    if (!(r > 0.0)) throw PreconditionError("bound_M_r: r must be positive");
    if (probe_count < 1) throw PreconditionError("bound_M_r: probe_count must be >= 1");
    const auto probes = ball_probes(x0, r, probe_count);
    double best = 0.0;
    for (std::size_t a = 0; a < us.size(); ++a) {
        if (us[a].is_constant()) {
            best = std::max(best, us[a].constant_triplet().size(opts.quadrature));
            continue;
        }
        for (const auto& x : probes) best = std::max(best, us.at(a, x).size(opts.quadrature));
    }
    return best;
}

double symbol_sup_bound(const UncertaintySet& us, const Vector& x0, double r, int probes,
                        const SymbolOptions& opts) {
    if (!(r > 0.0)) throw PreconditionError("symbol_sup_bound: r must be positive");
    const auto zs = ball_probes(x0, r, probes);
    const auto xis = ball_probes(Vector::Zero(us.dim()), 1.0 / r, probes);
    double best = 0.0;
    for (std::size_t a = 0; a < us.size(); ++a) {
        const bool constant = us[a].is_constant();
        for (std::size_t zi = 0; zi < (constant ? 1 : zs.size()); ++zi) {
            const LevyTriplet t = constant ? us[a].constant_triplet() : us.at(a, zs[zi]);
            for (const auto& xi : xis) best = std::max(best, std::abs(symbol_eval(t, xi, opts)));
        }
    }
    return best;
}

TightnessReport tightness_report(const UncertaintySet& us, const TightnessOptions& topts,
                                 const SymbolOptions& opts) {
    if (!us.all_constant())
        throw PreconditionError("tightness_report requires x-independent coefficient fields");
    TightnessReport rep;
    for (double r : log_grid(topts.r_min, topts.r_max, topts.points_per_decade)) {
        TightnessRow row{r, 0.0, 0.0};
        for (const auto& f : us.fields()) {
            const auto& nu = f.constant_triplet().nu();
            row.small_mass = std::max(row.small_mass, nu.small_mass(r, opts.quadrature));
            row.tail_mass = std::max(row.tail_mass, nu.tail_mass(r, opts.quadrature));
        }
        rep.profile.push_back(row);
    }
    rep.small_jump_limit_ok = rep.profile.front().small_mass <= topts.small_threshold;
    rep.large_jump_limit_ok = rep.profile.back().tail_mass <= topts.tail_threshold;
    return rep;
}

DecayTable symbol_decay_check(const UncertaintySet& us, std::vector<double> radii, int probes,
                              const TightnessOptions& topts, const SymbolOptions& opts) {
    const auto tight = tightness_report(us, topts, opts);
    if (!tight.small_jump_limit_ok || !tight.large_jump_limit_ok)
        throw PreconditionError("symbol_decay_check: family fails the tightness report");
    std::sort(radii.begin(), radii.end(), std::greater<>());
    DecayTable table;
    for (double r : radii) {
        if (!(r > 0.0)) throw PreconditionError("symbol_decay_check: radii must be positive");
        double best = 0.0;
        for (const auto& xi : ball_probes(Vector::Zero(us.dim()), r, probes))
            for (const auto& f : us.fields())
                best = std::max(best, std::abs(symbol_eval(f.constant_triplet(), xi, opts)));
        table.rows.push_back({r, best});
    }
    // Balls are nested, so a probe value at a smaller radius also bounds the larger ones.
    for (std::size_t i = table.rows.size(); i-- > 1;)
        table.rows[i - 1].sup_symbol = std::max(table.rows[i - 1].sup_symbol, table.rows[i].sup_symbol);
    for (std::size_t i = 1; i < table.rows.size(); ++i)
        if (table.rows[i].sup_symbol > table.rows[i - 1].sup_symbol) table.nonincreasing = false;
    table.decayed = !table.rows.empty() && table.rows.back().sup_symbol < table.rows.front().sup_symbol;
    return table;
}

LevyTriplet sde_pushforward(const LevyTriplet& base, const Matrix& sigma,
                            const Truncation& hat_trunc, const SymbolOptions& opts) {
    if (!sigma.allFinite()) throw ValidationError("sde_pushforward: sigma(x) not finite");
    if (sigma.cols() != base.dim())
        throw ValidationError("sde_pushforward: sigma(x) must have base-dimension columns");
    const int k = static_cast<int>(sigma.rows());
    const double c = base.trunc().cutoff;
    const double c_hat = hat_trunc.cutoff;
    const auto& q = opts.quadrature;

    Vector correction = Vector::Zero(k);
    for (const auto& a : base.nu().atom_list()) {
        const Vector sy = sigma * a.location;
        correction += a.mass * (sigma * base.trunc().apply(a.location) - hat_trunc.apply(sy));
    }
    for (const auto& r : base.nu().rays()) {
        const Vector v = sigma * r.direction;
        const double n = v.norm();
        if (!(n > 1e-300)) continue;
        const double c_img = c_hat / n; // radius at which h^ stops keeping sigma y
        if (c_img < c) correction += ray::first_moment_between(r, c_img, c, q) * v;
        else if (c_img > c) correction -= ray::first_moment_between(r, c, c_img, q) * v;
    }

    Vector b_hat = sigma * base.b() - correction;
    Matrix Q_hat = sigma * base.Q() * sigma.transpose();
    Q_hat = 0.5 * (Q_hat + Q_hat.transpose());
    return LevyTriplet(std::move(b_hat), std::move(Q_hat), base.nu().pushforward(sigma), hat_trunc);
}

double truncation_kernel_constant(const Truncation& trunc, int samples) {
    const double c = trunc.cutoff;
    const auto ys = log_grid(1e-3 * c, 100.0 * c, std::max(2, samples / 5));
    const auto xis = log_grid(1e-3, 1e3, std::max(2, samples / 6));
    double best = 0.0;
    auto probe = [&](double y, double xi) {
        const double t = y * xi;
        const double hx = y <= c ? t : 0.0;
        const double val = std::abs(Complex(1.0 - std::cos(t), hx - std::sin(t)));
        best = std::max(best, val / (std::min(1.0, y * y) * std::max(1.0, xi * xi)));
    };
    for (double y : ys)
        for (double xi : xis) probe(y, xi);
    // The cutoff itself is where h jumps.
    for (double xi : xis) probe(c, xi);
    return best;
}

HypothesisReport hypothesis_report(const UncertaintySet& us, const Vector& x0, double radius,
                                   int probes, const SymbolOptions& opts) {
    HypothesisReport rep;
    rep.M_r = bound_M_r(us, x0, radius, probes, opts);
    rep.bounded = std::isfinite(rep.M_r);

    const std::vector<std::function<double(const Vector&)>> g_family{
        [](const Vector& y) { const double s = y.squaredNorm(); return s / (1.0 + s); },
        [](const Vector& y) { const double s = y.squaredNorm(); return s / (1.0 + s) * std::cos(y[0]); },
        [](const Vector& y) { const double s = y.squaredNorm(); return s / (1.0 + s) * std::sin(y[0]); },
        [](const Vector& y) { const double s = y.squaredNorm(); return s * std::exp(-s); },
    };

    const auto pts = ball_probes(x0, radius, probes);
    const double h = radius / std::max(2, probes);
    for (std::size_t a = 0; a < us.size(); ++a) {
        if (us[a].is_constant()) continue;
        for (const auto& x : pts) {
            const LevyTriplet t0 = us.at(a, x);
            for (int ax = 0; ax < us.dim(); ++ax) {
                Vector x1 = x;
                x1[ax] += h;
                const LevyTriplet t1 = us.at(a, x1);
                rep.drift_diffusion_modulus =
                    std::max(rep.drift_diffusion_modulus,
                             (t1.b() - t0.b()).norm() + spectral_norm(t1.Q() - t0.Q()));
                for (const auto& g : g_family) {
                    const double diff = std::abs(integrate_bounded(t1.nu(), g, opts.quadrature) -
                                                 integrate_bounded(t0.nu(), g, opts.quadrature));
                    rep.jump_integral_modulus = std::max(rep.jump_integral_modulus, diff);
                }
            }
        }
    }

    for (double f : {1.0, 2.0, 4.0, 8.0})
        rep.far_field_symbol.push_back(symbol_sup_bound(us, x0, f * radius, probes, opts));
    rep.far_field_decreasing = true;
    for (std::size_t i = 1; i < rep.far_field_symbol.size(); ++i)
        if (rep.far_field_symbol[i] > rep.far_field_symbol[i - 1] * (1.0 + 1e-12))
            rep.far_field_decreasing = false;
    return rep;
}

} // namespace levyhjb

#include "levyhjb/mc.hpp"
#include "fftw_lock.hpp"
#include "levyhjb/generator.hpp"
#include "levyhjb/quadrature.hpp"
#include "levyhjb/symbols.hpp"

#include <Eigen/Eigenvalues>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <string>

namespace levyhjb {

void SimConfig::validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("sim: delta must be positive");
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ValidationError("sim: horizon must be >= 0");
    if (paths < 1) throw ValidationError("sim: need at least one path");
    if (!(eps_ratio > 0.0 && eps_ratio <= 1.0)) throw ValidationError("sim: eps_ratio must lie in (0, 1]");
    if (!(rate_cap > 0.0)) throw ValidationError("sim: rate_cap must be positive");
}

std::size_t SimConfig::steps(double horizon_override) const {
    const double H = horizon_override >= 0.0 ? horizon_override : horizon;
    if (H == 0.0) return 0;
    return static_cast<std::size_t>(std::max(1.0, std::ceil(H / delta - 1e-9)));
}

EmpiricalEstimate summarize(const std::vector<double>& values) {
    EmpiricalEstimate e;
    e.N = values.size();
    if (values.empty()) return e;
    const double v0 = values[0];
    double s = 0.0;
    for (double v : values) s += v - v0;
    e.value = v0 + s / static_cast<double>(e.N);
    if (e.N > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - e.value) * (v - e.value);
        e.std_error = std::sqrt(ss / static_cast<double>(e.N - 1) / static_cast<double>(e.N));
    }
    return e;
}

namespace {

Matrix psd_sqrt(const Matrix& S) {
    if (S.isZero(0.0)) return Matrix::Zero(S.rows(), S.cols());
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace

IncrementSampler::IncrementSampler(const LevyTriplet& t, double delta, const SimConfig& cfg)
    : delta_(delta) {
    if (!(delta > 0.0)) throw ValidationError("increment sampler: delta must be positive");
    const double cutoff = t.trunc().cutoff;
    const double eps = cfg.eps_ratio * cutoff;
    const auto& nu = t.nu();
    const auto& q = cfg.quadrature;
    sigma_eff_ = t.Q() + nu.small_jump_covariance(eps, q);
    root_ = psd_sqrt(sigma_eff_);
    drift_ = (t.b() - nu.compensator(eps, cutoff, q)) * delta;
    for (const auto& a : nu.atom_list())
        if (a.location.norm() >= eps) jumps_.push_back(a);
    for (const auto& r : nu.rays())
        for (const auto& p : ray::panels(r, eps, cfg.panels_per_ray, 1e-12, q))
            jumps_.push_back({Vector(p.mean_radius * r.direction), p.mass});
    for (const auto& j : jumps_) {
        rate_ += j.mass;
        cumulative_.push_back(rate_);
    }
    if (rate_ * delta > cfg.rate_cap)
        throw PreconditionError("jump rate " + format_double(rate_) + " times delta exceeds the cap " +
                                format_double(cfg.rate_cap) + "; raise the small-jump split radius");
}

Vector IncrementSampler::sample(PathRng& rng) const {
    Vector x = drift_;
    if (!root_.isZero(0.0)) {
        std::normal_distribution<double> normal;
        Vector z(dim());
        for (int k = 0; k < dim(); ++k) z[k] = normal(rng);
        x += std::sqrt(delta_) * (root_ * z);
    }
    if (rate_ > 0.0) {
        std::poisson_distribution<long> count(rate_ * delta_);
        const long n = count(rng);
        for (long k = 0; k < n; ++k) {
            const double u = rng.uniform() * rate_;
            auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            const std::size_t j = std::min<std::size_t>(it - cumulative_.begin(), jumps_.size() - 1);
            x += jumps_[j].location;
        }
    }
    return x;
}

Vector sample_increment(const LevyTriplet& t, double delta, PathRng& rng, const SimConfig& cfg) {
    return IncrementSampler(t, delta, cfg).sample(rng);
}

EmpiricalEstimate estimate_semigroup_single(const LevyTriplet& t,
                                            const std::function<double(const Vector&)>& f,
                                            const Vector& x, const SimConfig& cfg) {
    cfg.validate();
    if (x.size() != t.dim()) throw ValidationError("estimate_semigroup_single: dimension mismatch");
    const std::size_t n = cfg.steps();
    if (n == 0) return summarize(std::vector<double>(cfg.paths, f(x)));
    const IncrementSampler sampler(t, cfg.horizon / static_cast<double>(n), cfg);
    std::vector<double> values(cfg.paths);
    const long long paths = static_cast<long long>(cfg.paths);
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < paths; ++p) {
        PathRng rng(cfg.seed, static_cast<std::uint64_t>(p));
        Vector X = x;
        for (std::size_t k = 0; k < n; ++k) X += sampler.sample(rng);
        values[p] = f(X);
    }
    return summarize(values);
}

std::vector<Tap> increment_rule(const LevyTriplet& t, double delta, const SimConfig& cfg,
                                const DpOptions& opts, bool* exact, std::uint64_t stream) {
    const IncrementSampler s(t, delta, cfg);
    const int d = t.dim();

    bool quadrature = t.nu().rays().empty();
    std::vector<Tap> jumps;
    if (quadrature) {
        // Poisson-weighted convolution powers of the jump table, merged on identical locations.
        const double mu = s.jump_rate() * delta;
        jumps.push_back({Vector::Zero(d), 1.0});
        if (mu > 0.0) {
            const double pk0 = std::exp(-mu);
            double pk = pk0, covered = pk0;
            std::map<std::vector<long long>, Tap> level{{std::vector<long long>(d, 0), {Vector::Zero(d), 1.0}}};
            jumps.front().weight = pk0;
            for (int k = 1; 1.0 - covered > opts.poisson_tail && covered < 1.0; ++k) {
                std::map<std::vector<long long>, Tap> next;
                for (const auto& [key, tap] : level)
                    for (const auto& a : s.jumps()) {
                        Vector y = tap.offset + a.location;
                        std::vector<long long> kk(d);
                        for (int c = 0; c < d; ++c) kk[c] = std::llround(y[c] * 1e9);
                        auto it = next.find(kk);
                        const double w = tap.weight * a.mass / s.jump_rate();
                        if (it == next.end()) next.emplace(kk, Tap{y, w});
                        else it->second.weight += w;
                    }
                level = std::move(next);
                pk *= mu / k;
                covered += pk;
                if (jumps.size() + level.size() > opts.max_support) {
                    quadrature = false;
                    break;
                }
                for (const auto& [key, tap] : level) jumps.push_back({tap.offset, tap.weight * pk});
                if (k > 10000) {
                    quadrature = false;
                    break;
                }
            }
        }
    }

    std::vector<Tap> rule;
    if (quadrature) {
        std::vector<Tap> gauss;
        if (s.root().isZero(0.0)) {
            gauss.push_back({Vector::Zero(d), 1.0});
        } else {
            const auto gh = quad::gauss_hermite(opts.hermite_nodes);
            const double sd = std::sqrt(delta);
            const int m = static_cast<int>(gh.nodes.size());
            std::vector<int> idx(d, 0);
            while (true) {
                Vector z(d);
                double w = 1.0;
                for (int c = 0; c < d; ++c) {
                    z[c] = gh.nodes[idx[c]];
                    w *= gh.weights[idx[c]];
                }
                gauss.push_back({Vector(sd * (s.root() * z)), w});
                int c = 0;
                while (c < d && ++idx[c] == m) idx[c++] = 0;
                if (c == d) break;
            }
        }
        if (gauss.size() * jumps.size() > opts.max_support) quadrature = false;
        if (quadrature) {
            for (const auto& g : gauss)
                for (const auto& j : jumps)
                    rule.push_back({Vector(s.drift() + g.offset + j.offset), g.weight * j.weight});
        }
    }
    if (!quadrature) {
        rule.clear();
        PathRng rng(cfg.seed, stream);
        const double w = 1.0 / static_cast<double>(opts.mc_samples);
        for (std::size_t m = 0; m < opts.mc_samples; ++m) rule.push_back({s.sample(rng), w});
    }
    double total = 0.0;
    for (const auto& r : rule) total += r.weight;
    for (auto& r : rule) r.weight /= total;
    if (exact) *exact = quadrature;
    return rule;
}

namespace {

// E v(x_i + increment) as interpolation weights.
struct ExpectationRow {
    std::vector<std::pair<std::size_t, double>> entries;
    double apply(std::span<const double> v) const {
        double acc = 0.0;
        for (const auto& [j, w] : entries) acc += w * v[j];
        return acc;
    }
};

ExpectationRow expectation_row(const Grid& grid, std::size_t i, const std::vector<Tap>& rule) {
    const auto row = resolve_taps(grid, i, rule, ExtensionPolicy::constant_boundary());
    std::map<std::size_t, double> merged;
    for (const auto& [j, w] : row.entries) merged[j] += w;
    return {{merged.begin(), merged.end()}};
}

} // namespace

DpResult dp_sup_semigroup(const UncertaintySet& us, const std::function<double(const Vector&)>& f,
                          const Grid& grid, const SimConfig& cfg, const DpOptions& opts) {
    cfg.validate();
    if (us.dim() != grid.dim()) throw ValidationError("dp: dimension mismatch");
    DpResult res{Field::sample(grid, f), cfg.delta, cfg.steps(), false, {}, {}};
    if (res.steps == 0) return res;
    res.delta = cfg.horizon / static_cast<double>(res.steps);
    res.delta_adjusted = std::abs(res.delta - cfg.delta) > 1e-12 * cfg.delta;

    const std::size_t n = grid.size();
    std::vector<std::vector<ExpectationRow>> rows(us.size(), std::vector<ExpectationRow>(n));
    for (std::size_t a = 0; a < us.size(); ++a) {
        bool exact = true;
        if (us[a].is_constant()) {
            const auto rule = increment_rule(us.at(a, grid.point(0)), res.delta, cfg, opts, &exact,
                                             static_cast<std::uint64_t>(a) << 40);
#pragma omp parallel for schedule(static)
            for (std::size_t i = 0; i < n; ++i) rows[a][i] = expectation_row(grid, i, rule);
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                bool e = true;
                const auto rule = increment_rule(us.at(a, grid.point(i)), res.delta, cfg, opts, &e,
                                                 (static_cast<std::uint64_t>(a) << 40) + i);
                exact = exact && e;
                rows[a][i] = expectation_row(grid, i, rule);
            }
        }
        res.methods.push_back(exact ? "quadrature" : "monte-carlo");
    }

    std::vector<double> v(res.value.values().begin(), res.value.values().end());
    std::vector<double> next(n);
    res.final_argmax.assign(n, 0);
    for (std::size_t k = 0; k < res.steps; ++k) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < n; ++i) {
            double best = rows[0][i].apply(v);
            std::size_t arg = 0;
            for (std::size_t a = 1; a < us.size(); ++a) {
                const double e = rows[a][i].apply(v);
                if (e > best) {
                    best = e;
                    arg = a;
                }
            }
            next[i] = best;
            res.final_argmax[i] = arg;
        }
        v.swap(next);
    }
    res.value = Field(grid, std::move(v));
    return res;
}

WilsonInterval wilson_interval(std::size_t k, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

Table MaxIneqResult::table() const {
    Table t{{"r", "probability", "wilson_upper", "symbol_sup", "bound", "pass"}, {}};
    for (const auto& r : rows)
        t.add({r.r, r.probability, r.upper, r.symbol_sup, r.bound, r.pass ? 1.0 : 0.0});
    return t;
}

MaxIneqResult maximal_inequality_check(const UncertaintySet& us, const Vector& x, double t,
                                       const std::vector<double>& radii, const SimConfig& cfg,
                                       const MaxIneqOptions& opts) {
    cfg.validate();
    if (x.size() != us.dim()) throw ValidationError("maximal inequality: dimension mismatch");
    if (!(t > 0.0)) throw ValidationError("maximal inequality: t must be positive");
    MaxIneqResult res;
    res.c = opts.c > 0.0 ? opts.c : standard_constant_c(us.dim());
    const std::size_t n = cfg.steps(t);
    const double delta = t / static_cast<double>(n);

    std::vector<std::optional<IncrementSampler>> fixed(us.size());
    bool deterministic = true;
    for (std::size_t a = 0; a < us.size(); ++a) {
        if (us[a].is_constant()) {
            fixed[a].emplace(us.at(a, x), delta, cfg);
            deterministic = deterministic && fixed[a]->deterministic();
        } else {
            deterministic = false;
        }
    }

    struct Strategy {
        std::string name;
        long alpha; // -1: random switching
    };
    std::vector<Strategy> strategies;
    for (std::size_t a = 0; a < us.size(); ++a)
        strategies.push_back({"constant:" + us[a].label(), static_cast<long>(a)});
    if (us.size() > 1)
        for (int s = 0; s < opts.switching_strategies; ++s)
            strategies.push_back({"switching:" + std::to_string(s), -1});

    const std::size_t N = deterministic ? 1 : cfg.paths;
    const int blocks = std::max(1, opts.switching_blocks);
    std::vector<std::vector<std::size_t>> counts(strategies.size(), std::vector<std::size_t>(radii.size(), 0));
    for (std::size_t sid = 0; sid < strategies.size(); ++sid) {
        res.strategies.push_back(strategies[sid].name);
        std::vector<double> excursion(N);
        const std::uint64_t seed = cfg.seed + 0x100000001B3ULL * (sid + 1);
        const long long paths = static_cast<long long>(N);
#pragma omp parallel for schedule(static)
        for (long long p = 0; p < paths; ++p) {
            PathRng rng(seed, static_cast<std::uint64_t>(p));
            std::vector<std::size_t> choice;
            if (strategies[sid].alpha < 0) {
                PathRng pick(seed ^ 0xA5A5A5A5ULL, static_cast<std::uint64_t>(p));
                for (int b = 0; b < blocks; ++b) choice.push_back(pick() % us.size());
            }
            Vector X = x;
            double worst = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                std::size_t a = strategies[sid].alpha >= 0
                                    ? static_cast<std::size_t>(strategies[sid].alpha)
                                    : choice[std::min<std::size_t>(k * blocks / n, blocks - 1)];
                if (fixed[a]) X += fixed[a]->sample(rng);
                else X += IncrementSampler(us.at(a, X), delta, cfg).sample(rng);
                worst = std::max(worst, (X - x).norm());
            }
            excursion[p] = worst;
        }
        for (std::size_t j = 0; j < radii.size(); ++j)
            for (double e : excursion)
                if (e > radii[j]) ++counts[sid][j];
    }

    for (std::size_t j = 0; j < radii.size(); ++j) {
        MaxIneqRow row{radii[j], 0.0, 0.0, 0.0, 0.0, true};
        for (std::size_t sid = 0; sid < strategies.size(); ++sid) {
            const double p = static_cast<double>(counts[sid][j]) / static_cast<double>(N);
            // a deterministic path law has no sampling error
            const double up = deterministic ? p : wilson_interval(counts[sid][j], N).upper;
            row.probability = std::max(row.probability, p);
            row.upper = std::max(row.upper, up);
        }
        row.symbol_sup = symbol_sup_bound(us, x, radii[j], opts.probes);
        row.bound = res.c * t * row.symbol_sup;
        row.pass = row.upper <= row.bound;
        res.pass = res.pass && row.pass;
        res.rows.push_back(row);
    }
    return res;
}

ConstantParts constant_c_parts(const TestFunction& bump, const ConstantOptions& opts) {
    const int d = bump.dim();
    if (d != 1 && d != 2) throw ValidationError("constant_c supports d = 1 or 2");
    if (!(opts.spacing > 0.0) || opts.padding < 1) throw ValidationError("constant_c: bad options");
    const double h = opts.spacing;
    const std::size_t N = static_cast<std::size_t>(std::llround(2.0 / h)) + 1;
    std::size_t M = 1;
    while (M < N * static_cast<std::size_t>(opts.padding)) M <<= 1;
    const std::size_t total_in = d == 1 ? M : M * M;
    const std::size_t half = M / 2 + 1;
    const std::size_t total_out = d == 1 ? half : M * half;

    double* in = fftw_alloc_real(total_in);
    fftw_complex* out = fftw_alloc_complex(total_out);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        plan = d == 1 ? fftw_plan_dft_r2c_1d(static_cast<int>(M), in, out, FFTW_ESTIMATE)
                      : fftw_plan_dft_r2c_2d(static_cast<int>(M), static_cast<int>(M), in, out,
                                             FFTW_ESTIMATE);
    }
    std::fill(in, in + total_in, 0.0);
    for (std::size_t j = 0; j < N; ++j) {
        if (d == 1) {
            in[j] = bump(vec1(-1.0 + static_cast<double>(j) * h));
        } else {
            for (std::size_t k = 0; k < N; ++k) {
                Vector x(2);
                x << -1.0 + static_cast<double>(j) * h, -1.0 + static_cast<double>(k) * h;
                in[j * M + k] = bump(x);
            }
        }
    }
    fftw_execute(plan);

    const double two_pi = 2.0 * std::numbers::pi;
    const double dxi = two_pi / (static_cast<double>(M) * h);
    const double scale = std::pow(h / two_pi, d);
    const double cell = std::pow(dxi, d);
    const double band = std::numbers::pi / h / 2.0;
    ConstantParts p;
    double outer = 0.0;
    auto freq = [&](std::size_t k) {
        return (k < M / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(M)) * dxi;
    };
    auto add = [&](const fftw_complex& F, double xi2, double xi_inf, double phase, double mult) {
        const Complex v(F[0], F[1]);
        const double a = scale * std::abs(v) * cell * mult;
        p.c0 += 2.0 * a;
        p.c2 += 2.0 * a * xi2;
        p.integral += mult * cell * scale * (v * std::polar(1.0, phase)).real();
        if (xi_inf > band) outer += 2.0 * a * (1.0 + xi2);
    };
    if (d == 1) {
        for (std::size_t k = 0; k < half; ++k) {
            const double xi = static_cast<double>(k) * dxi;
            const double mult = (k == 0 || k == M / 2) ? 1.0 : 2.0;
            add(out[k], xi * xi, xi, xi, mult);
        }
    } else {
        for (std::size_t k1 = 0; k1 < M; ++k1)
            for (std::size_t k2 = 0; k2 < half; ++k2) {
                const double a = freq(k1), b = static_cast<double>(k2) * dxi;
                const double mult = (k2 == 0 || k2 == M / 2) ? 1.0 : 2.0;
                add(out[k1 * half + k2], a * a + b * b, std::max(std::abs(a), b), a + b, mult);
            }
    }
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);

    p.c = p.c0 + p.c2;
    p.tail_fraction = p.c > 0.0 ? outer / p.c : 0.0;
    if (!(p.tail_fraction <= opts.tail_tol))
        throw NumericalError("constant_c: Fourier transform does not decay on the sampled band (tail share " +
                             format_double(p.tail_fraction) + "); refine the sampling");
    return p;
}

double constant_c(const TestFunction& bump, const ConstantOptions& opts) {
    return constant_c_parts(bump, opts).c;
}

double standard_constant_c(int dim) {
    static std::mutex m;
    static std::map<int, double> cache;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(dim);
    if (it != cache.end()) return it->second;
    ConstantOptions opts;
    if (dim == 2) {
        opts.spacing = 0.01;
        opts.padding = 8;
        opts.tail_tol = 1e-5;
    }
    const double c = constant_c(TestFunction::mollifier(Vector::Zero(dim), 1.0), opts);
    cache.emplace(dim, c);
    return c;
}

DynkinResult dynkin_residual(const LevyTriplet& t, const TestFunction& f, const Vector& x,
                             double t_end, double r, const SimConfig& cfg) {
    cfg.validate();
    if (!(r > 0.0)) throw ValidationError("dynkin: radius must be positive");
    DynkinResult res;
    const std::size_t n = cfg.steps(t_end);
    if (n == 0) {
        res.residual = summarize(std::vector<double>(cfg.paths, 0.0));
        return res;
    }
    const double delta = t_end / static_cast<double>(n);
    const IncrementSampler sampler(t, delta, cfg);
    const double fx = f(x);
    std::vector<double> resid(cfg.paths), drift(cfg.paths), exited(cfg.paths);
    const long long paths = static_cast<long long>(cfg.paths);
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < paths; ++p) {
        PathRng rng(cfg.seed, static_cast<std::uint64_t>(p));
        Vector X = x;
        double integral = 0.0, variation = 0.0;
        double a = apply_generator(t, f, X);
        bool out = false;
        for (std::size_t k = 0; k < n; ++k) {
            integral += delta * a;
            X += sampler.sample(rng);
            const double next = apply_generator(t, f, X);
            variation += std::abs(next - a);
            a = next;
            if ((X - x).norm() > r) {
                out = true;
                break;
            }
        }
        resid[p] = f(X) - fx - integral;
        drift[p] = 0.5 * delta * variation;
        exited[p] = out ? 1.0 : 0.0;
    }
    res.residual = summarize(resid);
    res.bias_bound = summarize(drift).value;
    res.exit_fraction = summarize(exited).value;
    return res;
}

} // namespace levyhjb

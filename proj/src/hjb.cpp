#include "levyhjb/hjb.hpp"
#include "levyhjb/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace levyhjb {

void SchemeConfig::validate() const {
    if (!(final_time > 0.0) || !std::isfinite(final_time))
        throw ValidationError("scheme: final time must be positive");
    if (!(safety > 0.0 && safety <= 1.0)) throw ValidationError("scheme: safety must lie in (0, 1]");
    if (dt < 0.0 || !std::isfinite(dt)) throw ValidationError("scheme: dt must be >= 0");
    if (trace_every < 0) throw ValidationError("scheme: trace_every must be >= 0");
}

namespace {

double generator_rate(const DiscreteGenerator& g, double dx) {
    double r = g.Q_eff.trace() / (dx * dx) + g.jump_rate;
    for (int k = 0; k < g.b_eff.size(); ++k) r += std::abs(g.b_eff[k]) / dx;
    return r;
}

template <class Fn>
void for_each_generator(const UncertaintySet& us, const Grid& grid,
                        const DiscretizationOptions& opts, Fn&& fn) {
    for (std::size_t a = 0; a < us.size(); ++a) {
        if (us[a].is_constant()) {
            const auto g = discretize_generator(us.at(a, grid.point(0)), grid.spacing(), opts);
            fn(a, std::nullopt, g);
        } else {
            for (std::size_t i = 0; i < grid.size(); ++i)
                fn(a, std::optional<std::size_t>(i),
                   discretize_generator(us.at(a, grid.point(i)), grid.spacing(), opts));
        }
    }
}

} // namespace

double cfl_dt(const UncertaintySet& us, const Grid& grid, double eps, double safety,
              double final_time) {
    if (us.dim() != grid.dim()) throw ValidationError("cfl_dt: dimension mismatch");
    DiscretizationOptions opts;
    opts.eps = eps;
    double denom = 0.0;
    for_each_generator(us, grid, opts, [&](std::size_t, std::optional<std::size_t>,
                                           const DiscreteGenerator& g) {
        denom = std::max(denom, generator_rate(g, grid.spacing()));
    });
    if (!std::isfinite(denom)) throw NumericalError("cfl_dt: unbounded coefficients on the grid");
    if (denom == 0.0) return final_time;
    return safety / denom;
}

HjbOperator::HjbOperator(const UncertaintySet& us, const Grid& grid, const SchemeConfig& cfg)
    : grid_(grid), rows_(us.size()) {
    if (us.dim() != grid.dim()) throw ValidationError("HJB operator: dimension mismatch");
    if (cfg.extension.kind == Extension::InitialCondition && !cfg.extension.outside)
        throw PreconditionError("initial-condition extension needs the initial function");
    for (auto& r : rows_) r.resize(grid.size());
    for_each_generator(us, grid, cfg.discretization,
                       [&](std::size_t a, std::optional<std::size_t> at, const DiscreteGenerator& g) {
        rate_ = std::max(rate_, generator_rate(g, grid.spacing()));
        if (at) {
            rows_[a][*at] = resolve_taps(grid, *at, g.taps, cfg.extension);
        } else {
#pragma omp parallel for schedule(static)
            for (std::size_t i = 0; i < grid.size(); ++i)
                rows_[a][i] = resolve_taps(grid, i, g.taps, cfg.extension);
        }
    });
    for (const auto& ra : rows_)
        for (const auto& row : ra) {
            rate_ = std::max(rate_, row.total);
            outside_bound_ = std::max(outside_bound_, std::abs(row.outside));
            outside_weight_ = std::max(outside_weight_, row.outside_weight);
        }
}

double HjbOperator::stable_dt(double safety) const {
    return rate_ > 0.0 ? safety / rate_ : std::numeric_limits<double>::infinity();
}

std::vector<double> HjbOperator::apply(const Field& u, std::vector<std::size_t>* argmax) const {
    if (!(u.grid() == grid_)) throw ValidationError("HJB operator: field on a different grid");
    const auto vals = u.values();
    const std::size_t n = grid_.size();
    std::vector<double> out(n);
    if (argmax) argmax->assign(n, 0);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        double best = rows_[0][i].apply(vals, i);
        std::size_t arg = 0;
        for (std::size_t a = 1; a < rows_.size(); ++a) {
            const double v = rows_[a][i].apply(vals, i);
            if (v > best) {
                best = v;
                arg = a;
            }
        }
        out[i] = best;
        if (argmax) (*argmax)[i] = arg;
    }
    return out;
}

Field HjbOperator::step(const Field& u, double dt, std::vector<std::size_t>* argmax) const {
    const auto gen = apply(u, argmax);
    std::vector<double> next(u.size());
    const auto vals = u.values();
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = vals[i] + dt * gen[i];

    const double old_max = u.max(), old_min = u.min();
    const double slack = dt * (outside_bound_ + outside_weight_ * u.sup_norm()) +
                         1e-12 * (1.0 + u.sup_norm());
    double new_max = -std::numeric_limits<double>::infinity();
    double new_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < next.size(); ++i) {
        if (!std::isfinite(next[i]))
            throw NumericalError("explicit step produced a non-finite value at point " +
                                 std::to_string(i));
        new_max = std::max(new_max, next[i]);
        new_min = std::min(new_min, next[i]);
    }
    if (new_max > old_max + slack || new_min < old_min - slack)
        throw NumericalError("CFL violation: explicit step left the range of the previous field "
                             "(dt = " + format_double(dt) + ", stable dt = " +
                             format_double(stable_dt(1.0)) + ")");
    return Field(grid_, std::move(next));
}

Field step_explicit(const Field& u, const UncertaintySet& us, double dt, const SchemeConfig& cfg) {
    return HjbOperator(us, u.grid(), cfg).step(u, dt);
}

SolveResult solve(const Field& f, const UncertaintySet& us, const SchemeConfig& cfg) {
    cfg.validate();
    const Grid& grid = f.grid();
    HjbOperator op(us, grid, cfg);
    const double T = cfg.final_time;

    RunReport rep;
    rep.mode = "solve";
    for (const auto& fld : us.fields()) rep.labels.push_back(fld.label());
    rep.final_time = T;
    if (cfg.diagnostics) {
        const auto h = hypothesis_report(us, Vector::Zero(grid.dim()), grid.half_width());
        if (!h.bounded) rep.warnings.push_back("coefficients not bounded on the domain (" + h.label + ")");
        if (!h.far_field_decreasing)
            rep.warnings.push_back("far-field symbol bound is not decreasing (" + h.label + ")");
        rep.metrics["M_r"] = h.M_r;
    }

    std::size_t steps;
    double dt;
    const double stable = op.stable_dt(1.0);
    if (cfg.dt > 0.0) {
        const double ratio = T / cfg.dt;
        steps = static_cast<std::size_t>(std::llround(ratio));
        if (steps == 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
            steps = static_cast<std::size_t>(std::ceil(ratio));
        dt = T / static_cast<double>(steps);
        if (dt > stable * (1.0 + 1e-12))
            throw PreconditionError("dt = " + format_double(dt) + " exceeds the stable step " +
                                    format_double(stable));
    } else {
        const double target = op.stable_dt(cfg.safety);
        steps = std::isfinite(target)
                    ? static_cast<std::size_t>(std::ceil(T / target * (1.0 - 1e-12)))
                    : 1;
        steps = std::max<std::size_t>(steps, 1);
        dt = T / static_cast<double>(steps);
    }
    rep.dt = dt;
    rep.steps = steps;
    rep.argmax_histogram.assign(us.size(), 0);

    SolveResult res{f, {}, {}, {}};
    rep.sup_norm_history.push_back(f.sup_norm());
    if (cfg.trace_every > 0) {
        res.trace.push_back(f);
        res.trace_times.push_back(0.0);
    }
    std::vector<std::size_t> argmax;
    for (std::size_t k = 0; k < steps; ++k) {
        try {
            res.u = op.step(res.u, dt, &argmax);
        } catch (const NumericalError& e) {
            throw NumericalError("step " + std::to_string(k + 1) + ": " + e.what());
        }
        for (auto a : argmax) ++rep.argmax_histogram[a];
        rep.sup_norm_history.push_back(res.u.sup_norm());
        if (cfg.trace_every > 0 &&
            ((k + 1) % static_cast<std::size_t>(cfg.trace_every) == 0 || k + 1 == steps)) {
            res.trace.push_back(res.u);
            res.trace_times.push_back(static_cast<double>(k + 1) * dt);
        }
    }
    rep.final_argmax = argmax;
    res.report = std::move(rep);
    return res;
}

SolveResult solve(const TestFunction& f, const Grid& grid, const UncertaintySet& us,
                  SchemeConfig cfg) {
    if (f.dim() != grid.dim()) throw ValidationError("solve: dimension mismatch");
    if (cfg.extension.kind == Extension::InitialCondition && !cfg.extension.outside)
        cfg.extension.outside = f.value_fn();
    return solve(Field::sample(grid, f.value_fn()), us, cfg);
}

std::vector<ModulusRow> time_modulus(const std::vector<Field>& trace,
                                     const std::vector<double>& times) {
    if (trace.size() != times.size()) throw ValidationError("time_modulus: size mismatch");
    std::vector<ModulusRow> rows;
    if (trace.size() < 2) return rows;
    const double base = times[1] - times[0];
    // only lags that are whole multiples of the base spacing
    for (std::size_t lag = trace.size() - 1; lag >= 1; --lag) {
        double m = 0.0;
        bool any = false;
        for (std::size_t s = 0; s + lag < trace.size(); ++s) {
            const double gap = times[s + lag] - times[s];
            if (std::abs(gap - static_cast<double>(lag) * base) > 1e-9 * base) continue;
            any = true;
            const auto a = trace[s].values();
            const auto b = trace[s + lag].values();
            for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
        }
        if (any) rows.push_back({static_cast<double>(lag) * base, m});
    }
    return rows;
}

} // namespace levyhjb

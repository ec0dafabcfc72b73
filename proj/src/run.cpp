#include "levyhjb/oracle.hpp"
#include "levyhjb/problem.hpp"
#include "levyhjb/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>

namespace levyhjb {

namespace {

std::size_t alpha_index(const ProblemSpec& spec) {
    if (spec.run.alpha.empty()) return 0;
    for (std::size_t i = 0; i < spec.alphas.size(); ++i)
        if (spec.alphas[i].name == spec.run.alpha) return i;
    throw ValidationError("unknown alpha '" + spec.run.alpha + "'");
}

Vector run_point(const ProblemSpec& spec) {
    if (spec.run.x.empty()) return Vector::Zero(spec.dim);
    return Eigen::Map<const Vector>(spec.run.x.data(), spec.dim);
}

struct Outputs {
    std::string dir;
    RunReport report;
    std::optional<Field> field;
    std::optional<Table> table;
};

int mode_solve(const ProblemSpec& spec, Outputs& o) {
    const UncertaintySet us = build_uncertainty(spec);
    const TestFunction f = build_initial(spec);
    const Grid grid = build_grid(spec);
    SchemeConfig cfg = build_scheme(spec);
    cfg.diagnostics = true;
    auto res = solve(f, grid, us, cfg);
    o.report = res.report;
    o.report.mode = "solve";
    o.field = res.u;
    if (!res.trace.empty()) {
        const auto mod = time_modulus(res.trace, res.trace_times);
        bool mono = true;
        for (std::size_t i = 1; i < mod.size(); ++i)
            if (mod[i].modulus > mod[i - 1].modulus * (1.0 + 1e-12)) mono = false;
        o.report.info["time_modulus_nonincreasing"] = mono ? "true" : "false";
        if (!mod.empty()) o.report.metrics["time_modulus_smallest_lag"] = mod.back().modulus;
    }
    if (spec.run.reference != "gheat") return 0;

    if (spec.dim != 1 || spec.initial.kind != "quadratic")
        throw ValidationError("gheat reference needs d = 1 and quadratic initial data");
    double qmin = INFINITY, qmax = -INFINITY;
    for (const auto& fld : us.fields()) {
        if (!fld.is_constant()) throw ValidationError("gheat reference needs constant fields");
        const auto& t = fld.constant_triplet();
        if (!t.nu().empty() || t.b().norm() != 0.0)
            throw ValidationError("gheat reference needs pure-diffusion fields");
        qmin = std::min(qmin, t.Q()(0, 0));
        qmax = std::max(qmax, t.Q()(0, 0));
    }
    const auto kind = spec.initial.sign >= 0.0 ? GHeatKind::ConvexQuadratic : GHeatKind::ConcaveQuadratic;
    const double scale = spec.initial.scale;
    Table t{{"x0", "u", "closed_form", "abs_error"}, {}};
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.within(i, spec.run.compare_radius)) continue;
        const double x = grid.point(i)[0] - (spec.initial.center.empty() ? 0.0 : spec.initial.center[0]);
        // scale * (±x^2) evolves as the closed form with Q scaled by `scale`
        const double cf = scale * gheat_closed_form(kind, std::sqrt(qmin), std::sqrt(qmax),
                                                    spec.scheme.final_time, x);
        const double e = std::abs(res.u[i] - cf);
        err = std::max(err, e);
        t.add({grid.point(i)[0], res.u[i], cf, e});
    }
    o.table = t;
    o.report.metrics["gheat_max_error"] = err;
    if (spec.run.tolerance > 0.0 && err > spec.run.tolerance) {
        o.report.passed = false;
        return 2;
    }
    return 0;
}

int mode_simulate(const ProblemSpec& spec, Outputs& o) {
    const UncertaintySet us = build_uncertainty(spec);
    const TestFunction f = build_initial(spec);
    const SimConfig sim = build_sim(spec);
    const Vector x = run_point(spec);
    Table t{{"alpha", "value", "std_error", "paths"}, {}};
    for (std::size_t a = 0; a < us.size(); ++a) {
        if (!us[a].is_constant())
            o.report.warnings.push_back("alpha " + us[a].label() + " frozen at the start point");
        const auto est = estimate_semigroup_single(us.at(a, x), f.value_fn(), x, sim);
        t.add({static_cast<double>(a), est.value, est.std_error, static_cast<double>(est.N)});
        o.report.metrics["value." + us[a].label()] = est.value;
    }
    o.report.final_time = sim.horizon;
    o.report.steps = sim.steps();
    o.table = t;
    return 0;
}

int mode_dp(const ProblemSpec& spec, Outputs& o) {
    const UncertaintySet us = build_uncertainty(spec);
    const TestFunction f = build_initial(spec);
    const Grid grid = build_grid(spec);
    SimConfig sim = build_sim(spec);
    const auto res = dp_sup_semigroup(us, f.value_fn(), grid, sim);
    o.field = res.value;
    o.report.dt = res.delta;
    o.report.steps = res.steps;
    o.report.final_time = sim.horizon;
    o.report.final_argmax = res.final_argmax;
    for (std::size_t a = 0; a < res.methods.size(); ++a)
        o.report.info["expectation." + us[a].label()] = res.methods[a];
    if (res.delta_adjusted)
        o.report.warnings.push_back("delta reduced to " + format_double(res.delta) + " to divide the horizon");
    if (spec.run.tolerance > 0.0) {
        SchemeConfig cfg = build_scheme(spec);
        cfg.final_time = sim.horizon;
        const auto pde = solve(f, grid, us, cfg);
        double diff = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (grid.within(i, spec.run.compare_radius))
                diff = std::max(diff, std::abs(pde.u[i] - res.value[i]));
        o.report.metrics["pde_max_diff"] = diff;
        if (diff > spec.run.tolerance) {
            o.report.passed = false;
            return 2;
        }
    }
    return 0;
}

int mode_max_ineq(const ProblemSpec& spec, Outputs& o) {
    const UncertaintySet us = build_uncertainty(spec);
    const SimConfig sim = build_sim(spec);
    const Vector x = run_point(spec);
    const std::vector<double> times = spec.run.times.empty() ? std::vector<double>{sim.horizon} : spec.run.times;
    const std::vector<double> radii = spec.run.radii.empty() ? std::vector<double>{0.5, 1.0, 2.0} : spec.run.radii;
    MaxIneqOptions mopts;
    mopts.probes = spec.run.probes;
    Table t{{"t", "r", "probability", "wilson_upper", "symbol_sup", "bound", "pass"}, {}};
    bool pass = true;
    for (double time : times) {
        const auto res = maximal_inequality_check(us, x, time, radii, sim, mopts);
        o.report.metrics["c"] = res.c;
        for (const auto& r : res.rows)
            t.add({time, r.r, r.probability, r.upper, r.symbol_sup, r.bound, r.pass ? 1.0 : 0.0});
        pass = pass && res.pass;
    }
    o.table = t;
    o.report.passed = pass;
    return pass ? 0 : 2;
}

int mode_dynkin(const ProblemSpec& spec, Outputs& o) {
    const UncertaintySet us = build_uncertainty(spec);
    const TestFunction f = build_initial(spec);
    const SimConfig sim = build_sim(spec);
    const Vector x = run_point(spec);
    Table t{{"alpha", "residual", "std_error", "bias_bound", "exit_fraction", "pass"}, {}};
    bool pass = true;
    for (std::size_t a = 0; a < us.size(); ++a) {
        if (!spec.run.alpha.empty() && a != alpha_index(spec)) continue;
        const auto r = dynkin_residual(us.at(a, x), f, x, sim.horizon, spec.run.radius, sim);
        const bool ok = std::abs(r.residual.value) <=
                        3.0 * r.residual.std_error + r.bias_bound + spec.run.tolerance;
        pass = pass && ok;
        t.add({static_cast<double>(a), r.residual.value, r.residual.std_error, r.bias_bound,
               r.exit_fraction, ok ? 1.0 : 0.0});
    }
    o.table = t;
    o.report.passed = pass;
    return pass ? 0 : 2;
}

int mode_oracle(const ProblemSpec& spec, Outputs& o) {
    const UncertaintySet us = build_uncertainty(spec);
    const std::size_t a = alpha_index(spec);
    if (!us[a].is_constant()) throw PreconditionError("oracle-compare needs a constant field");
    const TestFunction f = build_initial(spec);
    const Grid grid = build_grid(spec);
    const SchemeConfig cfg = build_scheme(spec);
    const UncertaintySet single({us[a]}, us.trunc());
    auto res = solve(f, grid, single, cfg);
    const auto orc = fft_semigroup(us[a].constant_triplet(), Field::sample(grid, f.value_fn()), cfg.final_time);
    o.report = res.report;
    o.report.mode = "oracle-compare";
    o.field = res.u;
    Table t{{grid.dim() == 1 ? "x0" : "index", "solver", "oracle", "abs_error"}, {}};
    double err = 0.0, err_in = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double e = std::abs(res.u[i] - orc.u[i]);
        err = std::max(err, e);
        if (grid.within(i, spec.run.compare_radius)) err_in = std::max(err_in, e);
        t.add({grid.dim() == 1 ? grid.point(i)[0] : static_cast<double>(i), res.u[i], orc.u[i], e});
    }
    o.table = t;
    o.report.metrics["max_error"] = err;
    o.report.metrics["max_error_compare_radius"] = err_in;
    o.report.metrics["oracle_imag_residue"] = orc.imag_residue;
    if (orc.aliasing) o.report.warnings.push_back("oracle imaginary residue suggests aliasing");
    if (spec.run.tolerance > 0.0 && err > spec.run.tolerance) {
        o.report.passed = false;
        return 2;
    }
    return 0;
}

int mode_symbols(const ProblemSpec& spec, Outputs& o) {
    const UncertaintySet us = build_uncertainty(spec);
    const Vector x = run_point(spec);
    const std::vector<double> radii =
        spec.run.radii.empty() ? std::vector<double>{1.0, 0.1, 0.01} : spec.run.radii;
    o.report.metrics["M_r"] = bound_M_r(us, x, spec.run.radius, spec.run.probes);
    o.report.metrics["truncation_constant"] = truncation_kernel_constant(us.trunc());
    std::vector<double> decay(radii.size(), NAN);
    if (us.all_constant()) {
        const auto tr = tightness_report(us);
        o.report.info["small_jump_limit_ok"] = tr.small_jump_limit_ok ? "true" : "false";
        o.report.info["large_jump_limit_ok"] = tr.large_jump_limit_ok ? "true" : "false";
        if (tr.small_jump_limit_ok && tr.large_jump_limit_ok) {
            const auto dt = symbol_decay_check(us, radii);
            o.report.info["decay_nonincreasing"] = dt.nonincreasing ? "true" : "false";
            for (const auto& row : dt.rows)
                for (std::size_t j = 0; j < radii.size(); ++j)
                    if (radii[j] == row.radius) decay[j] = row.sup_symbol;
        }
    }
    const auto h = hypothesis_report(us, x, spec.run.radius, spec.run.probes);
    o.report.info["hypothesis_check"] = h.label;
    o.report.info["bounded"] = h.bounded ? "true" : "false";
    o.report.metrics["drift_diffusion_modulus"] = h.drift_diffusion_modulus;
    o.report.metrics["jump_integral_modulus"] = h.jump_integral_modulus;
    Table t{{"radius", "symbol_sup_bound", "decay_sup"}, {}};
    for (std::size_t j = 0; j < radii.size(); ++j)
        t.add({radii[j], symbol_sup_bound(us, x, radii[j], spec.run.probes), decay[j]});
    o.table = t;
    return 0;
}

} // namespace

int run(const ProblemSpec& input, const RunOptions& options) {
    RunReport partial;
    partial.mode = options.mode ? *options.mode : input.run.mode;
    try {
        ProblemSpec spec = input;
        if (options.seed) spec.run.seed = *options.seed;
        if (options.mode) {
            if (std::find(kRunModes.begin(), kRunModes.end(), *options.mode) == kRunModes.end())
                throw ValidationError("unknown mode '" + *options.mode + "'");
            spec.run.mode = *options.mode;
        }
        std::filesystem::create_directories(options.out_dir);
        Outputs o;
        o.dir = options.out_dir;
        for (const auto& a : spec.alphas) o.report.labels.push_back(a.name);
        o.report.mode = spec.run.mode;
        o.report.info["seed"] = std::to_string(spec.run.seed);

        int code = 0;
        const auto& m = spec.run.mode;
        if (m == "solve") code = mode_solve(spec, o);
        else if (m == "simulate") code = mode_simulate(spec, o);
        else if (m == "dp") code = mode_dp(spec, o);
        else if (m == "verify-max-ineq") code = mode_max_ineq(spec, o);
        else if (m == "verify-dynkin") code = mode_dynkin(spec, o);
        else if (m == "oracle-compare") code = mode_oracle(spec, o);
        else code = mode_symbols(spec, o);

        o.report.info["seed"] = std::to_string(spec.run.seed);
        const std::filesystem::path dir(options.out_dir);
        write_text((dir / "report.json").string(), o.report.to_json());
        if (o.field) write_text((dir / "field.csv").string(), field_csv(*o.field));
        if (o.table) write_text((dir / "table.csv").string(), table_csv(*o.table));
        if (!options.quiet) {
            std::cout << m << ": " << (code == 0 ? "ok" : "verification failed");
            for (const auto& [k, v] : o.report.metrics) std::cout << "  " << k << "=" << format_double(v);
            std::cout << "\n";
            for (const auto& w : o.report.warnings) std::cout << "warning: " << w << "\n";
        }
        return code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        partial.passed = false;
        partial.info["error"] = e.what();
        try {
            std::filesystem::create_directories(options.out_dir);
            write_text((std::filesystem::path(options.out_dir) / "report.json").string(), partial.to_json());
        } catch (const std::exception&) {
        }
        return 1;
    }
}

} // namespace levyhjb

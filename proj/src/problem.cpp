#include "levyhjb/problem.hpp"
#include "levyhjb/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace levyhjb {

ParseError::ParseError(int line, std::string field, const std::string& message)
    : ValidationError("line " + std::to_string(line) + ", field '" + field + "': " + message),
      line_(line), field_(std::move(field)) {}

const std::vector<std::string> kRunModes{"solve",           "simulate",      "dp",
                                         "verify-max-ineq", "verify-dynkin", "oracle-compare",
                                         "symbol-report"};

namespace {

struct Entry {
    std::string key;
    std::string value;
    int line;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;
};

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_top(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '[') ++depth;
        if (c == ']') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

double number(const Entry& e, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
        throw ParseError(e.line, e.key, "expected a finite number, got '" + t + "'");
    return v;
}

std::string inner(const Entry& e, const std::string& text) {
    const std::string t = trim(text);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        throw ParseError(e.line, e.key, "expected a bracketed list, got '" + t + "'");
    return t.substr(1, t.size() - 2);
}

std::vector<double> vector_of(const Entry& e, const std::string& text) {
    const std::string t = trim(text);
    if (!t.empty() && t.front() != '[') return {number(e, t)};
    std::vector<double> v;
    for (const auto& p : split_top(inner(e, t))) v.push_back(number(e, p));
    return v;
}

std::vector<std::vector<double>> matrix_of(const Entry& e, const std::string& text) {
    const std::string t = trim(text);
    if (t.rfind("[[", 0) != 0) return {vector_of(e, t)};
    std::vector<std::vector<double>> m;
    for (const auto& row : split_top(inner(e, t))) m.push_back(vector_of(e, row));
    return m;
}

int integer(const Entry& e) {
    const double v = number(e, e.value);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ParseError(e.line, e.key, "expected an integer");
    return static_cast<int>(v);
}

std::string word(const Entry& e, const std::vector<std::string>& allowed) {
    const std::string v = trim(e.value);
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        throw ParseError(e.line, e.key, "'" + v + "' is not one of: " + list);
    }
    return v;
}

std::vector<Section> sections_of(const std::string& text) {
    std::vector<Section> out;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[' && s.find('=') == std::string::npos) {
            if (s.back() != ']') throw ParseError(line, s, "unterminated section header");
            out.push_back({trim(s.substr(1, s.size() - 2)), line, {}});
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError(line, s, "expected 'key = value'");
        if (out.empty()) throw ParseError(line, trim(s.substr(0, eq)), "key outside of any section");
        out.back().entries.push_back({trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line});
    }
    return out;
}

void check_unique(const Section& sec, const std::set<std::string>& repeatable) {
    std::set<std::string> seen;
    for (const auto& e : sec.entries)
        if (!repeatable.count(e.key) && !seen.insert(e.key).second)
            throw ParseError(e.line, e.key, "duplicate key in [" + sec.name + "]");
}

[[noreturn]] void unknown(const Section& sec, const Entry& e) {
    throw ParseError(e.line, e.key, "unknown key in [" + sec.name + "]");
}

void parse_alpha(const Section& sec, AlphaSpec& a) {
    check_unique(sec, {"atom", "stable"});
    for (const auto& e : sec.entries) {
        if (e.key == "form") {
            const auto w = word(e, {"constant", "affine-drift", "sde"});
            a.form = w == "constant" ? FieldForm::Constant
                     : w == "sde"    ? FieldForm::Sde
                                     : FieldForm::AffineDrift;
        } else if (e.key == "b") {
            a.b = vector_of(e, e.value);
        } else if (e.key == "Q") {
            a.Q = matrix_of(e, e.value);
        } else if (e.key == "atom") {
            const auto parts = split_top(e.value);
            const std::string entry = "atom #" + std::to_string(a.atoms.size() + 1);
            if (parts.size() != 2)
                throw ParseError(e.line, e.key, entry + ": expected '[location], mass'");
            AtomSpec at{vector_of(e, parts[0]), number(e, parts[1])};
            if (!(at.mass > 0.0))
                throw ParseError(e.line, e.key, entry + " in [" + sec.name + "]: mass must be positive");
            if (std::all_of(at.location.begin(), at.location.end(), [](double v) { return v == 0.0; }))
                throw ParseError(e.line, e.key, entry + " in [" + sec.name + "]: location must be nonzero");
            a.atoms.push_back(std::move(at));
        } else if (e.key == "stable") {
            const auto parts = split_top(e.value);
            const std::string entry = "stable #" + std::to_string(a.stables.size() + 1);
            if (parts.size() < 2 || parts.size() > 4)
                throw ParseError(e.line, e.key, entry + ": expected 'index, scale[, tempering[, [weights]]]'");
            StableSpec st;
            st.index = number(e, parts[0]);
            st.scale = number(e, parts[1]);
            if (parts.size() > 2) st.tempering = number(e, parts[2]);
            if (parts.size() > 3) st.weights = vector_of(e, parts[3]);
            if (!(st.index > 0.0 && st.index < 2.0))
                throw ParseError(e.line, e.key, entry + ": index must lie in (0, 2)");
            if (!(st.scale > 0.0) || st.tempering < 0.0)
                throw ParseError(e.line, e.key, entry + ": need scale > 0 and tempering >= 0");
            for (double w : st.weights)
                if (w < 0.0) throw ParseError(e.line, e.key, entry + ": weights must be >= 0");
            a.stables.push_back(std::move(st));
        } else if (e.key == "drift_matrix") {
            a.drift_matrix = matrix_of(e, e.value);
        } else if (e.key == "sigma") {
            a.sigma = matrix_of(e, e.value);
        } else if (e.key == "sigma_slope") {
            a.sigma_slope = number(e, e.value);
        } else if (e.key == "sigma_profile") {
            const auto w = word(e, {"constant", "linear", "sqrt", "tanh"});
            a.sigma_profile = w == "constant" ? SigmaProfile::Constant
                              : w == "linear" ? SigmaProfile::Linear
                              : w == "sqrt"   ? SigmaProfile::Sqrt
                                              : SigmaProfile::Tanh;
        } else if (e.key == "base_cutoff") {
            a.base_cutoff = number(e, e.value);
            if (!(a.base_cutoff > 0.0)) throw ParseError(e.line, e.key, "cutoff must be positive");
        } else if (e.key == "base_dim") {
            a.base_dim = integer(e);
        } else {
            unknown(sec, e);
        }
    }
}

std::string fmt(double v) { return format_double(v); }

std::string fmt(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + "]";
}

std::string fmt(const std::vector<std::vector<double>>& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.size(); ++i) s += (i ? ", " : "") + fmt(m[i]);
    return s + "]";
}

Matrix to_matrix(const std::vector<std::vector<double>>& m, int rows, int cols, const std::string& what) {
    if (m.empty()) return Matrix::Zero(rows, cols);
    if (static_cast<int>(m.size()) != rows)
        throw ValidationError(what + " must have " + std::to_string(rows) + " rows");
    Matrix M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(m[i].size()) != cols)
            throw ValidationError(what + " must have " + std::to_string(cols) + " columns");
        for (int j = 0; j < cols; ++j) M(i, j) = m[i][j];
    }
    return M;
}

Vector to_vector(const std::vector<double>& v, int n, const std::string& what) {
    if (v.empty()) return Vector::Zero(n);
    if (static_cast<int>(v.size()) != n)
        throw ValidationError(what + " must have length " + std::to_string(n));
    return Eigen::Map<const Vector>(v.data(), n);
}

double profile(SigmaProfile p, double r) {
    switch (p) {
    case SigmaProfile::Constant: return 0.0;
    case SigmaProfile::Linear: return r;
    case SigmaProfile::Sqrt: return std::sqrt(1.0 + r * r) - 1.0;
    case SigmaProfile::Tanh: return std::tanh(r);
    }
    return 0.0;
}

} // namespace

LevyTriplet build_base_triplet(const AlphaSpec& a, int dim, double cutoff) {
    const Vector b = to_vector(a.b, dim, "b");
    const Matrix Q = to_matrix(a.Q, dim, dim, "Q");
    LevyMeasure nu = LevyMeasure::zero(dim);
    if (!a.atoms.empty()) {
        std::vector<Atom> atoms;
        for (const auto& at : a.atoms) atoms.push_back({to_vector(at.location, dim, "atom location"), at.mass});
        nu = nu + LevyMeasure::atoms(dim, std::move(atoms));
    }
    for (const auto& st : a.stables) {
        StableLikeParams p;
        p.index = st.index;
        p.scale = st.scale;
        p.tempering = st.tempering;
        if (dim == 1) {
            const double wp = st.weights.size() > 0 ? st.weights[0] : 1.0;
            const double wm = st.weights.size() > 1 ? st.weights[1] : 1.0;
            if (st.weights.size() > 2) throw ValidationError("stable weights in d = 1 are (w+, w-)");
            p = StableLikeParams::one_dimensional(st.index, st.scale, wp, wm, st.tempering);
        } else if (dim == 2) {
            const std::vector<double> w = st.weights.empty() ? std::vector<double>(8, 1.0 / 8.0) : st.weights;
            for (std::size_t k = 0; k < w.size(); ++k) {
                const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(w.size());
                Vector dir(2);
                dir << std::cos(th), std::sin(th);
                if (w[k] > 0.0) p.directions.push_back({dir, w[k]});
            }
        } else {
            throw ValidationError("stable measures need d <= 2");
        }
        nu = nu + LevyMeasure::stable_like(dim, p);
    }
    return LevyTriplet(b, Q, std::move(nu), Truncation(cutoff));
}

UncertaintySet build_uncertainty(const ProblemSpec& spec) {
    std::vector<CoefficientField> fields;
    const int d = spec.dim;
    for (const auto& a : spec.alphas) {
        switch (a.form) {
        case FieldForm::Constant:
            fields.push_back(CoefficientField::constant(a.name, build_base_triplet(a, d, spec.cutoff)));
            break;
        case FieldForm::AffineDrift: {
            const LevyTriplet base = build_base_triplet(a, d, spec.cutoff);
            const Matrix A = to_matrix(a.drift_matrix, d, d, "drift_matrix");
            fields.push_back(CoefficientField::from_function(a.name, d, [base, A](const Vector& x) {
                return LevyTriplet(Vector(base.b() + A * x), base.Q(), base.nu(), base.trunc());
            }));
            break;
        }
        case FieldForm::Sde: {
            const int k = a.base_dim > 0 ? a.base_dim : d;
            const LevyTriplet base = build_base_triplet(a, k, a.base_cutoff);
            const Matrix S = to_matrix(a.sigma, d, k, "sigma");
            if (a.sigma.empty()) throw ValidationError("sde form needs sigma");
            const double slope = a.sigma_slope;
            const SigmaProfile prof = a.sigma_profile;
            fields.push_back(CoefficientField::sde(a.name, d, base,
                                                   [S, slope, prof](const Vector& x) {
                                                       return Matrix(S * (1.0 + slope * profile(prof, x.norm())));
                                                   },
                                                   Truncation(spec.cutoff)));
            break;
        }
        }
    }
    return UncertaintySet(std::move(fields), Truncation(spec.cutoff));
}

TestFunction build_initial(const ProblemSpec& spec) {
    const auto& in = spec.initial;
    const int d = spec.dim;
    const Vector center = to_vector(in.center, d, "center");
    if (in.kind == "quadratic") return TestFunction::quadratic(d, in.sign, in.scale, center);
    if (in.kind == "cosine") {
        const Vector k = in.k.empty() ? Vector::Ones(d) : to_vector(in.k, d, "k");
        return TestFunction::cosine(k, in.phase, in.amplitude);
    }
    if (in.kind == "gaussian-bump") return TestFunction::gaussian_bump(center, in.width, in.amplitude);
    if (in.kind == "mollifier") return TestFunction::mollifier(center, in.width);
    if (in.kind == "constant") return TestFunction::constant(d, in.value);
    if (in.kind == "tabulated") {
        if (d != 1) throw ValidationError("tabulated initial data needs d = 1");
        const auto xs = in.points;
        const auto ys = in.values;
        if (xs.size() < 2 || xs.size() != ys.size())
            throw ValidationError("tabulated initial data needs matching points/values (>= 2)");
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (!(xs[i] > xs[i - 1])) throw ValidationError("tabulated points must increase");
        auto locate = [xs](double x) {
            const auto it = std::upper_bound(xs.begin(), xs.end(), x);
            return std::clamp<std::size_t>(it - xs.begin(), 1, xs.size() - 1) - 1;
        };
        auto value = [xs, ys, locate](const Vector& x) {
            const double t = std::clamp(x[0], xs.front(), xs.back());
            const std::size_t i = locate(t);
            const double s = (t - xs[i]) / (xs[i + 1] - xs[i]);
            return (1.0 - s) * ys[i] + s * ys[i + 1];
        };
        auto grad = [xs, ys, locate](const Vector& x) {
            if (x[0] < xs.front() || x[0] > xs.back()) return vec1(0.0);
            const std::size_t i = locate(x[0]);
            return vec1((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
        };
        FunctionBounds bnd;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            bnd.value = std::max(bnd.value, std::abs(ys[i]));
            if (i + 1 < ys.size())
                bnd.gradient = std::max(bnd.gradient, std::abs((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])));
        }
        return TestFunction(1, value, grad, [](const Vector&) { return mat1(0.0); }, bnd, "tabulated");
    }
    throw ValidationError("unknown initial kind '" + in.kind + "'");
}

Grid build_grid(const ProblemSpec& spec) { return Grid(spec.dim, spec.grid.half_width, spec.grid.points); }

SchemeConfig build_scheme(const ProblemSpec& spec) {
    SchemeConfig cfg;
    cfg.final_time = spec.scheme.final_time;
    cfg.dt = spec.scheme.dt;
    cfg.safety = spec.scheme.safety;
    cfg.trace_every = spec.scheme.trace_every;
    cfg.discretization.eps_ratio = spec.scheme.eps_ratio;
    cfg.discretization.drift = spec.scheme.drift == "upwind"    ? DriftDifferencing::Upwind
                               : spec.scheme.drift == "central" ? DriftDifferencing::Central
                                                                : DriftDifferencing::Adaptive;
    if (spec.scheme.extension == "initial-condition") {
        const TestFunction f = build_initial(spec);
        cfg.extension = ExtensionPolicy::initial_condition(f.value_fn());
    }
    return cfg;
}

SimConfig build_sim(const ProblemSpec& spec) {
    SimConfig s;
    s.delta = spec.run.delta;
    s.horizon = spec.run.horizon > 0.0 ? spec.run.horizon : spec.scheme.final_time;
    s.paths = spec.run.paths;
    s.seed = spec.run.seed;
    s.eps_ratio = spec.scheme.eps_ratio;
    return s;
}

ProblemSpec parse_problem(const std::string& text) {
    ProblemSpec spec;
    const auto secs = sections_of(text);
    const Section* uncertainty = nullptr;
    const Section* initial = nullptr;
    const Section* grid = nullptr;
    const Section* scheme = nullptr;
    const Section* runs = nullptr;
    std::vector<const Section*> alphas;
    std::set<std::string> names;
    for (const auto& s : secs) {
        auto once = [&](const Section*& slot) {
            if (slot) throw ParseError(s.line, s.name, "duplicate section");
            slot = &s;
        };
        if (s.name == "uncertainty") once(uncertainty);
        else if (s.name == "initial") once(initial);
        else if (s.name == "grid") once(grid);
        else if (s.name == "scheme") once(scheme);
        else if (s.name == "run") once(runs);
        else if (s.name.rfind("alpha.", 0) == 0 && s.name.size() > 6) {
            if (!names.insert(s.name.substr(6)).second) throw ParseError(s.line, s.name, "duplicate alpha name");
            alphas.push_back(&s);
        } else
            throw ParseError(s.line, s.name, "unknown section");
    }
    auto required = [](const Section* s, const std::string& name) {
        if (!s) throw ParseError(0, name, "missing required section [" + name + "]");
    };
    required(uncertainty, "uncertainty");
    required(initial, "initial");
    required(grid, "grid");
    required(scheme, "scheme");
    required(runs, "run");
    if (alphas.empty()) throw ParseError(0, "alpha", "at least one [alpha.<name>] section is required");

    check_unique(*uncertainty, {});
    bool has_dim = false;
    for (const auto& e : uncertainty->entries) {
        if (e.key == "dim") {
            spec.dim = integer(e);
            has_dim = true;
            if (spec.dim < 1 || spec.dim > 2) throw ParseError(e.line, e.key, "dimension must be 1 or 2");
        } else if (e.key == "cutoff") {
            spec.cutoff = number(e, e.value);
            if (!(spec.cutoff > 0.0)) throw ParseError(e.line, e.key, "cutoff must be positive");
        } else {
            unknown(*uncertainty, e);
        }
    }
    if (!has_dim) throw ParseError(uncertainty->line, "dim", "missing required field");

    for (const auto* s : alphas) {
        AlphaSpec a;
        a.name = s->name.substr(6);
        parse_alpha(*s, a);
        spec.alphas.push_back(std::move(a));
    }

    check_unique(*initial, {});
    for (const auto& e : initial->entries) {
        auto& in = spec.initial;
        if (e.key == "kind")
            in.kind = word(e, {"quadratic", "cosine", "gaussian-bump", "mollifier", "constant", "tabulated"});
        else if (e.key == "sign") in.sign = number(e, e.value);
        else if (e.key == "scale") in.scale = number(e, e.value);
        else if (e.key == "amplitude") in.amplitude = number(e, e.value);
        else if (e.key == "width") {
            in.width = number(e, e.value);
            if (!(in.width > 0.0)) throw ParseError(e.line, e.key, "width must be positive");
        } else if (e.key == "phase") in.phase = number(e, e.value);
        else if (e.key == "value") in.value = number(e, e.value);
        else if (e.key == "center") in.center = vector_of(e, e.value);
        else if (e.key == "k") in.k = vector_of(e, e.value);
        else if (e.key == "points") in.points = vector_of(e, e.value);
        else if (e.key == "values") in.values = vector_of(e, e.value);
        else unknown(*initial, e);
    }
    if (spec.initial.kind.empty()) throw ParseError(initial->line, "kind", "missing required field");

    check_unique(*grid, {});
    for (const auto& e : grid->entries) {
        if (e.key == "half_width") spec.grid.half_width = number(e, e.value);
        else if (e.key == "points") spec.grid.points = integer(e);
        else unknown(*grid, e);
    }
    if (!(spec.grid.half_width > 0.0)) throw ParseError(grid->line, "half_width", "missing or non-positive");
    if (spec.grid.points < 3) throw ParseError(grid->line, "points", "missing or fewer than 3");

    check_unique(*scheme, {});
    for (const auto& e : scheme->entries) {
        auto& sc = spec.scheme;
        if (e.key == "final_time") sc.final_time = number(e, e.value);
        else if (e.key == "dt") sc.dt = number(e, e.value);
        else if (e.key == "safety") sc.safety = number(e, e.value);
        else if (e.key == "eps_ratio") sc.eps_ratio = number(e, e.value);
        else if (e.key == "extension") sc.extension = word(e, {"constant-boundary", "initial-condition"});
        else if (e.key == "drift") sc.drift = word(e, {"adaptive", "upwind", "central"});
        else if (e.key == "trace_every") sc.trace_every = integer(e);
        else unknown(*scheme, e);
        if (e.key == "safety" && !(sc.safety > 0.0 && sc.safety <= 1.0))
            throw ParseError(e.line, e.key, "safety must lie in (0, 1]");
        if (e.key == "eps_ratio" && !(sc.eps_ratio > 0.0 && sc.eps_ratio <= 1.0))
            throw ParseError(e.line, e.key, "eps_ratio must lie in (0, 1]");
        if (e.key == "dt" && sc.dt < 0.0) throw ParseError(e.line, e.key, "dt must be >= 0");
        if (e.key == "trace_every" && sc.trace_every < 0) throw ParseError(e.line, e.key, "must be >= 0");
    }
    if (!(spec.scheme.final_time > 0.0)) throw ParseError(scheme->line, "final_time", "missing or non-positive");

    check_unique(*runs, {});
    for (const auto& e : runs->entries) {
        auto& r = spec.run;
        if (e.key == "mode") r.mode = word(e, kRunModes);
        else if (e.key == "seed") {
            const std::string& v = e.value;
            const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), r.seed);
            if (ec != std::errc() || end != v.data() + v.size())
                throw ParseError(e.line, e.key, "seed must be a nonnegative integer");
        } else if (e.key == "paths") {
            const int p = integer(e);
            if (p < 1) throw ParseError(e.line, e.key, "need at least one path");
            r.paths = static_cast<std::size_t>(p);
        } else if (e.key == "delta") {
            r.delta = number(e, e.value);
            if (!(r.delta > 0.0)) throw ParseError(e.line, e.key, "delta must be positive");
        } else if (e.key == "horizon") r.horizon = number(e, e.value);
        else if (e.key == "x") r.x = vector_of(e, e.value);
        else if (e.key == "radii") r.radii = vector_of(e, e.value);
        else if (e.key == "times") r.times = vector_of(e, e.value);
        else if (e.key == "radius") r.radius = number(e, e.value);
        else if (e.key == "tolerance") r.tolerance = number(e, e.value);
        else if (e.key == "compare_radius") r.compare_radius = number(e, e.value);
        else if (e.key == "alpha") r.alpha = trim(e.value);
        else if (e.key == "reference") r.reference = word(e, {"gheat", "none"});
        else if (e.key == "probes") r.probes = integer(e);
        else unknown(*runs, e);
    }
    if (spec.run.mode.empty()) throw ParseError(runs->line, "mode", "missing required field");
    for (double v : spec.run.radii)
        if (!(v > 0.0)) throw ParseError(runs->line, "radii", "radii must be positive");
    for (double v : spec.run.times)
        if (!(v > 0.0)) throw ParseError(runs->line, "times", "times must be positive");
    if (!spec.run.alpha.empty() && !names.count(spec.run.alpha))
        throw ParseError(runs->line, "alpha", "no section [alpha." + spec.run.alpha + "]");

    // module-level validation, reported against the section that produced it
    for (std::size_t i = 0; i < spec.alphas.size(); ++i) {
        try {
            ProblemSpec one = spec;
            one.alphas = {spec.alphas[i]};
            build_uncertainty(one);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(alphas[i]->line, alphas[i]->name, e.what());
        }
    }
    try {
        build_initial(spec);
    } catch (const Error& e) {
        throw ParseError(initial->line, "initial", e.what());
    }
    try {
        build_grid(spec);
    } catch (const Error& e) {
        throw ParseError(grid->line, "grid", e.what());
    }
    if (!spec.run.x.empty() && static_cast<int>(spec.run.x.size()) != spec.dim)
        throw ParseError(runs->line, "x", "point must have length dim");
    return spec;
}

ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read problem file " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return parse_problem(s.str());
}

std::string emit_problem(const ProblemSpec& spec) {
    std::ostringstream o;
    o << "[uncertainty]\ndim = " << spec.dim << "\ncutoff = " << fmt(spec.cutoff) << "\n";
    for (const auto& a : spec.alphas) {
        o << "\n[alpha." << a.name << "]\n";
        o << "form = "
          << (a.form == FieldForm::Constant ? "constant" : a.form == FieldForm::Sde ? "sde" : "affine-drift")
          << "\n";
        if (!a.b.empty()) o << "b = " << fmt(a.b) << "\n";
        if (!a.Q.empty()) o << "Q = " << fmt(a.Q) << "\n";
        for (const auto& at : a.atoms) o << "atom = " << fmt(at.location) << ", " << fmt(at.mass) << "\n";
        for (const auto& st : a.stables) {
            o << "stable = " << fmt(st.index) << ", " << fmt(st.scale) << ", " << fmt(st.tempering);
            if (!st.weights.empty()) o << ", " << fmt(st.weights);
            o << "\n";
        }
        if (!a.drift_matrix.empty()) o << "drift_matrix = " << fmt(a.drift_matrix) << "\n";
        if (!a.sigma.empty()) o << "sigma = " << fmt(a.sigma) << "\n";
        if (a.form == FieldForm::Sde) {
            static const char* names[] = {"constant", "linear", "sqrt", "tanh"};
            o << "sigma_slope = " << fmt(a.sigma_slope) << "\n";
            o << "sigma_profile = " << names[static_cast<int>(a.sigma_profile)] << "\n";
            o << "base_cutoff = " << fmt(a.base_cutoff) << "\n";
            o << "base_dim = " << a.base_dim << "\n";
        }
    }
    const auto& in = spec.initial;
    o << "\n[initial]\nkind = " << in.kind << "\nsign = " << fmt(in.sign) << "\nscale = " << fmt(in.scale)
      << "\namplitude = " << fmt(in.amplitude) << "\nwidth = " << fmt(in.width) << "\nphase = " << fmt(in.phase)
      << "\nvalue = " << fmt(in.value) << "\n";
    if (!in.center.empty()) o << "center = " << fmt(in.center) << "\n";
    if (!in.k.empty()) o << "k = " << fmt(in.k) << "\n";
    if (!in.points.empty()) o << "points = " << fmt(in.points) << "\n";
    if (!in.values.empty()) o << "values = " << fmt(in.values) << "\n";
    o << "\n[grid]\nhalf_width = " << fmt(spec.grid.half_width) << "\npoints = " << spec.grid.points << "\n";
    const auto& sc = spec.scheme;
    o << "\n[scheme]\nfinal_time = " << fmt(sc.final_time) << "\ndt = " << fmt(sc.dt) << "\nsafety = "
      << fmt(sc.safety) << "\neps_ratio = " << fmt(sc.eps_ratio) << "\nextension = " << sc.extension
      << "\ndrift = " << sc.drift << "\ntrace_every = " << sc.trace_every << "\n";
    const auto& r = spec.run;
    o << "\n[run]\nmode = " << r.mode << "\nseed = " << r.seed << "\npaths = " << r.paths
      << "\ndelta = " << fmt(r.delta) << "\nhorizon = " << fmt(r.horizon) << "\n";
    if (!r.x.empty()) o << "x = " << fmt(r.x) << "\n";
    if (!r.radii.empty()) o << "radii = " << fmt(r.radii) << "\n";
    if (!r.times.empty()) o << "times = " << fmt(r.times) << "\n";
    o << "radius = " << fmt(r.radius) << "\ntolerance = " << fmt(r.tolerance)
      << "\ncompare_radius = " << fmt(r.compare_radius) << "\n";
    if (!r.alpha.empty()) o << "alpha = " << r.alpha << "\n";
    if (!r.reference.empty()) o << "reference = " << r.reference << "\n";
    o << "probes = " << r.probes << "\n";
    return o.str();
}

} // namespace levyhjb

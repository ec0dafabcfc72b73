#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "levyhjb/hjb.hpp"
#include "levyhjb/oracle.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace levyhjb;

namespace {

CoefficientField field(const std::string& name, double b, double q, std::vector<Atom> atoms = {}) {
    return CoefficientField::constant(
        name, LevyTriplet(vec1(b), mat1(q), atoms.empty() ? LevyMeasure::zero(1) : LevyMeasure::atoms(1, atoms)));
}

UncertaintySet gheat() { return UncertaintySet({field("low", 0.0, 0.25), field("high", 0.0, 1.0)}, Truncation{}); }

UncertaintySet levy() {
    return UncertaintySet({field("levy", 0.2, 0.5, {{vec1(1.0), 0.7}, {vec1(-0.5), 1.1}})}, Truncation{});
}

SchemeConfig config(double T, double dt = 0.0) {
    SchemeConfig c;
    c.final_time = T;
    c.dt = dt;
    return c;
}

double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("cfl_dt examples") {
    const Grid g(1, 1.0, 21);
    CHECK(cfl_dt(UncertaintySet({field("a", 0.0, 1.0)}, Truncation{}), g, 1e-3, 1.0) == doctest::Approx(0.01));
    CHECK(cfl_dt(UncertaintySet({field("z", 0.0, 0.0)}, Truncation{}), g, 1e-3, 1.0, 0.7) == 0.7);
    CHECK(cfl_dt(UncertaintySet({field("j", 0.0, 1.0, {{vec1(2.0), 3.0}})}, Truncation{}), g, 0.5, 1.0) ==
          doctest::Approx(1.0 / 103.0));
}

TEST_CASE("explicit step examples") {
    const Grid g(1, 6.0, 121);
    const SchemeConfig cfg = config(1.0);
    const auto c = Field::constant(g, 2.5);
    const auto stepped = step_explicit(c, gheat(), 0.001, cfg);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(stepped[i] == 2.5);

    const auto sq = Field::sample(g, [](const Vector& x) { return x[0] * x[0]; });
    const double d = 0.002;
    const auto one = step_explicit(sq, UncertaintySet({field("q", 0.0, 2.0)}, Truncation{}), d, cfg);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(one[i] == doctest::Approx(sq[i] + 2.0 * d).epsilon(1e-13));
    const double s1 = 0.5, s2 = 1.0;
    const UncertaintySet two({field("a", 0.0, 2.0 * s1 * s1), field("b", 0.0, 2.0 * s2 * s2)}, Truncation{});
    const auto both = step_explicit(sq, two, d, cfg);
    for (std::size_t i = 1; i + 1 < g.size(); ++i)
        CHECK(both[i] == doctest::Approx(sq[i] + 2.0 * s2 * s2 * d).epsilon(1e-13));
}

TEST_CASE("solve preserves constants exactly") {
    const Grid g(1, 8.0, 129);
    for (const auto& us : {gheat(), levy()}) {
        const auto res = solve(Field::constant(g, 1.0), us, config(0.5));
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(res.u[i] - 1.0) <= 1e-12);
        CHECK(res.report.steps >= 1);
        CHECK(res.report.sup_norm_history.size() == res.report.steps + 1);
    }
}

TEST_CASE("solve reproduces the G-heat closed form") {
    const Grid g(1, 6.0, 241);
    const auto res = solve(TestFunction::quadratic(1), g, gheat(), config(0.25));
    const auto neg = solve(TestFunction::quadratic(1, -1.0), g, gheat(), config(0.25));
    std::size_t low = 0, count = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.within(i, 2.0)) continue;
        const double x = g.point(i)[0];
        CHECK(std::abs(res.u[i] - gheat_closed_form(GHeatKind::ConvexQuadratic, 0.5, 1.0, 0.25, x)) <= 2e-3);
        CHECK(std::abs(neg.u[i] - gheat_closed_form(GHeatKind::ConcaveQuadratic, 0.5, 1.0, 0.25, x)) <= 2e-3);
        ++count;
        if (neg.report.final_argmax[i] == 0) ++low;
    }
    CHECK(low == count);
}

TEST_CASE("solve matches the whole-line two-atom series") {
    const Grid g(1, 8.0, 257);
    const auto res = solve(TestFunction::gaussian_bump(vec1(0.0), 0.5), g, levy(), config(0.5));
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        err = std::max(err, std::abs(res.u[i] - oracle::two_atom_heat(0.2, 0.5, 1.0, 0.7, -0.5, 1.1, 1.0, 0.5, 1.0,
                                                                      0.5, g.point(i)[0])));
    CHECK(err <= 5e-3);
}

TEST_CASE("scheme is monotone and sublinear") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Grid g(1, 4.0, 81);
    for (const auto& us : {gheat(), levy()}) {
        std::vector<double> a(g.size()), b(g.size()), s(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            a[i] = u(rng);
            b[i] = a[i] + 0.5 * (u(rng) + 1.0);
            s[i] = u(rng);
        }
        const Field fa(g, a), fb(g, b), fs(g, s);
        std::vector<double> sum(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) sum[i] = a[i] + s[i];
        const Field fsum(g, sum);
        const SchemeConfig cfg = config(0.2);
        HjbOperator op(us, g, cfg);
        const double dt = op.stable_dt(0.9);
        const auto ra = op.step(fa, dt), rb = op.step(fb, dt), rs = op.step(fs, dt), rsum = op.step(fsum, dt);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(ra[i] <= rb[i] + 1e-10);
            CHECK(rsum[i] <= ra[i] + rs[i] + 1e-10);
        }
        const auto full_a = solve(fa, us, cfg), full_b = solve(fb, us, cfg), full_s = solve(fs, us, cfg);
        const auto full_sum = solve(fsum, us, cfg);
        const double slack = static_cast<double>(full_a.report.steps) * 1e-12;
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(full_a.u[i] <= full_b.u[i] + 1e-12);
            CHECK(full_sum.u[i] <= full_a.u[i] + full_s.u[i] + slack);
        }
    }
}

TEST_CASE("sup norm does not grow under constant-boundary extension") {
    const Grid g(1, 4.0, 81);
    const auto res = solve(TestFunction::cosine(vec1(2.0), 0.3), g, levy(), config(0.3));
    const auto& h = res.report.sup_norm_history;
    for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k] <= h[k - 1] + 1e-15);
}

TEST_CASE("semigroup identity on a matching step") {
    const Grid g(1, 6.0, 121);
    for (const auto& us : {gheat(), levy()}) {
        const double dt = HjbOperator(us, g, config(1.0)).stable_dt(0.9);
        const double step = 0.2 / std::ceil(0.2 / dt);
        const auto f = Field::sample(g, [](const Vector& x) { return std::exp(-x[0] * x[0]); });
        const auto whole = solve(f, us, config(0.4, step));
        const auto half = solve(f, us, config(0.2, step));
        const auto rest = solve(half.u, us, config(0.2, step));
        CHECK(max_abs_diff(whole.u, rest.u) == 0.0);
    }
}

TEST_CASE("spatial homogeneity under a one-cell shift") {
    const Grid g(1, 6.0, 121);
    const double h = g.spacing();
    const auto f = [](double x) { return std::exp(-2.0 * x * x) + 0.3 * std::exp(-(x - 1.0) * (x - 1.0)); };
    const auto a = solve(Field::sample(g, [&](const Vector& x) { return f(x[0]); }), levy(), config(0.3));
    const auto b = solve(Field::sample(g, [&](const Vector& x) { return f(x[0] - h); }), levy(), config(0.3));
    for (std::size_t i = 30; i + 30 < g.size(); ++i) CHECK(std::abs(b.u[i + 1] - a.u[i]) <= 1e-10);
}

TEST_CASE("time modulus is nonincreasing as the lag shrinks") {
    const Grid g(1, 5.0, 101);
    SchemeConfig cfg = config(0.5);
    cfg.trace_every = 5;
    const auto res = solve(TestFunction::gaussian_bump(vec1(0.0), 0.5), g, levy(), cfg);
    const auto table = time_modulus(res.trace, res.trace_times);
    REQUIRE(table.size() >= 3);
    for (std::size_t k = 1; k < table.size(); ++k) {
        CHECK(table[k].lag < table[k - 1].lag);
        CHECK(table[k].modulus <= table[k - 1].modulus * (1.0 + 1e-12));
    }
}

TEST_CASE("initial-condition extension reads the initial function outside") {
    const Grid g(1, 2.0, 41);
    SchemeConfig cfg = config(0.1);
    cfg.extension.kind = Extension::InitialCondition;
    const auto f = TestFunction::constant(1, 2.0);
    const auto res = solve(f, g, levy(), cfg);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(res.u[i] - 2.0) <= 1e-12);
    CHECK_THROWS_AS(solve(Field::constant(g, 2.0), levy(), cfg), PreconditionError);
}

TEST_CASE("stability violations are reported") {
    const Grid g(1, 2.0, 41);
    CHECK_THROWS_AS(solve(Field::constant(g, 0.0), gheat(), config(0.1, 0.05)), PreconditionError);
    const auto f = Field::sample(g, [](const Vector& x) { return std::cos(5.0 * x[0]); });
    HjbOperator op(gheat(), g, config(0.1));
    CHECK_THROWS_AS(op.step(f, 10.0 * op.stable_dt(1.0)), NumericalError);
    const auto huge = Field::sample(g, [](const Vector& x) { return x[0] > 0.0 ? 1e308 : -1e308; });
    try {
        solve(huge, gheat(), config(0.1));
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
    CHECK_THROWS_AS(config(-1.0).validate(), ValidationError);
    SchemeConfig bad = config(1.0);
    bad.safety = 1.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("report records step data and argmax histogram") {
    const Grid g(1, 3.0, 61);
    const auto res = solve(TestFunction::quadratic(1), g, gheat(), config(0.1));
    std::size_t total = 0;
    for (auto c : res.report.argmax_histogram) total += c;
    CHECK(total == res.report.steps * g.size());
    CHECK(res.report.dt * static_cast<double>(res.report.steps) == doctest::Approx(0.1));
    const auto json = res.report.to_json();
    CHECK(json.find("\"schema_version\": 1") != std::string::npos);
}

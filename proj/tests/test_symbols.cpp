#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "levyhjb/symbols.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace levyhjb;

namespace {

LevyTriplet gaussian(double b, double q) { return LevyTriplet(vec1(b), mat1(q), LevyMeasure::zero(1)); }

UncertaintySet single(const LevyTriplet& t) {
    return UncertaintySet({CoefficientField::constant("a", t)}, t.trunc());
}

LevyTriplet random_triplet(std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.05, 1.5);
    std::vector<Atom> atoms;
    const int n = 1 + static_cast<int>(g() % 4);
    for (int k = 0; k < n; ++k) {
        double y = u(g);
        if (std::abs(y) < 1e-3) y = 0.7;
        atoms.push_back({vec1(y), pos(g)});
    }
    LevyMeasure nu = LevyMeasure::atoms(1, atoms);
    if (g() % 2)
        nu = nu + LevyMeasure::stable_like(1, StableLikeParams::one_dimensional(0.3 + 1.4 * pos(g) / 1.5, pos(g),
                                                                                pos(g), pos(g), g() % 2 ? 0.0 : pos(g)));
    return LevyTriplet(vec1(u(g)), mat1(pos(g)), nu);
}

} // namespace

TEST_CASE("symbol examples") {
    CHECK(std::abs(symbol_eval(gaussian(0.0, 1.0), vec1(2.0)) - Complex(2.0, 0.0)) < 1e-14);
    const LevyTriplet atom(vec1(0.0), mat1(0.0), LevyMeasure::atoms(1, {{vec1(1.0), 1.0}}));
    const Complex q = symbol_eval(atom, vec1(std::numbers::pi));
    CHECK(std::abs(q - Complex(2.0, std::numbers::pi)) < 1e-12);
    CHECK(std::abs(q - oracle::atom_symbol(0.0, 0.0, {{1.0, 1.0}}, 1.0, std::numbers::pi)) < 1e-12);
    CHECK(std::abs(symbol_eval(atom, vec1(0.0))) == 0.0);
}

TEST_CASE("atom symbols match direct summation") {
    const std::vector<std::pair<double, double>> atoms{{1.0, 0.7}, {-0.5, 1.1}, {2.5, 0.3}, {-1.0, 0.2}};
    std::vector<Atom> a;
    for (auto [y, m] : atoms) a.push_back({vec1(y), m});
    const LevyTriplet t(vec1(0.3), mat1(0.5), LevyMeasure::atoms(1, a));
    for (double xi : {-7.0, -1.3, 0.01, 0.5, 3.0, 40.0})
        CHECK(std::abs(symbol_eval(t, vec1(xi)) - oracle::atom_symbol(0.3, 0.5, atoms, 1.0, xi)) < 1e-11);
}

TEST_CASE("stable symbols match closed forms") {
    for (double a : {0.4, 1.0, 1.5, 1.9}) {
        for (double lambda : {0.0, 0.8}) {
            const LevyTriplet t(vec1(0.0), mat1(0.0),
                                LevyMeasure::stable_like(1, StableLikeParams::one_dimensional(a, 0.7, 1.0, 1.0, lambda)));
            for (double xi : {0.05, 1.0, 6.0, 50.0}) {
                const double ref = oracle::symmetric_stable_symbol(a, 0.7, lambda, xi);
                const Complex q = symbol_eval(t, vec1(xi));
                CHECK(std::abs(q.real() - ref) <= 1e-7 * std::abs(ref) + 1e-12);
                CHECK(std::abs(q.imag()) <= 1e-7 * std::abs(ref) + 1e-12);
            }
        }
    }
}

TEST_CASE("symbol quadrature failure carries the last estimates") {
    const LevyTriplet t(vec1(0.0), mat1(0.0),
                        LevyMeasure::stable_like(1, StableLikeParams::one_dimensional(1.7, 1.0, 1.0, 0.0, 0.5)));
    SymbolOptions o;
    o.quadrature.quad = quad::Options{1e-16, 0.0, 2};
    CHECK_THROWS_AS(symbol_eval(t, vec1(30.0), o), QuadratureError);
}

TEST_CASE("symbol invariants on random triplets") {
    std::mt19937_64 g(2024);
    std::uniform_real_distribution<double> xs(-30.0, 30.0);
    const double C = truncation_kernel_constant(Truncation{});
    for (int trial = 0; trial < 40; ++trial) {
        const LevyTriplet t = random_triplet(g);
        CHECK(std::abs(symbol_eval(t, vec1(0.0))) == 0.0);
        const LevyTriplet pure(vec1(0.0), mat1(0.0), t.nu());
        for (int k = 0; k < 5; ++k) {
            const double xi = xs(g);
            const Complex q = symbol_eval(t, vec1(xi));
            const Complex qm = symbol_eval(t, vec1(-xi));
            CHECK(std::abs(qm - std::conj(q)) <= 1e-9 * (1.0 + std::abs(q)));
            CHECK(q.real() >= -1e-9);
            const double jump = std::abs(symbol_eval(pure, vec1(xi)));
            CHECK(jump <= C * std::max(1.0, xi * xi) * levy_mass(t.nu()) * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("truncation kernel constant dominates the compensated kernel") {
    const Truncation h(1.0);
    const double C = truncation_kernel_constant(h);
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> ly(-4.0, 1.5), lx(-3.0, 3.0);
    for (int k = 0; k < 20000; ++k) {
        const double y = (g() % 2 ? 1.0 : -1.0) * std::pow(10.0, ly(g));
        const double xi = (g() % 2 ? 1.0 : -1.0) * std::pow(10.0, lx(g));
        const double hy = std::abs(y) <= 1.0 ? y : 0.0;
        const double K = std::abs(1.0 - std::exp(Complex(0.0, y * xi)) + Complex(0.0, hy * xi));
        CHECK(K <= C * std::min(1.0, y * y) * std::max(1.0, xi * xi) * (1.0 + 1e-9));
    }
}

TEST_CASE("bound_M_r examples") {
    CHECK(bound_M_r(single(gaussian(1.0, 1.0)), vec1(0.0), 3.0, 9) == doctest::Approx(2.0));
    const auto lin = CoefficientField::from_function("lin", 1, [](const Vector& x) {
        return LevyTriplet(x, mat1(0.0), LevyMeasure::zero(1));
    });
    CHECK(bound_M_r(UncertaintySet({lin}, Truncation{}), vec1(0.0), 2.0, 9) == doctest::Approx(2.0));
    const auto a = CoefficientField::constant("a", LevyTriplet(vec1(0.0), mat1(0.0), LevyMeasure::atoms(1, {{vec1(2.0), 3.0}})));
    const auto b = CoefficientField::constant("b", LevyTriplet(vec1(0.0), mat1(0.0), LevyMeasure::atoms(1, {{vec1(2.0), 5.0}})));
    CHECK(bound_M_r(UncertaintySet({a, b}, Truncation{}), vec1(0.0), 1.0, 9) == doctest::Approx(5.0));
}

TEST_CASE("symbol_sup_bound examples") {
    for (double r : {0.5, 1.0, 4.0})
        CHECK(symbol_sup_bound(single(gaussian(0.0, 1.0)), vec1(0.0), r, 9) == doctest::Approx(0.5 / (r * r)));
    CHECK(symbol_sup_bound(single(LevyTriplet::zero(1)), vec1(0.0), 1.0, 9) == 0.0);
    CHECK(symbol_sup_bound(single(gaussian(1.0, 0.0)), vec1(0.0), 2.0, 9) == doctest::Approx(0.5));
}

TEST_CASE("symbol_sup_bound dominates every probed value") {
    const LevyTriplet t(vec1(0.4), mat1(0.3), LevyMeasure::atoms(1, {{vec1(1.0), 1.0}, {vec1(-3.0), 0.5}}));
    const double r = 0.7;
    const double s = symbol_sup_bound(single(t), vec1(0.0), r, 9);
    for (double xi = -1.0 / r; xi <= 1.0 / r; xi += 0.01)
        CHECK(std::abs(oracle::atom_symbol(0.4, 0.3, {{1.0, 1.0}, {-3.0, 0.5}}, 1.0, xi)) <= s * (1.0 + 1e-3));
}

TEST_CASE("tightness report") {
    const auto atoms = single(LevyTriplet(vec1(0.0), mat1(0.0), LevyMeasure::atoms(1, {{vec1(0.5), 1.0}, {vec1(3.0), 2.0}})));
    auto rep = tightness_report(atoms);
    CHECK(rep.small_jump_limit_ok);
    CHECK(rep.large_jump_limit_ok);
    const auto stable = single(LevyTriplet(vec1(0.0), mat1(0.0),
                                           LevyMeasure::stable_like(1, StableLikeParams::one_dimensional(1.5, 1.0))));
    rep = tightness_report(stable);
    CHECK(rep.small_jump_limit_ok);
    CHECK(rep.large_jump_limit_ok);
    // small mass ~ r^{0.5}, tail ~ R^{-1.5}
    const auto& p = rep.profile;
    CHECK(p.front().small_mass == doctest::Approx(2.0 * 2.0 * std::pow(p.front().radius, 0.5)).epsilon(1e-6));
    CHECK(p.back().tail_mass == doctest::Approx(2.0 / 1.5 * std::pow(p.back().radius, -1.5)).epsilon(1e-6));

    auto family = [](int N, double far) {
        std::vector<CoefficientField> f;
        for (int n = 1; n <= N; ++n)
            f.push_back(CoefficientField::constant("n" + std::to_string(n),
                                                   LevyTriplet(vec1(0.0), mat1(0.0), LevyMeasure::atoms(1, {{vec1(n * far), 1.0}}))));
        return UncertaintySet(f, Truncation{});
    };
    const auto small = tightness_report(family(5, 1.0));
    CHECK(small.large_jump_limit_ok);
    for (const auto& row : small.profile)
        CHECK(row.tail_mass == (row.radius < 5.0 ? 1.0 : 0.0));
    CHECK(!tightness_report(family(3, 1e8)).large_jump_limit_ok);

    const auto field = CoefficientField::from_function("x", 1, [](const Vector& x) {
        return LevyTriplet(x, mat1(0.0), LevyMeasure::zero(1));
    });
    CHECK_THROWS_AS(tightness_report(UncertaintySet({field}, Truncation{})), PreconditionError);
}

TEST_CASE("symbol decay check") {
    auto t = symbol_decay_check(single(gaussian(0.0, 1.0)), {1.0, 0.1});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].sup_symbol == doctest::Approx(0.5));
    CHECK(t.rows[1].sup_symbol == doctest::Approx(0.005));
    t = symbol_decay_check(single(LevyTriplet::zero(1)), {1.0, 0.1, 0.01});
    for (const auto& r : t.rows) CHECK(r.sup_symbol == 0.0);
    const auto poisson = single(LevyTriplet(vec1(0.0), mat1(0.0), LevyMeasure::atoms(1, {{vec1(1.0), 1.0}})));
    t = symbol_decay_check(poisson, {1.0, 0.1});
    CHECK(t.rows[1].sup_symbol == doctest::Approx(oracle::poisson_decay_scan(0.1)).epsilon(1e-6));
    CHECK(t.nonincreasing);
    CHECK(t.decayed);
}

TEST_CASE("sde pushforward examples") {
    const LevyTriplet base(vec1(0.3), mat1(0.5), LevyMeasure::atoms(1, {{vec1(0.4), 1.0}, {vec1(-2.0), 0.5}}));
    const auto same = sde_pushforward(base, mat1(1.0), Truncation{});
    CHECK(same.b()[0] == doctest::Approx(0.3));
    CHECK(same.Q()(0, 0) == doctest::Approx(0.5));
    for (double xi : {0.3, 2.0}) CHECK(std::abs(symbol_eval(same, vec1(xi)) - symbol_eval(base, vec1(xi))) < 1e-12);

    const auto zero = sde_pushforward(base, mat1(0.0), Truncation{});
    CHECK(zero.b()[0] == 0.0);
    CHECK(zero.Q()(0, 0) == 0.0);
    CHECK(zero.nu().empty());

    for (double b : {0.0, 0.7}) {
        const LevyTriplet one(vec1(b), mat1(0.0), LevyMeasure::atoms(1, {{vec1(1.0), 1.0}}));
        const auto two = sde_pushforward(one, mat1(2.0), Truncation{});
        CHECK(two.b()[0] == doctest::Approx(2.0 * b - 2.0));
        REQUIRE(two.nu().atom_list().size() == 1);
        CHECK(two.nu().atom_list()[0].location[0] == doctest::Approx(2.0));
    }
}

TEST_CASE("sde pushforward symbol identity inside both truncations") {
    const LevyTriplet base(vec1(0.2), mat1(0.3), LevyMeasure::atoms(1, {{vec1(0.3), 1.2}, {vec1(-0.45), 0.8}}));
    const auto hat = sde_pushforward(base, mat1(2.0), Truncation{});
    for (double xi = -5.0; xi <= 5.0; xi += 0.37)
        CHECK(std::abs(symbol_eval(hat, vec1(xi)) - symbol_eval(base, vec1(2.0 * xi))) < 1e-8);
}

TEST_CASE("hypothesis diagnostics") {
    const auto rep = hypothesis_report(single(gaussian(0.5, 1.0)), vec1(0.0), 1.0);
    CHECK(rep.bounded);
    CHECK(rep.far_field_decreasing);
    CHECK(rep.label == "necessary-condition check");
    CHECK(rep.drift_diffusion_modulus == 0.0);
}

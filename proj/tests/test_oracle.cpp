#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "levyhjb/hjb.hpp"
#include "levyhjb/oracle.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>

using namespace levyhjb;

namespace {

LevyTriplet heat(double q, double b = 0.0) { return LevyTriplet(vec1(b), mat1(q), LevyMeasure::zero(1)); }

LevyTriplet two_atoms() {
    return LevyTriplet(vec1(0.2), mat1(0.5), LevyMeasure::atoms(1, {{vec1(1.0), 0.7}, {vec1(-0.5), 1.1}}));
}

Field bump(const Grid& g, double w, double shift = 0.0) {
    return Field::sample(g, [=](const Vector& x) { return std::exp(-(x[0] - shift) * (x[0] - shift) / (2.0 * w * w)); });
}

} // namespace

TEST_CASE("time zero returns the data") {
    const Grid g(1, 4.0, 65);
    const auto f = bump(g, 0.7);
    const auto r = fft_semigroup(two_atoms(), f, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(r.u[i] == f[i]);
    CHECK(r.imag_residue == 0.0);
    CHECK_FALSE(r.aliasing);
}

TEST_CASE("cosines are heat eigenfunctions") {
    const double L = 4.0;
    const Grid g(1, L, 129);
    const double k = 3.0 * std::numbers::pi / L;
    const auto f = Field::sample(g, [=](const Vector& x) { return std::cos(k * x[0]); });
    const auto r = fft_semigroup(heat(1.0), f, 0.3);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(r.u[i] == doctest::Approx(std::exp(-0.3 * k * k / 2.0) * f[i]).scale(1.0).epsilon(1e-12));
    CHECK_FALSE(r.aliasing);
}

TEST_CASE("drift transports the data") {
    const Grid g(1, 8.0, 257);
    const double h = g.spacing();
    const double t = 8.0 * h;
    const auto r = fft_semigroup(heat(0.0, 1.0), bump(g, 0.5), t);
    const auto shifted = bump(g, 0.5, -t);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(r.u[i] - shifted[i]) <= 1e-12);
}

TEST_CASE("semigroup composition") {
    const Grid g(1, 8.0, 257);
    const auto f = bump(g, 0.5);
    const auto once = fft_semigroup(two_atoms(), f, 0.5);
    const auto first = fft_semigroup(two_atoms(), f, 0.2);
    const auto twice = fft_semigroup(two_atoms(), first.u, 0.3);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(once.u[i] - twice.u[i]) <= 1e-10);
}

TEST_CASE("gaussian heat kernel") {
    const Grid g(1, 10.0, 513);
    const double w = 0.5, t = 0.7;
    const auto r = fft_semigroup(heat(1.0), bump(g, w), t);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.point(i)[0];
        const double var = w * w + t;
        CHECK(std::abs(r.u[i] - w / std::sqrt(var) * std::exp(-x * x / (2.0 * var))) <= 1e-6);
    }

    const Grid g2(2, 8.0, 129);
    const auto f2 = Field::sample(g2, [=](const Vector& x) { return std::exp(-x.squaredNorm() / (2.0 * w * w)); });
    const LevyTriplet h2(Vector::Zero(2), Matrix::Identity(2, 2), LevyMeasure::zero(2));
    const auto r2 = fft_semigroup(h2, f2, t);
    double err = 0.0;
    for (std::size_t i = 0; i < g2.size(); ++i) {
        const double var = w * w + t;
        err = std::max(err, std::abs(r2.u[i] - w * w / var * std::exp(-g2.point(i).squaredNorm() / (2.0 * var))));
    }
    CHECK(err <= 1e-6);
}

TEST_CASE("two atoms against the whole-line Poisson series") {
    const Grid g(1, 10.0, 513);
    const auto r = fft_semigroup(two_atoms(), bump(g, 0.5), 0.5);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(r.u[i] - oracle::two_atom_heat(0.2, 0.5, 1.0, 0.7, -0.5, 1.1, 1.0, 0.5, 1.0, 0.5,
                                                      g.point(i)[0])) <= 1e-8);
}

TEST_CASE("real data stays real") {
    const Grid g(1, 2.0, 65);
    const auto f = Field::sample(g, [](const Vector& x) { return x[0]; });
    const auto r = fft_semigroup(two_atoms(), f, 0.1);
    CHECK(r.u.size() == g.size());
    CHECK(r.imag_residue <= 1e-12);
    CHECK_FALSE(r.aliasing);
}

TEST_CASE("G-heat closed forms") {
    CHECK(gheat_closed_form(GHeatKind::ConvexQuadratic, 0.5, 1.0, 0.5, 2.0) == doctest::Approx(4.5));
    CHECK(gheat_closed_form(GHeatKind::ConcaveQuadratic, 0.5, 1.0, 0.5, 0.0) == doctest::Approx(-0.125));
    CHECK(gheat_closed_form(GHeatKind::ConvexQuadratic, 0.5, 1.0, 0.0, 1.3) == 1.3 * 1.3);
    CHECK(gheat_closed_form(GHeatKind::ConcaveQuadratic, 0.5, 1.0, 0.0, 1.3) == -1.3 * 1.3);
    CHECK(parse_gheat_kind("convex-quadratic") == GHeatKind::ConvexQuadratic);
    CHECK(parse_gheat_kind("concave-quadratic") == GHeatKind::ConcaveQuadratic);
    CHECK_THROWS_AS(parse_gheat_kind("cubic"), ValidationError);
}

TEST_CASE("closed form solves the discrete equation in the interior") {
    const Grid g(1, 4.0, 81);
    const UncertaintySet us({CoefficientField::constant("lo", heat(0.25)), CoefficientField::constant("hi", heat(1.0))},
                            Truncation{});
    SchemeConfig cfg;
    HjbOperator op(us, g, cfg);
    const double t = 0.3;
    const auto u = Field::sample(g, [=](const Vector& x) {
        return gheat_closed_form(GHeatKind::ConvexQuadratic, 0.5, 1.0, t, x[0]);
    });
    const auto gen = op.apply(u);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(gen[i] == doctest::Approx(1.0).epsilon(1e-10));
}

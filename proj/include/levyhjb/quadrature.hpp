#pragma once

#include "levyhjb/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

namespace levyhjb::quad {

struct Options {
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    int max_intervals = 4000;
};

template <class T>
struct Result {
    T value{};
    double error = 0.0;
    int intervals = 0;
};

namespace detail {

// Kronrod 15-point nodes on [-1, 1]; the even-indexed ones are the 7-point Gauss nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
double magnitude(const T& v) { return std::abs(v); }

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> kronrod15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T gauss = fc * kWg[3];
    T kron = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const T f1 = f(c - dx);
        const T f2 = f(c + dx);
        kron += (f1 + f2) * kWgk[j];
        if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
    }
    return {a, b, kron * h, magnitude(T((kron - gauss) * h))};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
/// `breaks` may hold interior points where f is known to be rough.
template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {},
               const std::vector<double>& breaks = {})
    -> Result<std::decay_t<decltype(f(a))>> {
    using T = std::decay_t<decltype(f(a))>;
    Result<T> out;
    if (!(b > a)) return out;

    std::vector<double> pts{a};
    for (double p : breaks)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());

    std::priority_queue<detail::Panel<T>> heap;
    T total{};
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (!(pts[i + 1] > pts[i])) continue;
        auto p = detail::kronrod15<T>(f, pts[i], pts[i + 1]);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    T previous = total;
    int count = static_cast<int>(heap.size());
    while (err > std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total))) {
        if (count >= opt.max_intervals) {
            throw QuadratureError("adaptive quadrature did not converge on [" + std::to_string(a) +
                                      ", " + std::to_string(b) + "], error estimate " +
                                      std::to_string(err),
                                  Complex(previous), Complex(total));
        }
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::kronrod15<T>(f, worst.a, mid);
        auto right = detail::kronrod15<T>(f, mid, worst.b);
        previous = total;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
        if (!std::isfinite(detail::magnitude(total)))
            throw QuadratureError("non-finite integrand", Complex(previous), Complex(total));
    }
    // Re-sum to shed the drift from incremental updates.
    T sum{};
    double esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    out.value = sum;
    out.error = esum;
    out.intervals = count;
    return out;
}

/// Nodes and weights for E[g(Z)], Z ~ N(0, 1) (probabilists' Gauss-Hermite).
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussHermite gauss_hermite(int n);

} // namespace levyhjb::quad

#pragma once

#include "levyhjb/types.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace levyhjb {

/// Uniform axis-aligned grid on [-L, L]^d with n points per axis, d in {1, 2}.
class Grid {
public:
    Grid(int dim, double half_width, int points);

    int dim() const { return dim_; }
    double half_width() const { return half_width_; }
    int points() const { return n_; }
    double spacing() const { return dx_; }
    std::size_t size() const { return size_; }

    double coord(int k) const { return -half_width_ + k * dx_; }
    Vector point(std::size_t idx) const;
    /// Per-axis indices of a flat index (axis 0 varies fastest).
    std::vector<int> axes(std::size_t idx) const;
    std::size_t flat(const std::vector<int>& axes) const;
    /// True if every axis index is at least `margin` cells from the boundary.
    bool interior(std::size_t idx, int margin = 1) const;
    /// True if |x|_inf <= radius.
    bool within(std::size_t idx, double radius) const;

    bool operator==(const Grid& o) const {
        return dim_ == o.dim_ && half_width_ == o.half_width_ && n_ == o.n_;
    }

private:
    int dim_;
    double half_width_;
    int n_;
    double dx_;
    std::size_t size_;
};

/// Real values on a grid; all finite.
class Field {
public:
    Field(Grid grid, std::vector<double> values);

    static Field sample(const Grid& grid, const std::function<double(const Vector&)>& f);
    static Field constant(const Grid& grid, double c);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    double max() const;
    double min() const;
    double sup_norm() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

enum class Extension { ConstantBoundary, InitialCondition };

/// How u(x) is read for x outside [-L, L]^d.
struct ExtensionPolicy {
    Extension kind = Extension::ConstantBoundary;
    /// used for InitialCondition: the value returned outside the domain
    std::function<double(const Vector&)> outside;

    static ExtensionPolicy constant_boundary() { return {}; }
    static ExtensionPolicy initial_condition(std::function<double(const Vector&)> f) {
        return {Extension::InitialCondition, std::move(f)};
    }
};

/// sum_k w_k (u(x_i + offset_k) - u(x_i))
struct Tap {
    Vector offset;
    double weight = 0.0;
};

/// A tap set resolved against one grid point:
/// value = Σ w (u[j] - u[i]) + outside - outside_weight * u[i].
struct StencilRow {
    std::vector<std::pair<std::size_t, double>> entries;
    double outside = 0.0;        // Σ w f(x) over taps read from the extension
    double outside_weight = 0.0; // Σ w over those taps
    double total = 0.0;

    double apply(std::span<const double> u, std::size_t i) const {
        const double ui = u[i];
        double acc = outside - outside_weight * ui;
        for (const auto& [j, w] : entries) acc += w * (u[j] - ui);
        return acc;
    }
};

/// Multilinear interpolation weights of the location x_i + offset, with the extension policy.
StencilRow resolve_taps(const Grid& grid, std::size_t i, const std::vector<Tap>& taps,
                        const ExtensionPolicy& ext);

/// Piecewise-(multi)linear interpolation of a field at an arbitrary point.
double interpolate(const Field& u, const Vector& x, const ExtensionPolicy& ext);

} // namespace levyhjb

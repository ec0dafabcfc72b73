#include "levyhjb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace levyhjb {

Grid::Grid(int dim, double half_width, int points) : dim_(dim), half_width_(half_width), n_(points) {
    if (dim != 1 && dim != 2) throw ValidationError("grid dimension must be 1 or 2");
    if (points < 3) throw ValidationError("grid needs at least 3 points per axis");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw ValidationError("grid half-width must be positive");
    dx_ = 2.0 * half_width / (points - 1);
    size_ = static_cast<std::size_t>(points);
    if (dim == 2) size_ *= static_cast<std::size_t>(points);
}

Vector Grid::point(std::size_t idx) const {
    Vector x(dim_);
    for (int a = 0; a < dim_; ++a) {
        x[a] = coord(static_cast<int>(idx % n_));
        idx /= n_;
    }
    return x;
}

std::vector<int> Grid::axes(std::size_t idx) const {
    std::vector<int> out(dim_);
    for (int a = 0; a < dim_; ++a) {
        out[a] = static_cast<int>(idx % n_);
        idx /= n_;
    }
    return out;
}

std::size_t Grid::flat(const std::vector<int>& ax) const {
    std::size_t idx = 0;
    for (int a = dim_ - 1; a >= 0; --a) idx = idx * n_ + static_cast<std::size_t>(ax[a]);
    return idx;
}

bool Grid::interior(std::size_t idx, int margin) const {
    for (int k : axes(idx))
        if (k < margin || k > n_ - 1 - margin) return false;
    return true;
}

bool Grid::within(std::size_t idx, double radius) const {
    for (int k : axes(idx))
        if (std::abs(coord(k)) > radius + 1e-12) return false;
    return true;
}

Field::Field(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw ValidationError("field size does not match grid");
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i]))
            throw NumericalError("field value at index " + std::to_string(i) + " is not finite");
}

Field Field::sample(const Grid& grid, const std::function<double(const Vector&)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.point(i));
    return Field(grid, std::move(v));
}

Field Field::constant(const Grid& grid, double c) {
    return Field(grid, std::vector<double>(grid.size(), c));
}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::sup_norm() const { return std::max(std::abs(max()), std::abs(min())); }

namespace {

// Adds weight * u(s) to row, s given in index coordinates.
void add_location(const Grid& grid, const std::vector<double>& s, double weight,
                  const ExtensionPolicy& ext, StencilRow& row) {
    const int n = grid.points();
    const int d = grid.dim();
    std::vector<double> pos(s);
    bool outside = false;
    for (int a = 0; a < d; ++a) {
        if (pos[a] < -1e-9 || pos[a] > n - 1 + 1e-9) outside = true;
        pos[a] = std::clamp(pos[a], 0.0, static_cast<double>(n - 1));
    }
    if (outside && ext.kind == Extension::InitialCondition) {
        Vector x(d);
        for (int a = 0; a < d; ++a) x[a] = -grid.half_width() + s[a] * grid.spacing();
        row.outside += weight * ext.outside(x);
        row.outside_weight += weight;
        return;
    }
    std::vector<int> base(d);
    std::vector<double> frac(d);
    for (int a = 0; a < d; ++a) {
        int k = static_cast<int>(std::floor(pos[a]));
        k = std::min(k, n - 2);
        base[a] = k;
        frac[a] = pos[a] - k;
        // Snap rounding noise so on-grid taps hit exactly one node.
        if (frac[a] < 1e-12) frac[a] = 0.0;
        if (frac[a] > 1.0 - 1e-12) frac[a] = 1.0;
    }
    const int corners = 1 << d;
    for (int c = 0; c < corners; ++c) {
        double w = weight;
        std::vector<int> ax(d);
        for (int a = 0; a < d; ++a) {
            const bool up = (c >> a) & 1;
            w *= up ? frac[a] : 1.0 - frac[a];
            ax[a] = base[a] + (up ? 1 : 0);
        }
        if (w == 0.0) continue;
        const std::size_t j = grid.flat(ax);
        auto it = std::find_if(row.entries.begin(), row.entries.end(),
                               [j](const auto& e) { return e.first == j; });
        if (it == row.entries.end()) row.entries.emplace_back(j, w);
        else it->second += w;
    }
}

} // namespace

StencilRow resolve_taps(const Grid& grid, std::size_t i, const std::vector<Tap>& taps,
                        const ExtensionPolicy& ext) {
    if (i >= grid.size()) throw PreconditionError("grid index out of range");
    if (ext.kind == Extension::InitialCondition && !ext.outside)
        throw PreconditionError("initial-condition extension needs the initial function");
    StencilRow row;
    const auto base = grid.axes(i);
    std::vector<double> s(grid.dim());
    for (const auto& tap : taps) {
        if (tap.weight == 0.0) continue;
        if (tap.offset.size() != grid.dim()) throw ValidationError("tap dimension mismatch");
        for (int a = 0; a < grid.dim(); ++a) s[a] = base[a] + tap.offset[a] / grid.spacing();
        add_location(grid, s, tap.weight, ext, row);
        row.total += tap.weight;
    }
    return row;
}

double interpolate(const Field& u, const Vector& x, const ExtensionPolicy& ext) {
    const Grid& g = u.grid();
    StencilRow row;
    std::vector<double> s(g.dim());
    for (int a = 0; a < g.dim(); ++a) s[a] = (x[a] + g.half_width()) / g.spacing();
    add_location(g, s, 1.0, ext, row);
    double v = row.outside;
    for (const auto& [j, w] : row.entries) v += w * u[j];
    return v;
}

} // namespace levyhjb

#include "levyhjb/oracle.hpp"
#include "levyhjb/symbols.hpp"
#include "fftw_lock.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <vector>

namespace levyhjb {

namespace detail {
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

OracleResult fft_semigroup(const LevyTriplet& t, const Field& f, double time,
                           const SymbolOptions& opts) {
    const Grid& g = f.grid();
    if (t.dim() != g.dim()) throw ValidationError("fft_semigroup: dimension mismatch");
    if (!(time >= 0.0)) throw ValidationError("fft_semigroup: time must be >= 0");
    if (time == 0.0) return {f, 0.0, false};

    const int d = g.dim();
    const int m = g.points() - 1;
    const std::size_t total = d == 1 ? m : static_cast<std::size_t>(m) * m;
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        if (d == 1) {
            fwd = fftw_plan_dft_1d(m, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_1d(m, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        } else {
            fwd = fftw_plan_dft_2d(m, m, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_2d(m, m, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
    }
    const int n = g.points();
    // buffer layout: row-major with axis 1 slowest in the grid, so flat = k0 + k1 * m
    // and FFTW's last index is axis 0.
    for (std::size_t j = 0; j < total; ++j) {
        const int k0 = static_cast<int>(j % m);
        const int k1 = static_cast<int>(j / m);
        const std::size_t src = d == 1 ? static_cast<std::size_t>(k0)
                                       : static_cast<std::size_t>(k0) + static_cast<std::size_t>(k1) * n;
        buf[j][0] = f[src];
        buf[j][1] = 0.0;
    }
    fftw_execute(fwd);

    const double period = 2.0 * g.half_width();
    const double w = 2.0 * std::numbers::pi / period;
    auto freq = [&](int k) { return k <= m / 2 ? k : k - m; };
    auto multiplier = [&](const Vector& xi, bool nyquist) {
        const Complex e = std::exp(-time * symbol_eval(t, xi, opts));
        // the Nyquist bin stands for both +xi and -xi
        return nyquist ? Complex(e.real(), 0.0) : e;
    };
    for (std::size_t j = 0; j < total; ++j) {
        const int k0 = static_cast<int>(j % m);
        const int k1 = static_cast<int>(j / m);
        Vector xi(d);
        bool nyq = (m % 2 == 0) && k0 == m / 2;
        xi[0] = w * freq(k0);
        if (d == 2) {
            xi[1] = w * freq(k1);
            nyq = nyq || ((m % 2 == 0) && k1 == m / 2);
        }
        const Complex v = Complex(buf[j][0], buf[j][1]) * multiplier(xi, nyq);
        buf[j][0] = v.real();
        buf[j][1] = v.imag();
    }
    fftw_execute(bwd);

    std::vector<double> out(g.size());
    double residue = 0.0;
    const double scale = 1.0 / static_cast<double>(total);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto ax = g.axes(i);
        const int k0 = ax[0] % m;
        const int k1 = d == 2 ? ax[1] % m : 0;
        const std::size_t j = static_cast<std::size_t>(k0) + static_cast<std::size_t>(k1) * m;
        out[i] = buf[j][0] * scale;
        residue = std::max(residue, std::abs(buf[j][1] * scale));
    }
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    fftw_free(buf);
    OracleResult res{Field(g, std::move(out)), residue, false};
    res.aliasing = residue > 1e-8 * f.sup_norm();
    return res;
}

GHeatKind parse_gheat_kind(const std::string& name) {
    if (name == "convex-quadratic") return GHeatKind::ConvexQuadratic;
    if (name == "concave-quadratic") return GHeatKind::ConcaveQuadratic;
    throw ValidationError("unsupported G-heat kind '" + name + "'");
}

double gheat_closed_form(GHeatKind kind, double sigma_min, double sigma_max, double t, double x) {
    if (!(sigma_min >= 0.0) || !(sigma_max >= sigma_min))
        throw ValidationError("gheat: need 0 <= sigma_min <= sigma_max");
    if (!(t >= 0.0)) throw ValidationError("gheat: t must be >= 0");
    switch (kind) {
    case GHeatKind::ConvexQuadratic: return x * x + sigma_max * sigma_max * t;
    case GHeatKind::ConcaveQuadratic: return -x * x - sigma_min * sigma_min * t;
    }
    throw ValidationError("unsupported G-heat kind");
}

} // namespace levyhjb

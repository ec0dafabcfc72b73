#pragma once

#include "levyhjb/grid.hpp"
#include "levyhjb/triplet.hpp"

#include <string>

namespace levyhjb {

struct OracleResult {
    Field u;
    /// max |imaginary part| of the inverse transform
    double imag_residue = 0.0;
    /// residue above 1e-8 ‖f‖∞: data too close to the boundary or grid too coarse
    bool aliasing = false;
};

/// T_t f = F^{-1}[e^{-t psi(xi)} F f] on the periodic box [-L, L)^d of the grid.
/// The last grid point on each axis is the periodic image of the first.
OracleResult fft_semigroup(const LevyTriplet& t, const Field& f, double time,
                           const SymbolOptions& opts = {});

enum class GHeatKind { ConvexQuadratic, ConcaveQuadratic };

GHeatKind parse_gheat_kind(const std::string& name);

/// G-heat solution for Q in {sigma_min^2, sigma_max^2}: x^2 + sigma_max^2 t for f = x^2,
/// -x^2 - sigma_min^2 t for f = -x^2.
double gheat_closed_form(GHeatKind kind, double sigma_min, double sigma_max, double t, double x);

} // namespace levyhjb

#pragma once

#include "isoyamabe/integrate.hpp"
#include "isoyamabe/problem.hpp"

namespace isoyamabe {

/// Energy data attached to one solution.
struct EnergyReport {
    double energy = 0.0;  ///< integral of |u|^{p+1} over the sphere
    double c_n = 0.0;     ///< Vol(S^n), the energy of the constant solution
    double ratio = 0.0;   ///< energy / c_n
    double yamabe = 0.0;  ///< (n(n-2)/4) energy^{2/n}
};

/// Vol(S^j) = 2 pi^{(j+1)/2} / Gamma((j+1)/2).
double sphere_volume(int j);

/// c_n = Vol(S^n), the minimal solution energy (attained by w = 1).
double c_n_value(int n);

/// Yamabe functional value of a solution with the given energy.
double yamabe_value(int n, double energy);

/// Energy of an ell = 2 solution via the product-sphere volume element:
///   (1/2) Vol(S^{kdim-1}) Vol(S^{m-1})
///       * integral_0^pi |w|^{p+1} sin^{kdim-1}(r/2) cos^{m-1}(r/2) dr,
/// evaluated by composite Gauss-Legendre on the dense profile, panels
/// doubled until the relative change is below 1e-9.
///
/// The split must satisfy m + kdim = n + 1 with m = m2 + 1 and kdim = m1 + 1
/// (the sin exponent matches the singular exponent of h at r = 0, which is
/// m1). The profile must span [0, pi].
///
/// Throws UnsupportedGeometryError for ell != 2: the product-sphere weight
/// has no analogue in the other geometries, so those energies are refused
/// rather than approximated.
double solution_energy(const ProblemSpec& spec, int m, int kdim, const Trajectory& profile);

EnergyReport make_energy_report(int n, double energy);

}  // namespace isoyamabe

#pragma once

// Internal unit system: hbar = c = omega0 = 1, so lengths are measured in
// units of lambda0 / (2 pi) and energies in units of hbar * omega0.

#include "nfqed/geometry.hpp"

namespace nfqed::units {

inline constexpr double kHbar = 1.0;
inline constexpr double kC = 1.0;

inline double length_from_nm(double nm, double lambda0_nm) { return 2.0 * kPi * nm / lambda0_nm; }
inline double length_to_nm(double len, double lambda0_nm) { return len * lambda0_nm / (2.0 * kPi); }

// Rubidium D2 line (5S1/2 -> 5P3/2): 780.241 nm, natural width 2 pi x 6.0666 MHz.
inline constexpr double kRubidiumLambdaNm = 780.0;
inline constexpr double kRubidiumGammaMHz = 6.0666;
inline constexpr double kSpeedOfLight = 299792458.0;

// gamma / omega0 from a linewidth Gamma/(2 pi) in MHz and a vacuum wavelength.
inline double gamma_over_omega0(double gamma_mhz, double lambda0_nm)
{
    const double nu0 = kSpeedOfLight / (lambda0_nm * 1e-9);
    return gamma_mhz * 1e6 / nu0;
}

}  // namespace nfqed::units

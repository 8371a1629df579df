// constants.hpp - physical constants and the unit system used throughout.
//
// Unit conventions: energies are ordinary frequencies in GHz (E/h), time in
// ns, flux in units of the flux quantum, inductance in pH, capacitance in fF.
// With these choices a propagator step is exp(-2*pi*i * H_GHz * t_ns).

#pragma once

#include <cmath>

namespace qflux {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double planck_h = 6.62607015e-34;     // J s (exact)
inline constexpr double hbar = planck_h / two_pi;      // J s
inline constexpr double elementary_e = 1.602176634e-19; // C (exact)
inline constexpr double flux_quantum = planck_h / (2.0 * elementary_e); // Wb

// (Phi0/2pi)^2 / h expressed in GHz*pH: multiplies an inverse inductance in
// 1/pH to give an inductive energy as a frequency in GHz.
inline constexpr double k_ind_ghz_ph =
    (flux_quantum / two_pi) * (flux_quantum / two_pi) / planck_h / 1e-12 / 1e9;

// Kinetic prefactor for one junction phase coordinate:
// hbar^2/(2 C (Phi0/2pi)^2 h) in GHz for C in fF.  The Laplacian it multiplies
// is taken with respect to the dimensionless phase coordinates.
inline constexpr double kinetic_ghz(double cap_fF) {
    return hbar * hbar /
           (2.0 * cap_fF * 1e-15 * (flux_quantum / two_pi) * (flux_quantum / two_pi) *
            planck_h) / 1e9;
}

// Junction inverse inductance 1/L_J = 2 pi I_c / Phi0, returned in 1/pH for
// I_c in uA.
inline constexpr double junction_inv_inductance_ph(double ic_uA) {
    return two_pi * ic_uA * 1e-6 / flux_quantum * 1e-12;
}

// Single LC mode frequency in GHz from inductance (nH) and impedance (ohm):
// omega = Z0 / L_T, so f = Z0 / (2 pi L_T).
inline constexpr double lc_mode_ghz(double L_nH, double Z0_ohm) {
    return Z0_ohm / (two_pi * L_nH * 1e-9) / 1e9;
}

// Zero-point flux sqrt(hbar Z0 / 2) of an LC mode, in flux quanta.
inline double lc_zero_point_flux(double Z0_ohm) {
    return std::sqrt(hbar * Z0_ohm / 2.0) / flux_quantum;
}

}  // namespace qflux

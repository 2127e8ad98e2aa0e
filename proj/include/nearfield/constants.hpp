#pragma once

#include <numbers>

namespace nearfield::constants {

// CODATA 2018 values, SI units.
inline constexpr double planck_h = 6.62607015e-34;              // J s
inline constexpr double hbar = planck_h / (2.0 * std::numbers::pi); // J s
inline constexpr double light_speed_c = 299792458.0;             // m/s
inline constexpr double vacuum_permittivity_eps0 = 8.8541878128e-12; // F/m
inline constexpr double boltzmann_kB = 1.380649e-23;             // J/K
inline constexpr double amu = 1.66053906660e-27;                 // kg
inline constexpr double elementary_charge = 1.602176634e-19;     // C
inline constexpr double debye = 1e-21 / light_speed_c;           // C m

inline constexpr double pi = std::numbers::pi;

/// Converts a polarizability volume alpha/(4 pi eps0) [m^3] to SI [C m^2/V].
constexpr double polarizability_from_volume(double volume)
{
    return 4.0 * pi * vacuum_permittivity_eps0 * volume;
}

constexpr double polarizability_to_volume(double alpha_si)
{
    return alpha_si / (4.0 * pi * vacuum_permittivity_eps0);
}

} // namespace nearfield::constants

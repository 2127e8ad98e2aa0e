#pragma once

#include "nearfield/interferometer.hpp"

#include <optional>
#include <vector>

namespace nearfield {

struct CslParameters
{
    double lambda0 = 0.0; // single-nucleon rate [1/s]
    double r_c = 0.0;     // localization length [m]

    void validate() const;
};

/// Visibility of a time-domain configuration with the CSL channel applied,
/// for a particle of the given mass. The pulse delay keeps the template's
/// ratio T/T_T.
double csl_visibility(const InterferometerConfig& cfg, const CslParameters& params, double mass);

/// Ratio of the CSL-reduced to the unperturbed first-order signal.
double csl_reduction_factor(const InterferometerConfig& cfg, const CslParameters& params, double mass);

inline constexpr double csl_min_mass_amu = 1e3;
inline constexpr double csl_max_mass_amu = 1e12;
inline constexpr double csl_min_quantum_visibility = 0.1;

struct CriticalMassResult
{
    double mass = 0.0; // kg
    int iterations = 0;
};

/// Smallest mass whose CSL reduction falls below threshold, by bisection in
/// log-mass to 1%. Throws if no crossing lies in [1e3, 1e12] amu or the
/// template's quantum visibility does not exceed 0.1.
CriticalMassResult critical_mass(const CslParameters& params, const InterferometerConfig& cfg, double threshold,
                                 double lower_amu = csl_min_mass_amu, double upper_amu = csl_max_mass_amu);

enum class CellStatus { ok, out_of_range, unusable };

struct ExclusionMap
{
    std::vector<double> lambda0_grid;
    std::vector<double> r_c_grid;
    /// critical_mass[i][j] for r_c_grid[i], lambda0_grid[j]; unset unless ok.
    std::vector<std::vector<std::optional<double>>> critical_mass;
    std::vector<std::vector<CellStatus>> status;
};

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

ExclusionMap exclusion_map(const std::vector<double>& lambda0_grid, const std::vector<double>& r_c_grid,
                           const InterferometerConfig& cfg, double threshold);

} // namespace nearfield

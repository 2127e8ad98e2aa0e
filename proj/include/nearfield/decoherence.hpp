#pragma once

#include "nearfield/gratings.hpp"

#include <complex>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nearfield {

/// One environmental coupling: an event rate R(t), with t measured from the
/// passage through the central grating, and a decoherence function eta(x)
/// with |eta| <= 1 and eta(0) = 1.
struct DecoherenceChannel
{
    std::string label;
    std::function<double(double)> rate;
    std::function<complex(double)> eta;
    /// Set when R does not depend on t; lets callers skip the time profile.
    std::optional<double> constant_rate;
};

/// Timing of the interference paths: the free flight lasts half_duration on
/// each side of G2 (L/v_z, or the pulse delay T) and talbot_scale is the
/// corresponding Talbot scale (L_T/v_z, or T_T).
struct PathGeometry
{
    double period = 0.0;
    double half_duration = 0.0;
    double talbot_scale = 0.0;
};

/// exp(-int R(t) [1 - eta((m d/2)(|t| - tau)/tau_T)] dt) over t in
/// [-tau, tau], for Talbot-Lau coefficient index m. Throws ConvergenceError
/// when the quadrature misses its 1e-6 relative tolerance.
complex decoherence_factor(const DecoherenceChannel& channel, const PathGeometry& geometry, int m);

/// B_m multiplied by decoherence_factor.
complex apply_channel(complex coefficient, const DecoherenceChannel& channel, const PathGeometry& geometry, int m);

/// Exponent of the combined factor for several channels (sum of integrals).
complex decoherence_factor(std::span<const DecoherenceChannel> channels, const PathGeometry& geometry, int m);

enum class ScatteringModel { isotropic_constant_amplitude, user_table };

/// |f(theta)|^2 on a table of scattering angles, linearly interpolated.
struct ScatteringTable
{
    std::vector<double> theta;
    std::vector<double> f_squared;
};

struct GasEnvironment
{
    double gas_mass = 0.0;
    double temperature = 0.0;
    double pressure = 0.0;
    ScatteringModel scattering_model = ScatteringModel::isotropic_constant_amplitude;
    ScatteringTable table;

    void validate() const;
    double number_density() const;
};

/// Collisional decoherence function for path separation x, averaged over a
/// Maxwell-Boltzmann distribution of gas speeds. n_angle is the number of
/// Gauss nodes per oscillation panel of the angular integral (user tables
/// only; the isotropic model integrates in closed form).
complex collisional_eta(const GasEnvironment& env, double x, int n_angle = 16, int n_velocity = 48);

/// Mean relative speed between a particle moving at beam_velocity and the
/// thermal gas.
double mean_relative_speed(const GasEnvironment& env, double beam_velocity);

/// Constant-rate collisional channel R = n sigma v_rel.
DecoherenceChannel collisional_channel(const GasEnvironment& env, double total_cross_section, double beam_velocity);

struct EmissionLine
{
    double wavelength; // m
    double rate;       // photons/s
};

/// Isotropic single-photon emission: eta(x) = sum_k (rate_k/R) sinc(2 pi x / lambda_k).
DecoherenceChannel thermal_emission_channel(std::span<const EmissionLine> spectrum);

/// Contrast left after Poisson-distributed photon absorption, each photon
/// shifting the fringes by shift_per_photon periods.
double absorption_visibility_factor(double mean_photons, double shift_per_photon);

/// CSL localization: R = lambda0 (m/amu)^2, eta(x) = exp(-x^2 / (4 r_c^2)).
DecoherenceChannel csl_channel(double lambda0, double r_c, double mass);

/// Two-column numeric text readers (wavelength_m rate_hz / theta_rad f2).
/// Comments start with '#'; commas or whitespace separate columns.
std::vector<EmissionLine> read_emission_spectrum(const std::filesystem::path& path);
ScatteringTable read_scattering_table(const std::filesystem::path& path);

} // namespace nearfield

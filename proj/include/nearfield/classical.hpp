#pragma once

#include "nearfield/interferometer.hpp"
#include "nearfield/talbot_lau.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace nearfield {

/// Incoherent ray source for the classical moire model.
struct RayEnsemble
{
    std::int64_t count = 1'000'000;
    std::uint64_t seed = 0;
    /// Half-width of the uniform transverse velocity distribution [m/s];
    /// unset means 20 d v_z / L.
    std::optional<double> divergence_window;
    /// Constant transverse acceleration acting during the whole flight.
    double transverse_acceleration = 0.0;
};

/// Transverse velocity change from the impulse approximation,
/// dv = (hbar/m) dphi/dx with phi the grating's eikonal phase.
struct Kick
{
    bool absorbed = false;
    double delta_v = 0.0;
};
Kick deflection_kick(const GratingSpec& grating, const Species& species, double v_z, double x);

inline constexpr int classical_histogram_bins = 256;
inline constexpr int classical_partitions = 64;

struct ClassicalResult
{
    double visibility = 0.0;
    double visibility_error = 0.0; // bootstrap standard error over partitions
    /// Detector signal components; with grating3 the ray density is
    /// multiplied by conj(c3_m), the transmission coefficients of G3.
    FourierPattern signal;
    /// Density of final positions modulo d, normalized to unit mean.
    std::vector<double> histogram;
    std::int64_t survivors = 0;
};

/// Monte Carlo moire: x1 uniform over one period of G1, v_x uniform in the
/// divergence window, survival by |t|^2 at each grating, kick at G2.
ClassicalResult classical_visibility(const InterferometerConfig& cfg, const RayEnsemble& ensemble, double v_z,
                                     int m_max = default_m_max);

/// Deterministic quadrature of the same model in the wide-source limit, where
/// x1 and x2 are independent and uniform modulo d:
/// rho_m = conj(c1_m) (1/d) int |t2(x)|^2 exp(-2 pi i m (2x + D(x))/d) dx,
/// D the kick displacement over the second leg.
FourierPattern classical_moire(const InterferometerConfig& cfg, double v_z, int m_max = default_m_max);

/// classical_moire averaged over the beam's velocity distribution.
AveragedSignal classical_velocity_averaged(const InterferometerConfig& cfg, int n_velocities,
                                           int m_max = default_m_max);

} // namespace nearfield

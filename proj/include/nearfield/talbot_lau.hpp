#pragma once

#include "nearfield/interferometer.hpp"

#include <complex>
#include <vector>

namespace nearfield {

/// Fourier components A_m, 0 <= m <= m_max, of a real periodic pattern;
/// A_{-m} = conj(A_m).
struct FourierPattern
{
    double period = 0.0;
    std::vector<complex> components;
    /// Largest neglected |b_j|^2 weight feeding the components.
    double truncation_residual = 0.0;

    int m_max() const { return static_cast<int>(components.size()) - 1; }
    complex component(int m) const;
    double density(double x) const;
};

/// Single Talbot-Lau coefficient B_m(xi) = sum_j b_j conj(b_{j-m}) exp(i pi (m - 2j) xi).
complex talbot_lau_coefficient(const CoefficientTable& b, int m, double xi);

/// Table {B_m(xi) : |m| <= m_max}.
CoefficientTable talbot_lau_coefficients(const CoefficientTable& b, double xi, int m_max);

/// Plane-wave Talbot pattern behind one grating, component m = B_m(m L/L_T).
FourierPattern talbot_pattern(const CoefficientTable& b, double period, double l_over_lt, int m_max);

/// Timing of the interference paths for a configuration at velocity v_z.
PathGeometry path_geometry(const InterferometerConfig& cfg, double v_z);

/// Talbot ratio L/L_T (spatial) or T/T_T (time domain).
double talbot_ratio(const InterferometerConfig& cfg, double v_z);

/// B_m multiplied by the decoherence factor of one channel.
complex apply_channel(complex coefficient, const DecoherenceChannel& channel, const InterferometerConfig& cfg,
                      double v_z, int m);

inline constexpr int default_m_max = 8;

/// Detector signal S_m = conj(B1_m(0)) conj(B3_m(0)) B2_{2m}(m xi), with the
/// environment channels applied to B2. Without grating3 this is the surface
/// density w_TL.
FourierPattern detector_signal(const InterferometerConfig& cfg, double v_z, int m_max = default_m_max);

/// 2 |S_1 / S_0|.
double sinusoidal_visibility(const FourierPattern& signal);
inline bool non_sinusoidal(double visibility)
{
    return visibility > 1.0;
}

struct AveragedSignal
{
    FourierPattern pattern;
    double visibility;
};

/// Signal components averaged over the beam's velocity distribution.
AveragedSignal velocity_averaged_pattern(const InterferometerConfig& cfg, int n_velocities,
                                         int m_max = default_m_max);

/// Visibility of a time-domain configuration at pulse delay T.
double time_domain_visibility(const InterferometerConfig& cfg, double pulse_delay, int m_max = default_m_max);

} // namespace nearfield

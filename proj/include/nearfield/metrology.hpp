#pragma once

#include <array>
#include <complex>
#include <vector>

namespace nearfield {

/// Deflection field between G1 and G2. K is set by the electrode geometry
/// and the flight lengths (units of m^2 so that the shift is a length).
struct DeflectionField
{
    double geometry_constant = 0.0;
    double grad_e_squared = 0.0; // d(E^2)/dx [V^2/m^3]
};

/// dx = K alpha dE^2/dx / (2 m v^2), alpha in SI units [C m^2/V].
double stark_fringe_shift(const DeflectionField& field, double alpha_stat, double mass, double velocity);

/// alpha_stat + d_rms^2 / (3 k_B T).
double total_polarizability(double alpha_stat, double dipole_rms, double temperature);

/// a T^2.
double inertial_fringe_shift(double acceleration, double free_time);

using Vec3 = std::array<double, 3>;

/// 2 v x Omega.
Vec3 coriolis_acceleration(const Vec3& velocity, const Vec3& rotation);

/// dx1 - 2 dx2 + dx3.
double grating_shift_combination(double dx1, double dx2, double dx3);

enum class ShiftModel { delta, gaussian, empirical };

/// Statistical mixture of fringe shifts.
struct ShiftDistribution
{
    ShiftModel model = ShiftModel::delta;
    double mean = 0.0;
    double sigma = 0.0;
    std::vector<double> samples;

    void validate() const;
};

/// Characteristic function of the shift distribution at 2 pi/d; multiplies S_1.
std::complex<double> shift_dephasing_factor(const ShiftDistribution& dist, double period);

} // namespace nearfield

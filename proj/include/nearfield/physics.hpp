#pragma once

#include <string>
#include <vector>

namespace nearfield {

/// The diffracted particle. Polarizabilities are volumes alpha/(4 pi eps0).
struct Species
{
    std::string name;
    double mass = 0.0;                     // kg
    double alpha_stat_vol = 0.0;           // m^3
    double alpha_opt_vol = 0.0;            // m^3
    double c3_coefficient = 0.0;           // J m^3, wall dispersion constant
    double dipole_rms = 0.0;               // C m
    double absorption_cross_section = 0.0; // m^2
    double absorption_wavelength = 0.0;    // m, wavelength the cross section refers to

    void validate() const;
};

enum class VelocityShape { gaussian, top_hat };

/// Longitudinal beam description. relative_spread is sigma/mean for the
/// gaussian shape and half-width/mean for the top hat.
struct BeamState
{
    double mean_velocity = 0.0;
    double relative_spread = 0.0;
    VelocityShape shape = VelocityShape::gaussian;

    void validate() const;
};

struct VelocityNode
{
    double velocity;
    double weight;
};

double de_broglie_wavelength(double mass, double velocity);
double talbot_length(double period, double wavelength);
double talbot_time(double mass, double period);
double coherence_width(double distance, double wavelength, double source_width);
double far_field_distance(double aperture, double wavelength);

/// Quadrature nodes over the beam's velocity distribution (composite
/// Gauss-Legendre). Weights are nonnegative and sum to one; the gaussian is
/// integrated over +-6 sigma, clipped below at 5% of the mean.
std::vector<VelocityNode> velocity_weights(const BeamState& beam, int n_points);

} // namespace nearfield

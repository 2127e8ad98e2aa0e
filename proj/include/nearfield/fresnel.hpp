#pragma once

#include "nearfield/gratings.hpp"
#include "nearfield/physics.hpp"

#include <span>
#include <vector>

namespace nearfield {

/// Finite aperture sampled on a uniform grid, x_k = x0 + k dx.
struct SampledAperture
{
    double x0 = 0.0;
    double dx = 0.0;
    std::vector<complex> values;

    double position(std::size_t k) const { return x0 + static_cast<double>(k) * dx; }
};

/// n_slits periods of a binary grating centred on x = 0. Each sample is the
/// open fraction of its cell.
SampledAperture binary_grating_aperture(double period, double open_fraction, int n_slits, int samples_per_period);

/// Largest aperture step resolving the plane-wave Fresnel phase at screen
/// points x_out: lambda L / (2 max|x_a - x|).
double fresnel_max_step(const SampledAperture& aperture, double wavelength, double distance,
                        std::span<const double> x_out);

/// Paraxial Kirchhoff-Fresnel sum |sum_a t(x_a) exp(i pi (x_a - x)^2 / (lambda L))|^2
/// for plane-wave illumination, normalized to unit mean over x_out.
/// Throws if the aperture grid does not resolve the Fresnel phase.
std::vector<double> fresnel_propagate(const SampledAperture& aperture, double wavelength, double distance,
                                      std::span<const double> x_out);

/// Intensity behind the aperture for a point source at distance L in front of
/// it (source at x_source) and screen at distance L behind it; not normalized.
std::vector<double> point_source_pattern(const SampledAperture& aperture, double wavelength, double distance,
                                         double x_source, std::span<const double> x_out);

/// Incoherent Lau pattern: point sources spread over one period of the first
/// grating with weights |t1|^2, averaged over the beam's velocity nodes.
/// Normalized to unit mean over x_out.
struct LauOracle
{
    double period = 0.0;
    double open_fraction1 = 0.5;
    double distance = 0.0;
    int sources_per_period = 64;
};
std::vector<double> incoherent_lau_pattern(const LauOracle& setup, const SampledAperture& grating2,
                                           const Species& species, std::span<const VelocityNode> velocities,
                                           std::span<const double> x_out);

/// Near-field intensity landscape: rows are propagation distances, columns x.
struct Carpet
{
    std::vector<double> distances;
    std::vector<double> x;
    std::vector<std::vector<double>> intensity;
};

/// Carpet from the plane-wave Talbot series, density reconstructed from
/// m_max components of B_m(m z/L_T).
Carpet fourier_carpet(const CoefficientTable& b, double period, double talbot_length,
                      std::span<const double> distances, std::span<const double> x, int m_max);

/// Carpet from direct Fresnel sums over a finite aperture.
Carpet fresnel_carpet(const SampledAperture& aperture, double wavelength, std::span<const double> distances,
                      std::span<const double> x);

} // namespace nearfield

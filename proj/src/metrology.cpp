#include "nearfield/metrology.hpp"

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"

#include <cmath>

namespace nearfield {

using constants::pi;
using detail::require;

double stark_fringe_shift(const DeflectionField& field, double alpha_stat, double mass, double velocity)
{
    require(velocity > 0.0, "velocity must be positive");
    require(mass > 0.0, "mass must be positive");
    require(std::isfinite(field.grad_e_squared) && field.geometry_constant > 0.0, "invalid deflection field");
    return field.geometry_constant * alpha_stat * field.grad_e_squared / (2.0 * mass * velocity * velocity);
}

double total_polarizability(double alpha_stat, double dipole_rms, double temperature)
{
    require(temperature > 0.0, "temperature must be positive");
    return alpha_stat + dipole_rms * dipole_rms / (3.0 * constants::boltzmann_kB * temperature);
}

double inertial_fringe_shift(double acceleration, double free_time)
{
    require(free_time >= 0.0, "free evolution time must be nonnegative");
    return acceleration * free_time * free_time;
}

Vec3 coriolis_acceleration(const Vec3& v, const Vec3& w)
{
    return {2.0 * (v[1] * w[2] - v[2] * w[1]), 2.0 * (v[2] * w[0] - v[0] * w[2]), 2.0 * (v[0] * w[1] - v[1] * w[0])};
}

double grating_shift_combination(double dx1, double dx2, double dx3)
{
    return dx1 - 2.0 * dx2 + dx3;
}

void ShiftDistribution::validate() const
{
    require(sigma >= 0.0, "shift spread must be nonnegative");
    if (model == ShiftModel::empirical) {
        require(!samples.empty(), "empirical shift distribution needs samples");
    }
}

std::complex<double> shift_dephasing_factor(const ShiftDistribution& dist, double period)
{
    require(period > 0.0, "period must be positive");
    dist.validate();
    const double k = 2.0 * pi / period;
    switch (dist.model) {
    case ShiftModel::delta:
        return std::polar(1.0, k * dist.mean);
    case ShiftModel::gaussian:
        return std::polar(std::exp(-0.5 * k * k * dist.sigma * dist.sigma), k * dist.mean);
    case ShiftModel::empirical:
        break;
    }
    std::complex<double> sum{};
    for (double s : dist.samples) {
        sum += std::polar(1.0, k * s);
    }
    return sum / static_cast<double>(dist.samples.size());
}

} // namespace nearfield

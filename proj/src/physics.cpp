#include "nearfield/physics.hpp"

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace nearfield {

using detail::require;

void Species::validate() const
{
    require(mass > 0.0, "species mass must be positive");
    require(alpha_stat_vol >= 0.0 && alpha_opt_vol >= 0.0, "polarizability volumes must be nonnegative");
    require(dipole_rms >= 0.0, "dipole_rms must be nonnegative");
    require(c3_coefficient >= 0.0, "C3 coefficient must be nonnegative");
    require(absorption_cross_section >= 0.0, "absorption cross section must be nonnegative");
}

void BeamState::validate() const
{
    require(mean_velocity > 0.0, "mean velocity must be positive");
    require(relative_spread >= 0.0 && relative_spread < 1.0, "relative spread must lie in [0, 1)");
}

double de_broglie_wavelength(double mass, double velocity)
{
    require(mass > 0.0 && velocity > 0.0, "de Broglie wavelength needs positive mass and velocity");
    return constants::planck_h / (mass * velocity);
}

double talbot_length(double period, double wavelength)
{
    require(period > 0.0 && wavelength > 0.0, "Talbot length needs positive period and wavelength");
    return period * period / wavelength;
}

double talbot_time(double mass, double period)
{
    require(mass > 0.0 && period > 0.0, "Talbot time needs positive mass and period");
    return mass * period * period / constants::planck_h;
}

double coherence_width(double distance, double wavelength, double source_width)
{
    require(distance > 0.0 && wavelength > 0.0 && source_width > 0.0,
            "coherence width needs positive distance, wavelength and source width");
    return 2.0 * distance * wavelength / source_width;
}

double far_field_distance(double aperture, double wavelength)
{
    require(aperture > 0.0 && wavelength > 0.0, "far-field distance needs positive aperture and wavelength");
    return aperture * aperture / wavelength;
}

namespace {

// Composite Gauss-Legendre rule with at most eight nodes per panel; the
// signal oscillates in 1/v, which a single high-order rule resolves poorly.
quadrature::Rule composite_legendre(int n, double a, double b)
{
    const int panels = (n + 7) / 8;
    quadrature::Rule out;
    for (int p = 0; p < panels; ++p) {
        const int k = n / panels + (p < n % panels ? 1 : 0);
        const double lo = a + (b - a) * p / panels;
        const double hi = a + (b - a) * (p + 1) / panels;
        const auto rule = quadrature::gauss_legendre(k, lo, hi);
        out.nodes.insert(out.nodes.end(), rule.nodes.begin(), rule.nodes.end());
        out.weights.insert(out.weights.end(), rule.weights.begin(), rule.weights.end());
    }
    return out;
}

} // namespace

std::vector<VelocityNode> velocity_weights(const BeamState& beam, int n_points)
{
    beam.validate();
    require(n_points >= 1, "velocity_weights needs at least one point");
    const double mean = beam.mean_velocity;
    const double spread = beam.relative_spread;
    if (n_points == 1 || spread == 0.0) {
        return {{mean, 1.0}};
    }

    std::vector<VelocityNode> out;
    if (beam.shape == VelocityShape::top_hat) {
        const auto rule = composite_legendre(n_points, mean * (1.0 - spread), mean * (1.0 + spread));
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            out.push_back({rule.nodes[i], rule.weights[i]});
        }
    } else {
        // +-6 sigma, clipped at 5% of the mean velocity
        const double lo = mean * std::max(0.05, 1.0 - 6.0 * spread);
        const auto rule = composite_legendre(n_points, lo, mean * (1.0 + 6.0 * spread));
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double u = (rule.nodes[i] / mean - 1.0) / spread;
            out.push_back({rule.nodes[i], rule.weights[i] * std::exp(-0.5 * u * u)});
        }
    }
    double total = 0.0;
    for (const auto& node : out) {
        total += node.weight;
    }
    for (auto& node : out) {
        node.weight /= total;
    }
    return out;
}

} // namespace nearfield

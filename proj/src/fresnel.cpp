#include "nearfield/fresnel.hpp"

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/parallel.hpp"
#include "nearfield/talbot_lau.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nearfield {

using constants::pi;
using detail::require;

SampledAperture binary_grating_aperture(double period, double open_fraction, int n_slits, int samples_per_period)
{
    require(period > 0.0 && open_fraction > 0.0 && open_fraction < 1.0, "invalid grating geometry");
    require(n_slits >= 1 && samples_per_period >= 2, "aperture needs slits and samples");
    const int first = -(n_slits / 2);
    const double dx = period / samples_per_period;
    const double half = 0.5 * open_fraction * period;

    SampledAperture out;
    out.dx = dx;
    out.x0 = (first - 0.5) * period + 0.5 * dx;
    out.values.resize(static_cast<std::size_t>(n_slits) * static_cast<std::size_t>(samples_per_period));
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        const double x = out.position(k);
        const double centre = period * std::round(x / period);
        const double lo = std::max(x - 0.5 * dx, centre - half);
        const double hi = std::min(x + 0.5 * dx, centre + half);
        out.values[k] = std::max(0.0, hi - lo) / dx;
    }
    return out;
}

namespace {

double max_offset(const SampledAperture& aperture, std::span<const double> x_out, double shift)
{
    const double first = aperture.position(0);
    const double last = aperture.position(aperture.values.size() - 1);
    double worst = 0.0;
    for (double x : x_out) {
        worst = std::max({worst, std::abs(first - x - shift), std::abs(last - x - shift)});
    }
    return worst;
}

void require_resolved(const SampledAperture& aperture, double max_step)
{
    if (aperture.dx > max_step) {
        const double extent = aperture.dx * static_cast<double>(aperture.values.size());
        const auto needed = static_cast<long long>(std::ceil(extent / max_step));
        throw DomainError("aperture grid undersamples the Fresnel phase: need at least " + std::to_string(needed) +
                          " samples (have " + std::to_string(aperture.values.size()) + ")");
    }
}

void normalize_mean(std::vector<double>& values)
{
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    require(mean > 0.0, "propagated intensity vanishes");
    for (double& v : values) {
        v /= mean;
    }
}

} // namespace

double fresnel_max_step(const SampledAperture& aperture, double wavelength, double distance,
                        std::span<const double> x_out)
{
    require(wavelength > 0.0 && distance > 0.0, "wavelength and distance must be positive");
    require(!aperture.values.empty() && !x_out.empty(), "empty aperture or screen");
    return wavelength * distance / (2.0 * max_offset(aperture, x_out, 0.0));
}

std::vector<double> fresnel_propagate(const SampledAperture& aperture, double wavelength, double distance,
                                      std::span<const double> x_out)
{
    require_resolved(aperture, fresnel_max_step(aperture, wavelength, distance, x_out));
    const double scale = pi / (wavelength * distance);
    std::vector<double> out(x_out.size());
    parallel_for(x_out.size(), [&](std::size_t i) {
        complex sum{};
        for (std::size_t a = 0; a < aperture.values.size(); ++a) {
            const double u = aperture.position(a) - x_out[i];
            sum += aperture.values[a] * std::polar(1.0, scale * u * u);
        }
        out[i] = std::norm(sum);
    });
    normalize_mean(out);
    return out;
}

std::vector<double> point_source_pattern(const SampledAperture& aperture, double wavelength, double distance,
                                         double x_source, std::span<const double> x_out)
{
    require(wavelength > 0.0 && distance > 0.0, "wavelength and distance must be positive");
    require(!aperture.values.empty() && !x_out.empty(), "empty aperture or screen");
    // Local frequency of the combined phase is |2 x_a - x_s - x| / (lambda L).
    double offset = 0.0;
    for (double x : x_out) {
        offset = std::max(offset, 2.0 * max_offset(aperture, std::span(&x, 1), 0.5 * (x_source - x)));
    }
    require_resolved(aperture, wavelength * distance / (2.0 * offset));
    // (x_a - x_s)^2 + (x - x_a)^2 = 2 x_a^2 - 2 x_a (x_s + x) + x_s^2 + x^2; the
    // last two terms are a phase common to all x_a.
    const double scale = pi / (wavelength * distance);
    std::vector<complex> chirped(aperture.values.size());
    for (std::size_t a = 0; a < chirped.size(); ++a) {
        const double xa = aperture.position(a);
        chirped[a] = aperture.values[a] * std::polar(1.0, 2.0 * scale * xa * xa);
    }
    std::vector<double> out(x_out.size());
    for (std::size_t i = 0; i < x_out.size(); ++i) {
        const double u = x_source + x_out[i];
        const complex step = std::polar(1.0, -2.0 * scale * aperture.dx * u);
        complex phase = std::polar(1.0, -2.0 * scale * aperture.x0 * u);
        complex sum{};
        for (std::size_t a = 0; a < chirped.size(); ++a) {
            sum += chirped[a] * phase;
            phase *= step;
            if ((a & 1023) == 1023) {
                phase = std::polar(1.0, -2.0 * scale * aperture.position(a + 1) * u);
            }
        }
        out[i] = std::norm(sum);
    }
    return out;
}

std::vector<double> incoherent_lau_pattern(const LauOracle& setup, const SampledAperture& grating2,
                                           const Species& species, std::span<const VelocityNode> velocities,
                                           std::span<const double> x_out)
{
    require(setup.period > 0.0 && setup.distance > 0.0, "invalid Lau geometry");
    require(setup.sources_per_period >= 2, "need at least two sources per period");
    require(!velocities.empty(), "need at least one velocity node");

    // Sources over two periods of G1: a single point source images G2 with
    // period 2d, and the odd harmonics only cancel over a 2d window.
    const int n_sources = 2 * setup.sources_per_period;
    const double ds = setup.period / setup.sources_per_period;
    const double half = 0.5 * setup.open_fraction1 * setup.period;
    std::vector<double> source_x;
    std::vector<double> source_w;
    for (int i = 0; i < n_sources; ++i) {
        const double xs = -setup.period + (i + 0.5) * ds;
        const double centre = setup.period * std::round(xs / setup.period);
        const double open = std::max(0.0, std::min(xs + 0.5 * ds, centre + half) - std::max(xs - 0.5 * ds, centre - half));
        if (open > 0.0) {
            source_x.push_back(xs);
            source_w.push_back(open / ds);
        }
    }

    const std::size_t jobs = source_x.size() * velocities.size();
    const auto patterns = parallel_map<std::vector<double>>(jobs, [&](std::size_t job) {
        const std::size_t s = job % source_x.size();
        const VelocityNode& node = velocities[job / source_x.size()];
        const double lambda = de_broglie_wavelength(species.mass, node.velocity);
        return point_source_pattern(grating2, lambda, setup.distance, source_x[s], x_out);
    });
    std::vector<double> out(x_out.size(), 0.0);
    for (std::size_t job = 0; job < jobs; ++job) {
        const double w = source_w[job % source_x.size()] * velocities[job / source_x.size()].weight;
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += w * patterns[job][i];
        }
    }
    normalize_mean(out);
    return out;
}

Carpet fourier_carpet(const CoefficientTable& b, double period, double talbot_length,
                      std::span<const double> distances, std::span<const double> x, int m_max)
{
    require(talbot_length > 0.0, "Talbot length must be positive");
    Carpet carpet{{distances.begin(), distances.end()}, {x.begin(), x.end()}, {}};
    carpet.intensity.resize(distances.size());
    parallel_for(distances.size(), [&](std::size_t r) {
        FourierPattern pattern = talbot_pattern(b, period, distances[r] / talbot_length, m_max);
        auto& row = carpet.intensity[r];
        row.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            row[i] = pattern.density(x[i]);
        }
    });
    return carpet;
}

Carpet fresnel_carpet(const SampledAperture& aperture, double wavelength, std::span<const double> distances,
                      std::span<const double> x)
{
    Carpet carpet{{distances.begin(), distances.end()}, {x.begin(), x.end()}, {}};
    carpet.intensity.resize(distances.size());
    for (std::size_t r = 0; r < distances.size(); ++r) {
        carpet.intensity[r] = fresnel_propagate(aperture, wavelength, distances[r], x);
    }
    return carpet;
}

} // namespace nearfield

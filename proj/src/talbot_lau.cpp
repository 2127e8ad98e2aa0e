#include "nearfield/talbot_lau.hpp"

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/parallel.hpp"

#include <cmath>

namespace nearfield {

using detail::require;
using constants::pi;

void InterferometerConfig::validate() const
{
    species.validate();
    beam.validate();
    const double d = grating_period(grating2);
    const auto same_period = [d](const GratingSpec& g) {
        return std::abs(grating_period(g) - d) <= 1e-9 * d;
    };
    require(same_period(grating1) && (!grating3 || same_period(*grating3)), "all grating periods must be equal");
    if (mode == InterferometerMode::spatial) {
        require(separation > 0.0, "grating separation must be positive");
    } else {
        require(pulse_delay > 0.0, "pulse delay must be positive");
    }
    require(j_max >= 1 && 2 * j_max <= grid_size, "j_max must lie in [1, grid_size/2]");
}

complex FourierPattern::component(int m) const
{
    const int k = std::abs(m);
    if (k > m_max()) {
        return {};
    }
    const complex c = components[static_cast<std::size_t>(k)];
    return m >= 0 ? c : std::conj(c);
}

double FourierPattern::density(double x) const
{
    double sum = components.empty() ? 0.0 : components.front().real();
    for (int m = 1; m <= m_max(); ++m) {
        sum += 2.0 * (components[static_cast<std::size_t>(m)] * std::polar(1.0, 2.0 * pi * m * x / period)).real();
    }
    return sum;
}

complex talbot_lau_coefficient(const CoefficientTable& b, int m, double xi)
{
    require(std::abs(xi) < 1e6, "Talbot ratio out of range");
    // B_m is 2-periodic in xi; reducing first keeps the phases small.
    const double reduced = xi - 2.0 * std::floor(0.5 * xi);
    const int j_max = b.j_max();
    complex sum{};
    if (const int n = b.alias_period(); n > 0) {
        // Complete DFT: sum over one period of j with j - m folded back into
        // the table, so integer xi reproduces the grid's |t|^2 spectrum exactly.
        for (int j = -j_max + 1; j <= j_max; ++j) {
            int k = j - m;
            double sign = 1.0;
            while (k <= -j_max) {
                k += n;
                sign = -sign;
            }
            while (k > j_max) {
                k -= n;
                sign = -sign;
            }
            const double q = m - 2 * j;
            sum += b(j) * sign * std::conj(b(k)) * std::polar(1.0, pi * std::fmod(q * reduced, 2.0));
        }
        return sum;
    }
    for (int j = std::max(-j_max, m - j_max); j <= std::min(j_max, m + j_max); ++j) {
        const double k = m - 2 * j;
        sum += b(j) * std::conj(b(j - m)) * std::polar(1.0, pi * std::fmod(k * reduced, 2.0));
    }
    return sum;
}

CoefficientTable talbot_lau_coefficients(const CoefficientTable& b, double xi, int m_max)
{
    require(m_max >= 0 && m_max <= b.j_max(), "m_max must not exceed j_max");
    std::vector<complex> values(static_cast<std::size_t>(2 * m_max + 1));
    for (int m = -m_max; m <= m_max; ++m) {
        values[static_cast<std::size_t>(m + m_max)] = talbot_lau_coefficient(b, m, xi);
    }
    return CoefficientTable(m_max, std::move(values));
}

FourierPattern talbot_pattern(const CoefficientTable& b, double period, double l_over_lt, int m_max)
{
    require(m_max >= 0 && m_max <= b.j_max(), "m_max must not exceed j_max");
    require(period > 0.0, "period must be positive");
    FourierPattern pattern;
    pattern.period = period;
    pattern.components.resize(static_cast<std::size_t>(m_max + 1));
    for (int m = 0; m <= m_max; ++m) {
        pattern.components[static_cast<std::size_t>(m)] = talbot_lau_coefficient(b, m, m * l_over_lt);
    }
    pattern.truncation_residual = b.tail_weight();
    return pattern;
}

PathGeometry path_geometry(const InterferometerConfig& cfg, double v_z)
{
    const double d = cfg.period();
    if (cfg.mode == InterferometerMode::time_domain) {
        return {d, cfg.pulse_delay, talbot_time(cfg.species.mass, d)};
    }
    require(v_z > 0.0, "longitudinal velocity must be positive");
    const double l_t = talbot_length(d, de_broglie_wavelength(cfg.species.mass, v_z));
    return {d, cfg.separation / v_z, l_t / v_z};
}

double talbot_ratio(const InterferometerConfig& cfg, double v_z)
{
    const PathGeometry g = path_geometry(cfg, v_z);
    return g.half_duration / g.talbot_scale;
}

complex apply_channel(complex coefficient, const DecoherenceChannel& channel, const InterferometerConfig& cfg,
                      double v_z, int m)
{
    return apply_channel(coefficient, channel, path_geometry(cfg, v_z), m);
}

namespace {

void require_coherence(const TransmissionProfile& profile, const char* role)
{
    if (profile.is_pure_phase() && !profile.is_trivial()) {
        throw DomainError(std::string("no coherence ") + role + ": grating is a pure phase mask");
    }
}

} // namespace

FourierPattern detector_signal(const InterferometerConfig& cfg, double v_z, int m_max)
{
    cfg.validate();
    require(v_z > 0.0, "longitudinal velocity must be positive");
    require(m_max >= 1 && 2 * m_max <= cfg.j_max, "2 m_max must not exceed j_max");

    const double xi = talbot_ratio(cfg, v_z);
    // TLI setups use one grating design three times; build each profile once.
    const TransmissionProfile profile1 = transmission(cfg.grating1, cfg.species, v_z, cfg.grid_size);
    const TransmissionProfile profile2 = cfg.grating2 == cfg.grating1
                                             ? profile1
                                             : transmission(cfg.grating2, cfg.species, v_z, cfg.grid_size);
    require_coherence(profile1, "preparation");
    const CoefficientTable mask1 = probability_coefficients(cfg.grating1, m_max, cfg.grid_size);
    CoefficientTable mask3;
    if (cfg.grating3) {
        if (*cfg.grating3 == cfg.grating1) {
            mask3 = mask1;
        } else {
            const TransmissionProfile profile3 = transmission(*cfg.grating3, cfg.species, v_z, cfg.grid_size);
            require_coherence(profile3, "readout");
            mask3 = probability_coefficients(*cfg.grating3, m_max, cfg.grid_size);
        }
    }
    const CoefficientTable b2 = fourier_coefficients(profile2, cfg.j_max);

    std::vector<DecoherenceChannel> channels;
    if (cfg.environment) {
        channels = cfg.environment(v_z);
    }
    const PathGeometry geometry = path_geometry(cfg, v_z);

    FourierPattern signal;
    signal.period = cfg.period();
    signal.truncation_residual = b2.tail_weight();
    signal.components.resize(static_cast<std::size_t>(m_max + 1));
    for (int m = 0; m <= m_max; ++m) {
        complex b = talbot_lau_coefficient(b2, 2 * m, m * xi);
        if (!channels.empty()) {
            b *= decoherence_factor(channels, geometry, 2 * m);
        }
        complex s = std::conj(mask1(m)) * b;
        if (cfg.grating3) {
            s *= std::conj(mask3(m));
        }
        signal.components[static_cast<std::size_t>(m)] = s;
    }
    return signal;
}

double sinusoidal_visibility(const FourierPattern& signal)
{
    require(signal.m_max() >= 1, "visibility needs the first Fourier component");
    const double s0 = std::abs(signal.components[0]);
    if (s0 == 0.0) {
        throw DomainError("zero mean signal: visibility undefined");
    }
    return 2.0 * std::abs(signal.components[1]) / s0;
}

AveragedSignal velocity_averaged_pattern(const InterferometerConfig& cfg, int n_velocities, int m_max)
{
    const auto nodes = velocity_weights(cfg.beam, n_velocities);
    const auto signals =
        parallel_map<FourierPattern>(nodes.size(), [&](std::size_t i) { return detector_signal(cfg, nodes[i].velocity, m_max); });
    AveragedSignal out;
    out.pattern.period = cfg.period();
    out.pattern.components.assign(static_cast<std::size_t>(m_max + 1), complex{});
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (int m = 0; m <= m_max; ++m) {
            out.pattern.components[static_cast<std::size_t>(m)] +=
                nodes[i].weight * signals[i].components[static_cast<std::size_t>(m)];
        }
        out.pattern.truncation_residual = std::max(out.pattern.truncation_residual, signals[i].truncation_residual);
    }
    out.visibility = sinusoidal_visibility(out.pattern);
    return out;
}

double time_domain_visibility(const InterferometerConfig& cfg, double pulse_delay, int m_max)
{
    require(cfg.mode == InterferometerMode::time_domain, "time_domain_visibility needs a time-domain configuration");
    require(pulse_delay > 0.0, "pulse delay must be positive");
    InterferometerConfig at = cfg;
    at.pulse_delay = pulse_delay;
    return sinusoidal_visibility(detector_signal(at, cfg.beam.mean_velocity, m_max));
}

} // namespace nearfield

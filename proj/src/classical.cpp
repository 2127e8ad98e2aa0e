#include "nearfield/classical.hpp"

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/parallel.hpp"

#include <array>
#include <cmath>
#include <random>

namespace nearfield {

using constants::pi;
using detail::require;

namespace {

double reduce(double x, double d)
{
    return x - d * std::floor(x / d + 0.5);
}

double phase_gradient(const GratingSpec& grating, const Species& species, double v_z, double u)
{
    if (const auto* g = std::get_if<MaterialGrating>(&grating)) {
        return material_phase_gradient(*g, species, v_z, u);
    }
    const double d = grating_period(grating);
    const double phi0 = std::holds_alternative<LaserPhaseGrating>(grating)
                            ? laser_phase_amplitude(std::get<LaserPhaseGrating>(grating), species, v_z)
                            : std::get<IonizingGrating>(grating).phase_amplitude;
    // d/dx of phi0 cos^2(pi x/d)
    return -phi0 * (pi / d) * std::sin(2.0 * pi * u / d);
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Tally
{
    std::int64_t survivors = 0;
    std::vector<complex> sums; // sum over survivors of exp(-2 pi i m x3/d)
    std::vector<double> histogram;
};

double visibility_of(std::span<const complex> rho, const CoefficientTable* c3)
{
    complex s0 = rho[0];
    complex s1 = rho[1];
    if (c3 != nullptr) {
        s0 *= std::conj((*c3)(0));
        s1 *= std::conj((*c3)(1));
    }
    return 2.0 * std::abs(s1) / std::abs(s0);
}

double flight_time(const InterferometerConfig& cfg, double v_z)
{
    require(cfg.mode == InterferometerMode::spatial, "the classical model needs a spatial configuration");
    require(v_z > 0.0, "longitudinal velocity must be positive");
    return cfg.separation / v_z;
}

} // namespace

Kick deflection_kick(const GratingSpec& grating, const Species& species, double v_z, double x)
{
    require(v_z > 0.0, "longitudinal velocity must be positive");
    const double d = grating_period(grating);
    const double u = reduce(x, d);
    if (std::holds_alternative<MaterialGrating>(grating) && transmission_probability(grating, u) == 0.0) {
        return {true, 0.0};
    }
    return {false, constants::hbar / species.mass * phase_gradient(grating, species, v_z, u)};
}

ClassicalResult classical_visibility(const InterferometerConfig& cfg, const RayEnsemble& ensemble, double v_z,
                                     int m_max)
{
    cfg.validate();
    require(m_max >= 1, "m_max must be at least 1");
    require(ensemble.count >= 1, "ray count must be positive");
    const double T = flight_time(cfg, v_z);
    const double d = cfg.period();
    const double window = ensemble.divergence_window.value_or(20.0 * d / T);
    if (window <= 0.0) {
        throw DomainError("degenerate ray ensemble: zero divergence window is not an incoherent source");
    }
    require(window * T >= 10.0 * d, "divergence window too narrow for incoherent illumination (need window L/v >= 10 d)");

    const double a = ensemble.transverse_acceleration;
    const std::size_t orders = static_cast<std::size_t>(m_max) + 1;
    const auto tallies = parallel_map<Tally>(classical_partitions, [&](std::size_t p) {
        Tally tally;
        tally.sums.assign(orders, complex{});
        tally.histogram.assign(classical_histogram_bins, 0.0);
        std::mt19937_64 rng(splitmix64(ensemble.seed + p));
        const std::int64_t n =
            ensemble.count / classical_partitions + (static_cast<std::int64_t>(p) < ensemble.count % classical_partitions);
        const auto survives = [&](const GratingSpec& g, double x) {
            const double prob = transmission_probability(g, x);
            return prob >= 1.0 || (prob > 0.0 && uniform01(rng) < prob);
        };
        for (std::int64_t i = 0; i < n; ++i) {
            const double x1 = d * (uniform01(rng) - 0.5);
            const double vx = window * (2.0 * uniform01(rng) - 1.0);
            if (!survives(cfg.grating1, x1)) {
                continue;
            }
            const double x2 = x1 + vx * T + 0.5 * a * T * T;
            if (!survives(cfg.grating2, x2)) {
                continue;
            }
            const Kick kick = deflection_kick(cfg.grating2, cfg.species, v_z, x2);
            if (kick.absorbed) {
                continue;
            }
            const double x3 = x2 + (vx + a * T + kick.delta_v) * T + 0.5 * a * T * T;
            const double u = reduce(x3, d);
            ++tally.survivors;
            const complex step = std::polar(1.0, -2.0 * pi * u / d);
            complex phase = 1.0;
            for (std::size_t m = 0; m < orders; ++m) {
                tally.sums[m] += phase;
                phase *= step;
            }
            const int bin = std::min(classical_histogram_bins - 1,
                                     static_cast<int>((u / d + 0.5) * classical_histogram_bins));
            tally.histogram[static_cast<std::size_t>(bin)] += 1.0;
        }
        return tally;
    });

    ClassicalResult result;
    std::vector<complex> rho(orders);
    result.histogram.assign(classical_histogram_bins, 0.0);
    for (const Tally& t : tallies) {
        result.survivors += t.survivors;
        for (std::size_t m = 0; m < orders; ++m) {
            rho[m] += t.sums[m];
        }
        for (int b = 0; b < classical_histogram_bins; ++b) {
            result.histogram[static_cast<std::size_t>(b)] += t.histogram[static_cast<std::size_t>(b)];
        }
    }
    if (result.survivors < 1000) {
        throw ConvergenceError("too few surviving rays for moire statistics", static_cast<double>(result.survivors));
    }
    for (double& h : result.histogram) {
        h *= static_cast<double>(classical_histogram_bins) / static_cast<double>(result.survivors);
    }

    std::optional<CoefficientTable> c3;
    if (cfg.grating3) {
        c3 = probability_coefficients(*cfg.grating3, m_max, cfg.grid_size);
    }
    result.signal.period = d;
    result.signal.components.resize(orders);
    for (std::size_t m = 0; m < orders; ++m) {
        complex s = rho[m] / static_cast<double>(ensemble.count);
        if (c3) {
            s *= std::conj((*c3)(static_cast<int>(m)));
        }
        result.signal.components[m] = s;
    }
    result.visibility = sinusoidal_visibility(result.signal);

    // Bootstrap over partitions.
    constexpr int resamples = 256;
    std::mt19937_64 rng(splitmix64(ensemble.seed ^ 0x5bd1e995ULL));
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < resamples; ++r) {
        std::array<complex, 2> boot{};
        for (int k = 0; k < classical_partitions; ++k) {
            const Tally& t = tallies[rng() % classical_partitions];
            boot[0] += t.sums[0];
            boot[1] += t.sums[1];
        }
        const double v = boot[0] == complex{} ? 0.0 : visibility_of(boot, c3 ? &*c3 : nullptr);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / resamples;
    result.visibility_error = std::sqrt(std::max(0.0, sum_sq / resamples - mean * mean));
    return result;
}

FourierPattern classical_moire(const InterferometerConfig& cfg, double v_z, int m_max)
{
    cfg.validate();
    require(m_max >= 1, "m_max must be at least 1");
    const double T = flight_time(cfg, v_z);
    const double d = cfg.period();

    // Integration range over one period of G2: the open slit for material
    // gratings, the full period otherwise.
    double lo = -0.5 * d;
    double hi = 0.5 * d;
    if (const auto* g = std::get_if<MaterialGrating>(&cfg.grating2)) {
        hi = open_half_width(*g);
        lo = -hi;
    }
    // Cells with the exact average of exp(i theta) for linear theta; the kick
    // phase near an interacting wall varies too fast to resolve and averages
    // out. Smooth kicks need far fewer cells.
    const auto* material = std::get_if<MaterialGrating>(&cfg.grating2);
    const int cells = material == nullptr ? 1 << 12 : (material->interaction == WallInteraction::none ? 1 << 8 : 1 << 16);
    const double h = (hi - lo) / cells;
    std::vector<double> shift(static_cast<std::size_t>(cells) + 1);
    for (int k = 0; k <= cells; ++k) {
        const double x = lo + k * h;
        shift[static_cast<std::size_t>(k)] = 2.0 * x + constants::hbar / cfg.species.mass *
                                                           phase_gradient(cfg.grating2, cfg.species, v_z, x) * T;
    }
    // G_m = (1/d) int |t2|^2 exp(-2 pi i m shift/d) dx for all m at once.
    std::vector<complex> g(static_cast<std::size_t>(m_max) + 1);
    const double k1 = -2.0 * pi / d;
    for (int c = 0; c < cells; ++c) {
        const double w = transmission_probability(cfg.grating2, lo + (c + 0.5) * h);
        if (w == 0.0) {
            continue;
        }
        const double left = k1 * reduce(shift[static_cast<std::size_t>(c)], d);
        const double delta = k1 * (shift[static_cast<std::size_t>(c) + 1] - shift[static_cast<std::size_t>(c)]);
        const complex step = std::polar(1.0, left);
        complex phase = 1.0;
        g[0] += w;
        for (int m = 1; m <= m_max; ++m) {
            phase *= step;
            const double dm = m * delta;
            const complex avg =
                std::abs(dm) < 1e-6 ? complex(1.0, 0.5 * dm) : (std::polar(1.0, dm) - 1.0) / complex(0.0, dm);
            g[static_cast<std::size_t>(m)] += w * phase * avg;
        }
    }

    const CoefficientTable c1 =
        probability_coefficients(cfg.grating1, m_max, cfg.grid_size);
    std::optional<CoefficientTable> c3;
    if (cfg.grating3) {
        c3 = probability_coefficients(*cfg.grating3, m_max, cfg.grid_size);
    }

    FourierPattern out;
    out.period = d;
    out.components.resize(static_cast<std::size_t>(m_max) + 1);
    for (int m = 0; m <= m_max; ++m) {
        complex s = std::conj(c1(m)) * g[static_cast<std::size_t>(m)] * (h / d);
        if (c3) {
            s *= std::conj((*c3)(m));
        }
        out.components[static_cast<std::size_t>(m)] = s;
    }
    return out;
}

AveragedSignal classical_velocity_averaged(const InterferometerConfig& cfg, int n_velocities, int m_max)
{
    const auto nodes = velocity_weights(cfg.beam, n_velocities);
    const auto patterns = parallel_map<FourierPattern>(
        nodes.size(), [&](std::size_t i) { return classical_moire(cfg, nodes[i].velocity, m_max); });
    AveragedSignal out;
    out.pattern.period = cfg.period();
    out.pattern.components.assign(static_cast<std::size_t>(m_max) + 1, complex{});
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (int m = 0; m <= m_max; ++m) {
            out.pattern.components[static_cast<std::size_t>(m)] +=
                nodes[i].weight * patterns[i].components[static_cast<std::size_t>(m)];
        }
    }
    out.visibility = sinusoidal_visibility(out.pattern);
    return out;
}

} // namespace nearfield

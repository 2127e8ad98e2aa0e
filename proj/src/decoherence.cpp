#include "nearfield/decoherence.hpp"

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nearfield {

using detail::require;
using constants::pi;

namespace {

double sinc(double z)
{
    return std::abs(z) < 1e-4 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
}

complex decoherence_exponent(const DecoherenceChannel& channel, const PathGeometry& geometry, int m)
{
    require(geometry.period > 0.0 && geometry.half_duration > 0.0 && geometry.talbot_scale > 0.0,
            "path geometry needs positive period, duration and Talbot scale");
    require(static_cast<bool>(channel.eta), "decoherence channel has no eta function");
    if (channel.constant_rate && *channel.constant_rate == 0.0) {
        return {};
    }
    const double tau = geometry.half_duration;
    const double scale = 0.5 * m * geometry.period / geometry.talbot_scale;
    const auto rate = [&](double t) { return channel.constant_rate ? *channel.constant_rate : channel.rate(t); };

    const auto right = [&](double t) { return rate(t) * (1.0 - channel.eta(scale * (t - tau))); };
    const auto left = [&](double t) { return rate(t) * (1.0 - channel.eta(scale * (-t - tau))); };

    constexpr double rel_tol = 1e-6;
    const double abs_tol = 1e-13;
    const auto a = quadrature::integrate_adaptive(left, -tau, 0.0, rel_tol, abs_tol);
    const auto b = quadrature::integrate_adaptive(right, 0.0, tau, rel_tol, abs_tol);
    if (!a.converged || !b.converged) {
        throw ConvergenceError("decoherence quadrature did not converge for channel '" + channel.label + "'",
                               a.error_estimate + b.error_estimate);
    }
    return a.value + b.value;
}

} // namespace

complex decoherence_factor(const DecoherenceChannel& channel, const PathGeometry& geometry, int m)
{
    return std::exp(-decoherence_exponent(channel, geometry, m));
}

complex decoherence_factor(std::span<const DecoherenceChannel> channels, const PathGeometry& geometry, int m)
{
    complex exponent{};
    for (const auto& channel : channels) {
        exponent += decoherence_exponent(channel, geometry, m);
    }
    return std::exp(-exponent);
}

complex apply_channel(complex coefficient, const DecoherenceChannel& channel, const PathGeometry& geometry, int m)
{
    return coefficient * decoherence_factor(channel, geometry, m);
}

void GasEnvironment::validate() const
{
    require(gas_mass > 0.0, "gas mass must be positive");
    require(temperature > 0.0, "gas temperature must be positive");
    require(pressure >= 0.0, "gas pressure must be nonnegative");
    if (scattering_model == ScatteringModel::user_table) {
        require(table.theta.size() >= 2 && table.theta.size() == table.f_squared.size(),
                "scattering table needs at least two (theta, f2) rows");
        require(std::is_sorted(table.theta.begin(), table.theta.end()), "scattering table angles must be sorted");
    }
}

double GasEnvironment::number_density() const
{
    return pressure / (constants::boltzmann_kB * temperature);
}

namespace {

double interpolate_table(const ScatteringTable& table, double theta)
{
    const auto& x = table.theta;
    const auto& y = table.f_squared;
    if (theta <= x.front()) {
        return y.front();
    }
    if (theta >= x.back()) {
        return y.back();
    }
    const auto it = std::upper_bound(x.begin(), x.end(), theta);
    const auto i = static_cast<std::size_t>(it - x.begin());
    const double t = (theta - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + t * (y[i] - y[i - 1]);
}

// Angular average of sinc(a sin(theta/2)) weighted by |f|^2 / sigma, written
// in u = sin(theta/2), where sin(theta) d theta = 4 u du.
double table_angular_average(const ScatteringTable& table, double a, int nodes_per_panel)
{
    constexpr long max_panels = 1L << 16;
    const long panels = static_cast<long>(std::ceil(std::abs(a) / pi)) + 1;
    if (panels > max_panels) {
        throw ConvergenceError("angular quadrature needs too many panels for this separation");
    }
    const auto rule = quadrature::gauss_legendre(nodes_per_panel);
    double numerator = 0.0;
    double norm = 0.0;
    for (long p = 0; p < panels; ++p) {
        const double u0 = static_cast<double>(p) / static_cast<double>(panels);
        const double u1 = static_cast<double>(p + 1) / static_cast<double>(panels);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * rule.nodes[i];
            const double w = 0.5 * (u1 - u0) * rule.weights[i];
            const double f2 = interpolate_table(table, 2.0 * std::asin(u));
            numerator += w * f2 * 4.0 * u * sinc(a * u);
            norm += w * f2 * 4.0 * u;
        }
    }
    return numerator / norm;
}

} // namespace

complex collisional_eta(const GasEnvironment& env, double x, int n_angle, int n_velocity)
{
    env.validate();
    require(x >= 0.0, "path separation must be nonnegative");
    require(n_angle >= 2 && n_velocity >= 2, "collisional_eta needs at least two angle and velocity nodes");
    if (x == 0.0) {
        return 1.0;
    }
    // Maxwell-Boltzmann speeds v = v_p s with density (4/sqrt(pi)) s^2 exp(-s^2).
    const double v_p = std::sqrt(2.0 * constants::boltzmann_kB * env.temperature / env.gas_mass);
    const auto speeds = quadrature::gauss_legendre(n_velocity, 0.0, 6.0);
    double total_weight = 0.0;
    double eta = 0.0;
    for (std::size_t i = 0; i < speeds.nodes.size(); ++i) {
        const double s = speeds.nodes[i];
        const double w = speeds.weights[i] * 4.0 / std::sqrt(pi) * s * s * std::exp(-s * s);
        const double a = 2.0 * v_p * s * env.gas_mass * x / constants::hbar;
        double angular = 0.0;
        if (env.scattering_model == ScatteringModel::isotropic_constant_amplitude) {
            angular = std::abs(a) < 1e-3 ? 1.0 - a * a / 12.0 : 2.0 * (1.0 - std::cos(a)) / (a * a);
        } else {
            angular = table_angular_average(env.table, a, n_angle);
            const double refined = table_angular_average(env.table, a, 2 * n_angle);
            if (std::abs(refined - angular) > 1e-6) {
                throw ConvergenceError("angular quadrature for collisional eta did not converge",
                                       std::abs(refined - angular));
            }
            angular = refined;
        }
        eta += w * angular;
        total_weight += w;
    }
    return eta / total_weight;
}

double mean_relative_speed(const GasEnvironment& env, double beam_velocity)
{
    env.validate();
    require(beam_velocity >= 0.0, "beam velocity must be nonnegative");
    const double alpha = std::sqrt(2.0 * constants::boltzmann_kB * env.temperature / env.gas_mass);
    const double s = beam_velocity / alpha;
    if (s < 1e-6) {
        return 2.0 * alpha / std::sqrt(pi);
    }
    return alpha * ((s + 0.5 / s) * std::erf(s) + std::exp(-s * s) / std::sqrt(pi));
}

DecoherenceChannel collisional_channel(const GasEnvironment& env, double total_cross_section, double beam_velocity)
{
    env.validate();
    require(total_cross_section > 0.0, "total cross section must be positive");
    const double r = env.number_density() * total_cross_section * mean_relative_speed(env, beam_velocity);
    DecoherenceChannel channel;
    channel.label = "collisional";
    channel.constant_rate = r;
    channel.rate = [r](double) { return r; };
    channel.eta = [env](double x) { return collisional_eta(env, std::abs(x)); };
    return channel;
}

DecoherenceChannel thermal_emission_channel(std::span<const EmissionLine> spectrum)
{
    require(!spectrum.empty(), "emission spectrum is empty");
    double total = 0.0;
    for (const auto& line : spectrum) {
        require(line.rate >= 0.0, "emission rates must be nonnegative");
        require(line.wavelength > 0.0, "emission wavelengths must be positive");
        total += line.rate;
    }
    std::vector<EmissionLine> lines(spectrum.begin(), spectrum.end());
    DecoherenceChannel channel;
    channel.label = "thermal-emission";
    channel.constant_rate = total;
    channel.rate = [total](double) { return total; };
    channel.eta = [lines, total](double x) -> complex {
        if (total == 0.0) {
            return 1.0;
        }
        double eta = 0.0;
        for (const auto& line : lines) {
            eta += line.rate / total * sinc(2.0 * pi * x / line.wavelength);
        }
        return eta;
    };
    return channel;
}

double absorption_visibility_factor(double mean_photons, double shift_per_photon)
{
    require(mean_photons >= 0.0, "mean photon number must be nonnegative");
    // |exp(n (exp(2 pi i s) - 1))|
    return std::exp(mean_photons * (std::cos(2.0 * pi * shift_per_photon) - 1.0));
}

DecoherenceChannel csl_channel(double lambda0, double r_c, double mass)
{
    require(lambda0 > 0.0 && r_c > 0.0, "CSL parameters must be positive");
    require(mass > 0.0, "mass must be positive");
    const double n = mass / constants::amu;
    const double r = lambda0 * n * n;
    DecoherenceChannel channel;
    channel.label = "csl";
    channel.constant_rate = r;
    channel.rate = [r](double) { return r; };
    channel.eta = [r_c](double x) -> complex { return std::exp(-x * x / (4.0 * r_c * r_c)); };
    return channel;
}

namespace {

std::vector<std::pair<double, double>> read_two_columns(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::pair<double, double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double a = 0.0;
        double b = 0.0;
        if (!(fields >> a)) {
            continue; // blank line or header
        }
        if (!(fields >> b)) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected two numeric columns");
        }
        rows.emplace_back(a, b);
    }
    return rows;
}

} // namespace

std::vector<EmissionLine> read_emission_spectrum(const std::filesystem::path& path)
{
    std::vector<EmissionLine> lines;
    for (const auto& [wavelength, rate] : read_two_columns(path)) {
        lines.push_back({wavelength, rate});
    }
    if (lines.empty()) {
        throw ConfigError(path.string() + ": emission spectrum is empty");
    }
    return lines;
}

ScatteringTable read_scattering_table(const std::filesystem::path& path)
{
    ScatteringTable table;
    for (const auto& [theta, f2] : read_two_columns(path)) {
        table.theta.push_back(theta);
        table.f_squared.push_back(f2);
    }
    return table;
}

} // namespace nearfield

#include "nearfield/csl.hpp"

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/parallel.hpp"
#include "nearfield/talbot_lau.hpp"

#include <cmath>
#include <string>

namespace nearfield {

using detail::require;

void CslParameters::validate() const
{
    require(lambda0 > 0.0 && r_c > 0.0, "CSL parameters must be positive");
}

namespace {

InterferometerConfig at_mass(const InterferometerConfig& cfg, double mass)
{
    require(cfg.mode == InterferometerMode::time_domain, "CSL bounds need a time-domain configuration");
    require(mass > 0.0, "mass must be positive");
    const double d = cfg.period();
    const double fraction = cfg.pulse_delay / talbot_time(cfg.species.mass, d);
    InterferometerConfig out = cfg;
    out.species.mass = mass;
    out.pulse_delay = fraction * talbot_time(mass, d);
    return out;
}

} // namespace

double csl_visibility(const InterferometerConfig& cfg, const CslParameters& params, double mass)
{
    params.validate();
    InterferometerConfig c = at_mass(cfg, mass);
    c.environment = [params, mass](double) { return std::vector<DecoherenceChannel>{csl_channel(params.lambda0, params.r_c, mass)}; };
    return sinusoidal_visibility(detector_signal(c, c.beam.mean_velocity, 1));
}

double csl_reduction_factor(const InterferometerConfig& cfg, const CslParameters& params, double mass)
{
    params.validate();
    const InterferometerConfig c = at_mass(cfg, mass);
    const PathGeometry geometry = path_geometry(c, c.beam.mean_velocity);
    return std::abs(decoherence_factor(csl_channel(params.lambda0, params.r_c, mass), geometry, 2));
}

CriticalMassResult critical_mass(const CslParameters& params, const InterferometerConfig& cfg, double threshold,
                                 double lower_amu, double upper_amu)
{
    params.validate();
    require(threshold > 0.0 && threshold < 1.0, "threshold must lie in (0, 1)");
    require(lower_amu > 0.0 && upper_amu > lower_amu, "invalid mass bracket");
    InterferometerConfig quiet = at_mass(cfg, cfg.species.mass);
    quiet.environment = nullptr;
    if (sinusoidal_visibility(detector_signal(quiet, quiet.beam.mean_velocity, 1)) <= csl_min_quantum_visibility) {
        throw DomainError("operating point unusable: quantum visibility does not exceed 0.1");
    }

    const auto reduction = [&](double log_mass) {
        return csl_reduction_factor(cfg, params, std::exp(log_mass) * constants::amu);
    };
    double lo = std::log(lower_amu);
    double hi = std::log(upper_amu);
    if (reduction(lo) < threshold || reduction(hi) >= threshold) {
        throw DomainError("no critical-mass crossing within the mass bracket");
    }
    CriticalMassResult result;
    const double tolerance = std::log(1.01);
    while (hi - lo > tolerance) {
        if (++result.iterations > 60) {
            throw ConvergenceError("critical-mass bisection did not converge", hi - lo);
        }
        const double mid = 0.5 * (lo + hi);
        (reduction(mid) < threshold ? hi : lo) = mid;
    }
    result.mass = std::exp(hi) * constants::amu;
    return result;
}

std::vector<double> log_grid(double lo, double hi, int n)
{
    require(lo > 0.0 && hi > lo && n >= 2, "log grid needs 0 < lo < hi and n >= 2");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    }
    out.back() = hi;
    return out;
}

ExclusionMap exclusion_map(const std::vector<double>& lambda0_grid, const std::vector<double>& r_c_grid,
                           const InterferometerConfig& cfg, double threshold)
{
    require(lambda0_grid.size() >= 2 && r_c_grid.size() >= 2, "exclusion map needs at least 2x2 cells");
    ExclusionMap map{lambda0_grid, r_c_grid, {}, {}};
    const std::size_t cols = lambda0_grid.size();
    const std::size_t rows = r_c_grid.size();
    struct Cell
    {
        std::optional<double> mass;
        CellStatus status = CellStatus::ok;
    };
    const auto cells = parallel_map<Cell>(rows * cols, [&](std::size_t k) {
        const CslParameters params{lambda0_grid[k % cols], r_c_grid[k / cols]};
        try {
            return Cell{critical_mass(params, cfg, threshold).mass, CellStatus::ok};
        } catch (const DomainError& e) {
            const bool unusable = std::string(e.what()).find("unusable") != std::string::npos;
            return Cell{std::nullopt, unusable ? CellStatus::unusable : CellStatus::out_of_range};
        }
    });
    map.critical_mass.assign(rows, std::vector<std::optional<double>>(cols));
    map.status.assign(rows, std::vector<CellStatus>(cols));
    for (std::size_t k = 0; k < cells.size(); ++k) {
        map.critical_mass[k / cols][k % cols] = cells[k].mass;
        map.status[k / cols][k % cols] = cells[k].status;
    }
    return map;
}

} // namespace nearfield

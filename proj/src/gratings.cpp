#include "nearfield/gratings.hpp"

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nearfield {

using detail::require;
using constants::pi;

void MaterialGrating::validate() const
{
    require(period > 0.0, "grating period must be positive");
    require(open_fraction > 0.0 && open_fraction < 1.0, "open fraction must lie in (0, 1)");
    require(thickness >= 0.0, "grating thickness must be nonnegative");
    require(wall_cutoff > 0.0, "wall cutoff must be positive");
    if (wall_cutoff >= 0.5 * open_fraction * period) {
        throw DomainError("slit fully blocked: wall cutoff reaches the slit centre");
    }
}

void LaserPhaseGrating::validate() const
{
    require(period > 0.0, "grating period must be positive");
    require(power >= 0.0, "laser power must be nonnegative");
    require(vertical_waist > 0.0, "laser waist must be positive");
    require(laser_wavelength > 0.0, "laser wavelength must be positive");
    require(std::abs(period - 0.5 * laser_wavelength) <= 1e-9 * period,
            "standing-wave period must equal half the laser wavelength");
}

void IonizingGrating::validate() const
{
    require(period > 0.0, "grating period must be positive");
    require(mean_absorbed_photons >= 0.0, "mean absorbed photon number must be nonnegative");
}

double grating_period(const GratingSpec& grating)
{
    return std::visit([](const auto& g) { return g.period; }, grating);
}

TransmissionProfile::TransmissionProfile(double period, std::vector<complex> samples)
    : period_(period), samples_(std::move(samples))
{
    require(period_ > 0.0, "profile period must be positive");
    const auto n = samples_.size();
    require(n >= 256 && (n & (n - 1)) == 0, "profile grid size must be a power of two >= 256");
}

double TransmissionProfile::position(int k) const noexcept
{
    const double n = static_cast<double>(samples_.size());
    return period_ * ((k + 0.5) / n - 0.5);
}

double TransmissionProfile::mean_transmission() const
{
    double sum = 0.0;
    for (const auto& s : samples_) {
        sum += std::norm(s);
    }
    return sum / static_cast<double>(samples_.size());
}

bool TransmissionProfile::is_pure_phase(double tolerance) const
{
    return std::all_of(samples_.begin(), samples_.end(),
                       [tolerance](const complex& s) { return std::abs(std::abs(s) - 1.0) <= tolerance; });
}

bool TransmissionProfile::is_trivial(double tolerance) const
{
    return std::all_of(samples_.begin(), samples_.end(),
                       [tolerance](const complex& s) { return std::abs(s - 1.0) <= tolerance; });
}

CoefficientTable::CoefficientTable(int j_max, std::vector<complex> values, int alias_period)
    : j_max_(j_max), alias_period_(alias_period), values_(std::move(values))
{
    require(j_max_ >= 0 && values_.size() == static_cast<std::size_t>(2 * j_max_ + 1),
            "coefficient table size does not match j_max");
    require(alias_period_ == 0 || alias_period_ == 2 * j_max_, "alias period must cover the whole table");
}

double CoefficientTable::tail_weight() const noexcept
{
    return std::norm((*this)(j_max_)) + std::norm((*this)(-j_max_));
}

double CoefficientTable::norm_squared() const noexcept
{
    double sum = 0.0;
    for (const auto& v : values_) {
        sum += std::norm(v);
    }
    return sum;
}

double open_half_width(const MaterialGrating& grating)
{
    const double half = 0.5 * grating.open_fraction * grating.period;
    return grating.interaction == WallInteraction::none ? half : half - grating.wall_cutoff;
}

double casimir_polder_c4(const Species& species)
{
    const double alpha = constants::polarizability_from_volume(species.alpha_stat_vol);
    return 3.0 * constants::hbar * constants::light_speed_c * alpha /
           (32.0 * pi * pi * constants::vacuum_permittivity_eps0);
}

namespace {

struct WallModel
{
    double strength = 0.0; // phase prefactor K, phi = K (r_-^-n + r_+^-n)
    int exponent = 0;
};

WallModel wall_model(const MaterialGrating& g, const Species& s, double v_z)
{
    switch (g.interaction) {
    case WallInteraction::none:
        return {};
    case WallInteraction::vdw_r3:
        return {g.thickness * s.c3_coefficient / (constants::hbar * v_z), 3};
    case WallInteraction::casimir_polder_r4:
        return {g.thickness * casimir_polder_c4(s) / (constants::hbar * v_z), 4};
    }
    return {};
}

double wall_phase(const WallModel& w, double half_width, double x)
{
    if (w.exponent == 0) {
        return 0.0;
    }
    const double rm = half_width + x;
    const double rp = half_width - x;
    return w.strength * (std::pow(rm, -w.exponent) + std::pow(rp, -w.exponent));
}

double wall_curvature(const WallModel& w, double half_width, double x)
{
    const double n = w.exponent;
    const double rm = half_width + x;
    const double rp = half_width - x;
    return w.strength * n * (n + 1.0) * (std::pow(rm, -n - 2.0) + std::pow(rp, -n - 2.0));
}

// (exp(i delta) - 1) / (i delta), the exact average of exp(i phase) over an
// interval on which the phase grows linearly by delta.
complex linear_phase_average(double delta)
{
    if (std::abs(delta) < 1e-4) {
        return {1.0 - delta * delta / 6.0, delta / 2.0 - delta * delta * delta / 24.0};
    }
    return (std::polar(1.0, delta) - 1.0) / complex(0.0, delta);
}

// Integral of exp(i phi(x)) over [p, q], with enough linear-phase panels that
// the neglected curvature stays below the phase tolerance.
complex integrate_wall_phase(const WallModel& w, double half_width, double p, double q)
{
    constexpr double phase_tolerance = 1e-3;
    constexpr long max_panels = 1L << 22;
    const double curvature = std::max(wall_curvature(w, half_width, p), wall_curvature(w, half_width, q));
    const double length = q - p;
    const long panels = std::clamp(static_cast<long>(std::ceil(length * std::sqrt(curvature / (8.0 * phase_tolerance)))),
                                   1L, max_panels);
    const double step = length / static_cast<double>(panels);
    complex sum{};
    double phi_left = wall_phase(w, half_width, p);
    for (long i = 0; i < panels; ++i) {
        const double right = (i + 1 == panels) ? q : p + static_cast<double>(i + 1) * step;
        const double phi_right = wall_phase(w, half_width, right);
        sum += std::polar(1.0, phi_left) * linear_phase_average(phi_right - phi_left);
        phi_left = phi_right;
    }
    return sum * step;
}

} // namespace

double material_phase(const MaterialGrating& grating, const Species& species, double v_z, double x)
{
    require(v_z > 0.0, "longitudinal velocity must be positive");
    return wall_phase(wall_model(grating, species, v_z), 0.5 * grating.open_fraction * grating.period, x);
}

double material_phase_gradient(const MaterialGrating& grating, const Species& species, double v_z, double x)
{
    require(v_z > 0.0, "longitudinal velocity must be positive");
    const WallModel w = wall_model(grating, species, v_z);
    if (w.exponent == 0) {
        return 0.0;
    }
    const double half = 0.5 * grating.open_fraction * grating.period;
    const double n = w.exponent;
    return w.strength * n * (std::pow(half - x, -n - 1.0) - std::pow(half + x, -n - 1.0));
}

double laser_phase_amplitude(const LaserPhaseGrating& grating, const Species& species, double v_z)
{
    require(v_z > 0.0, "longitudinal velocity must be positive");
    return 8.0 * std::sqrt(2.0 * pi) * species.alpha_opt_vol * grating.power /
           (constants::hbar * constants::light_speed_c * grating.vertical_waist * v_z);
}

namespace {
void require_grid(int grid_size)
{
    require(grid_size >= 256 && (grid_size & (grid_size - 1)) == 0, "grid size must be a power of two >= 256");
}

// Cell centre in units of the period.
double cell_centre(int k, int grid_size)
{
    return (k + 0.5) / grid_size - 0.5;
}
} // namespace

TransmissionProfile material_transmission(const MaterialGrating& grating, const Species& species, double v_z,
                                          int grid_size)
{
    grating.validate();
    require(v_z > 0.0, "longitudinal velocity must be positive");
    require_grid(grid_size);

    const double d = grating.period;
    const double half = 0.5 * grating.open_fraction * d;
    const double lo = -open_half_width(grating);
    const double hi = open_half_width(grating);
    const double h = d / grid_size;
    const WallModel w = wall_model(grating, species, v_z);

    // Each sample is the cell average of t(x): partial cells at the slit
    // edges and the unresolved near-wall phase both average correctly.
    std::vector<complex> samples(static_cast<std::size_t>(grid_size));
    for (int k = 0; k < grid_size; ++k) {
        const double p = std::max(-0.5 * d + k * h, lo);
        const double q = std::min(-0.5 * d + (k + 1) * h, hi);
        if (q <= p) {
            continue;
        }
        complex integral = (w.exponent == 0) ? complex(q - p, 0.0) : integrate_wall_phase(w, half, p, q);
        samples[static_cast<std::size_t>(k)] = integral / h;
    }
    return TransmissionProfile(d, std::move(samples));
}

TransmissionProfile laser_phase_transmission(const LaserPhaseGrating& grating, const Species& species, double v_z,
                                             int grid_size)
{
    grating.validate();
    require_grid(grid_size);
    const double phi0 = laser_phase_amplitude(grating, species, v_z);
    const double d = grating.period;
    std::vector<complex> samples(static_cast<std::size_t>(grid_size));
    for (int k = 0; k < grid_size; ++k) {
        const double c = std::cos(pi * cell_centre(k, grid_size));
        samples[static_cast<std::size_t>(k)] = std::polar(1.0, phi0 * c * c);
    }
    return TransmissionProfile(d, std::move(samples));
}

TransmissionProfile ionizing_transmission(const IonizingGrating& grating, int grid_size)
{
    grating.validate();
    require_grid(grid_size);
    const double d = grating.period;
    std::vector<complex> samples(static_cast<std::size_t>(grid_size));
    for (int k = 0; k < grid_size; ++k) {
        const double c = std::cos(pi * cell_centre(k, grid_size));
        const double c2 = c * c;
        samples[static_cast<std::size_t>(k)] =
            std::polar(std::exp(-0.5 * grating.mean_absorbed_photons * c2), grating.phase_amplitude * c2);
    }
    return TransmissionProfile(d, std::move(samples));
}

TransmissionProfile transmission(const GratingSpec& grating, const Species& species, double v_z, int grid_size)
{
    struct Visitor
    {
        const Species& species;
        double v_z;
        int grid_size;
        TransmissionProfile operator()(const MaterialGrating& g) const
        {
            return material_transmission(g, species, v_z, grid_size);
        }
        TransmissionProfile operator()(const LaserPhaseGrating& g) const
        {
            return laser_phase_transmission(g, species, v_z, grid_size);
        }
        TransmissionProfile operator()(const IonizingGrating& g) const { return ionizing_transmission(g, grid_size); }
    };
    return std::visit(Visitor{species, v_z, grid_size}, grating);
}

double transmission_probability(const GratingSpec& grating, double x)
{
    const double d = grating_period(grating);
    const double u = x - d * std::floor(x / d + 0.5); // reduced to [-d/2, d/2)
    if (const auto* g = std::get_if<MaterialGrating>(&grating)) {
        const double limit = open_half_width(*g);
        return std::abs(u) < limit ? 1.0 : 0.0;
    }
    if (const auto* g = std::get_if<IonizingGrating>(&grating)) {
        const double c = std::cos(pi * u / d);
        return std::exp(-g->mean_absorbed_photons * c * c);
    }
    return 1.0;
}

namespace {

CoefficientTable dft(std::span<const complex> samples, int j_max, bool squared_modulus)
{
    const int n = static_cast<int>(samples.size());
    const int two_n = 2 * n;
    // exp(-i pi q / N) for q in [0, 2N); x_k / d = (2k + 1) / (2N) - 1/2.
    std::vector<complex> table(static_cast<std::size_t>(two_n));
    for (int q = 0; q < two_n; ++q) {
        table[static_cast<std::size_t>(q)] = std::polar(1.0, -pi * q / n);
    }
    std::vector<complex> values(static_cast<std::size_t>(2 * j_max + 1));
    for (int j = -j_max; j <= j_max; ++j) {
        if (2 * j == -n) {
            continue; // Nyquist bin lives at +N/2
        }
        const long jj = ((static_cast<long>(j) % two_n) + two_n) % two_n;
        complex sum{};
        for (int k = 0; k < n; ++k) {
            const auto q = static_cast<std::size_t>((jj * (2L * k + 1)) % two_n);
            const complex s = squared_modulus ? complex(std::norm(samples[static_cast<std::size_t>(k)]), 0.0)
                                              : samples[static_cast<std::size_t>(k)];
            sum += s * table[q];
        }
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        values[static_cast<std::size_t>(j + j_max)] = sign * sum / static_cast<double>(n);
    }
    return CoefficientTable(j_max, std::move(values), 2 * j_max == n ? n : 0);
}

} // namespace

CoefficientTable fourier_coefficients(const TransmissionProfile& profile, int j_max)
{
    require(j_max >= 1, "j_max must be at least 1");
    if (2 * j_max > profile.grid_size()) {
        throw DomainError("aliasing: j_max exceeds half the grid size");
    }
    return dft(profile.samples(), j_max, false);
}

CoefficientTable intensity_coefficients(const TransmissionProfile& profile, int m_max)
{
    require(m_max >= 0, "m_max must be nonnegative");
    if (2 * m_max > profile.grid_size()) {
        throw DomainError("aliasing: m_max exceeds half the grid size");
    }
    return dft(profile.samples(), m_max, true);
}

CoefficientTable probability_coefficients(const GratingSpec& grating, int m_max, int grid_size)
{
    require(m_max >= 0, "m_max must be nonnegative");
    std::vector<complex> values(static_cast<std::size_t>(2 * m_max + 1));
    if (const auto* g = std::get_if<MaterialGrating>(&grating)) {
        g->validate();
        // exact coefficients of the binary open region |x| < w
        const double w = open_half_width(*g) / g->period;
        for (int m = -m_max; m <= m_max; ++m) {
            values[static_cast<std::size_t>(m + m_max)] = m == 0 ? 2.0 * w : std::sin(2.0 * pi * m * w) / (pi * m);
        }
        return CoefficientTable(m_max, std::move(values));
    }
    require_grid(grid_size);
    const double d = grating_period(grating);
    std::vector<complex> samples(static_cast<std::size_t>(grid_size));
    for (int k = 0; k < grid_size; ++k) {
        samples[static_cast<std::size_t>(k)] = transmission_probability(grating, d * cell_centre(k, grid_size));
    }
    if (2 * m_max > grid_size) {
        throw DomainError("aliasing: m_max exceeds half the grid size");
    }
    return dft(samples, m_max, false);
}

} // namespace nearfield

#pragma once

#include "nearfield/physics.hpp"

#include <complex>
#include <span>
#include <variant>
#include <vector>

namespace nearfield {

using complex = std::complex<double>;

enum class WallInteraction { none, vdw_r3, casimir_polder_r4 };

/// Nanofabricated absorptive grating. Slits of width open_fraction * period
/// are centred at x = 0 (mod period).
struct MaterialGrating
{
    double period = 0.0;
    double open_fraction = 0.5;
    double thickness = 0.0;
    WallInteraction interaction = WallInteraction::none;
    double wall_cutoff = 1e-9; // molecules closer to an interacting wall are absorbed

    void validate() const;
    bool operator==(const MaterialGrating&) const = default;
};

/// Retro-reflected standing light wave acting as a pure phase grating.
struct LaserPhaseGrating
{
    double period = 0.0; // half the laser wavelength
    double power = 0.0;  // W
    double vertical_waist = 0.0;
    double laser_wavelength = 0.0;

    void validate() const;
    bool operator==(const LaserPhaseGrating&) const = default;
};

/// Pulsed standing wave that removes particles from the antinodes by
/// single-photon ionization and imprints a dipole phase.
struct IonizingGrating
{
    double period = 0.0;
    double mean_absorbed_photons = 0.0; // n0, value at an antinode
    double phase_amplitude = 0.0;       // phi0 [rad]

    void validate() const;
    bool operator==(const IonizingGrating&) const = default;
};

using GratingSpec = std::variant<MaterialGrating, LaserPhaseGrating, IonizingGrating>;

double grating_period(const GratingSpec& grating);

/// Complex transmission t(x) sampled at the centres of grid_size uniform
/// cells covering x in [-d/2, d/2).
class TransmissionProfile
{
public:
    TransmissionProfile(double period, std::vector<complex> samples);

    double period() const noexcept { return period_; }
    int grid_size() const noexcept { return static_cast<int>(samples_.size()); }
    std::span<const complex> samples() const noexcept { return samples_; }
    double position(int k) const noexcept;
    /// Grid mean of |t|^2.
    double mean_transmission() const;
    /// True when |t| = 1 on every sample.
    bool is_pure_phase(double tolerance = 1e-12) const;
    /// True when t = 1 on every sample.
    bool is_trivial(double tolerance = 1e-12) const;

private:
    double period_;
    std::vector<complex> samples_;
};

/// Fourier coefficients c_j for |j| <= j_max; out-of-range indices read as 0.
/// A table holding every DFT bin of an N-sample cell-centred grid records
/// alias_period = N: the grid repeats its spectrum as c_{j+N} = -c_j.
class CoefficientTable
{
public:
    CoefficientTable() = default;
    CoefficientTable(int j_max, std::vector<complex> values, int alias_period = 0);

    int j_max() const noexcept { return j_max_; }
    int alias_period() const noexcept { return alias_period_; }
    complex operator()(int j) const noexcept
    {
        return (j < -j_max_ || j > j_max_) ? complex{} : values_[static_cast<std::size_t>(j + j_max_)];
    }
    std::span<const complex> values() const noexcept { return values_; }
    /// |c_{j_max}|^2 + |c_{-j_max}|^2, the truncation indicator.
    double tail_weight() const noexcept;
    double norm_squared() const noexcept;

private:
    int j_max_ = 0;
    int alias_period_ = 0;
    std::vector<complex> values_;
};

inline constexpr int default_grid_size = 4096;
inline constexpr int default_j_max = 64;

/// Casimir-Polder C4 = 3 hbar c alpha_stat / (32 pi^2 eps0).
double casimir_polder_c4(const Species& species);

/// Line-integrated eikonal wall phase phi(x) inside the slit centred at 0.
double material_phase(const MaterialGrating& grating, const Species& species, double v_z, double x);
/// d phi / dx of material_phase.
double material_phase_gradient(const MaterialGrating& grating, const Species& species, double v_z, double x);

/// phi0 = 8 sqrt(2 pi) alpha_opt_vol P / (hbar c w_y v_z).
double laser_phase_amplitude(const LaserPhaseGrating& grating, const Species& species, double v_z);

TransmissionProfile material_transmission(const MaterialGrating& grating, const Species& species, double v_z,
                                          int grid_size = default_grid_size);
TransmissionProfile laser_phase_transmission(const LaserPhaseGrating& grating, const Species& species, double v_z,
                                             int grid_size = default_grid_size);
TransmissionProfile ionizing_transmission(const IonizingGrating& grating, int grid_size = default_grid_size);

TransmissionProfile transmission(const GratingSpec& grating, const Species& species, double v_z,
                                 int grid_size = default_grid_size);

/// Pointwise |t(x)|^2 (x taken modulo the period); the ray-tracing view of a
/// grating.
double transmission_probability(const GratingSpec& grating, double x);

/// b_j by DFT of the sampled profile. For j_max = grid_size/2 the Nyquist bin
/// is reported at +grid_size/2, b_{-grid_size/2} = 0, and the table is marked
/// periodic.
CoefficientTable fourier_coefficients(const TransmissionProfile& profile, int j_max = default_j_max);

/// Fourier coefficients of |t|^2 on the same grid.
CoefficientTable intensity_coefficients(const TransmissionProfile& profile, int m_max);

/// Half-width of the transmitting part of a slit: a/2, less the wall cutoff
/// when walls interact.
double open_half_width(const MaterialGrating& grating);

/// Fourier coefficients of the pointwise transmission probability |t(x)|^2.
/// Closed form for material gratings; DFT of cell-centre samples otherwise.
/// Unlike intensity_coefficients this is insensitive to phase variation
/// inside a cell.
CoefficientTable probability_coefficients(const GratingSpec& grating, int m_max,
                                          int grid_size = default_grid_size);

} // namespace nearfield

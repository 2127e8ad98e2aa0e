#pragma once

#include "nearfield/classical.hpp"
#include "nearfield/csl.hpp"
#include "nearfield/decoherence.hpp"
#include "nearfield/interferometer.hpp"
#include "nearfield/metrology.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace nearfield {

enum class Command { carpet, visibility, power_sweep, velocity_sweep, decohere, otima_map, deflect, csl_map };

std::optional<Command> command_from_name(std::string_view name);
std::string_view command_name(Command command);

/// Built-in particles. gold_cluster and azobenzene need an explicit mass.
std::vector<std::string> species_names();
Species library_species(std::string_view name, std::optional<double> mass = std::nullopt);

struct SweepSpec
{
    std::string parameter;
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
    bool log_spaced = false;

    std::vector<double> values() const;
};

enum class DecoherenceKind { none, collisional, thermal, csl };

/// Everything a scenario file describes. Physical keys carry unit suffixes
/// and are stored in SI units.
struct Scenario
{
    std::string name;
    std::optional<Command> command;
    InterferometerConfig config;
    std::optional<SweepSpec> sweep;

    int velocity_nodes = 64;
    int m_max = default_m_max;
    bool classical = true;
    RayEnsemble rays;
    /// Extra wall models evaluated side by side in velocity sweeps.
    std::vector<WallInteraction> variants;

    DecoherenceKind decoherence = DecoherenceKind::none;
    GasEnvironment gas;
    double cross_section = 0.0;
    std::vector<EmissionLine> emission;
    double emitted_photons = 0.0; // mean number over the flight; overrides emission rates when > 0
    CslParameters csl;

    DeflectionField field;
    double temperature = 0.0; // internal temperature for the thermal polarizability

    std::string carpet_method = "fourier";
    int carpet_slits = 40;
    int carpet_rows = 64;
    int carpet_columns = 128;
    double carpet_z_max = 0.0;

    double otima_ratio_min = 0.7;
    double otima_ratio_max = 1.3;
    int otima_ratio_points = 61;
    double otima_n0_min = 0.5;
    double otima_n0_max = 8.0;
    int otima_n0_points = 16;

    double csl_threshold = 0.36787944117144233; // 1/e
    std::vector<double> csl_lambda0_grid;
    std::vector<double> csl_r_c_grid;

    std::filesystem::path output;
    std::string format = "csv";

    /// Key/value pairs as written, sorted by key.
    std::vector<std::pair<std::string, std::string>> echo;

    /// Channels acting at longitudinal velocity v_z.
    ChannelProvider environment() const;
};

/// Parses scenario text. Relative file references resolve against base_dir.
/// All schema problems are collected into one ConfigError.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

struct Column
{
    std::string name;
    std::string unit;
};

/// Result records. A matrix table (carpet, csl-map) stores one record per
/// cell as (row axis, column axis, value, ...) in row-major order.
struct ResultTable
{
    std::string scenario;
    std::string command;
    std::vector<Column> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> echo;
    bool matrix = false;
};

ResultTable run_scenario(const Scenario& scenario, Command command);
/// Loads the file and runs its `command` key.
ResultTable run_scenario(const std::filesystem::path& path);

enum class Format { csv, json };
Format format_from_name(std::string_view name);

/// CSV: echo as '#' comment lines, header "name [unit]", one line per record;
/// matrix tables are written as a grid with the column axis in the header.
/// JSON: array of flat records. Numbers use 17 significant digits.
void emit(const ResultTable& table, Format format, std::ostream& out);
void emit(const ResultTable& table, Format format, const std::filesystem::path& path);

} // namespace nearfield

#include "nearfield/scenario.hpp"

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/fresnel.hpp"
#include "nearfield/parallel.hpp"
#include "nearfield/talbot_lau.hpp"
#include "nearfield/units.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace nearfield {

namespace {

constexpr std::pair<Command, std::string_view> command_names[] = {
    {Command::carpet, "carpet"},         {Command::visibility, "visibility"},
    {Command::power_sweep, "power-sweep"}, {Command::velocity_sweep, "velocity-sweep"},
    {Command::decohere, "decohere"},     {Command::otima_map, "otima-map"},
    {Command::deflect, "deflect"},       {Command::csl_map, "csl-map"},
};

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += parts[i];
    }
    return out;
}

// ---------------------------------------------------------------- schema

enum class Kind { text, integer, number, quantity, flag };

struct Rule
{
    Kind kind;
    std::optional<Dimension> dimension; // quantities only; unset: checked by the consumer
};

const std::map<std::string, Rule, std::less<>>& schema()
{
    using D = Dimension;
    static const auto table = [] {
        std::map<std::string, Rule, std::less<>> t = {
            {"name", {Kind::text, {}}},
            {"command", {Kind::text, {}}},
            {"seed", {Kind::integer, {}}},
            {"output", {Kind::text, {}}},
            {"format", {Kind::text, {}}},
            {"velocity_nodes", {Kind::integer, {}}},
            {"m_max", {Kind::integer, {}}},
            {"grid_size", {Kind::integer, {}}},
            {"j_max", {Kind::integer, {}}},
            {"classical", {Kind::flag, {}}},
            {"rays", {Kind::integer, {}}},
            {"divergence_window", {Kind::quantity, D::velocity}},
            {"acceleration", {Kind::quantity, D::acceleration}},
            {"variants", {Kind::text, {}}},
            {"species", {Kind::text, {}}},
            {"species.mass", {Kind::quantity, D::mass}},
            {"species.alpha_stat", {Kind::quantity, D::volume}},
            {"species.alpha_opt", {Kind::quantity, D::volume}},
            {"species.c3", {Kind::quantity, D::dispersion}},
            {"species.dipole_rms", {Kind::quantity, D::dipole}},
            {"mode", {Kind::text, {}}},
            {"separation", {Kind::quantity, D::length}},
            {"pulse_delay", {Kind::quantity, D::time}},
            {"talbot_fraction", {Kind::number, {}}},
            {"beam.velocity", {Kind::quantity, D::velocity}},
            {"beam.spread", {Kind::number, {}}},
            {"beam.shape", {Kind::text, {}}},
            {"sweep.parameter", {Kind::text, {}}},
            {"sweep.start", {Kind::quantity, {}}},
            {"sweep.stop", {Kind::quantity, {}}},
            {"sweep.points", {Kind::integer, {}}},
            {"sweep.spacing", {Kind::text, {}}},
            {"decohere.channel", {Kind::text, {}}},
            {"gas.mass", {Kind::quantity, D::mass}},
            {"gas.temperature", {Kind::quantity, D::temperature}},
            {"gas.pressure", {Kind::quantity, D::pressure}},
            {"gas.model", {Kind::text, {}}},
            {"gas.table", {Kind::text, {}}},
            {"cross_section", {Kind::quantity, D::area}},
            {"emission.wavelength", {Kind::quantity, D::length}},
            {"emission.rate", {Kind::quantity, D::rate}},
            {"emission.photons", {Kind::number, {}}},
            {"emission.file", {Kind::text, {}}},
            {"csl.lambda0", {Kind::quantity, D::rate}},
            {"csl.r_c", {Kind::quantity, D::length}},
            {"csl.threshold", {Kind::number, {}}},
            {"csl.lambda0_min", {Kind::quantity, D::rate}},
            {"csl.lambda0_max", {Kind::quantity, D::rate}},
            {"csl.lambda0_points", {Kind::integer, {}}},
            {"csl.r_c_min", {Kind::quantity, D::length}},
            {"csl.r_c_max", {Kind::quantity, D::length}},
            {"csl.r_c_points", {Kind::integer, {}}},
            {"field.k", {Kind::quantity, D::area}},
            {"field.grad_e2", {Kind::quantity, D::field_gradient}},
            {"temperature", {Kind::quantity, D::temperature}},
            {"carpet.method", {Kind::text, {}}},
            {"carpet.slits", {Kind::integer, {}}},
            {"carpet.rows", {Kind::integer, {}}},
            {"carpet.columns", {Kind::integer, {}}},
            {"carpet.z_max", {Kind::quantity, D::length}},
            {"otima.ratio_min", {Kind::number, {}}},
            {"otima.ratio_max", {Kind::number, {}}},
            {"otima.ratio_points", {Kind::integer, {}}},
            {"otima.n0_min", {Kind::number, {}}},
            {"otima.n0_max", {Kind::number, {}}},
            {"otima.n0_points", {Kind::integer, {}}},
        };
        const std::pair<const char*, Rule> grating_keys[] = {
            {"type", {Kind::text, {}}},
            {"period", {Kind::quantity, D::length}},
            {"open_fraction", {Kind::number, {}}},
            {"thickness", {Kind::quantity, D::length}},
            {"interaction", {Kind::text, {}}},
            {"wall_cutoff", {Kind::quantity, D::length}},
            {"power", {Kind::quantity, D::power}},
            {"waist", {Kind::quantity, D::length}},
            {"laser_wavelength", {Kind::quantity, D::length}},
            {"n0", {Kind::number, {}}},
            {"phi0", {Kind::quantity, D::angle}},
        };
        for (const char* prefix : {"gratings.", "grating1.", "grating2.", "grating3."}) {
            for (const auto& [key, rule] : grating_keys) {
                t.emplace(std::string(prefix) + key, rule);
            }
        }
        return t;
    }();
    return table;
}

struct Entry
{
    std::string raw;
    int line = 0;
    Kind kind = Kind::text;
    UnitValue quantity{0.0, Dimension::dimensionless};
    long long integer = 0;
    bool flag = false;
    bool used = false;
};

/// Typed view of the parsed key/value pairs. Every lookup marks the key as
/// consumed so that leftovers can be reported.
class Fields
{
public:
    Fields(std::map<std::string, Entry, std::less<>> entries, std::vector<std::string>& errors)
        : entries_(std::move(entries)), errors_(errors)
    {
    }

    bool has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

    std::optional<std::string> text(std::string_view key) { return take(key, [](const Entry& e) { return e.raw; }); }
    std::optional<double> quantity(std::string_view key)
    {
        return take(key, [](const Entry& e) { return e.quantity.si_value; });
    }
    std::optional<UnitValue> raw_quantity(std::string_view key)
    {
        return take(key, [](const Entry& e) { return e.quantity; });
    }
    std::optional<long long> integer(std::string_view key)
    {
        return take(key, [](const Entry& e) { return e.integer; });
    }
    std::optional<bool> flag(std::string_view key) { return take(key, [](const Entry& e) { return e.flag; }); }

    void error(std::string message) { errors_.push_back(std::move(message)); }

    void report_unused()
    {
        for (const auto& [key, entry] : entries_) {
            if (!entry.used) {
                error("key '" + key + "' (line " + std::to_string(entry.line) +
                      ") does not apply to this configuration");
            }
        }
    }

private:
    template <class F>
    auto take(std::string_view key, F get) -> std::optional<decltype(get(std::declval<const Entry&>()))>
    {
        const auto it = entries_.find(key);
        if (it == entries_.end()) {
            return std::nullopt;
        }
        it->second.used = true;
        return get(it->second);
    }

    std::map<std::string, Entry, std::less<>> entries_;
    std::vector<std::string>& errors_;
};

std::optional<bool> parse_flag(std::string_view text)
{
    if (text == "true" || text == "yes" || text == "on") {
        return true;
    }
    if (text == "false" || text == "no" || text == "off") {
        return false;
    }
    return std::nullopt;
}

/// Splits lines into typed entries; every problem goes to errors.
std::map<std::string, Entry, std::less<>> read_entries(std::string_view text, std::vector<std::string>& errors)
{
    std::map<std::string, Entry, std::less<>> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const std::string where = " (line " + std::to_string(line_no) + ")";
        if (eq == std::string_view::npos) {
            errors.push_back("expected 'key = value'" + where);
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        const auto rule = schema().find(key);
        if (rule == schema().end()) {
            errors.push_back("unknown key '" + key + "'" + where);
            continue;
        }
        if (entries.contains(key)) {
            errors.push_back("duplicate key '" + key + "'" + where);
            continue;
        }
        if (value.empty()) {
            errors.push_back("key '" + key + "' has no value" + where);
            continue;
        }
        Entry entry;
        entry.raw = value;
        entry.line = line_no;
        entry.kind = rule->second.kind;
        const std::string prefix = "key '" + key + "'" + where + ": ";
        switch (rule->second.kind) {
        case Kind::text:
            break;
        case Kind::integer: {
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), entry.integer);
            if (ec != std::errc{} || ptr != value.data() + value.size()) {
                errors.push_back(prefix + "expected an integer, got '" + value + "'");
                continue;
            }
            break;
        }
        case Kind::flag: {
            const auto flag = parse_flag(value);
            if (!flag) {
                errors.push_back(prefix + "expected true or false, got '" + value + "'");
                continue;
            }
            entry.flag = *flag;
            break;
        }
        case Kind::number:
        case Kind::quantity: {
            try {
                entry.quantity = parse_quantity(value);
            } catch (const ConfigError& e) {
                errors.push_back(prefix + e.what());
                continue;
            }
            const auto expected = rule->second.kind == Kind::number ? std::optional(Dimension::dimensionless)
                                                                    : rule->second.dimension;
            if (expected && entry.quantity.dimension != *expected) {
                if (*expected == Dimension::dimensionless) {
                    errors.push_back(prefix + "takes a plain number, got '" + value + "'");
                } else if (entry.quantity.dimension == Dimension::dimensionless) {
                    errors.push_back(prefix + "missing unit, expected a " + std::string(dimension_name(*expected)));
                } else {
                    errors.push_back(prefix + "expected a " + std::string(dimension_name(*expected)) + ", got a " +
                                     std::string(dimension_name(entry.quantity.dimension)));
                }
                continue;
            }
            break;
        }
        }
        entries.emplace(key, std::move(entry));
    }
    return entries;
}

// ----------------------------------------------------------------- enums

std::optional<WallInteraction> interaction_from_name(std::string_view name)
{
    if (name == "none") {
        return WallInteraction::none;
    }
    if (name == "vdw") {
        return WallInteraction::vdw_r3;
    }
    if (name == "casimir-polder") {
        return WallInteraction::casimir_polder_r4;
    }
    return std::nullopt;
}

std::string_view interaction_name(WallInteraction w)
{
    switch (w) {
    case WallInteraction::none: return "ideal";
    case WallInteraction::vdw_r3: return "vdw";
    case WallInteraction::casimir_polder_r4: return "casimir_polder";
    }
    return "unknown";
}

std::optional<GratingSpec> build_grating(Fields& f, int index)
{
    const std::string own = "grating" + std::to_string(index) + ".";
    const auto text = [&](const char* field) {
        auto v = f.text(own + field);
        return v ? v : f.text(std::string("gratings.") + field);
    };
    const auto number = [&](const char* field) {
        auto v = f.quantity(own + field);
        return v ? v : f.quantity(std::string("gratings.") + field);
    };
    const auto missing = [&](const char* field) {
        f.error("grating" + std::to_string(index) + " needs '" + own + field + "' or 'gratings." + field + "'");
    };

    const auto type = text("type");
    if (!type) {
        missing("type");
        return std::nullopt;
    }
    if (*type == "none") {
        if (index != 3) {
            f.error("grating" + std::to_string(index) + " cannot be 'none'");
        }
        return std::nullopt;
    }
    if (*type == "material") {
        MaterialGrating g;
        if (const auto v = number("period")) {
            g.period = *v;
        } else {
            missing("period");
        }
        g.open_fraction = number("open_fraction").value_or(g.open_fraction);
        g.thickness = number("thickness").value_or(g.thickness);
        if (const auto name = text("interaction")) {
            if (const auto w = interaction_from_name(*name)) {
                g.interaction = *w;
            } else {
                f.error("grating" + std::to_string(index) + ": unknown interaction '" + *name +
                        "' (none, vdw, casimir-polder)");
            }
        }
        g.wall_cutoff = number("wall_cutoff").value_or(g.wall_cutoff);
        return g;
    }
    if (*type == "laser") {
        LaserPhaseGrating g;
        const auto period = number("period");
        const auto wavelength = number("laser_wavelength");
        if (wavelength) {
            g.laser_wavelength = *wavelength;
            g.period = *wavelength / 2.0;
            if (period && std::abs(*period - g.period) > 1e-9 * g.period) {
                f.error("grating" + std::to_string(index) + ": period must be half the laser wavelength");
            }
        } else if (period) {
            g.period = *period;
            g.laser_wavelength = 2.0 * *period;
        } else {
            missing("laser_wavelength");
        }
        g.power = number("power").value_or(0.0);
        if (const auto v = number("waist")) {
            g.vertical_waist = *v;
        } else {
            missing("waist");
        }
        return g;
    }
    if (*type == "ionizing") {
        IonizingGrating g;
        if (const auto v = number("period")) {
            g.period = *v;
        } else {
            missing("period");
        }
        g.mean_absorbed_photons = number("n0").value_or(0.0);
        g.phase_amplitude = number("phi0").value_or(0.0);
        return g;
    }
    f.error("grating" + std::to_string(index) + ": unknown type '" + *type + "' (material, laser, ionizing, none)");
    return std::nullopt;
}

Dimension sweep_dimension(std::string_view parameter)
{
    if (parameter == "velocity") {
        return Dimension::velocity;
    }
    if (parameter == "power") {
        return Dimension::power;
    }
    if (parameter == "pressure") {
        return Dimension::pressure;
    }
    if (parameter == "lambda0") {
        return Dimension::rate;
    }
    if (parameter == "mass") {
        return Dimension::mass;
    }
    return Dimension::dimensionless; // photons
}

bool known_sweep_parameter(std::string_view p)
{
    return p == "velocity" || p == "power" || p == "pressure" || p == "photons" || p == "lambda0" || p == "mass";
}

std::string to_text(double v)
{
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
    return std::string(buffer, ptr);
}

template <class T>
void set_int(Fields& f, std::string_view key, T& target, long long lo)
{
    if (const auto v = f.integer(key)) {
        if (*v < lo || *v > std::numeric_limits<int>::max()) {
            f.error("key '" + std::string(key) + "' must be at least " + std::to_string(lo));
        } else {
            target = static_cast<T>(*v);
        }
    }
}

} // namespace

// --------------------------------------------------------------- commands

std::optional<Command> command_from_name(std::string_view name)
{
    for (const auto& [command, text] : command_names) {
        if (text == name) {
            return command;
        }
    }
    return std::nullopt;
}

std::string_view command_name(Command command)
{
    for (const auto& [c, text] : command_names) {
        if (c == command) {
            return text;
        }
    }
    return "unknown";
}

// ---------------------------------------------------------------- species

std::vector<std::string> species_names()
{
    return {"C60", "C70", "PFNS8", "azobenzene", "gold-cluster", "custom"};
}

Species library_species(std::string_view name, std::optional<double> mass)
{
    Species s;
    s.name = std::string(name);
    const auto need_mass = [&] {
        if (!mass) {
            throw ConfigError("species '" + std::string(name) + "' needs species.mass");
        }
        return *mass;
    };
    if (name == "C60") {
        s.mass = 720.0 * constants::amu;
    } else if (name == "C70") {
        s.mass = 840.0 * constants::amu;
        s.alpha_stat_vol = 102e-30;
        s.c3_coefficient = 10e-3 * constants::elementary_charge * 1e-27;
    } else if (name == "PFNS8") {
        s.mass = 5672.0 * constants::amu;
        s.alpha_opt_vol = 2e-28;
    } else if (name == "azobenzene") {
        // Perfluoroalkylated azobenzene; the mass depends on the derivative.
        s.mass = need_mass();
        s.alpha_stat_vol = 61e-30;
        s.dipole_rms = 2.5 * constants::debye;
    } else if (name == "gold-cluster" || name == "custom") {
        s.mass = need_mass();
    } else {
        throw ConfigError("unknown species '" + std::string(name) + "' (known: " + join(species_names(), ", ") + ")");
    }
    if (mass) {
        s.mass = *mass;
    }
    return s;
}

std::vector<double> SweepSpec::values() const
{
    if (points < 1) {
        throw ConfigError("empty sweep: sweep.points must be at least 1");
    }
    if (log_spaced && (start <= 0.0 || stop <= 0.0)) {
        throw ConfigError("log-spaced sweep needs positive start and stop");
    }
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double u = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        out[static_cast<std::size_t>(i)] = log_spaced ? std::exp(std::log(start) + u * (std::log(stop) - std::log(start)))
                                                      : start + u * (stop - start);
    }
    return out;
}

ChannelProvider Scenario::environment() const
{
    switch (decoherence) {
    case DecoherenceKind::none:
        return {};
    case DecoherenceKind::collisional:
        return [gas = gas, sigma = cross_section](double v_z) {
            return std::vector{collisional_channel(gas, sigma, v_z)};
        };
    case DecoherenceKind::thermal: {
        if (emitted_photons > 0.0) {
            // Rate chosen so that the mean photon count over the flight G1 -> G3 is fixed.
            const bool spatial = config.mode == InterferometerMode::spatial;
            return [lines = emission, photons = emitted_photons, spatial, l = config.separation,
                    t = config.pulse_delay](double v_z) {
                const double duration = spatial ? 2.0 * l / v_z : 2.0 * t;
                std::vector<EmissionLine> scaled = lines;
                double total = 0.0;
                for (const auto& line : lines) {
                    total += line.rate;
                }
                for (auto& line : scaled) {
                    line.rate = total > 0.0 ? photons / duration * line.rate / total : photons / duration / lines.size();
                }
                return std::vector{thermal_emission_channel(scaled)};
            };
        }
        return [lines = emission](double) { return std::vector{thermal_emission_channel(lines)}; };
    }
    case DecoherenceKind::csl:
        return [p = csl, mass = config.species.mass](double) {
            return std::vector{csl_channel(p.lambda0, p.r_c, mass)};
        };
    }
    return {};
}

// ----------------------------------------------------------------- parser

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir)
{
    std::vector<std::string> errors;
    auto entries = read_entries(text, errors);
    Scenario sc;
    for (const auto& [key, entry] : entries) {
        sc.echo.emplace_back(key, entry.raw);
    }
    Fields f(std::move(entries), errors);
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };

    sc.name = f.text("name").value_or("scenario");
    if (const auto c = f.text("command")) {
        sc.command = command_from_name(*c);
        if (!sc.command) {
            f.error("unknown command '" + *c + "'");
        }
    }
    if (const auto v = f.integer("seed")) {
        sc.rays.seed = static_cast<std::uint64_t>(*v);
    }
    if (const auto v = f.text("output")) {
        sc.output = resolve(*v);
    }
    sc.format = f.text("format").value_or("csv");
    if (sc.format != "csv" && sc.format != "json") {
        f.error("format must be csv or json");
    }
    set_int(f, "velocity_nodes", sc.velocity_nodes, 1);
    set_int(f, "m_max", sc.m_max, 1);
    set_int(f, "grid_size", sc.config.grid_size, 2);
    set_int(f, "j_max", sc.config.j_max, 1);
    sc.classical = f.flag("classical").value_or(sc.classical);
    if (const auto v = f.integer("rays")) {
        if (*v < 0) {
            f.error("rays must be nonnegative");
        }
        sc.rays.count = *v;
    }
    if (const auto v = f.quantity("divergence_window")) {
        sc.rays.divergence_window = *v;
    }
    sc.rays.transverse_acceleration = f.quantity("acceleration").value_or(0.0);
    if (const auto v = f.text("variants")) {
        std::stringstream list(*v);
        std::string item;
        while (std::getline(list, item, ',')) {
            if (const auto w = interaction_from_name(trim(item))) {
                sc.variants.push_back(*w);
            } else {
                f.error("variants: unknown interaction '" + std::string(trim(item)) + "'");
            }
        }
    }

    // Species.
    const auto mass = f.quantity("species.mass");
    if (const auto name = f.text("species")) {
        try {
            sc.config.species = library_species(*name, mass);
        } catch (const ConfigError& e) {
            f.error(e.what());
        }
    } else {
        f.error("missing key 'species'");
    }
    auto& sp = sc.config.species;
    sp.alpha_stat_vol = f.quantity("species.alpha_stat").value_or(sp.alpha_stat_vol);
    sp.alpha_opt_vol = f.quantity("species.alpha_opt").value_or(sp.alpha_opt_vol);
    sp.c3_coefficient = f.quantity("species.c3").value_or(sp.c3_coefficient);
    sp.dipole_rms = f.quantity("species.dipole_rms").value_or(sp.dipole_rms);

    // Beam.
    if (const auto v = f.quantity("beam.velocity")) {
        sc.config.beam.mean_velocity = *v;
    } else {
        f.error("missing key 'beam.velocity'");
    }
    sc.config.beam.relative_spread = f.quantity("beam.spread").value_or(0.0);
    if (const auto shape = f.text("beam.shape")) {
        if (*shape == "gaussian") {
            sc.config.beam.shape = VelocityShape::gaussian;
        } else if (*shape == "top-hat") {
            sc.config.beam.shape = VelocityShape::top_hat;
        } else {
            f.error("beam.shape must be gaussian or top-hat");
        }
    }

    // Gratings.
    if (auto g = build_grating(f, 1)) {
        sc.config.grating1 = *g;
    }
    if (auto g = build_grating(f, 2)) {
        sc.config.grating2 = *g;
    }
    sc.config.grating3 = build_grating(f, 3);

    // Geometry.
    const std::string mode = f.text("mode").value_or("spatial");
    if (mode == "spatial") {
        sc.config.mode = InterferometerMode::spatial;
        if (const auto v = f.quantity("separation")) {
            sc.config.separation = *v;
        } else {
            f.error("spatial mode needs 'separation'");
        }
    } else if (mode == "time-domain") {
        sc.config.mode = InterferometerMode::time_domain;
        const auto delay = f.quantity("pulse_delay");
        const auto fraction = f.quantity("talbot_fraction");
        if (delay && fraction) {
            f.error("give either 'pulse_delay' or 'talbot_fraction', not both");
        } else if (delay) {
            sc.config.pulse_delay = *delay;
        } else if (fraction) {
            sc.config.pulse_delay = *fraction * talbot_time(sp.mass, grating_period(sc.config.grating2));
        } else {
            f.error("time-domain mode needs 'pulse_delay' or 'talbot_fraction'");
        }
    } else {
        f.error("mode must be spatial or time-domain");
    }

    // Sweep.
    if (const auto parameter = f.text("sweep.parameter")) {
        SweepSpec sweep;
        sweep.parameter = *parameter;
        if (!known_sweep_parameter(*parameter)) {
            f.error("unknown sweep parameter '" + *parameter + "' (velocity, power, pressure, photons, lambda0, mass)");
        }
        const Dimension dim = sweep_dimension(*parameter);
        for (const char* key : {"sweep.start", "sweep.stop"}) {
            const auto q = f.raw_quantity(key);
            if (!q) {
                f.error(std::string("sweep needs '") + key + "'");
                continue;
            }
            if (q->dimension != dim) {
                f.error(std::string(key) + ": expected a " + std::string(dimension_name(dim)) + ", got a " +
                        std::string(dimension_name(q->dimension)));
            }
            (std::string_view(key) == "sweep.start" ? sweep.start : sweep.stop) = q->si_value;
        }
        sweep.points = static_cast<int>(f.integer("sweep.points").value_or(0));
        if (sweep.points < 1) {
            f.error("empty sweep: sweep.points must be at least 1");
        }
        const std::string spacing = f.text("sweep.spacing").value_or("linear");
        if (spacing == "log") {
            sweep.log_spaced = true;
            if (sweep.start <= 0.0 || sweep.stop <= 0.0) {
                f.error("log-spaced sweep needs positive start and stop");
            }
        } else if (spacing != "linear") {
            f.error("sweep.spacing must be linear or log");
        }
        sc.sweep = sweep;
    } else {
        for (const char* key : {"sweep.start", "sweep.stop", "sweep.points", "sweep.spacing"}) {
            if (f.has(key)) {
                f.error(std::string("'") + key + "' given without 'sweep.parameter'");
                f.text(key);
            }
        }
    }

    // Decoherence.
    const std::string channel = f.text("decohere.channel").value_or("none");
    if (channel == "none") {
        sc.decoherence = DecoherenceKind::none;
    } else if (channel == "collisional") {
        sc.decoherence = DecoherenceKind::collisional;
        if (const auto v = f.quantity("gas.mass")) {
            sc.gas.gas_mass = *v;
        } else {
            f.error("collisional decoherence needs 'gas.mass'");
        }
        if (const auto v = f.quantity("gas.temperature")) {
            sc.gas.temperature = *v;
        } else {
            f.error("collisional decoherence needs 'gas.temperature'");
        }
        sc.gas.pressure = f.quantity("gas.pressure").value_or(0.0);
        const std::string model = f.text("gas.model").value_or("isotropic");
        if (model == "table") {
            sc.gas.scattering_model = ScatteringModel::user_table;
            if (const auto path = f.text("gas.table")) {
                try {
                    sc.gas.table = read_scattering_table(resolve(*path));
                } catch (const Error& e) {
                    f.error(std::string("gas.table: ") + e.what());
                }
            } else {
                f.error("gas.model = table needs 'gas.table'");
            }
        } else if (model != "isotropic") {
            f.error("gas.model must be isotropic or table");
        }
        if (const auto v = f.quantity("cross_section")) {
            sc.cross_section = *v;
        } else {
            f.error("collisional decoherence needs 'cross_section'");
        }
    } else if (channel == "thermal") {
        sc.decoherence = DecoherenceKind::thermal;
        if (const auto path = f.text("emission.file")) {
            try {
                sc.emission = read_emission_spectrum(resolve(*path));
            } catch (const Error& e) {
                f.error(std::string("emission.file: ") + e.what());
            }
        }
        if (const auto lambda = f.quantity("emission.wavelength")) {
            sc.emission.push_back({*lambda, f.quantity("emission.rate").value_or(0.0)});
        }
        sc.emitted_photons = f.quantity("emission.photons").value_or(0.0);
        if (sc.emission.empty()) {
            f.error("thermal decoherence needs 'emission.wavelength' or 'emission.file'");
        }
    } else if (channel == "csl") {
        sc.decoherence = DecoherenceKind::csl;
    } else {
        f.error("decohere.channel must be none, collisional, thermal or csl");
    }

    // CSL parameters and map grid.
    sc.csl.lambda0 = f.quantity("csl.lambda0").value_or(1e-8);
    sc.csl.r_c = f.quantity("csl.r_c").value_or(100e-9);
    sc.csl_threshold = f.quantity("csl.threshold").value_or(sc.csl_threshold);
    {
        const double l_lo = f.quantity("csl.lambda0_min").value_or(1e-12);
        const double l_hi = f.quantity("csl.lambda0_max").value_or(1e-8);
        int l_n = 5;
        set_int(f, "csl.lambda0_points", l_n, 2);
        const double r_lo = f.quantity("csl.r_c_min").value_or(10e-9);
        const double r_hi = f.quantity("csl.r_c_max").value_or(1e-6);
        int r_n = 5;
        set_int(f, "csl.r_c_points", r_n, 2);
        if (l_lo > 0.0 && l_hi > l_lo && r_lo > 0.0 && r_hi > r_lo) {
            sc.csl_lambda0_grid = log_grid(l_lo, l_hi, l_n);
            sc.csl_r_c_grid = log_grid(r_lo, r_hi, r_n);
        } else {
            f.error("csl map ranges must be positive and increasing");
        }
    }

    // Metrology.
    sc.field.geometry_constant = f.quantity("field.k").value_or(0.0);
    sc.field.grad_e_squared = f.quantity("field.grad_e2").value_or(0.0);
    sc.temperature = f.quantity("temperature").value_or(0.0);

    // Carpet and OTIMA map.
    sc.carpet_method = f.text("carpet.method").value_or(sc.carpet_method);
    if (sc.carpet_method != "fourier" && sc.carpet_method != "fresnel") {
        f.error("carpet.method must be fourier or fresnel");
    }
    set_int(f, "carpet.slits", sc.carpet_slits, 1);
    set_int(f, "carpet.rows", sc.carpet_rows, 1);
    set_int(f, "carpet.columns", sc.carpet_columns, 2);
    sc.carpet_z_max = f.quantity("carpet.z_max").value_or(0.0);
    sc.otima_ratio_min = f.quantity("otima.ratio_min").value_or(sc.otima_ratio_min);
    sc.otima_ratio_max = f.quantity("otima.ratio_max").value_or(sc.otima_ratio_max);
    set_int(f, "otima.ratio_points", sc.otima_ratio_points, 2);
    sc.otima_n0_min = f.quantity("otima.n0_min").value_or(sc.otima_n0_min);
    sc.otima_n0_max = f.quantity("otima.n0_max").value_or(sc.otima_n0_max);
    set_int(f, "otima.n0_points", sc.otima_n0_points, 2);

    f.report_unused();
    if (!errors.empty()) {
        throw ConfigError("invalid scenario:\n  " + join(errors, "\n  "));
    }
    sc.config.environment = sc.environment();
    sc.config.validate();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read scenario '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path.parent_path());
}

// ----------------------------------------------------------------- runner

namespace {

void apply_parameter(Scenario& sc, const std::string& parameter, double value)
{
    auto& cfg = sc.config;
    if (parameter == "velocity") {
        cfg.beam.mean_velocity = value;
    } else if (parameter == "power") {
        bool found = false;
        for (GratingSpec* g : {&cfg.grating1, &cfg.grating2}) {
            if (auto* laser = std::get_if<LaserPhaseGrating>(g)) {
                laser->power = value;
                found = true;
            }
        }
        if (cfg.grating3) {
            if (auto* laser = std::get_if<LaserPhaseGrating>(&*cfg.grating3)) {
                laser->power = value;
                found = true;
            }
        }
        if (!found) {
            throw ConfigError("power sweep needs a laser grating");
        }
    } else if (parameter == "pressure") {
        sc.gas.pressure = value;
    } else if (parameter == "photons") {
        sc.emitted_photons = value;
    } else if (parameter == "lambda0") {
        sc.csl.lambda0 = value;
    } else if (parameter == "mass") {
        cfg.species.mass = value;
    }
    cfg.environment = sc.environment();
}

std::string sweep_unit(std::string_view parameter)
{
    if (parameter == "velocity") {
        return "m/s";
    }
    if (parameter == "power") {
        return "W";
    }
    if (parameter == "pressure") {
        return "Pa";
    }
    if (parameter == "lambda0") {
        return "Hz";
    }
    if (parameter == "mass") {
        return "kg";
    }
    return "1";
}

struct Quantum
{
    double visibility;
    double residual;
};

Quantum quantum_visibility(const Scenario& sc)
{
    const auto& cfg = sc.config;
    if (cfg.mode == InterferometerMode::time_domain) {
        const auto s = detector_signal(cfg, cfg.beam.mean_velocity, sc.m_max);
        return {sinusoidal_visibility(s), s.truncation_residual};
    }
    const auto avg = velocity_averaged_pattern(cfg, sc.velocity_nodes, sc.m_max);
    return {avg.visibility, avg.pattern.truncation_residual};
}

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

using PointFn = std::function<std::vector<double>(const Scenario&)>;

/// Runs point() once, or once per sweep value with the value prepended.
ResultTable sweep_table(const Scenario& sc, std::vector<Column> columns, const PointFn& point)
{
    ResultTable table;
    if (!sc.sweep) {
        table.columns = std::move(columns);
        table.rows.push_back(point(sc));
        return table;
    }
    const auto values = sc.sweep->values();
    table.columns.push_back({sc.sweep->parameter, sweep_unit(sc.sweep->parameter)});
    table.columns.insert(table.columns.end(), columns.begin(), columns.end());
    table.rows = parallel_map<std::vector<double>>(values.size(), [&](std::size_t i) {
        Scenario at = sc;
        apply_parameter(at, sc.sweep->parameter, values[i]);
        auto row = point(at);
        row.insert(row.begin(), values[i]);
        return row;
    });
    return table;
}

void require_sweep(const Scenario& sc, std::initializer_list<std::string_view> parameters, std::string_view command)
{
    if (!sc.sweep || std::find(parameters.begin(), parameters.end(), sc.sweep->parameter) == parameters.end()) {
        std::string list;
        for (auto p : parameters) {
            list += (list.empty() ? "" : "/") + std::string(p);
        }
        throw ConfigError(std::string(command) + " needs sweep.parameter = " + list);
    }
}

ResultTable run_visibility(const Scenario& sc)
{
    const bool classical = sc.classical && sc.config.mode == InterferometerMode::spatial;
    std::vector<Column> columns = {{"quantum_visibility", "1"}, {"truncation_residual", "1"}};
    if (classical) {
        columns.push_back({"classical_visibility", "1"});
    }
    return sweep_table(sc, columns, [&](const Scenario& at) {
        const auto q = quantum_visibility(at);
        std::vector<double> row = {q.visibility, q.residual};
        if (classical) {
            row.push_back(classical_velocity_averaged(at.config, at.velocity_nodes, at.m_max).visibility);
        }
        return row;
    });
}

ResultTable run_velocity_sweep(const Scenario& sc)
{
    require_sweep(sc, {"velocity"}, "velocity-sweep");
    if (sc.config.mode != InterferometerMode::spatial) {
        throw ConfigError("velocity-sweep needs a spatial interferometer");
    }
    // Wall models: the configured one first, then the variants.
    const auto* material = std::get_if<MaterialGrating>(&sc.config.grating2);
    std::vector<WallInteraction> models;
    if (material) {
        models.push_back(material->interaction);
    }
    for (auto w : sc.variants) {
        if (!material) {
            throw ConfigError("variants need a material grating2");
        }
        if (std::find(models.begin(), models.end(), w) == models.end()) {
            models.push_back(w);
        }
    }
    std::vector<Column> columns;
    if (models.empty()) {
        columns.push_back({"quantum", "1"});
    }
    for (auto w : models) {
        columns.push_back({"quantum_" + std::string(interaction_name(w)), "1"});
    }
    columns.push_back({"truncation_residual", "1"});
    const bool monte_carlo = sc.classical && sc.rays.count > 0;
    if (sc.classical) {
        columns.push_back({"classical", "1"});
    }
    if (monte_carlo) {
        columns.push_back({"classical_mc", "1"});
        columns.push_back({"classical_mc_error", "1"});
    }
    const auto with_model = [](const InterferometerConfig& cfg, WallInteraction w) {
        InterferometerConfig out = cfg;
        for (GratingSpec* g : {&out.grating1, &out.grating2}) {
            if (auto* m = std::get_if<MaterialGrating>(g)) {
                m->interaction = w;
            }
        }
        if (out.grating3) {
            if (auto* m = std::get_if<MaterialGrating>(&*out.grating3)) {
                m->interaction = w;
            }
        }
        return out;
    };
    return sweep_table(sc, columns, [&](const Scenario& at) {
        std::vector<double> row;
        double residual = 0.0;
        if (models.empty()) {
            const auto q = quantum_visibility(at);
            row.push_back(q.visibility);
            residual = q.residual;
        }
        for (auto w : models) {
            const auto avg = velocity_averaged_pattern(with_model(at.config, w), at.velocity_nodes, at.m_max);
            row.push_back(avg.visibility);
            residual = std::max(residual, avg.pattern.truncation_residual);
        }
        row.push_back(residual);
        if (at.classical) {
            row.push_back(classical_velocity_averaged(at.config, at.velocity_nodes, at.m_max).visibility);
        }
        if (monte_carlo) {
            const auto mc = classical_visibility(at.config, at.rays, at.config.beam.mean_velocity, at.m_max);
            row.push_back(mc.visibility);
            row.push_back(mc.visibility_error);
        }
        return row;
    });
}

ResultTable run_decohere(const Scenario& sc)
{
    require_sweep(sc, {"pressure", "photons", "lambda0", "mass"}, "decohere");
    if (sc.decoherence == DecoherenceKind::none) {
        throw ConfigError("decohere needs decohere.channel");
    }
    Scenario clean = sc;
    clean.decoherence = DecoherenceKind::none;
    clean.config.environment = {};
    const bool mass_sweep = sc.sweep->parameter == "mass";
    const double v0 = mass_sweep ? nan : quantum_visibility(clean).visibility;
    return sweep_table(sc, {{"visibility", "1"}, {"relative_visibility", "1"}, {"truncation_residual", "1"}},
                       [&](const Scenario& at) {
                           const auto q = quantum_visibility(at);
                           double reference = v0;
                           if (mass_sweep) {
                               Scenario c = at;
                               c.decoherence = DecoherenceKind::none;
                               c.config.environment = {};
                               reference = quantum_visibility(c).visibility;
                           }
                           return std::vector<double>{q.visibility, q.visibility / reference, q.residual};
                       });
}

ResultTable run_deflect(const Scenario& sc)
{
    const auto& sp = sc.config.species;
    return sweep_table(sc, {{"stark_shift", "m"}, {"alpha_total", "m^3"}}, [&](const Scenario& at) {
        const double alpha_stat = constants::polarizability_from_volume(at.config.species.alpha_stat_vol);
        const double alpha = at.temperature > 0.0 ? total_polarizability(alpha_stat, sp.dipole_rms, at.temperature)
                                                   : alpha_stat;
        return std::vector<double>{
            stark_fringe_shift(at.field, alpha, at.config.species.mass, at.config.beam.mean_velocity),
            constants::polarizability_to_volume(alpha)};
    });
}

ResultTable run_carpet(const Scenario& sc)
{
    const auto& cfg = sc.config;
    const double v = cfg.beam.mean_velocity;
    const double d = grating_period(cfg.grating1);
    const double lambda = de_broglie_wavelength(cfg.species.mass, v);
    const double l_t = talbot_length(d, lambda);
    const double z_max = sc.carpet_z_max > 0.0 ? sc.carpet_z_max : l_t;
    std::vector<double> z(static_cast<std::size_t>(sc.carpet_rows));
    for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] = z_max * static_cast<double>(i + 1) / static_cast<double>(z.size());
    }
    std::vector<double> x(static_cast<std::size_t>(sc.carpet_columns));
    for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] = d * (static_cast<double>(k) / static_cast<double>(x.size()) - 0.5);
    }
    Carpet carpet;
    if (sc.carpet_method == "fourier") {
        const auto b = fourier_coefficients(transmission(cfg.grating1, cfg.species, v, cfg.grid_size), cfg.j_max);
        carpet = fourier_carpet(b, d, l_t, z, x, std::min(cfg.j_max, sc.carpet_columns / 2));
    } else {
        const auto* g = std::get_if<MaterialGrating>(&cfg.grating1);
        if (!g || g->interaction != WallInteraction::none) {
            throw ConfigError("fresnel carpet needs an ideal material grating1");
        }
        // Resolve the Fresnel phase at the shortest distance.
        const double reach = (0.5 * sc.carpet_slits + 1.0) * d;
        const int spp = static_cast<int>(std::ceil(2.0 * reach * d / (lambda * z.front()))) + 1;
        const auto aperture = binary_grating_aperture(d, g->open_fraction, sc.carpet_slits, spp);
        carpet = fresnel_carpet(aperture, lambda, z, x);
    }
    ResultTable table;
    table.matrix = true;
    table.columns = {{"z", "m"}, {"x", "m"}, {"intensity", "1"}};
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t k = 0; k < x.size(); ++k) {
            table.rows.push_back({z[i], x[k], carpet.intensity[i][k]});
        }
    }
    return table;
}

ResultTable run_otima_map(const Scenario& sc)
{
    if (sc.config.mode != InterferometerMode::time_domain) {
        throw ConfigError("otima-map needs mode = time-domain");
    }
    const auto linear = [](double lo, double hi, int n) {
        std::vector<double> out(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
        }
        return out;
    };
    const auto ratios = linear(sc.otima_ratio_min, sc.otima_ratio_max, sc.otima_ratio_points);
    const auto n0s = linear(sc.otima_n0_min, sc.otima_n0_max, sc.otima_n0_points);
    const double t_t = talbot_time(sc.config.species.mass, sc.config.period());
    const auto cells = parallel_map<std::vector<double>>(ratios.size() * n0s.size(), [&](std::size_t idx) {
        const double n0 = n0s[idx / ratios.size()];
        const double ratio = ratios[idx % ratios.size()];
        InterferometerConfig cfg = sc.config;
        for (GratingSpec* g : {&cfg.grating1, &cfg.grating2}) {
            if (auto* ion = std::get_if<IonizingGrating>(g)) {
                ion->mean_absorbed_photons = n0;
            }
        }
        if (cfg.grating3) {
            if (auto* ion = std::get_if<IonizingGrating>(&*cfg.grating3)) {
                ion->mean_absorbed_photons = n0;
            }
        }
        const auto s = detector_signal([&] {
            cfg.pulse_delay = ratio * t_t;
            return cfg;
        }(), cfg.beam.mean_velocity, sc.m_max);
        return std::vector<double>{n0, ratio, sinusoidal_visibility(s), s.truncation_residual};
    });
    ResultTable table;
    table.matrix = true;
    table.columns = {{"n0", "1"}, {"talbot_ratio", "1"}, {"visibility", "1"}, {"truncation_residual", "1"}};
    table.rows = cells;
    return table;
}

ResultTable run_csl_map(const Scenario& sc)
{
    if (sc.config.mode != InterferometerMode::time_domain) {
        throw ConfigError("csl-map needs mode = time-domain");
    }
    Scenario clean = sc;
    clean.config.environment = {};
    const auto map = exclusion_map(sc.csl_lambda0_grid, sc.csl_r_c_grid, clean.config, sc.csl_threshold);
    ResultTable table;
    table.matrix = true;
    table.columns = {{"r_c", "m"}, {"lambda0", "Hz"}, {"critical_mass", "amu"}, {"status", "1"}};
    for (std::size_t i = 0; i < map.r_c_grid.size(); ++i) {
        for (std::size_t j = 0; j < map.lambda0_grid.size(); ++j) {
            const auto& m = map.critical_mass[i][j];
            table.rows.push_back({map.r_c_grid[i], map.lambda0_grid[j], m ? *m / constants::amu : nan,
                                  static_cast<double>(map.status[i][j])});
        }
    }
    return table;
}

} // namespace

ResultTable run_scenario(const Scenario& scenario, Command command)
{
    ResultTable table;
    switch (command) {
    case Command::carpet: table = run_carpet(scenario); break;
    case Command::visibility: table = run_visibility(scenario); break;
    case Command::power_sweep:
        require_sweep(scenario, {"power"}, "power-sweep");
        table = run_visibility(scenario);
        break;
    case Command::velocity_sweep: table = run_velocity_sweep(scenario); break;
    case Command::decohere: table = run_decohere(scenario); break;
    case Command::otima_map: table = run_otima_map(scenario); break;
    case Command::deflect: table = run_deflect(scenario); break;
    case Command::csl_map: table = run_csl_map(scenario); break;
    }
    table.scenario = scenario.name;
    table.command = std::string(command_name(command));
    table.echo = scenario.echo;
    return table;
}

ResultTable run_scenario(const std::filesystem::path& path)
{
    const auto scenario = load_scenario(path);
    if (!scenario.command) {
        throw ConfigError("scenario '" + path.string() + "' has no 'command' key");
    }
    return run_scenario(scenario, *scenario.command);
}

// ---------------------------------------------------------------- emitter

Format format_from_name(std::string_view name)
{
    if (name == "csv") {
        return Format::csv;
    }
    if (name == "json") {
        return Format::json;
    }
    throw ConfigError("unknown format '" + std::string(name) + "' (csv, json)");
}

namespace {

std::string csv_number(double v)
{
    return std::isnan(v) ? "nan" : to_text(v);
}

std::string header(const Column& c)
{
    return c.name + " [" + c.unit + "]";
}

void emit_csv(const ResultTable& t, std::ostream& out)
{
    out << "# scenario: " << t.scenario << "\n# command: " << t.command << '\n';
    for (const auto& [key, value] : t.echo) {
        out << "# " << key << " = " << value << '\n';
    }
    if (!t.matrix) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            out << (c ? "," : "") << header(t.columns[c]);
        }
        out << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                out << (c ? "," : "") << csv_number(row[c]);
            }
            out << '\n';
        }
        return;
    }
    // Grid: first row carries the column axis, first column the row axis.
    std::vector<double> col_axis;
    for (const auto& row : t.rows) {
        if (std::find(col_axis.begin(), col_axis.end(), row[1]) != col_axis.end()) {
            break;
        }
        col_axis.push_back(row[1]);
    }
    const std::size_t n_cols = col_axis.size();
    for (std::size_t v = 2; v < t.columns.size(); ++v) {
        out << "# matrix: " << header(t.columns[v]) << '\n';
        out << header(t.columns[0]) << " \\ " << header(t.columns[1]);
        for (double c : col_axis) {
            out << ',' << csv_number(c);
        }
        out << '\n';
        for (std::size_t r = 0; r * n_cols < t.rows.size(); ++r) {
            out << csv_number(t.rows[r * n_cols][0]);
            for (std::size_t c = 0; c < n_cols; ++c) {
                out << ',' << csv_number(t.rows[r * n_cols + c][v]);
            }
            out << '\n';
        }
    }
}

void emit_json(const ResultTable& t, std::ostream& out)
{
    auto records = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json record;
        record["scenario"] = t.scenario;
        record["command"] = t.command;
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            if (std::isnan(row[c])) {
                record[header(t.columns[c])] = nullptr;
            } else {
                record[header(t.columns[c])] = row[c];
            }
        }
        for (const auto& [key, value] : t.echo) {
            record["input." + key] = value;
        }
        records.push_back(std::move(record));
    }
    out << records.dump(1) << '\n';
}

} // namespace

void emit(const ResultTable& table, Format format, std::ostream& out)
{
    if (table.rows.empty()) {
        throw ConfigError("no results to emit");
    }
    if (format == Format::csv) {
        emit_csv(table, out);
    } else {
        emit_json(table, out);
    }
}

void emit(const ResultTable& table, Format format, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    emit(table, format, out);
    out.flush();
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

} // namespace nearfield

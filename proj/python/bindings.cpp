#include "nearfield/classical.hpp"
#include "nearfield/constants.hpp"
#include "nearfield/csl.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/metrology.hpp"
#include "nearfield/scenario.hpp"
#include "nearfield/talbot_lau.hpp"
#include "nearfield/units.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace nearfield;

namespace {

py::dict table_dict(const ResultTable& t)
{
    py::dict out;
    out["scenario"] = t.scenario;
    out["command"] = t.command;
    py::list names, units;
    for (const auto& c : t.columns) {
        names.append(c.name);
        units.append(c.unit);
    }
    out["columns"] = names;
    out["units"] = units;
    out["rows"] = t.rows;
    out["matrix"] = t.matrix;
    return out;
}

std::string emit_string(const ResultTable& t, const std::string& format)
{
    std::ostringstream out;
    emit(t, format_from_name(format), out);
    return out.str();
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Near-field matter-wave interferometry";

    auto base = py::register_exception<Error>(m, "NearfieldError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

    m.attr("AMU") = constants::amu;
    m.attr("HBAR") = constants::hbar;
    m.attr("DEBYE") = constants::debye;

    m.def("parse_quantity", [](const std::string& text) { return parse_quantity(text).si_value; },
          "SI value of a quantity such as '991 nm'");
    m.def("de_broglie_wavelength", &de_broglie_wavelength, py::arg("mass"), py::arg("velocity"));
    m.def("talbot_length", &talbot_length, py::arg("period"), py::arg("wavelength"));
    m.def("talbot_time", &talbot_time, py::arg("mass"), py::arg("period"));

    py::class_<Species>(m, "Species")
        .def(py::init<>())
        .def(py::init([](std::string name, double mass, double alpha_stat_vol, double alpha_opt_vol, double c3,
                         double dipole_rms) {
                 Species s{std::move(name), mass, alpha_stat_vol, alpha_opt_vol, c3, dipole_rms};
                 s.validate();
                 return s;
             }),
             py::arg("name"), py::arg("mass"), py::arg("alpha_stat_vol") = 0.0, py::arg("alpha_opt_vol") = 0.0,
             py::arg("c3_coefficient") = 0.0, py::arg("dipole_rms") = 0.0)
        .def_readwrite("name", &Species::name)
        .def_readwrite("mass", &Species::mass)
        .def_readwrite("alpha_stat_vol", &Species::alpha_stat_vol)
        .def_readwrite("alpha_opt_vol", &Species::alpha_opt_vol)
        .def_readwrite("c3_coefficient", &Species::c3_coefficient)
        .def_readwrite("dipole_rms", &Species::dipole_rms);
    m.def("library_species", &library_species, py::arg("name"), py::arg("mass") = std::optional<double>{});
    m.def("species_names", &species_names);

    py::enum_<WallInteraction>(m, "WallInteraction")
        .value("none", WallInteraction::none)
        .value("vdw", WallInteraction::vdw_r3)
        .value("casimir_polder", WallInteraction::casimir_polder_r4);

    py::class_<MaterialGrating>(m, "MaterialGrating")
        .def(py::init<double, double, double, WallInteraction, double>(), py::arg("period"),
             py::arg("open_fraction"), py::arg("thickness") = 0.0, py::arg("interaction") = WallInteraction::none,
             py::arg("wall_cutoff") = 1e-9)
        .def_readwrite("period", &MaterialGrating::period)
        .def_readwrite("open_fraction", &MaterialGrating::open_fraction)
        .def_readwrite("thickness", &MaterialGrating::thickness)
        .def_readwrite("interaction", &MaterialGrating::interaction);
    py::class_<LaserPhaseGrating>(m, "LaserPhaseGrating")
        .def(py::init<double, double, double, double>(), py::arg("period"), py::arg("power"),
             py::arg("vertical_waist"), py::arg("laser_wavelength"))
        .def_readwrite("power", &LaserPhaseGrating::power);
    py::class_<IonizingGrating>(m, "IonizingGrating")
        .def(py::init<double, double, double>(), py::arg("period"), py::arg("mean_absorbed_photons"),
             py::arg("phase_amplitude") = 0.0)
        .def_readwrite("mean_absorbed_photons", &IonizingGrating::mean_absorbed_photons)
        .def_readwrite("phase_amplitude", &IonizingGrating::phase_amplitude);

    m.def("fourier_coefficients",
          [](const GratingSpec& g, const Species& s, double v_z, int j_max) {
              const auto table = fourier_coefficients(transmission(g, s, v_z), j_max);
              return std::vector<complex>(table.values().begin(), table.values().end());
          },
          py::arg("grating"), py::arg("species"), py::arg("velocity"), py::arg("j_max") = default_j_max,
          "b_j for j = -j_max..j_max");

    py::enum_<VelocityShape>(m, "VelocityShape")
        .value("gaussian", VelocityShape::gaussian)
        .value("top_hat", VelocityShape::top_hat);
    py::class_<BeamState>(m, "BeamState")
        .def(py::init<double, double, VelocityShape>(), py::arg("mean_velocity"), py::arg("relative_spread") = 0.0,
             py::arg("shape") = VelocityShape::gaussian)
        .def_readwrite("mean_velocity", &BeamState::mean_velocity)
        .def_readwrite("relative_spread", &BeamState::relative_spread);

    py::enum_<InterferometerMode>(m, "InterferometerMode")
        .value("spatial", InterferometerMode::spatial)
        .value("time_domain", InterferometerMode::time_domain);
    py::class_<InterferometerConfig>(m, "InterferometerConfig")
        .def(py::init([](GratingSpec g1, GratingSpec g2, std::optional<GratingSpec> g3, Species species,
                         BeamState beam, double separation, double pulse_delay, InterferometerMode mode) {
                 InterferometerConfig cfg;
                 cfg.grating1 = std::move(g1);
                 cfg.grating2 = std::move(g2);
                 cfg.grating3 = std::move(g3);
                 cfg.species = std::move(species);
                 cfg.beam = beam;
                 cfg.separation = separation;
                 cfg.pulse_delay = pulse_delay;
                 cfg.mode = mode;
                 cfg.validate();
                 return cfg;
             }),
             py::arg("grating1"), py::arg("grating2"), py::arg("grating3"), py::arg("species"), py::arg("beam"),
             py::arg("separation") = 0.0, py::arg("pulse_delay") = 0.0,
             py::arg("mode") = InterferometerMode::spatial)
        .def_readwrite("grating2", &InterferometerConfig::grating2)
        .def_readwrite("beam", &InterferometerConfig::beam)
        .def_readwrite("separation", &InterferometerConfig::separation)
        .def_readwrite("pulse_delay", &InterferometerConfig::pulse_delay)
        .def_readwrite("j_max", &InterferometerConfig::j_max);

    m.def("visibility",
          [](const InterferometerConfig& cfg, std::optional<double> v_z, int n_velocities) {
              if (v_z) {
                  return sinusoidal_visibility(detector_signal(cfg, *v_z));
              }
              return velocity_averaged_pattern(cfg, n_velocities).visibility;
          },
          py::arg("config"), py::arg("velocity") = std::optional<double>{}, py::arg("n_velocities") = 64,
          "quantum visibility at one velocity, or averaged over the beam");
    m.def("detector_signal",
          [](const InterferometerConfig& cfg, double v_z, int m_max) { return detector_signal(cfg, v_z, m_max).components; },
          py::arg("config"), py::arg("velocity"), py::arg("m_max") = default_m_max);
    m.def("classical_visibility",
          [](const InterferometerConfig& cfg, std::optional<double> v_z, int n_velocities) {
              if (v_z) {
                  return sinusoidal_visibility(classical_moire(cfg, *v_z));
              }
              return classical_velocity_averaged(cfg, n_velocities).visibility;
          },
          py::arg("config"), py::arg("velocity") = std::optional<double>{}, py::arg("n_velocities") = 64);
    m.def("classical_monte_carlo",
          [](const InterferometerConfig& cfg, double v_z, std::int64_t rays, std::uint64_t seed) {
              RayEnsemble e;
              e.count = rays;
              e.seed = seed;
              py::gil_scoped_release release;
              const auto r = classical_visibility(cfg, e, v_z);
              return std::tuple{r.visibility, r.visibility_error, r.histogram};
          },
          py::arg("config"), py::arg("velocity"), py::arg("rays") = 1'000'000, py::arg("seed") = 0,
          "(visibility, standard error, histogram of final positions)");
    m.def("time_domain_visibility",
          [](const InterferometerConfig& cfg, double pulse_delay) { return time_domain_visibility(cfg, pulse_delay); },
          py::arg("config"), py::arg("pulse_delay"));

    m.def("critical_mass",
          [](double lambda0, double r_c, const InterferometerConfig& cfg, double threshold) {
              return critical_mass({lambda0, r_c}, cfg, threshold).mass;
          },
          py::arg("lambda0"), py::arg("r_c"), py::arg("config"), py::arg("threshold") = std::exp(-1.0),
          "smallest mass [kg] whose CSL reduction falls below threshold");

    m.def("stark_fringe_shift",
          [](double k, double grad_e2, double alpha_vol, double mass, double v) {
              return stark_fringe_shift({k, grad_e2}, constants::polarizability_from_volume(alpha_vol), mass, v);
          },
          py::arg("geometry_constant"), py::arg("grad_e_squared"), py::arg("alpha_vol"), py::arg("mass"),
          py::arg("velocity"));
    m.def("total_polarizability_vol",
          [](double alpha_stat_vol, double dipole_rms, double temperature) {
              return constants::polarizability_to_volume(total_polarizability(
                  constants::polarizability_from_volume(alpha_stat_vol), dipole_rms, temperature));
          },
          py::arg("alpha_stat_vol"), py::arg("dipole_rms"), py::arg("temperature"));

    m.def("run_scenario",
          [](const std::filesystem::path& path, std::optional<std::string> command) {
              const auto sc = load_scenario(path);
              std::optional<Command> c = command ? command_from_name(*command) : sc.command;
              if (!c) {
                  throw ConfigError(command ? "unknown command '" + *command + "'" : "scenario has no 'command'");
              }
              py::gil_scoped_release release;
              const auto t = run_scenario(sc, *c);
              py::gil_scoped_acquire acquire;
              return table_dict(t);
          },
          py::arg("path"), py::arg("command") = std::optional<std::string>{},
          "run a scenario file; returns columns, units and rows");
    m.def("run_scenario_text",
          [](const std::string& text, const std::string& command, const std::string& format) {
              auto sc = parse_scenario(text);
              const auto c = command_from_name(command);
              if (!c) {
                  throw ConfigError("unknown command '" + command + "'");
              }
              const auto t = run_scenario(sc, *c);
              return std::pair{table_dict(t), emit_string(t, format)};
          },
          py::arg("text"), py::arg("command"), py::arg("format") = "csv");
}

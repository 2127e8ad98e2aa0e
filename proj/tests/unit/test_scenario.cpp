#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/scenario.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

using namespace nearfield;

namespace {

const char* base = R"(
name = test
species = C70
beam.velocity = 100 m/s
beam.spread = 0.05
velocity_nodes = 8
gratings.type = material
gratings.period = 991 nm
gratings.open_fraction = 0.475
gratings.thickness = 500 nm
separation = 0.22 m
)";

std::string with(const std::string& extra)
{
    return std::string(base) + extra;
}

std::string config_error(const std::string& text)
{
    try {
        parse_scenario(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::string csv_of(const ResultTable& t)
{
    std::ostringstream out;
    emit(t, Format::csv, out);
    return out.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream l(line);
        std::string cell;
        while (std::getline(l, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("a minimal scenario parses")
{
    const auto sc = parse_scenario(base);
    CHECK(sc.name == "test");
    CHECK(sc.config.separation == doctest::Approx(0.22));
    CHECK(sc.config.species.mass == doctest::Approx(840 * constants::amu));
    CHECK(std::get<MaterialGrating>(sc.config.grating2).period == doctest::Approx(991e-9));
    REQUIRE(sc.config.grating3.has_value());
    CHECK(sc.echo.size() == 10);
}

TEST_CASE("schema violations are listed together")
{
    const auto msg = config_error(with("separation2 = 3 m\nbeam.spread = 0.1\ngratings.thickness = 4\n"
                                       "gratings.period = 3 m/s\nbeam.velocity = 100 m/s\n"));
    CHECK(msg.find("unknown key 'separation2'") != std::string::npos);
    CHECK(msg.find("duplicate key 'beam.spread'") != std::string::npos);
    CHECK(msg.find("duplicate key 'beam.velocity'") != std::string::npos);
}

TEST_CASE("physical keys need units of the right kind")
{
    auto text = std::string(base);
    text.replace(text.find("0.22 m"), 6, "0.22");
    CHECK(config_error(text).find("'separation'") != std::string::npos);
    CHECK(config_error(text).find("missing unit") != std::string::npos);
    text = std::string(base);
    text.replace(text.find("0.22 m"), 6, "0.22 s");
    CHECK(config_error(text).find("expected a length") != std::string::npos);
    CHECK(config_error(with("m_max = 4 nm\n")).find("expected an integer") != std::string::npos);
    CHECK(config_error(with("gratings.open_fraction = 0.4 m\n")).find("duplicate") != std::string::npos);
}

TEST_CASE("inapplicable and unknown values")
{
    CHECK(config_error(with("gratings.power = 1 W\n")).find("does not apply") != std::string::npos);
    auto text = std::string(base);
    text.replace(text.find("C70"), 3, "C80");
    CHECK(config_error(text).find("unknown species 'C80'") != std::string::npos);
    text = std::string(base);
    text.replace(text.find("C70"), 3, "gold-cluster");
    CHECK(config_error(text).find("species.mass") != std::string::npos);
    CHECK(config_error(with("gratings.interaction = glue\n")).find("unknown interaction") != std::string::npos);
    CHECK(config_error(with("beam.shape = box\n")).find("beam.shape") != std::string::npos);
    CHECK(config_error(with("sweep.points = 3\n")).find("without 'sweep.parameter'") != std::string::npos);
}

TEST_CASE("an empty sweep is a configuration error")
{
    try {
        parse_scenario(with("sweep.parameter = velocity\nsweep.start = 80 m/s\nsweep.stop = 90 m/s\n"
                            "sweep.points = 0\n"));
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("empty sweep") != std::string::npos);
        CHECK(e.exit_code() == 2);
    }
    CHECK(config_error(with("sweep.parameter = velocity\nsweep.start = 80 W\nsweep.stop = 90 m/s\n"
                            "sweep.points = 2\n"))
              .find("expected a velocity") != std::string::npos);
}

TEST_CASE("species library")
{
    for (const auto& name : species_names()) {
        const auto s = library_species(name, 1e4 * constants::amu);
        CHECK_NOTHROW(s.validate());
    }
    const auto c70 = library_species("C70");
    CHECK(c70.alpha_stat_vol == 102e-30);
    CHECK(c70.c3_coefficient == doctest::Approx(10e-3 * constants::elementary_charge * 1e-27));
    CHECK(library_species("PFNS8").alpha_opt_vol == 2e-28);
    CHECK(library_species("C60").mass == doctest::Approx(720 * constants::amu));
    CHECK(library_species("azobenzene", 1600 * constants::amu).alpha_stat_vol == 61e-30);
    CHECK_THROWS_AS(library_species("azobenzene"), ConfigError);
}

TEST_CASE("sweep values")
{
    SweepSpec lin{"velocity", 80, 220, 8, false};
    const auto v = lin.values();
    CHECK(v.front() == 80);
    CHECK(v.back() == doctest::Approx(220));
    SweepSpec log{"pressure", 1e-6, 1e-4, 3, true};
    CHECK(log.values()[1] == doctest::Approx(1e-5));
    SweepSpec one{"velocity", 100, 200, 1, false};
    CHECK(one.values() == std::vector<double>{100});
}

TEST_CASE("emission")
{
    const auto sc = parse_scenario(with("sweep.parameter = velocity\nsweep.start = 90 m/s\nsweep.stop = 110 m/s\n"
                                        "sweep.points = 3\nclassical = false\n"));
    const auto table = run_scenario(sc, Command::visibility);
    REQUIRE(table.rows.size() == 3);
    REQUIRE(table.columns.size() == 3);
    CHECK(table.columns[0].name == "velocity");
    CHECK(table.columns[0].unit == "m/s");

    const std::string csv = csv_of(table);
    CHECK(csv == csv_of(run_scenario(sc, Command::visibility)));
    const auto rows = csv_rows(csv);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0][0] == "velocity [m/s]");
    CHECK(csv.find("# species = C70") != std::string::npos);

    std::ostringstream json_out;
    emit(table, Format::json, json_out);
    const auto json = nlohmann::json::parse(json_out.str());
    REQUIRE(json.size() == 3);
    for (std::size_t r = 0; r < 3; ++r) {
        const double from_json = json[r]["quantum_visibility [1]"].get<double>();
        const double from_csv = std::stod(rows[r + 1][1]);
        CHECK(std::abs(from_json - from_csv) <= 1e-12 * std::abs(from_csv));
        CHECK(json[r]["input.species"] == "C70");
    }

    ResultTable one = table;
    one.rows.resize(1);
    CHECK(csv_rows(csv_of(one)).size() == 2);
    ResultTable none = table;
    none.rows.clear();
    CHECK_THROWS_AS(csv_of(none), ConfigError);

    try {
        emit(table, Format::csv, std::filesystem::path("/nonexistent-dir/out.csv"));
        FAIL("expected an IoError");
    } catch (const IoError& e) {
        CHECK(e.exit_code() == 3);
    }
    CHECK_THROWS_AS(format_from_name("xml"), ConfigError);
}

TEST_CASE("missing values are written as nan and null")
{
    ResultTable t;
    t.scenario = "s";
    t.command = "visibility";
    t.columns = {{"a", "1"}};
    t.rows = {{std::numeric_limits<double>::quiet_NaN()}};
    CHECK(csv_of(t).find("\nnan\n") != std::string::npos);
    std::ostringstream out;
    emit(t, Format::json, out);
    CHECK(nlohmann::json::parse(out.str())[0]["a [1]"].is_null());
}

TEST_CASE("carpet emits a distance by position matrix")
{
    auto sc = parse_scenario(with("carpet.rows = 5\ncarpet.columns = 16\n"));
    const auto table = run_scenario(sc, Command::carpet);
    CHECK(table.matrix);
    CHECK(table.rows.size() == 80);
    const auto rows = csv_rows(csv_of(table));
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].size() == 17);
    CHECK(rows[0][0] == "z [m] \\ x [m]");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        CHECK(rows[r].size() == 17);
    }
}

TEST_CASE("commands check their sweep parameter")
{
    const auto sc = parse_scenario(base);
    CHECK_THROWS_WITH_AS(run_scenario(sc, Command::power_sweep), doctest::Contains("sweep.parameter = power"),
                         ConfigError);
    CHECK_THROWS_AS(run_scenario(sc, Command::velocity_sweep), ConfigError);
    CHECK_THROWS_AS(run_scenario(sc, Command::decohere), ConfigError);
    CHECK_THROWS_AS(run_scenario(sc, Command::otima_map), ConfigError);
    CHECK(command_from_name("csl-map") == Command::csl_map);
    CHECK_FALSE(command_from_name("plot").has_value());
}

TEST_CASE("decoherence scenario reduces visibility with pressure")
{
    const auto sc = parse_scenario(with("decohere.channel = collisional\ngas.mass = 16 amu\ngas.temperature = 300 K\n"
                                        "cross_section = 1 nm^2\nsweep.parameter = pressure\n"
                                        "sweep.start = 0 mbar\nsweep.stop = 1e-5 mbar\nsweep.points = 2\n"));
    const auto t = run_scenario(sc, Command::decohere);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][2] == doctest::Approx(1.0));
    CHECK(t.rows[1][2] < 1.0);
}

TEST_CASE("scenario files resolve relative paths")
{
    const auto dir = std::filesystem::temp_directory_path() / "nearfield_scenario_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "lines.txt") << "1e-6 100\n";
        std::ofstream(dir / "s.scn") << with("command = decohere\ndecohere.channel = thermal\n"
                                             "emission.file = lines.txt\nsweep.parameter = photons\n"
                                             "sweep.start = 0\nsweep.stop = 1\nsweep.points = 2\n");
    }
    const auto table = run_scenario(dir / "s.scn");
    CHECK(table.command == "decohere");
    CHECK(table.rows.size() == 2);
    CHECK_THROWS_AS(load_scenario(dir / "missing.scn"), IoError);
    std::filesystem::remove_all(dir);
}

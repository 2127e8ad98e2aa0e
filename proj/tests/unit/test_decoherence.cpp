#include "fixtures.hpp"

#include "nearfield/decoherence.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/talbot_lau.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace nearfield;
using constants::pi;

namespace {

DecoherenceChannel constant_channel(double rate, std::function<complex(double)> eta)
{
    return {"test", [rate](double) { return rate; }, std::move(eta), rate};
}

GasEnvironment methane(double pressure)
{
    GasEnvironment env;
    env.gas_mass = 16 * constants::amu;
    env.temperature = 300;
    env.pressure = pressure;
    return env;
}

const PathGeometry c70_geometry{991e-9, 0.22 / 100.0, 0.207 / 100.0};

} // namespace

TEST_CASE("decoherence factor closed forms")
{
    const auto none = constant_channel(1e3, [](double) { return complex(1.0); });
    CHECK(std::abs(decoherence_factor(none, c70_geometry, 2) - 1.0) < 1e-12);
    const double rate = 200.0;
    const auto total = constant_channel(rate, [](double x) { return complex(x == 0.0 ? 1.0 : 0.0); });
    for (int m : {1, 2, 4}) {
        CHECK(std::abs(decoherence_factor(total, c70_geometry, m)) ==
              doctest::Approx(std::exp(-2.0 * rate * c70_geometry.half_duration)).epsilon(1e-6));
    }
    CHECK(std::abs(decoherence_factor(total, c70_geometry, 0) - 1.0) < 1e-12);
}

TEST_CASE("decoherence factor never amplifies")
{
    const auto gauss = constant_channel(500.0, [](double x) { return complex(std::exp(-x * x / 1e-12)); });
    for (int m = 0; m <= 6; ++m) {
        const double f = std::abs(decoherence_factor(gauss, c70_geometry, m));
        CHECK(f > 0.0);
        CHECK(f <= 1.0 + 1e-15);
    }
}

TEST_CASE("channels compose additively")
{
    const auto a = constant_channel(300.0, [](double x) { return complex(std::exp(-x * x / 4e-14)); });
    const auto b = constant_channel(700.0, [](double x) { return complex(std::cos(x / 1e-7) * 0.5 + 0.5); });
    const DecoherenceChannel both{"sum", [](double) { return 1000.0; },
                                  [](double x) {
                                      return (300.0 * std::exp(-x * x / 4e-14) +
                                              700.0 * (std::cos(x / 1e-7) * 0.5 + 0.5)) /
                                             1000.0;
                                  },
                                  1000.0};
    const std::vector<DecoherenceChannel> pair{a, b};
    for (int m : {1, 2, 3}) {
        const complex seq = decoherence_factor(a, c70_geometry, m) * decoherence_factor(b, c70_geometry, m);
        CHECK(std::abs(decoherence_factor(pair, c70_geometry, m) - seq) < 1e-9);
        CHECK(std::abs(decoherence_factor(both, c70_geometry, m) - seq) < 1e-9);
    }
}

TEST_CASE("decoherence is strongest at the central grating")
{
    // With a time-resolved rate concentrated at t = 0 the loss exceeds that
    // of the same number of events near the outer gratings.
    const auto eta = [](double x) { return complex(std::exp(-x * x / 1e-14)); };
    const double tau = c70_geometry.half_duration;
    const DecoherenceChannel centre{"c", [tau](double t) { return std::abs(t) < 0.1 * tau ? 1000.0 : 0.0; }, eta, {}};
    const DecoherenceChannel edge{"e", [tau](double t) { return std::abs(t) > 0.9 * tau ? 1000.0 : 0.0; }, eta, {}};
    CHECK(std::abs(decoherence_factor(centre, c70_geometry, 2)) < std::abs(decoherence_factor(edge, c70_geometry, 2)));
}

TEST_CASE("collisional decoherence")
{
    const auto env = methane(1e-5);
    CHECK(collisional_eta(env, 0.0) == complex(1.0));
    CHECK(std::abs(collisional_eta(env, 100e-9)) < 0.1);
    double last = 1.0;
    for (double x = 1e-12; x < 1e-9; x *= 1.5) {
        const double e = std::abs(collisional_eta(env, x));
        CHECK(e <= last + 0.05);
        CHECK(e <= 1.0);
        last = e;
    }
    // Isotropic closed form against the tabulated path with a flat table.
    GasEnvironment table = env;
    table.scattering_model = ScatteringModel::user_table;
    table.table = {{0.0, pi}, {1.0, 1.0}};
    for (double x : {2e-12, 7e-12, 3e-11}) {
        CHECK(std::abs(collisional_eta(table, x, 32) - collisional_eta(env, x)) < 1e-6);
    }
    const auto ch = collisional_channel(env, 1e-18, 100.0);
    REQUIRE(ch.constant_rate);
    CHECK(*ch.constant_rate == doctest::Approx(env.number_density() * 1e-18 * mean_relative_speed(env, 100.0)));
    CHECK(collisional_channel(methane(0.0), 1e-18, 100.0).constant_rate.value() == 0.0);
    CHECK(collisional_channel(env, 2e-18, 100.0).constant_rate.value() == doctest::Approx(2 * *ch.constant_rate));
    CHECK_THROWS_AS(collisional_channel(env, 0.0, 100.0), DomainError);
    CHECK_THROWS_AS(collisional_eta(env, -1e-9), DomainError);
}

TEST_CASE("mean relative speed limits")
{
    const auto env = methane(1e-5);
    const double mean_gas = std::sqrt(8 * constants::boltzmann_kB * 300 / (pi * env.gas_mass));
    CHECK(mean_relative_speed(env, 0.0) == doctest::Approx(mean_gas).epsilon(1e-9));
    CHECK(mean_relative_speed(env, 1e5) == doctest::Approx(1e5).epsilon(1e-3));
}

TEST_CASE("thermal emission")
{
    const std::vector<EmissionLine> far{{1.0, 1e4}};
    const auto ch = thermal_emission_channel(far);
    CHECK(std::abs(ch.eta(1e-7) - 1.0) < 1e-12);
    CHECK(std::abs(decoherence_factor(ch, c70_geometry, 2) - 1.0) < 1e-9);

    // One short-wavelength photon per flight: m = 2 coefficient drops by ~1/e.
    const std::vector<EmissionLine> uv{{1e-9, 1.0 / (2.0 * c70_geometry.half_duration)}};
    const double f = std::abs(decoherence_factor(thermal_emission_channel(uv), c70_geometry, 2));
    CHECK(f == doctest::Approx(std::exp(-1.0)).epsilon(0.05));

    const std::vector<EmissionLine> two{{1e-6, 3.0}, {2e-6, 1.0}};
    const auto mix = thermal_emission_channel(two);
    const double x = 0.4e-6;
    const double expected = 0.75 * std::sin(2 * pi * x / 1e-6) / (2 * pi * x / 1e-6) +
                            0.25 * std::sin(2 * pi * x / 2e-6) / (2 * pi * x / 2e-6);
    CHECK(mix.eta(x).real() == doctest::Approx(expected));
    CHECK(mix.constant_rate.value() == 4.0);
    CHECK_THROWS_AS(thermal_emission_channel(std::vector<EmissionLine>{}), DomainError);
}

TEST_CASE("photon absorption blurring")
{
    CHECK(absorption_visibility_factor(0.0, 0.5) == 1.0);
    CHECK(absorption_visibility_factor(1.0, 0.5) == doctest::Approx(std::exp(-2.0)));
    CHECK(absorption_visibility_factor(3.0, 2.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(absorption_visibility_factor(-1.0, 0.5), DomainError);
}

TEST_CASE("collapse channel")
{
    CHECK(csl_channel(1e-8, 100e-9, constants::amu).constant_rate.value() == doctest::Approx(1e-8));
    const auto ch = csl_channel(1e-8, 100e-9, 1e6 * constants::amu);
    CHECK(ch.constant_rate.value() == doctest::Approx(1e4));
    const double x = 5e-9;
    CHECK(1.0 - ch.eta(x).real() == doctest::Approx(x * x / (4 * 1e-14)).epsilon(1e-3));
    CHECK_THROWS_AS(csl_channel(0.0, 1e-7, constants::amu), DomainError);
}

TEST_CASE("two-column readers")
{
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / "nearfield_spectrum.txt";
    {
        std::ofstream out(path);
        out << "# wavelength_m rate_hz\n1e-6, 100\n2e-6 50\n\n";
    }
    const auto lines = read_emission_spectrum(path);
    REQUIRE(lines.size() == 2);
    CHECK(lines[1].wavelength == 2e-6);
    CHECK(lines[1].rate == 50);
    {
        std::ofstream out(path);
        out << "1e-6 abc\n";
    }
    CHECK_THROWS(read_emission_spectrum(path));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_scattering_table(dir / "does_not_exist.txt"), IoError);
}

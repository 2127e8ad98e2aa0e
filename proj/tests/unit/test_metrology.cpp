#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/metrology.hpp"

#include <doctest.h>

#include <cmath>

using namespace nearfield;
using constants::pi;

TEST_CASE("Stark fringe shift")
{
    const double alpha = constants::polarizability_from_volume(100e-30);
    const double m = 840 * constants::amu;
    const DeflectionField field{1.0, 1e15};
    // Independent evaluation: K alpha dE2/dx / (2 m v^2).
    const double expected = 1.0 * (4 * pi * 8.8541878128e-12 * 100e-30) * 1e15 / (2 * m * 100.0 * 100.0);
    CHECK(stark_fringe_shift(field, alpha, m, 100) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(3.99e-4).epsilon(1e-3));
    CHECK(stark_fringe_shift({1.0, 0.0}, alpha, m, 100) == 0.0);
    CHECK(stark_fringe_shift(field, alpha, m, 200) == doctest::Approx(expected / 4));
    CHECK_THROWS_AS(stark_fringe_shift(field, alpha, m, 0.0), DomainError);
}

TEST_CASE("thermal polarizability")
{
    const double alpha = constants::polarizability_from_volume(61e-30);
    CHECK(total_polarizability(alpha, 0.0, 500) == alpha);
    const double d = 2.5 * constants::debye;
    const double increment = constants::polarizability_to_volume(total_polarizability(alpha, d, 500) - alpha);
    CHECK(increment == doctest::Approx(d * d / (3 * constants::boltzmann_kB * 500) /
                                       (4 * pi * constants::vacuum_permittivity_eps0)));
    CHECK(increment == doctest::Approx(30e-30).epsilon(0.05));
    CHECK(total_polarizability(alpha, d, 1e12) == doctest::Approx(alpha).epsilon(1e-8));
    CHECK_THROWS_AS(total_polarizability(alpha, d, 0.0), DomainError);
}

TEST_CASE("inertial and rotational shifts")
{
    CHECK(inertial_fringe_shift(9.81, 1e-3) == doctest::Approx(9.81e-6));
    CHECK(inertial_fringe_shift(0.0, 1e-3) == 0.0);
    CHECK(inertial_fringe_shift(9.81, 2e-3) == doctest::Approx(4 * 9.81e-6));
    CHECK_THROWS_AS(inertial_fringe_shift(9.81, -1.0), DomainError);

    const Vec3 omega{0, 0, 7.29e-5};
    const auto par = coriolis_acceleration({0, 0, 100}, omega);
    CHECK(par == Vec3{0, 0, 0});
    const auto perp = coriolis_acceleration({100, 0, 0}, omega);
    CHECK(std::hypot(perp[0], perp[1], perp[2]) == doctest::Approx(1.458e-2));
    const auto back = coriolis_acceleration({-100, 0, 0}, omega);
    for (int i = 0; i < 3; ++i) {
        CHECK(back[i] == -perp[i]);
    }
}

TEST_CASE("time-domain inertial shift does not depend on velocity")
{
    const double t = 15e-3;
    const double reference = inertial_fringe_shift(9.81, t);
    for (double v : {50.0, 100.0, 300.0}) {
        (void)v; // the free time is set by the pulses, not by the flight
        CHECK(inertial_fringe_shift(9.81, t) == reference);
    }
}

TEST_CASE("grating shift combination")
{
    CHECK(grating_shift_combination(3e-9, 3e-9, 3e-9) == 0.0);
    CHECK(grating_shift_combination(0, 2e-9, 0) == -4e-9);
    CHECK(grating_shift_combination(0, 2e-9, 4e-9) == 0.0);
}

TEST_CASE("shift dephasing")
{
    const double d = 1e-6;
    ShiftDistribution delta{ShiftModel::delta, 0.3e-6, 0, {}};
    CHECK(std::abs(shift_dephasing_factor(delta, d)) == doctest::Approx(1.0));
    CHECK(std::arg(shift_dephasing_factor(delta, d)) == doctest::Approx(2 * pi * 0.3));
    ShiftDistribution g{ShiftModel::gaussian, 0.0, d / (2 * pi), {}};
    CHECK(std::abs(shift_dephasing_factor(g, d)) == doctest::Approx(std::exp(-0.5)));
    g.sigma = 0.0;
    CHECK(std::abs(shift_dephasing_factor(g, d)) == doctest::Approx(1.0));
    g.sigma = 10 * d;
    CHECK(std::abs(shift_dephasing_factor(g, d)) < 1e-12);
    ShiftDistribution e{ShiftModel::empirical, 0, 0, {0.0, 0.5e-6}};
    CHECK(std::abs(shift_dephasing_factor(e, d)) < 1e-12);
    e.samples = {0.0, 0.1e-6, 0.2e-6};
    CHECK(std::abs(shift_dephasing_factor(e, d)) < 1.0);
    e.samples.clear();
    CHECK_THROWS_AS(shift_dephasing_factor(e, d), DomainError);
    g.sigma = -1;
    CHECK_THROWS_AS(shift_dephasing_factor(g, d), DomainError);
}

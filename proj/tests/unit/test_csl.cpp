#include "fixtures.hpp"

#include "nearfield/csl.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/talbot_lau.hpp"

#include <doctest.h>

#include <cmath>

using namespace nearfield;
using constants::amu;

TEST_CASE("collapse reduces visibility")
{
    const auto cfg = fixtures::otima(1e6, 8.0, 0.0);
    const double quantum = time_domain_visibility(cfg, cfg.pulse_delay);
    CHECK(csl_visibility(cfg, {1e-30, 100e-9}, 1e6 * amu) == doctest::Approx(quantum).epsilon(1e-9));
    double last = 1.0;
    for (double l : {1e-12, 1e-10, 1e-9, 1e-8}) {
        const double v = csl_visibility(cfg, {l, 100e-9}, 1e6 * amu);
        CHECK(v <= last);
        last = v;
    }
    CHECK(csl_reduction_factor(cfg, {1e-8, 100e-9}, 1e6 * amu) < 0.01);
    CHECK_THROWS_AS(csl_visibility(fixtures::c70_tli(), {1e-8, 1e-7}, 1e6 * amu), DomainError);
}

TEST_CASE("critical mass")
{
    const auto cfg = fixtures::otima(1e6, 8.0, 0.0);
    const double threshold = std::exp(-1.0);
    const auto a = critical_mass({1e-12, 100e-9}, cfg, threshold);
    CHECK(a.mass / amu >= 1e6);
    CHECK(a.mass / amu <= 1e8);
    CHECK(a.iterations <= 60);
    // The reduction at the returned mass sits at the threshold.
    CHECK(csl_reduction_factor(cfg, {1e-12, 100e-9}, a.mass) <= threshold);
    CHECK(csl_reduction_factor(cfg, {1e-12, 100e-9}, a.mass / 1.02) > threshold);

    const auto b = critical_mass({1e-10, 100e-9}, cfg, threshold);
    CHECK(b.mass < a.mass);
    // Larger r_c: fringe separations fall below r_c and the effective rate drops.
    const auto wide = critical_mass({1e-10, 1e-6}, cfg, threshold);
    CHECK(wide.mass > b.mass);

    // Bracket independence within the 1% tolerance.
    const auto narrow = critical_mass({1e-10, 100e-9}, cfg, threshold, 1e4, 1e10);
    CHECK(narrow.mass == doctest::Approx(b.mass).epsilon(0.02));

    CHECK_THROWS_AS(critical_mass({1e-10, 100e-9}, cfg, 0.0), DomainError);
    CHECK_THROWS_AS(critical_mass({1e-10, 100e-9}, cfg, threshold, 1e3, 1e4), DomainError);
    CHECK_THROWS_WITH(critical_mass({1e-10, 100e-9}, fixtures::otima(1e6, 0.2, 0.0), threshold),
                      doctest::Contains("unusable"));
}

TEST_CASE("critical mass follows the scaling invariant")
{
    // With r_c far above every path separation, 1 - eta ~ x^2/(4 r_c^2), so
    // the exponent depends on lambda0 / r_c^2 only.
    const auto cfg = fixtures::otima(1e6, 8.0, 0.0);
    const double threshold = std::exp(-1.0);
    const auto a = critical_mass({1e-9, 20e-6}, cfg, threshold);
    const auto b = critical_mass({4e-9, 40e-6}, cfg, threshold);
    CHECK(b.mass == doctest::Approx(a.mass).epsilon(0.02));
}

TEST_CASE("exclusion map")
{
    const auto cfg = fixtures::otima(1e6, 8.0, 0.0);
    const auto map = exclusion_map(log_grid(1e-12, 1e-8, 3), {100e-9, 1e-6}, cfg, std::exp(-1.0));
    REQUIRE(map.critical_mass.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(map.status[i][j] == CellStatus::ok);
        }
        for (std::size_t j = 1; j < 3; ++j) {
            CHECK(*map.critical_mass[i][j] < *map.critical_mass[i][j - 1]);
        }
    }
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(*map.critical_mass[0][j] / amu >= 1e5);
        CHECK(*map.critical_mass[0][j] / amu <= 1e9);
    }
    // A collapse rate too weak to matter anywhere in the bracket.
    const auto weak = exclusion_map({1e-40, 1e-39}, {100e-9, 200e-9}, cfg, std::exp(-1.0));
    CHECK(weak.status[0][0] == CellStatus::out_of_range);
    CHECK_FALSE(weak.critical_mass[0][0].has_value());
    const auto bad = exclusion_map({1e-12, 1e-10}, {100e-9, 200e-9}, fixtures::otima(1e6, 0.2, 0.0), 0.5);
    CHECK(bad.status[1][1] == CellStatus::unusable);
    CHECK_THROWS_AS(exclusion_map({1e-12}, {1e-7, 2e-7}, cfg, 0.5), DomainError);
    const auto g = log_grid(1e-12, 1e-8, 5);
    CHECK(g.front() == 1e-12);
    CHECK(g.back() == 1e-8);
    CHECK(g[2] == doctest::Approx(1e-10).epsilon(1e-12));
}

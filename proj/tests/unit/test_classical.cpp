#include "fixtures.hpp"

#include "nearfield/classical.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/metrology.hpp"

#include <doctest.h>

#include <cmath>

using namespace nearfield;
using constants::pi;

namespace {

/// Shadow moire of three ideal masks: 2 c1_1 c2_2 c3_1 / (c1_0 c2_0 c3_0)
/// with c_m = sin(pi m f)/(pi m).
double analytic_moire(double f)
{
    const double c1 = std::sin(pi * f) / (pi * f);
    const double c2 = std::sin(2 * pi * f) / (2 * pi * f);
    return 2.0 * c1 * c1 * std::abs(c2);
}

} // namespace

TEST_CASE("deflection kicks")
{
    const auto s = fixtures::c70();
    const auto g = fixtures::gold(WallInteraction::vdw_r3);
    CHECK(deflection_kick(g, s, 100, 0.0).delta_v == 0.0);
    CHECK_FALSE(deflection_kick(g, s, 100, 0.0).absorbed);
    for (double x : {20e-9, 100e-9, 200e-9}) {
        const auto k = deflection_kick(g, s, 100, x);
        CHECK(k.delta_v == doctest::Approx(-deflection_kick(g, s, 100, -x).delta_v));
        // attraction towards the nearer wall
        CHECK(k.delta_v > 0.0);
        CHECK(k.delta_v == doctest::Approx(constants::hbar / s.mass * material_phase_gradient(g, s, 100, x)));
    }
    CHECK(deflection_kick(g, s, 100, 400e-9).absorbed);
    CHECK(deflection_kick(g, s, 100, 991e-9 + 400e-9).absorbed);

    Species p;
    p.mass = 5672 * constants::amu;
    p.alpha_opt_vol = 2e-28;
    const LaserPhaseGrating laser{266e-9, 0.01, 20e-6, 532e-9};
    CHECK(std::abs(deflection_kick(laser, p, 75, 0.0).delta_v) < 1e-15);
    CHECK(std::abs(deflection_kick(laser, p, 75, 133e-9).delta_v) < 1e-12);
    CHECK(std::abs(deflection_kick(laser, p, 75, 60e-9).delta_v) > 1e-6);
}

TEST_CASE("ideal masks reproduce the analytic shadow moire")
{
    const auto cfg = fixtures::c70_tli();
    const double expected = analytic_moire(0.475);
    CHECK(expected == doctest::Approx(0.0468).epsilon(1e-3));
    for (double v : {80.0, 150.0, 220.0}) {
        CHECK(sinusoidal_visibility(classical_moire(cfg, v)) == doctest::Approx(expected).epsilon(1e-9));
    }
    RayEnsemble rays;
    rays.count = 400'000;
    rays.seed = 3;
    for (double v : {80.0, 200.0}) {
        const auto mc = classical_visibility(cfg, rays, v);
        CHECK(std::abs(mc.visibility - expected) < 3.0 * mc.visibility_error);
        CHECK(mc.visibility_error > 0.0);
    }
}

TEST_CASE("Monte Carlo agrees with the deterministic quadrature under wall forces")
{
    const auto cfg = fixtures::c70_tli(WallInteraction::vdw_r3);
    RayEnsemble rays;
    rays.count = 1'000'000;
    rays.seed = 5;
    for (double v : {90.0, 180.0}) {
        const auto mc = classical_visibility(cfg, rays, v);
        const double q = sinusoidal_visibility(classical_moire(cfg, v));
        CHECK(std::abs(mc.visibility - q) < 3.0 * mc.visibility_error);
        CHECK(mc.histogram.size() == static_cast<std::size_t>(classical_histogram_bins));
        double mean = 0;
        for (double h : mc.histogram) {
            mean += h / classical_histogram_bins;
        }
        CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("Monte Carlo is reproducible")
{
    const auto cfg = fixtures::c70_tli(WallInteraction::vdw_r3);
    RayEnsemble rays;
    rays.count = 100'000;
    rays.seed = 42;
    const auto a = classical_visibility(cfg, rays, 120);
    const auto b = classical_visibility(cfg, rays, 120);
    CHECK(a.visibility == b.visibility);
    CHECK(a.visibility_error == b.visibility_error);
    CHECK(a.survivors == b.survivors);
    CHECK(a.histogram == b.histogram);
    rays.seed = 43;
    CHECK(classical_visibility(cfg, rays, 120).histogram != a.histogram);
}

TEST_CASE("degenerate ensembles are rejected")
{
    const auto cfg = fixtures::c70_tli();
    RayEnsemble rays;
    rays.divergence_window = 0.0;
    CHECK_THROWS_WITH_AS(classical_visibility(cfg, rays, 100), doctest::Contains("degenerate"), DomainError);
    rays.divergence_window = 1e-3; // window * L/v far below 10 d
    CHECK_THROWS_AS(classical_visibility(cfg, rays, 100), DomainError);
    rays.divergence_window.reset();
    rays.count = 500;
    CHECK_THROWS_AS(classical_visibility(cfg, rays, 100), ConvergenceError);
    auto td = fixtures::otima(1e5, 2.0, 0.0);
    CHECK_THROWS_AS(classical_moire(td, 100), DomainError);
}

TEST_CASE("constant force shifts the moire by the Stark displacement")
{
    auto cfg = fixtures::c70_tli();
    const double v = 100.0, d = cfg.period();
    const double free_time = cfg.separation / v;
    // Force from a field-squared gradient, alpha E^2/2 potential.
    const double alpha = constants::polarizability_from_volume(102e-30);
    const DeflectionField field{cfg.separation * cfg.separation, 2.0e13};
    const double force = 0.5 * alpha * field.grad_e_squared;
    const double a = force / cfg.species.mass;
    const double stark = stark_fringe_shift(field, alpha, cfg.species.mass, v);
    CHECK(stark == doctest::Approx(inertial_fringe_shift(a, free_time)).epsilon(1e-12));
    REQUIRE(stark > 0.05 * d);
    REQUIRE(stark < 0.45 * d);

    RayEnsemble rays;
    rays.count = 1'000'000;
    rays.seed = 9;
    const auto still = classical_visibility(cfg, rays, v);
    rays.transverse_acceleration = a;
    const auto pushed = classical_visibility(cfg, rays, v);
    const double phase = std::arg(pushed.signal.component(1) / still.signal.component(1));
    const double centroid = -phase / (2 * pi) * d;
    // Phase error from the bootstrap visibility error, relative to the amplitude.
    const double sigma = d / (2 * pi) * std::sqrt(2.0) * still.visibility_error / still.visibility;
    CHECK(std::abs(centroid - stark) < 3.0 * sigma + 1e-3 * d);
}

#pragma once

#include "nearfield/constants.hpp"
#include "nearfield/interferometer.hpp"

namespace fixtures {

using namespace nearfield;

inline Species c70()
{
    Species s;
    s.name = "C70";
    s.mass = 840.0 * constants::amu;
    s.alpha_stat_vol = 102e-30;
    s.c3_coefficient = 10e-3 * constants::elementary_charge * 1e-27;
    return s;
}

inline MaterialGrating gold(WallInteraction w = WallInteraction::none)
{
    return MaterialGrating{991e-9, 0.475, 500e-9, w, 1e-9};
}

/// Three-grating C70 interferometer, 22 cm spacing.
inline InterferometerConfig c70_tli(WallInteraction w = WallInteraction::none, double spread = 0.2)
{
    InterferometerConfig cfg;
    cfg.grating1 = gold(w);
    cfg.grating2 = gold(w);
    cfg.grating3 = gold(w);
    cfg.separation = 0.22;
    cfg.species = c70();
    cfg.beam = {100.0, spread, VelocityShape::gaussian};
    return cfg;
}

inline InterferometerConfig pfns8_kdtli(double power)
{
    Species s;
    s.name = "PFNS8";
    s.mass = 5672.0 * constants::amu;
    s.alpha_opt_vol = 2e-28;
    const MaterialGrating mask{266e-9, 90.0 / 266.0, 200e-9, WallInteraction::none, 1e-9};
    InterferometerConfig cfg;
    cfg.grating1 = mask;
    cfg.grating2 = LaserPhaseGrating{266e-9, power, 20e-6, 532e-9};
    cfg.grating3 = mask;
    cfg.separation = 0.105;
    cfg.species = s;
    cfg.beam = {75.0, 0.1, VelocityShape::gaussian};
    return cfg;
}

/// Time-domain ionizing-grating interferometer at T = T_T.
inline InterferometerConfig otima(double mass_amu, double n0, double phi0)
{
    Species s;
    s.name = "Au";
    s.mass = mass_amu * constants::amu;
    const IonizingGrating g{78.5e-9, n0, phi0};
    InterferometerConfig cfg;
    cfg.grating1 = g;
    cfg.grating2 = g;
    cfg.grating3 = g;
    cfg.mode = InterferometerMode::time_domain;
    cfg.species = s;
    cfg.beam = {100.0, 0.0, VelocityShape::gaussian};
    cfg.pulse_delay = talbot_time(s.mass, 78.5e-9);
    return cfg;
}

} // namespace fixtures

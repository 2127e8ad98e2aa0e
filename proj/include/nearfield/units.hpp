#pragma once

#include <string>
#include <string_view>

namespace nearfield {

enum class Dimension {
    dimensionless,
    length,
    time,
    velocity,
    acceleration,
    mass,
    power,
    temperature,
    pressure,
    rate,
    area,
    volume,
    dispersion, // energy x volume, wall constant C3
    dipole,
    field_gradient, // d(E^2)/dx
    angle,
};

std::string_view dimension_name(Dimension dim);

struct UnitValue
{
    double si_value;
    Dimension dimension;
};

/// Parses "991 nm", "10 meV*nm^3", "1e-7 mbar" into SI. A bare number is
/// dimensionless. Throws ConfigError on unknown units or malformed numbers.
UnitValue parse_quantity(std::string_view text);

} // namespace nearfield

#include "nearfield/units.hpp"

#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"

#include <charconv>
#include <map>

namespace nearfield {

std::string_view dimension_name(Dimension dim)
{
    switch (dim) {
    case Dimension::dimensionless: return "dimensionless";
    case Dimension::length: return "length";
    case Dimension::time: return "time";
    case Dimension::velocity: return "velocity";
    case Dimension::acceleration: return "acceleration";
    case Dimension::mass: return "mass";
    case Dimension::power: return "power";
    case Dimension::temperature: return "temperature";
    case Dimension::pressure: return "pressure";
    case Dimension::rate: return "rate";
    case Dimension::area: return "area";
    case Dimension::volume: return "volume";
    case Dimension::dispersion: return "energy*volume";
    case Dimension::dipole: return "dipole moment";
    case Dimension::field_gradient: return "field-squared gradient";
    case Dimension::angle: return "angle";
    }
    return "unknown";
}

namespace {

const std::map<std::string, UnitValue, std::less<>>& unit_table()
{
    using D = Dimension;
    static const std::map<std::string, UnitValue, std::less<>> table = {
        {"m", {1.0, D::length}},
        {"cm", {1e-2, D::length}},
        {"mm", {1e-3, D::length}},
        {"um", {1e-6, D::length}},
        {"\xce\xbcm", {1e-6, D::length}},
        {"nm", {1e-9, D::length}},
        {"pm", {1e-12, D::length}},
        {"s", {1.0, D::time}},
        {"ms", {1e-3, D::time}},
        {"us", {1e-6, D::time}},
        {"ns", {1e-9, D::time}},
        {"m/s", {1.0, D::velocity}},
        {"km/s", {1e3, D::velocity}},
        {"m/s^2", {1.0, D::acceleration}},
        {"kg", {1.0, D::mass}},
        {"amu", {constants::amu, D::mass}},
        {"u", {constants::amu, D::mass}},
        {"W", {1.0, D::power}},
        {"mW", {1e-3, D::power}},
        {"K", {1.0, D::temperature}},
        {"Pa", {1.0, D::pressure}},
        {"mbar", {100.0, D::pressure}},
        {"Hz", {1.0, D::rate}},
        {"1/s", {1.0, D::rate}},
        {"kHz", {1e3, D::rate}},
        {"m^2", {1.0, D::area}},
        {"nm^2", {1e-18, D::area}},
        {"m^3", {1.0, D::volume}},
        {"nm^3", {1e-27, D::volume}},
        {"A^3", {1e-30, D::volume}},
        {"J*m^3", {1.0, D::dispersion}},
        {"meV*nm^3", {1e-3 * constants::elementary_charge * 1e-27, D::dispersion}},
        {"C*m", {1.0, D::dipole}},
        {"D", {constants::debye, D::dipole}},
        {"V^2/m^3", {1.0, D::field_gradient}},
        {"rad", {1.0, D::angle}},
        {"mrad", {1e-3, D::angle}},
    };
    return table;
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

} // namespace

UnitValue parse_quantity(std::string_view text)
{
    text = trim(text);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end == text.data()) {
        throw ConfigError("not a number: '" + std::string(text) + "'");
    }
    std::string unit;
    for (char c : trim(std::string_view(end, static_cast<std::size_t>(text.data() + text.size() - end)))) {
        if (c != ' ' && c != '\t') {
            unit.push_back(c);
        }
    }
    if (unit.empty()) {
        return {value, Dimension::dimensionless};
    }
    const auto it = unit_table().find(unit);
    if (it == unit_table().end()) {
        throw ConfigError("unknown unit '" + unit + "'");
    }
    return {value * it->second.si_value, it->second.dimension};
}

} // namespace nearfield

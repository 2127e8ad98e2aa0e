#include "nearfield/constants.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/units.hpp"

#include <doctest.h>

using namespace nearfield;

TEST_CASE("quantities parse into SI")
{
    CHECK(parse_quantity("991 nm").si_value == doctest::Approx(991e-9));
    CHECK(parse_quantity("991 nm").dimension == Dimension::length);
    CHECK(parse_quantity("1e-7 mbar").si_value == doctest::Approx(1e-5));
    CHECK(parse_quantity("10 meV*nm^3").si_value == doctest::Approx(10e-3 * constants::elementary_charge * 1e-27));
    CHECK(parse_quantity("10 meV * nm^3").dimension == Dimension::dispersion);
    CHECK(parse_quantity("840 amu").si_value == doctest::Approx(840 * constants::amu));
    CHECK(parse_quantity("2.5 D").si_value == doctest::Approx(2.5 * constants::debye));
    CHECK(parse_quantity("20 \xce\xbcm").si_value == doctest::Approx(20e-6));
    CHECK(parse_quantity("102 A^3").si_value == doctest::Approx(102e-30));
    CHECK(parse_quantity("0.475").dimension == Dimension::dimensionless);
    CHECK(parse_quantity("  -3.5e2 m/s ").si_value == doctest::Approx(-350));
}

TEST_CASE("malformed quantities")
{
    CHECK_THROWS_AS(parse_quantity("abc nm"), ConfigError);
    CHECK_THROWS_AS(parse_quantity("1 furlong"), ConfigError);
    CHECK_THROWS_AS(parse_quantity(""), ConfigError);
    CHECK(dimension_name(Dimension::velocity) == "velocity");
}

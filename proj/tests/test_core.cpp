#include "qmhd/core.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace qmhd;

namespace {

PlasmaBackground unit_background() { return {1.0, 0.0, Vec3(1.0, 0.0, 0.0), 1.0, 1.0, 1.0}; }

ErrorCode code_of(const PlasmaBackground &bg)
{
    try {
        validate_background(bg);
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("expected validation failure");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("validate_background accepts an all-positive background unchanged")
{
    const auto bg = unit_background();
    const auto &checked = validate_background(bg);
    CHECK(&checked == &bg);
}

TEST_CASE("validate_background names the offending field")
{
    auto bg = unit_background();
    bg.rho0 = 0.0;
    CHECK(code_of(bg) == ErrorCode::NonPositiveDensity);

    bg = unit_background();
    bg.u0 = -1.0;
    CHECK(code_of(bg) == ErrorCode::NegativeSpeed);
    try {
        validate_background(bg);
    } catch (const Error &e) {
        CHECK(e.field() == "u0");
    }

    bg = unit_background();
    bg.H0.y() = std::numeric_limits<double>::quiet_NaN();
    CHECK(code_of(bg) == ErrorCode::NonFinite);
    try {
        validate_background(bg);
    } catch (const Error &e) {
        CHECK(e.field() == "H0y");
    }

    bg = unit_background();
    bg.mass = 0.0;
    CHECK(code_of(bg) == ErrorCode::NonPositiveParameter);

    bg = unit_background();
    bg.hbar = -0.1;
    CHECK(code_of(bg) == ErrorCode::NonPositiveParameter);
}

TEST_CASE("hbar = 0 is a valid classical background")
{
    auto bg = unit_background();
    bg.hbar = 0.0;
    CHECK_NOTHROW(validate_background(bg));
}

TEST_CASE("validate_dissipation rejects negative viscosities")
{
    CHECK_NOTHROW(validate_dissipation({0.0, 0.0}));
    CHECK_THROWS_AS(validate_dissipation({-1e-3, 0.0}), Error);
    CHECK_THROWS_AS(validate_dissipation({0.0, -1.0}), Error);
    CHECK_THROWS_AS(validate_dissipation({std::numeric_limits<double>::infinity(), 0.0}), Error);
}

#include "qmhd/core.hpp"

#include <cmath>

namespace qmhd {

const char *to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::NegativeSpeed: return "NegativeSpeed";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::ZeroWaveVector: return "ZeroWaveVector";
    case ErrorCode::NegativeDiscriminant: return "NegativeDiscriminant";
    case ErrorCode::DegenerateBranch: return "DegenerateBranch";
    case ErrorCode::VacuumRegion: return "VacuumRegion";
    case ErrorCode::NonPositiveAmplitude: return "NonPositiveAmplitude";
    case ErrorCode::UnstableStep: return "UnstableStep";
    case ErrorCode::FitFailed: return "FitFailed";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, std::string field, const std::string &what)
    : std::runtime_error(std::string(to_string(code)) + (field.empty() ? "" : " [" + field + "]") + ": " + what),
      code_(code), field_(std::move(field))
{
}

namespace {

void require_finite(Real value, const char *field)
{
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonFinite, field, "value is not finite");
    }
}

} // namespace

const PlasmaBackground &validate_background(const PlasmaBackground &bg)
{
    require_finite(bg.rho0, "rho0");
    require_finite(bg.p0, "p0");
    require_finite(bg.H0.x(), "H0x");
    require_finite(bg.H0.y(), "H0y");
    require_finite(bg.H0.z(), "H0z");
    require_finite(bg.u0, "u0");
    require_finite(bg.mass, "mass");
    require_finite(bg.hbar, "hbar");

    if (bg.rho0 <= 0.0) {
        throw Error(ErrorCode::NonPositiveDensity, "rho0", "mass density must be positive");
    }
    if (bg.mass <= 0.0) {
        throw Error(ErrorCode::NonPositiveParameter, "mass", "particle mass must be positive");
    }
    if (bg.u0 < 0.0) {
        throw Error(ErrorCode::NegativeSpeed, "u0", "sound speed must be non-negative");
    }
    if (bg.hbar < 0.0) {
        throw Error(ErrorCode::NonPositiveParameter, "hbar", "hbar must be non-negative");
    }
    if (bg.p0 < 0.0) {
        throw Error(ErrorCode::NonPositiveParameter, "p0", "pressure must be non-negative");
    }
    return bg;
}

const DissipationParams &validate_dissipation(const DissipationParams &diss)
{
    require_finite(diss.eta, "eta");
    require_finite(diss.xi, "xi");
    if (diss.eta < 0.0) {
        throw Error(ErrorCode::NonPositiveParameter, "eta", "shear viscosity must be non-negative");
    }
    if (diss.xi < 0.0) {
        throw Error(ErrorCode::NonPositiveParameter, "xi", "bulk viscosity must be non-negative");
    }
    return diss;
}

} // namespace qmhd

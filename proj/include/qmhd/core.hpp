#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qmhd {

using Real = double;
using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr Real kPi = std::numbers::pi;
inline constexpr Real kFourPi = 4.0 * std::numbers::pi;

enum class ErrorCode {
    NonPositiveDensity,
    NegativeSpeed,
    NonFinite,
    NonPositiveParameter,
    ZeroWaveVector,
    NegativeDiscriminant,
    DegenerateBranch,
    VacuumRegion,
    NonPositiveAmplitude,
    UnstableStep,
    FitFailed,
    InvalidGrid,
    InvalidArgument,
};

[[nodiscard]] const char *to_string(ErrorCode code) noexcept;

/// Every failure in the library is reported through this type. `field()` names
/// the offending input when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string field, const std::string &what);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] const std::string &field() const noexcept { return field_; }

private:
    ErrorCode code_;
    std::string field_;
};

/// Uniform equilibrium in Gaussian units. Mass density is used throughout
/// (rho = n m); hbar = 0 turns every quantum correction off.
struct PlasmaBackground {
    Real rho0 = 1.0;
    Real p0 = 0.0; // informational, the u0 closure carries the pressure response
    Vec3 H0 = Vec3::Zero();
    Real u0 = 0.0;
    Real mass = 1.0;
    Real hbar = 0.0;
};

struct WaveVector {
    Vec3 k = Vec3::Zero();

    [[nodiscard]] Real norm() const { return k.norm(); }
};

/// Plane-wave amplitudes (v, h, rho').
struct PerturbationAmplitudes {
    CVec3 v = CVec3::Zero();
    CVec3 h = CVec3::Zero();
    Complex rho_prime{0.0, 0.0};
};

struct DissipationParams {
    Real eta = 0.0; // shear viscosity
    Real xi = 0.0;  // bulk viscosity
};

/// Returns `bg` unchanged or throws `Error` naming the first bad field.
const PlasmaBackground &validate_background(const PlasmaBackground &bg);

const DissipationParams &validate_dissipation(const DissipationParams &diss);

} // namespace qmhd

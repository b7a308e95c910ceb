#pragma once

#include "qmhd/core.hpp"

#include <array>
#include <optional>

namespace qmhd {

enum class ModeBranch { Alfven, Fast, Slow };

[[nodiscard]] const char *to_string(ModeBranch branch) noexcept;

/// Index of each entry in the plane-wave state s = (v, h, rho').
enum class StateComponent : int { Vx = 0, Vy, Vz, Hx, Hy, Hz, Rho };

inline constexpr int kStateSize = 7;

using StateVector = Eigen::Matrix<Complex, kStateSize, 1>;
using SystemMatrix = Eigen::Matrix<Complex, kStateSize, kStateSize>;

[[nodiscard]] StateVector to_state(const PerturbationAmplitudes &amps);
[[nodiscard]] PerturbationAmplitudes from_state(const StateVector &state);

struct DispersionResult {
    Real u_alfven = 0.0;
    Real u_fast = 0.0;
    Real u_slow = 0.0;
    Real U0 = 0.0;
    Real omega_alfven = 0.0;
};

struct MagnetosonicSpeeds {
    Real fast = 0.0;
    Real slow = 0.0;
};

/// Frame in which k is along x and H0 lies in the x-y plane with H0y >= 0.
/// `rotation` maps lab components to canonical ones; its transpose maps back.
struct CanonicalFrame {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Real k = 0.0;
    Real H0x = 0.0;
    Real H0y = 0.0;

    [[nodiscard]] PerturbationAmplitudes to_lab(const PerturbationAmplitudes &canonical) const;
    [[nodiscard]] PerturbationAmplitudes to_canonical(const PerturbationAmplitudes &lab) const;
};

[[nodiscard]] CanonicalFrame canonical_frame(const PlasmaBackground &bg, const WaveVector &k);

/// |H0 . khat| / sqrt(4 pi rho0). The single-argument form takes khat = x.
[[nodiscard]] Real alfven_speed(const PlasmaBackground &bg);
[[nodiscard]] Real alfven_speed(const PlasmaBackground &bg, const WaveVector &k);

/// sqrt(u0^2 + hbar^2 |k|^2 / (4 m^2)).
[[nodiscard]] Real quantum_sound_speed(const PlasmaBackground &bg, const WaveVector &k);

/// Both roots of the quantum-corrected magnetosonic relation. The discriminant
/// is clamped to zero within `kDiscriminantTolerance` (relative) below zero.
[[nodiscard]] MagnetosonicSpeeds magnetosonic_speeds(const PlasmaBackground &bg, const WaveVector &k);

inline constexpr Real kDiscriminantTolerance = 1e-12;

/// (H0 . k) / sqrt(4 pi rho0); dispersionless and signed.
[[nodiscard]] Real alfven_frequency(const PlasmaBackground &bg, const WaveVector &k);

/// H0 / sqrt(4 pi rho0), independent of k.
[[nodiscard]] Vec3 alfven_group_velocity(const PlasmaBackground &bg);

[[nodiscard]] DispersionResult dispersion_relation(const PlasmaBackground &bg, const WaveVector &k);

[[nodiscard]] Real branch_speed(const PlasmaBackground &bg, const WaveVector &k, ModeBranch branch);

struct ModePolarization {
    ModeBranch branch = ModeBranch::Alfven;
    Real phase_speed = 0.0;
    Real omega = 0.0;                 // |k| * phase_speed, the positive root
    PerturbationAmplitudes canonical; // amplitudes in the canonical frame
    CanonicalFrame frame;

    [[nodiscard]] PerturbationAmplitudes lab() const { return frame.to_lab(canonical); }
};

/// Eigenvector of the ideal plane-wave system for `branch`, scaled so that
/// the canonical-frame entry `component` equals `normalization`. Without a
/// component the Alfven branch normalizes h_z and the magnetosonic branches
/// normalize v_x (h_y when v_x vanishes).
[[nodiscard]] ModePolarization polarization(const PlasmaBackground &bg, const WaveVector &k, ModeBranch branch,
                                            Complex normalization,
                                            std::optional<StateComponent> component = std::nullopt);

/// Matrix M with omega * s = M * s for s = (v, h, rho') ~ exp(i(k.r - omega t)).
/// Viscosity enters the velocity rows as -i(eta/rho0)k^2 I - i((xi + eta/3)/rho0) k k^T.
[[nodiscard]] SystemMatrix linearized_matrix(const PlasmaBackground &bg, const WaveVector &k,
                                             const DissipationParams &diss = {});

/// Eigenvalues of `linearized_matrix`, sorted by real part then imaginary part.
[[nodiscard]] std::array<Complex, kStateSize> matrix_spectrum(const PlasmaBackground &bg, const WaveVector &k,
                                                              const DissipationParams &diss = {});

/// {-k u_f, -k u_A, -k u_s, 0, k u_s, k u_A, k u_f} sorted ascending.
[[nodiscard]] std::array<Real, kStateSize> closed_form_spectrum(const PlasmaBackground &bg, const WaveVector &k);

/// max |omega s - M s| over the seven rows.
[[nodiscard]] Real plane_wave_residual(const PlasmaBackground &bg, const WaveVector &k, Complex omega,
                                       const PerturbationAmplitudes &amps, const DissipationParams &diss = {});

/// Quadratic wave energy rho0|v|^2/2 + |h|^2/(8 pi) + U0^2 |rho'|^2/(2 rho0) of one mode.
/// It is conserved by the ideal system and non-increasing with viscosity.
[[nodiscard]] Real mode_energy(const PlasmaBackground &bg, Real k_norm, const PerturbationAmplitudes &amps);

} // namespace qmhd

#pragma once

#include "qmhd/core.hpp"
#include "qmhd/spectral.hpp"

#include <optional>
#include <span>
#include <vector>

namespace qmhd {

/// Wavefunction samples on a periodic grid (power-of-two count, at least 8).
struct ComplexField1D {
    PeriodicGrid grid;
    std::vector<Complex> samples;

    [[nodiscard]] Real dx() const { return grid.dx(); }
    [[nodiscard]] Real length() const { return grid.length; }
    /// Integral of |psi|^2 by the rectangle rule (spectrally accurate for periodic fields).
    [[nodiscard]] Real norm() const;
};

void validate_field(const ComplexField1D &psi);

/// Fluid variables of the Madelung form psi = sqrt(n) exp(iS/hbar).
struct FluidFields1D {
    PeriodicGrid grid;
    std::vector<Real> n;
    std::vector<Real> S; // unwrapped along the grid, S[0] in (-pi hbar, pi hbar]
    std::vector<Real> v; // grad S / m
    long winding = 0;    // net 2 pi turns of the phase around the period
};

/// Zeros of psi make the phase and ln|psi|^2 undefined. Operations refuse
/// samples with |psi|^2 (or n) below `relative * max`.
inline constexpr Real kDefaultVacuumFloor = 1e-14;

/// V_q = -(hbar^2/2m) (d^2 sqrt(n)/dx^2) / sqrt(n), with a spectral Laplacian.
[[nodiscard]] std::vector<Real> bohm_potential(std::span<const Real> n, const PeriodicGrid &grid, Real mass,
                                               Real hbar, Real relative_floor = kDefaultVacuumFloor);

/// Sequential unwrap choosing the minimal increment between neighbours.
/// Returns the unwrapped phase and the winding number around the period.
[[nodiscard]] std::pair<std::vector<Real>, long> unwrap_phase(std::span<const Real> wrapped);

[[nodiscard]] FluidFields1D madelung_decompose(const ComplexField1D &psi, Real mass, Real hbar,
                                               Real relative_floor = kDefaultVacuumFloor);

[[nodiscard]] ComplexField1D madelung_recompose(const FluidFields1D &fluid, Real hbar);

struct HydroResiduals {
    Real hamilton_jacobi = 0.0;
    Real continuity = 0.0;
};

/// Max-norm residuals of
///   dS/dt + (dS/dx)^2/(2m) + V_q = 0   and   dn/dt + d(n v)/dx = 0
/// evaluated at the midpoint of two states a time `dt` apart.
[[nodiscard]] HydroResiduals hydrodynamic_residuals(const FluidFields1D &before, const FluidFields1D &after, Real dt,
                                                    Real mass, Real hbar);

/// Travelling Gaussian of the logarithmic Schrodinger equation,
///   psi = c e^{a/B} e^{-(B/4)(x - vt + d)^2} e^{i(kx - omega t)}.
struct SolitonParams {
    Real b = 0.0;
    Real mass = 1.0;
    Real hbar = 1.0;
    Real k = 0.0;
    Real omega = 0.0;
    Real c = 1.0;
    Real d = 0.0;
    Real A = 0.0;
    Real B = 0.0;
    Real a = 0.0;
    Real v = 0.0;
};

[[nodiscard]] SolitonParams soliton_params(Real b, Real mass, Real hbar, Real k, Real omega, Real c, Real d = 0.0);

/// Unit-norm soliton. The norm depends on omega only, so omega is solved for;
/// the default c makes A = 0 and the peak of G equal e^{1/2}.
[[nodiscard]] SolitonParams normalized_soliton(Real b, Real mass, Real hbar, Real k, Real d = 0.0,
                                               std::optional<Real> c = std::nullopt);

[[nodiscard]] Real soliton_profile(const SolitonParams &p, Real xi);
[[nodiscard]] Complex soliton_wavefunction(const SolitonParams &p, Real x, Real t);

/// Soliton sampled on a periodic grid; the envelope uses the minimal-image
/// distance so the translating packet wraps around the domain.
[[nodiscard]] ComplexField1D sample_soliton(const SolitonParams &p, const PeriodicGrid &grid, Real t);

/// max |G'' + A G + B ln(G) G| over the grid, G'' taken spectrally.
[[nodiscard]] Real soliton_ode_residual(const SolitonParams &p, const PeriodicGrid &grid);

struct LogNlsOptions {
    /// Samples with |psi|^2 below relative_floor * max|psi|^2 raise VacuumRegion.
    /// Zero accepts any finite field; ln|psi|^2 psi -> 0 as psi -> 0, so exact
    /// zeros are left untouched.
    Real relative_floor = 0.0;
    /// Allowed relative change of the norm per step before UnstableStep.
    Real norm_tolerance = 1e-10;
};

/// Strang-split propagator for
///   i hbar psi_t = -(hbar^2/2m) psi_xx - b ln(|psi|^2) psi.
/// Each factor is unitary: the log term is a pointwise phase rotation, the
/// kinetic term is diagonal in Fourier space.
class LogNlsPropagator {
public:
    LogNlsPropagator(const PeriodicGrid &grid, Real dt, Real b, Real mass, Real hbar, LogNlsOptions options = {});

    void step(ComplexField1D &psi);
    /// `steps` Strang steps with adjacent half nonlinear rotations fused.
    void evolve(ComplexField1D &psi, std::size_t steps);

    [[nodiscard]] Real dt() const { return dt_; }

private:
    void nonlinear(std::vector<Complex> &psi, Real tau) const;
    void kinetic(std::vector<Complex> &psi);
    void check_vacuum(const std::vector<Complex> &psi) const;
    void check_norm(Real before, Real after) const;

    PeriodicGrid grid_;
    Real dt_;
    Real b_;
    Real hbar_;
    LogNlsOptions options_;
    std::vector<Complex> kinetic_phase_;
    Fft fft_;
    std::vector<Complex> work_;
};

[[nodiscard]] ComplexField1D lognls_step(const ComplexField1D &psi, Real dt, Real b, Real mass, Real hbar,
                                         LogNlsOptions options = {});

struct SolitonTransit {
    ComplexField1D initial;
    ComplexField1D final;
    Real duration = 0.0;
    Real dt = 0.0;
    std::size_t steps = 0;
    std::vector<Real> final_density_shifted; // |psi(x, T)|^2 moved back by v T
    Real max_density_error = 0.0;            // against |psi(x, 0)|^2
    Real norm_drift = 0.0;                   // |N(T) - N(0)|
    Real drift_speed = 0.0;                  // from the first moment of the density
};

/// Evolves the sampled soliton for `transits` domain crossings (duration
/// transits * length / |v|) with steps no longer than `max_dt` (0 selects
/// lognls_max_dt). The first moment is the circular mean of the density,
/// recorded at `moment_samples` equally spaced times.
[[nodiscard]] SolitonTransit soliton_transit(const SolitonParams &p, const PeriodicGrid &grid, Real transits,
                                             Real max_dt = 0.0, std::size_t moment_samples = 64);

/// Stability bound on the step used by the defaults: 0.1 m dx^2 / hbar.
[[nodiscard]] Real lognls_max_dt(const PeriodicGrid &grid, Real mass, Real hbar);

/// Standard deviation of the limiting density delta_m, 1/sqrt(2 alpha m) with alpha = 2b/hbar^2.
[[nodiscard]] Real classical_limit_width(Real b, Real mass, Real hbar);

/// delta_m(xi) = sqrt(m alpha/pi) exp(-alpha m xi^2).
[[nodiscard]] Real delta_m(Real xi, Real b, Real mass, Real hbar);

} // namespace qmhd

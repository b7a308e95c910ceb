#pragma once

#include "qmhd/core.hpp"
#include "qmhd/dispersion.hpp"
#include "qmhd/spectral.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qmhd {

/// 1D periodic grid along x; k = (2 pi j / length, 0, 0). At least 16 points.
using SimGrid = PeriodicGrid;

void validate_sim_grid(const SimGrid &grid);

/// Spectral state of the linearized system. `modes[j]` holds
/// (v, h, rho') of FFT bin j.
struct PerturbationState {
    SimGrid grid;
    std::vector<StateVector> modes;
    Real time = 0.0;

    explicit PerturbationState(const SimGrid &g = {}) : grid(g), modes(g.n_points, StateVector::Zero()) {}

    [[nodiscard]] std::vector<Complex> spectral(StateComponent c) const;
    /// Inverse transform of one component to grid values.
    [[nodiscard]] std::vector<Complex> physical(StateComponent c) const;
    [[nodiscard]] Real norm() const;
    /// max_j |k_j . h_j|.
    [[nodiscard]] Real divergence_residual() const;
};

/// Sum over modes of the quadratic wave energy (see mode_energy).
[[nodiscard]] Real wave_energy(const PerturbationState &state, const PlasmaBackground &bg);

/// Fourier transform of the linearized equations, mode by mode:
///   dv/dt   = -i k U0^2(k) rho'/rho0 - i H0 x (k x h)/(4 pi rho0)
///             - (eta/rho0) k^2 v - ((xi + eta/3)/rho0) k (k.v)
///   dh/dt   = i k x (v x H0)
///   drho/dt = -i rho0 (k.v)
[[nodiscard]] PerturbationState rhs(const PerturbationState &state, const PlasmaBackground &bg,
                                    const DissipationParams &diss = {});

/// Removes the k-parallel part of h in every mode with k != 0.
void project_solenoidal(PerturbationState &state);

/// Classical RK4 step with h re-projected after every stage. Throws
/// UnstableStep if the state norm grows more than tenfold.
[[nodiscard]] PerturbationState step_rk4(const PerturbationState &state, const PlasmaBackground &bg,
                                         const DissipationParams &diss, Real dt);

/// Reusable RK4 integrator for one grid and background; holds the per-mode
/// coefficients and stage buffers so repeated steps do not allocate.
class LinearStepper {
public:
    LinearStepper(const SimGrid &grid, const PlasmaBackground &bg, const DissipationParams &diss = {});

    void derivative(const std::vector<StateVector> &state, std::vector<StateVector> &out) const;
    void step(PerturbationState &state, Real dt);

private:
    SimGrid grid_;
    PlasmaBackground bg_;
    Real shear_;
    Real compressive_;
    std::vector<Real> kx_;
    std::vector<Real> sound_sq_;
    std::vector<StateVector> k1_, k2_, k3_, k4_, stage_;
};

/// 0.2 / max |omega| over all resolvable modes of the grid.
[[nodiscard]] Real stable_dt(const SimGrid &grid, const PlasmaBackground &bg, const DissipationParams &diss = {});

/// Seeds bin `k_index` (1 <= k_index < n/2) with the branch polarization. With
/// `real_field` the mirrored bin gets the conjugate so grid values are real.
[[nodiscard]] PerturbationState init_plane_wave(const SimGrid &grid, const PlasmaBackground &bg, int k_index,
                                                ModeBranch branch, Complex amplitude, bool real_field = false);

struct ModeMeasurement {
    Real omega_measured = 0.0;
    Real decay_rate = 0.0;
    Real amplitude_fit_error = 0.0; // max |z - fit| / max |z|
};

struct FitOptions {
    Real min_periods = 8.0;
    Real min_samples_per_period = 16.0;
    Real max_fit_error = 1e-2;
};

/// Fits z(t) = A exp(-gamma t) exp(-i omega t) by linear regression on
/// ln|z| and the unwrapped phase.
[[nodiscard]] ModeMeasurement measure_mode(std::span<const Real> times, std::span<const Complex> samples,
                                           FitOptions options = {});

struct RunOptions {
    Real periods = 10.0;
    Real samples_per_period = 32.0;
    Complex amplitude{1e-3, 0.0};
    std::optional<Real> dt; // defaults to stable_dt, never larger
    FitOptions fit;
};

struct ModeRun {
    int k_index = 0;
    Real k = 0.0;
    ModeBranch branch = ModeBranch::Alfven;
    StateComponent tracked = StateComponent::Vx;
    Real dt = 0.0;
    std::size_t steps = 0;
    std::vector<Real> times;
    std::vector<StateVector> samples; // seeded bin at each sample time
    Real omega_analytic = 0.0;
    std::optional<ModeMeasurement> measurement; // empty when the run is all zeros
    Real max_divergence = 0.0;   // worst |k.h| relative to |h| over the run
    Real max_leakage = 0.0;      // worst unseeded-bin magnitude relative to the seed
    Real initial_energy = 0.0;
    Real final_energy = 0.0;
    bool energy_monotone = true; // energy never increased between samples beyond roundoff
};

/// Seeds one plane wave, integrates with RK4 and fits the tracked component.
[[nodiscard]] ModeRun run_mode(const SimGrid &grid, const PlasmaBackground &bg, const DissipationParams &diss,
                               int k_index, ModeBranch branch, const RunOptions &options = {});

struct ScanRow {
    int k_index = 0;
    Real k = 0.0;
    Real omega_measured = 0.0;
    Real gamma_measured = 0.0;
    Real omega_analytic = 0.0;
    Real fit_error = 0.0;
    std::optional<std::string> error;
};

/// Independent runs over `k_indices`, executed concurrently and returned in input order.
/// A failing mode is reported in its row and does not abort the scan.
[[nodiscard]] std::vector<ScanRow> dispersion_scan(const SimGrid &grid, const PlasmaBackground &bg,
                                                   const DissipationParams &diss, ModeBranch branch,
                                                   std::span<const int> k_indices, const RunOptions &options = {});

} // namespace qmhd

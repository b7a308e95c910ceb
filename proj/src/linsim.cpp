#include "qmhd/linsim.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace qmhd {

void validate_sim_grid(const SimGrid &grid) { validate_grid(grid, 16); }

std::vector<Complex> PerturbationState::spectral(StateComponent c) const
{
    std::vector<Complex> out(modes.size());
    for (std::size_t j = 0; j < modes.size(); ++j) {
        out[j] = modes[j](static_cast<int>(c));
    }
    return out;
}

std::vector<Complex> PerturbationState::physical(StateComponent c) const
{
    Fft fft;
    return fft.inverse(spectral(c));
}

Real PerturbationState::norm() const
{
    Real sum = 0.0;
    for (const auto &m : modes) {
        sum += m.squaredNorm();
    }
    return std::sqrt(sum);
}

Real PerturbationState::divergence_residual() const
{
    Real worst = 0.0;
    for (std::size_t j = 0; j < modes.size(); ++j) {
        worst = std::max(worst, std::abs(grid.wavenumber(j) * modes[j](3)));
    }
    return worst;
}

Real wave_energy(const PerturbationState &state, const PlasmaBackground &bg)
{
    Real sum = 0.0;
    for (std::size_t j = 0; j < state.modes.size(); ++j) {
        sum += mode_energy(bg, state.grid.wavenumber(j), from_state(state.modes[j]));
    }
    return sum;
}

PerturbationState rhs(const PerturbationState &state, const PlasmaBackground &bg, const DissipationParams &diss)
{
    const LinearStepper stepper(state.grid, bg, diss);
    PerturbationState out(state.grid);
    out.time = state.time;
    stepper.derivative(state.modes, out.modes);
    return out;
}

void project_solenoidal(PerturbationState &state)
{
    // k is along x, so the parallel part of h is h_x.
    for (std::size_t j = 0; j < state.modes.size(); ++j) {
        if (state.grid.wavenumber(j) != 0.0) {
            state.modes[j](3) = 0.0;
        }
    }
}

LinearStepper::LinearStepper(const SimGrid &grid, const PlasmaBackground &bg, const DissipationParams &diss)
    : grid_(grid), bg_(bg), shear_(diss.eta / bg.rho0), compressive_((diss.xi + diss.eta / 3.0) / bg.rho0)
{
    kx_ = grid.wavenumbers();
    sound_sq_.resize(kx_.size());
    for (std::size_t j = 0; j < kx_.size(); ++j) {
        sound_sq_[j] = bg.u0 * bg.u0 + bg.hbar * bg.hbar / (4.0 * bg.mass * bg.mass) * kx_[j] * kx_[j];
    }
    for (auto *buffer : {&k1_, &k2_, &k3_, &k4_, &stage_}) {
        buffer->assign(kx_.size(), StateVector::Zero());
    }
}

namespace {

// Multiplication by -i and +i without a general complex product.
inline Complex times_minus_i(Complex z) { return {z.imag(), -z.real()}; }
inline Complex times_i(Complex z) { return {-z.imag(), z.real()}; }

} // namespace

void LinearStepper::derivative(const std::vector<StateVector> &state, std::vector<StateVector> &out) const
{
    const Real Hx = bg_.H0.x();
    const Real Hy = bg_.H0.y();
    const Real Hz = bg_.H0.z();
    const Real rho0 = bg_.rho0;
    const Real magnetic = 1.0 / (kFourPi * rho0);

    out.resize(state.size());
    for (std::size_t j = 0; j < state.size(); ++j) {
        const Real kx = kx_[j];
        StateVector &d = out[j];
        if (kx == 0.0) {
            d.setZero();
            continue;
        }
        const StateVector &s = state[j];
        const Complex vx = s(0), vy = s(1), vz = s(2);
        const Complex hy = s(4), hz = s(5);
        const Complex rho = s(6);
        const Real k2 = kx * kx;

        // H0 x (k x h) with k x h = (0, -kx hz, kx hy)
        const Complex a = -kx * hz;
        const Complex b = kx * hy;
        const Complex lorentz_x = Hy * b - Hz * a;
        const Complex lorentz_y = -Hx * b;
        const Complex lorentz_z = Hx * a;

        // k x (v x H0) = (0, -kx c_z, kx c_y)
        const Complex cy = vz * Hx - vx * Hz;
        const Complex cz = vx * Hy - vy * Hx;

        const Complex k_dot_v = kx * vx;
        d(0) = times_minus_i(kx * sound_sq_[j] / rho0 * rho + magnetic * lorentz_x) - shear_ * k2 * vx
               - compressive_ * kx * k_dot_v;
        d(1) = times_minus_i(magnetic * lorentz_y) - shear_ * k2 * vy;
        d(2) = times_minus_i(magnetic * lorentz_z) - shear_ * k2 * vz;
        d(3) = 0.0;
        d(4) = times_i(-kx * cz);
        d(5) = times_i(kx * cy);
        d(6) = times_minus_i(rho0 * k_dot_v);
    }
}

void LinearStepper::step(PerturbationState &state, Real dt)
{
    auto &s = state.modes;
    const std::size_t n = s.size();
    auto stage = [&](const std::vector<StateVector> &slope, Real factor) {
        for (std::size_t j = 0; j < n; ++j) {
            stage_[j] = s[j] + factor * slope[j];
            if (kx_[j] != 0.0) {
                stage_[j](3) = 0.0;
            }
        }
    };

    Real before = 0.0;
    for (const auto &m : s) {
        before += m.squaredNorm();
    }
    derivative(s, k1_);
    stage(k1_, 0.5 * dt);
    derivative(stage_, k2_);
    stage(k2_, 0.5 * dt);
    derivative(stage_, k3_);
    stage(k3_, dt);
    derivative(stage_, k4_);
    Real after = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        s[j] += (dt / 6.0) * (k1_[j] + 2.0 * k2_[j] + 2.0 * k3_[j] + k4_[j]);
        if (kx_[j] != 0.0) {
            s[j](3) = 0.0;
        }
        after += s[j].squaredNorm();
    }
    state.time += dt;

    // Squared norms: tenfold growth of the norm is a hundredfold here.
    if (!std::isfinite(after) || (before > 0.0 && after > 100.0 * before)) {
        throw Error(ErrorCode::UnstableStep, "dt", "state norm grew more than tenfold in one RK4 step");
    }
}

PerturbationState step_rk4(const PerturbationState &state, const PlasmaBackground &bg,
                           const DissipationParams &diss, Real dt)
{
    PerturbationState next = state;
    LinearStepper stepper(state.grid, bg, diss);
    stepper.step(next, dt);
    return next;
}

Real stable_dt(const SimGrid &grid, const PlasmaBackground &bg, const DissipationParams &diss)
{
    validate_sim_grid(grid);
    Real omega_max = 0.0;
    for (std::size_t j = 1; j <= grid.n_points / 2; ++j) {
        const WaveVector k{Vec3(static_cast<Real>(j) * grid.dk(), 0.0, 0.0)};
        Eigen::ComplexEigenSolver<SystemMatrix> solver(linearized_matrix(bg, k, diss), false);
        omega_max = std::max(omega_max, solver.eigenvalues().cwiseAbs().maxCoeff());
    }
    if (omega_max == 0.0) {
        return std::numeric_limits<Real>::infinity();
    }
    return 0.2 / omega_max;
}

PerturbationState init_plane_wave(const SimGrid &grid, const PlasmaBackground &bg, int k_index, ModeBranch branch,
                                  Complex amplitude, bool real_field)
{
    validate_sim_grid(grid);
    validate_background(bg);
    const auto half = static_cast<int>(grid.n_points / 2);
    if (k_index < 1 || k_index >= half) {
        throw Error(ErrorCode::InvalidArgument, "k_index", "mode index must lie in [1, n/2)");
    }
    const WaveVector k{Vec3(k_index * grid.dk(), 0.0, 0.0)};
    const auto pol = polarization(bg, k, branch, amplitude);

    PerturbationState state(grid);
    const StateVector seed = to_state(pol.lab());
    state.modes[static_cast<std::size_t>(k_index)] = seed;
    if (real_field) {
        state.modes[grid.n_points - static_cast<std::size_t>(k_index)] = seed.conjugate();
    }
    return state;
}

namespace {

struct LineFit {
    Real intercept = 0.0;
    Real slope = 0.0;
};

LineFit fit_line(std::span<const Real> t, std::span<const Real> y)
{
    const auto n = static_cast<Real>(t.size());
    Real tm = 0.0;
    Real ym = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        tm += t[i];
        ym += y[i];
    }
    tm /= n;
    ym /= n;
    Real stt = 0.0;
    Real sty = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        sty += (t[i] - tm) * (y[i] - ym);
    }
    const Real slope = sty / stt;
    return {ym - slope * tm, slope};
}

} // namespace

ModeMeasurement measure_mode(std::span<const Real> times, std::span<const Complex> samples, FitOptions options)
{
    if (times.size() != samples.size() || times.size() < 3) {
        throw Error(ErrorCode::FitFailed, "samples", "need at least three samples with matching times");
    }
    Real peak = 0.0;
    for (const Complex &z : samples) {
        peak = std::max(peak, std::abs(z));
    }
    if (!(peak > 0.0) || !std::isfinite(peak)) {
        throw Error(ErrorCode::FitFailed, "samples", "series is identically zero or not finite");
    }

    std::vector<Real> log_amp(samples.size());
    std::vector<Real> phase(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (std::abs(samples[i]) == 0.0) {
            throw Error(ErrorCode::FitFailed, "samples", "series passes through zero");
        }
        log_amp[i] = std::log(std::abs(samples[i]));
        const Real wrapped = std::arg(samples[i]);
        if (i == 0) {
            phase[i] = wrapped;
        } else {
            Real step = wrapped - std::arg(samples[i - 1]);
            step -= 2.0 * kPi * std::round(step / (2.0 * kPi));
            phase[i] = phase[i - 1] + step;
        }
    }

    const LineFit amp = fit_line(times, log_amp);
    const LineFit ph = fit_line(times, phase);

    ModeMeasurement m;
    m.omega_measured = -ph.slope;
    m.decay_rate = -amp.slope;

    Real worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Complex model = std::exp(Complex(amp.intercept + amp.slope * times[i], ph.intercept + ph.slope * times[i]));
        worst = std::max(worst, std::abs(samples[i] - model));
    }
    m.amplitude_fit_error = worst / peak;

    const Real span = times.back() - times.front();
    const Real periods = span * std::abs(m.omega_measured) / (2.0 * kPi);
    const Real per_period = (static_cast<Real>(times.size()) - 1.0) / std::max(periods, 1e-300);
    const Real slack = 1.0 - 1e-9;
    if (periods < options.min_periods * slack) {
        throw Error(ErrorCode::FitFailed, "samples",
                    "series covers " + std::to_string(periods) + " periods, fewer than required");
    }
    if (per_period < options.min_samples_per_period * slack) {
        throw Error(ErrorCode::FitFailed, "samples", "series is sampled too coarsely per period");
    }
    if (!(m.amplitude_fit_error <= options.max_fit_error)) {
        throw Error(ErrorCode::FitFailed, "samples",
                    "exponential fit residual " + std::to_string(m.amplitude_fit_error) + " exceeds threshold");
    }
    return m;
}

ModeRun run_mode(const SimGrid &grid, const PlasmaBackground &bg, const DissipationParams &diss, int k_index,
                 ModeBranch branch, const RunOptions &options)
{
    validate_sim_grid(grid);
    validate_background(bg);
    validate_dissipation(diss);

    ModeRun run;
    run.k_index = k_index;
    run.k = k_index * grid.dk();
    run.branch = branch;

    PerturbationState state = init_plane_wave(grid, bg, k_index, branch, options.amplitude);
    const WaveVector kvec{Vec3(run.k, 0.0, 0.0)};
    run.omega_analytic = run.k * branch_speed(bg, kvec, branch);

    // Track the largest entry of the unit-normalized polarization.
    const StateVector unit = to_state(polarization(bg, kvec, branch, 1.0).lab());
    int tracked = 0;
    unit.cwiseAbs().maxCoeff(&tracked);
    run.tracked = static_cast<StateComponent>(tracked);

    const Real period = 2.0 * kPi / run.omega_analytic;
    const Real sample_interval = period / options.samples_per_period;
    Real dt_max = stable_dt(grid, bg, diss);
    if (options.dt) {
        dt_max = std::min(dt_max, *options.dt);
    }
    const auto steps_per_sample = static_cast<std::size_t>(std::ceil(sample_interval / dt_max - 1e-12));
    run.dt = sample_interval / static_cast<Real>(steps_per_sample);
    const auto n_samples = static_cast<std::size_t>(std::ceil(options.periods * options.samples_per_period - 1e-9)) + 1;

    const auto seed_bin = static_cast<std::size_t>(k_index);
    const Real seed_norm = state.modes[seed_bin].norm();
    run.initial_energy = wave_energy(state, bg);
    Real previous_energy = run.initial_energy;

    auto record = [&](const PerturbationState &s) {
        run.times.push_back(s.time);
        run.samples.push_back(s.modes[seed_bin]);
        const Real hnorm = s.modes[seed_bin].segment<3>(3).norm();
        if (hnorm > 0.0) {
            run.max_divergence = std::max(run.max_divergence, s.divergence_residual() / hnorm);
        }
        if (seed_norm > 0.0) {
            for (std::size_t j = 0; j < s.modes.size(); ++j) {
                if (j != seed_bin) {
                    run.max_leakage = std::max(run.max_leakage, s.modes[j].norm() / seed_norm);
                }
            }
        }
        const Real energy = wave_energy(s, bg);
        if (energy > previous_energy * (1.0 + 1e-12) + 1e-300) {
            run.energy_monotone = false;
        }
        previous_energy = energy;
    };

    LinearStepper stepper(grid, bg, diss);
    record(state);
    for (std::size_t i = 1; i < n_samples; ++i) {
        for (std::size_t s = 0; s < steps_per_sample; ++s) {
            stepper.step(state, run.dt);
            ++run.steps;
        }
        // Sample times are exact multiples of the interval.
        state.time = static_cast<Real>(i) * sample_interval;
        record(state);
    }
    run.final_energy = wave_energy(state, bg);

    if (seed_norm > 0.0) {
        std::vector<Complex> series(run.samples.size());
        for (std::size_t i = 0; i < series.size(); ++i) {
            series[i] = run.samples[i](tracked);
        }
        run.measurement = measure_mode(run.times, series, options.fit);
    }
    return run;
}

std::vector<ScanRow> dispersion_scan(const SimGrid &grid, const PlasmaBackground &bg, const DissipationParams &diss,
                                     ModeBranch branch, std::span<const int> k_indices, const RunOptions &options)
{
    std::vector<std::future<ScanRow>> jobs;
    jobs.reserve(k_indices.size());
    for (const int index : k_indices) {
        jobs.push_back(std::async(std::launch::async, [=, &grid, &bg, &diss, &options] {
            ScanRow row;
            row.k_index = index;
            row.k = index * grid.dk();
            try {
                row.omega_analytic = row.k * branch_speed(bg, WaveVector{Vec3(row.k, 0.0, 0.0)}, branch);
                const auto run = run_mode(grid, bg, diss, index, branch, options);
                if (run.measurement) {
                    row.omega_measured = run.measurement->omega_measured;
                    row.gamma_measured = run.measurement->decay_rate;
                    row.fit_error = run.measurement->amplitude_fit_error;
                }
            } catch (const std::exception &e) {
                row.error = e.what();
            }
            return row;
        }));
    }
    std::vector<ScanRow> rows;
    rows.reserve(jobs.size());
    for (auto &job : jobs) {
        rows.push_back(job.get());
    }
    return rows;
}

} // namespace qmhd

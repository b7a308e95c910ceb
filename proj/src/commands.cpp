#include "qmhd/commands.hpp"

#include "qmhd/dispersion.hpp"
#include "qmhd/linsim.hpp"
#include "qmhd/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace qmhd {

std::string format_real(Real value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", value);
    return buf;
}

Real Sampler::uniform(Real lo, Real hi)
{
    const Real unit = static_cast<Real>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

Vec3 Sampler::unit_vector()
{
    for (;;) {
        const Vec3 v(uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0));
        const Real n = v.norm();
        if (n > 0.1 && n <= 1.0) {
            return v / n;
        }
    }
}

PlasmaBackground Sampler::background()
{
    PlasmaBackground bg;
    bg.rho0 = uniform(0.1, 10.0);
    bg.H0 = Vec3(uniform(-3.0, 3.0), uniform(-3.0, 3.0), uniform(-3.0, 3.0));
    bg.u0 = uniform(0.0, 3.0);
    bg.mass = uniform(0.5, 5.0);
    bg.hbar = uniform(0.0, 2.0);
    return bg;
}

WaveVector Sampler::wave_vector() { return WaveVector{uniform(0.1, 5.0) * unit_vector()}; }

namespace {

std::string csv_row(std::initializer_list<Real> values)
{
    std::string line;
    bool first = true;
    for (const Real v : values) {
        if (!first) {
            line += ',';
        }
        line += format_real(v);
        first = false;
    }
    return line + '\n';
}

SimGrid sim_grid(const RunConfig &config) { return centered_grid(config.grid.n_points, config.grid.length); }

SolitonParams config_soliton(const RunConfig &config, const PeriodicGrid &grid)
{
    const auto &s = config.soliton;
    return normalized_soliton(s.b, s.mass, s.hbar, s.k_index * grid.dk(), s.d);
}

} // namespace

std::string cmd_dispersion(const RunConfig &config)
{
    validate_config(config);
    const auto &scan = config.scan;
    std::string out = "k,u_alfven,U0,u_fast,u_slow,omega_alfven\n";
    for (std::size_t i = 0; i < scan.k_count; ++i) {
        const Real k = scan.k_count == 1 ? scan.k_min
                                          : scan.k_min + (scan.k_max - scan.k_min) * static_cast<Real>(i)
                                                             / static_cast<Real>(scan.k_count - 1);
        const auto d = dispersion_relation(config.background, WaveVector{Vec3(k, 0.0, 0.0)});
        out += csv_row({k, d.u_alfven, d.U0, d.u_fast, d.u_slow, d.omega_alfven});
    }
    return out;
}

std::string cmd_simulate(const RunConfig &config)
{
    validate_config(config);
    const auto &scan = config.scan;
    RunOptions options;
    options.periods = scan.periods;
    options.samples_per_period = scan.samples_per_period;
    options.amplitude = Complex(scan.amplitude, 0.0);

    const auto run = run_mode(sim_grid(config), config.background, config.dissipation, scan.k_index, scan.branch,
                              options);

    std::string out = "t,re_vx,im_vx,re_vy,im_vy,re_vz,im_vz,re_hx,im_hx,re_hy,im_hy,re_hz,im_hz,re_rho,im_rho\n";
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        const auto &s = run.samples[i];
        out += csv_row({run.times[i], s(0).real(), s(0).imag(), s(1).real(), s(1).imag(), s(2).real(), s(2).imag(),
                        s(3).real(), s(3).imag(), s(4).real(), s(4).imag(), s(5).real(), s(5).imag(), s(6).real(),
                        s(6).imag()});
    }

    out += "\nomega_measured,gamma_measured,omega_analytic,relative_error,fit_error,energy_ratio,status\n";
    const Real nan = std::numeric_limits<Real>::quiet_NaN();
    const Real energy_ratio = run.initial_energy > 0.0 ? run.final_energy / run.initial_energy : nan;
    if (run.measurement) {
        const auto &m = *run.measurement;
        const Real rel = std::abs(m.omega_measured - run.omega_analytic) / run.omega_analytic;
        std::string row = csv_row({m.omega_measured, m.decay_rate, run.omega_analytic, rel, m.amplitude_fit_error,
                                   energy_ratio});
        row.pop_back();
        out += row + ",ok\n";
    } else {
        std::string row = csv_row({nan, nan, run.omega_analytic, nan, nan, energy_ratio});
        row.pop_back();
        out += row + ",skipped\n";
    }
    return out;
}

std::string cmd_soliton(const RunConfig &config)
{
    validate_config(config);
    const auto &s = config.soliton;
    const auto grid = centered_grid(s.n_points, s.length);
    const auto params = config_soliton(config, grid);
    const auto transit = soliton_transit(params, grid, s.transits, s.dt);

    std::string out = "x,G,density_initial,density_final_shifted,error\n";
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const Real x = grid.x(i);
        const Real initial = std::norm(transit.initial.samples[i]);
        const Real shifted = transit.final_density_shifted[i];
        out += csv_row({x, soliton_profile(params, x), initial, shifted, shifted - initial});
    }
    out += "\nnorm_initial,norm_drift,max_error,drift_speed,v_expected,width,ode_residual,dt,steps\n";
    out += csv_row({transit.initial.norm(), transit.norm_drift, transit.max_density_error, transit.drift_speed,
                    params.v, classical_limit_width(s.b, s.mass, s.hbar), soliton_ode_residual(params, grid),
                    transit.dt, static_cast<Real>(transit.steps)});
    return out;
}

bool ValidateReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult &c) { return c.passed; });
}

namespace {

Real max_entry(const SystemMatrix &m) { return m.cwiseAbs().maxCoeff(); }

Real eigen_oracle_check(Sampler &rng, bool inject_fault)
{
    Real worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto bg = rng.background();
        const auto k = rng.wave_vector();
        const auto numeric = matrix_spectrum(bg, k);
        auto reference_bg = bg;
        if (inject_fault) {
            reference_bg.rho0 *= 1.0 + 1e-6;
        }
        const auto closed = closed_form_spectrum(reference_bg, k);
        const Real scale = std::max(std::abs(closed.front()), std::abs(closed.back()));
        for (int i = 0; i < kStateSize; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            worst = std::max(worst, std::abs(numeric[idx] - closed[idx]) / scale);
        }
    }
    return worst;
}

Real polarization_check(Sampler &rng)
{
    Real worst = 0.0;
    for (const auto branch : {ModeBranch::Alfven, ModeBranch::Fast, ModeBranch::Slow}) {
        int done = 0;
        while (done < 50) {
            const auto bg = rng.background();
            const auto k = rng.wave_vector();
            ModePolarization pol;
            try {
                pol = polarization(bg, k, branch, Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)));
            } catch (const Error &e) {
                if (e.code() == ErrorCode::DegenerateBranch) {
                    continue;
                }
                throw;
            }
            const auto lab = pol.lab();
            const Real r = plane_wave_residual(bg, k, pol.omega, lab);
            worst = std::max(worst, r / (max_entry(linearized_matrix(bg, k)) * to_state(lab).cwiseAbs().maxCoeff()));
            ++done;
        }
    }
    return worst;
}

Real hbar_invariance_check(Sampler &rng)
{
    Real mismatches = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        auto bg = rng.background();
        const auto k = rng.wave_vector();
        bg.hbar = 0.0;
        const Real ua0 = alfven_speed(bg, k);
        const Real w0 = alfven_frequency(bg, k);
        bg.hbar = 1.0;
        if (alfven_speed(bg, k) != ua0 || alfven_frequency(bg, k) != w0) {
            mismatches += 1.0;
        }
    }
    return mismatches;
}

Real group_velocity_check(Sampler &rng)
{
    Real worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto bg = rng.background();
        const auto k = rng.wave_vector();
        const Vec3 analytic = alfven_group_velocity(bg);
        const Real h = 1e-4 * k.norm();
        for (int i = 0; i < 3; ++i) {
            WaveVector plus = k;
            WaveVector minus = k;
            plus.k(i) += h;
            minus.k(i) -= h;
            const Real fd = (alfven_frequency(bg, plus) - alfven_frequency(bg, minus)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - analytic(i)) / std::max(1.0, analytic.norm()));
        }
    }
    return worst;
}

Real passivity_check(Sampler &rng)
{
    Real worst = -std::numeric_limits<Real>::infinity();
    for (int trial = 0; trial < 50; ++trial) {
        const auto bg = rng.background();
        const auto k = rng.wave_vector();
        const DissipationParams diss{rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
        const auto spectrum = matrix_spectrum(bg, k, diss);
        Real scale = 0.0;
        for (const auto &w : spectrum) {
            scale = std::max(scale, std::abs(w));
        }
        for (const auto &w : spectrum) {
            worst = std::max(worst, w.imag() / scale);
        }
    }
    return worst;
}

Real rhs_matrix_check(Sampler &rng)
{
    Real worst = 0.0;
    const auto grid = centered_grid(16, 2.0 * kPi);
    for (int trial = 0; trial < 20; ++trial) {
        const auto bg = rng.background();
        const DissipationParams diss{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
        PerturbationState state(grid);
        for (auto &mode : state.modes) {
            for (int c = 0; c < kStateSize; ++c) {
                mode(c) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            }
        }
        const auto d = rhs(state, bg, diss);
        for (std::size_t j = 0; j < grid.n_points; ++j) {
            const Real kx = grid.wavenumber(j);
            if (kx == 0.0) {
                continue;
            }
            const SystemMatrix m = linearized_matrix(bg, WaveVector{Vec3(kx, 0.0, 0.0)}, diss);
            const StateVector expected = Complex(0.0, -1.0) * (m * state.modes[j]);
            const Real err = (d.modes[j] - expected).cwiseAbs().maxCoeff();
            worst = std::max(worst, err / (max_entry(m) * state.modes[j].cwiseAbs().maxCoeff()));
        }
    }
    return worst;
}

Real soliton_ode_check()
{
    const RunConfig defaults;
    const auto &s = defaults.soliton;
    const auto grid = centered_grid(s.n_points, s.length);
    return soliton_ode_residual(normalized_soliton(s.b, s.mass, s.hbar, s.k_index * grid.dk()), grid);
}

Real madelung_round_trip_check()
{
    const auto grid = centered_grid(128, 2.0 * kPi);
    ComplexField1D psi{grid, std::vector<Complex>(grid.n_points)};
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const Real x = grid.x(i);
        psi.samples[i] = (1.2 + 0.5 * std::cos(x) + 0.3 * std::sin(2.0 * x)) * std::polar(1.0, 3.0 * x + 0.4 * std::sin(x));
    }
    const auto back = madelung_recompose(madelung_decompose(psi, 1.0, 1.0), 1.0);
    Complex overlap{0.0, 0.0};
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        overlap += std::conj(back.samples[i]) * psi.samples[i];
    }
    const Complex phase = std::polar(1.0, std::arg(overlap));
    Real worst = 0.0;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        worst = std::max(worst, std::abs(psi.samples[i] - back.samples[i] * phase));
    }
    return worst;
}

Real delta_normalization_check()
{
    Real worst = 0.0;
    for (const Real mass : {1.0, 2.0, 4.0, 8.0}) {
        const Real sigma = classical_limit_width(0.25, mass, 1.0);
        const auto grid = centered_grid(1024, 40.0 * sigma);
        Real integral = 0.0;
        for (std::size_t i = 0; i < grid.n_points; ++i) {
            integral += delta_m(grid.x(i), 0.25, mass, 1.0);
        }
        worst = std::max(worst, std::abs(integral * grid.dx() - 1.0));
    }
    return worst;
}

} // namespace

ValidateReport cmd_validate(std::uint64_t seed, ValidateOptions options)
{
    Sampler rng(seed);
    ValidateReport report;

    auto run = [&](const char *name, Real tolerance, const std::function<Real()> &check) {
        CheckResult result{name, std::numeric_limits<Real>::quiet_NaN(), tolerance, false};
        try {
            result.measured = check();
            result.passed = result.measured <= tolerance;
        } catch (const std::exception &) {
            result.passed = false;
        }
        report.checks.push_back(result);
    };

    run("eigen_oracle_equivalence", 1e-10, [&] { return eigen_oracle_check(rng, options.inject_fault); });
    run("polarization_residual", 1e-12, [&] { return polarization_check(rng); });
    run("alfven_hbar_invariance", 0.0, [&] { return hbar_invariance_check(rng); });
    run("alfven_group_velocity", 1e-8, [&] { return group_velocity_check(rng); });
    run("dissipation_passivity", 1e-12, [&] { return passivity_check(rng); });
    run("rhs_matrix_equivalence", 1e-13, [&] { return rhs_matrix_check(rng); });
    run("soliton_ode_residual", 1e-8, [] { return soliton_ode_check(); });
    run("madelung_round_trip", 1e-12, [] { return madelung_round_trip_check(); });
    run("delta_normalization", 1e-10, [] { return delta_normalization_check(); });

    std::size_t passed = 0;
    char line[256];
    for (const auto &c : report.checks) {
        std::snprintf(line, sizeof line, "%s %-26s measured=%.6e tol=%.1e\n", c.passed ? "PASS" : "FAIL",
                      c.name.c_str(), c.measured, c.tolerance);
        report.text += line;
        passed += c.passed ? 1 : 0;
    }
    std::snprintf(line, sizeof line, "%s %zu/%zu checks passed (seed %llu)\n", passed == report.checks.size() ? "OK" : "FAILED",
                  passed, report.checks.size(), static_cast<unsigned long long>(seed));
    report.text += line;
    return report;
}

} // namespace qmhd

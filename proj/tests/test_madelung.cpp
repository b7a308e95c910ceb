#include "qmhd/madelung.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace qmhd;

namespace {

Real max_abs_diff(std::span<const Real> a, std::span<const Real> b)
{
    Real m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

ComplexField1D make_field(const PeriodicGrid &grid, auto &&f)
{
    ComplexField1D psi{grid, std::vector<Complex>(grid.n_points)};
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        psi.samples[i] = f(grid.x(i));
    }
    return psi;
}

// Exact free evolution: multiply each Fourier mode by exp(-i hbar k^2 t / 2m).
ComplexField1D free_evolve(const ComplexField1D &psi, Real t, Real mass, Real hbar)
{
    Fft fft;
    auto spec = fft.forward(psi.samples);
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const Real k = psi.grid.wavenumber(j);
        spec[j] *= std::exp(Complex(0.0, -hbar * k * k * t / (2.0 * mass)));
    }
    return {psi.grid, fft.inverse(spec)};
}

Real density_variance(const ComplexField1D &psi)
{
    Real n0 = 0, n1 = 0, n2 = 0;
    for (std::size_t i = 0; i < psi.samples.size(); ++i) {
        const Real x = psi.grid.x(i);
        const Real d = std::norm(psi.samples[i]);
        n0 += d;
        n1 += d * x;
        n2 += d * x * x;
    }
    const Real mean = n1 / n0;
    return n2 / n0 - mean * mean;
}

} // namespace

TEST_CASE("spectral_derivative of trigonometric fields is exact")
{
    const PeriodicGrid grid{64, 2.0 * kPi, 0.0};
    std::vector<Real> f(64);
    std::vector<Real> df(64);
    std::vector<Real> d2f(64);
    for (std::size_t i = 0; i < 64; ++i) {
        const Real x = grid.x(i);
        f[i] = std::sin(3.0 * x);
        df[i] = 3.0 * std::cos(3.0 * x);
        d2f[i] = -9.0 * std::sin(3.0 * x);
    }
    CHECK(max_abs_diff(spectral_derivative(f, grid, 1), df) < 1e-12);
    CHECK(max_abs_diff(spectral_derivative(f, grid, 2), d2f) < 1e-11);
}

TEST_CASE("grid validation")
{
    CHECK_THROWS_AS(validate_grid(PeriodicGrid{48, 1.0, 0.0}, 8), Error);
    CHECK_THROWS_AS(validate_grid(PeriodicGrid{4, 1.0, 0.0}, 8), Error);
    CHECK_THROWS_AS(validate_grid(PeriodicGrid{64, 0.0, 0.0}, 8), Error);
    CHECK_NOTHROW(validate_grid(PeriodicGrid{64, 1.0, 0.0}, 8));
    const auto g = centered_grid(8, 4.0);
    CHECK(g.x(0) == -2.0);
    CHECK(g.wavenumber(5) == doctest::Approx(-3.0 * 2.0 * kPi / 4.0));
}

TEST_CASE("Bohm potential of a uniform density vanishes")
{
    const PeriodicGrid grid{64, 10.0, 0.0};
    const std::vector<Real> n(64, 2.5);
    for (const Real v : bohm_potential(n, grid, 1.0, 1.0)) {
        CHECK(std::abs(v) < 1e-13);
    }
}

TEST_CASE("Bohm potential of a Gaussian density")
{
    // n = exp(-x^2): V = -(hbar^2/2m)(x^2 - 1), so V(0) = 1/2 for m = hbar = 1.
    const auto grid = centered_grid(256, 24.0);
    std::vector<Real> n(grid.n_points);
    for (std::size_t i = 0; i < n.size(); ++i) {
        n[i] = std::exp(-grid.x(i) * grid.x(i));
    }
    // Tails drop far below the default floor; look only at the core.
    const auto V = bohm_potential(n, grid, 1.0, 1.0, 0.0);
    const auto V2 = bohm_potential(n, grid, 1.0, 2.0, 0.0);
    for (std::size_t i = 0; i < n.size(); ++i) {
        const Real x = grid.x(i);
        if (std::abs(x) > 3.0) {
            continue;
        }
        CHECK(V[i] == doctest::Approx(-0.5 * (x * x - 1.0)).epsilon(1e-9));
        CHECK(V2[i] == doctest::Approx(4.0 * V[i]).epsilon(1e-12));
    }
    CHECK(V[grid.n_points / 2] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("Bohm potential agrees with a second-order finite-difference oracle")
{
    const auto grid = centered_grid(4096, 16.0);
    const std::size_t N = grid.n_points;
    std::vector<Real> n(N);
    std::vector<Real> r(N);
    for (std::size_t i = 0; i < N; ++i) {
        const Real x = grid.x(i);
        n[i] = std::exp(std::cos(2.0 * kPi * x / grid.length) + 0.3 * std::sin(4.0 * kPi * x / grid.length)) + 0.2;
        r[i] = std::sqrt(n[i]);
    }
    const Real m = 2.0;
    const Real hbar = 0.7;
    const auto V = bohm_potential(n, grid, m, hbar);
    const Real dx = grid.dx();
    Real err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const Real lap = (r[(i + 1) % N] - 2.0 * r[i] + r[(i + N - 1) % N]) / (dx * dx);
        err = std::max(err, std::abs(V[i] + hbar * hbar / (2.0 * m) * lap / r[i]));
    }
    CHECK(err < 1e-5);
}

TEST_CASE("Bohm potential rejects vacuum and bad parameters")
{
    const PeriodicGrid grid{16, 1.0, 0.0};
    std::vector<Real> n(16, 1.0);
    n[3] = 0.0;
    try {
        (void)bohm_potential(n, grid, 1.0, 1.0);
        FAIL("expected VacuumRegion");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::VacuumRegion);
    }
    n[3] = 1.0;
    CHECK_THROWS_AS((void)bohm_potential(n, grid, 0.0, 1.0), Error);
    n[4] = std::nan("");
    CHECK_THROWS_AS((void)bohm_potential(n, grid, 1.0, 1.0), Error);
}

TEST_CASE("unwrap_phase recovers a ramp and its winding")
{
    const std::size_t N = 64;
    std::vector<Real> wrapped(N);
    for (std::size_t i = 0; i < N; ++i) {
        wrapped[i] = std::arg(std::exp(Complex(0.0, 2.0 * kPi * 3.0 * i / N + 0.1)));
    }
    const auto [phase, winding] = unwrap_phase(wrapped);
    CHECK(winding == 3);
    for (std::size_t i = 1; i < N; ++i) {
        CHECK(phase[i] - phase[i - 1] == doctest::Approx(2.0 * kPi * 3.0 / N));
    }
    std::vector<Real> negative(N);
    for (std::size_t i = 0; i < N; ++i) {
        negative[i] = std::arg(std::exp(Complex(0.0, -2.0 * kPi * 2.0 * i / N)));
    }
    CHECK(unwrap_phase(negative).second == -2);
}

TEST_CASE("Madelung decomposition and recomposition")
{
    const PeriodicGrid grid{128, 2.0 * kPi, 0.0};
    const Real m = 1.5;
    const Real hbar = 0.8;
    const auto psi = make_field(grid, [](Real x) {
        return (1.0 + 0.3 * std::cos(x)) * std::exp(Complex(0.0, 2.0 * x + 0.5 * std::sin(x)));
    });
    const auto fluid = madelung_decompose(psi, m, hbar);
    CHECK(fluid.winding == 2);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const Real x = grid.x(i);
        CHECK(fluid.n[i] == doctest::Approx(std::pow(1.0 + 0.3 * std::cos(x), 2)).epsilon(1e-14));
        CHECK(fluid.v[i] == doctest::Approx(hbar * (2.0 + 0.5 * std::cos(x)) / m).epsilon(1e-12));
    }
    const auto back = madelung_recompose(fluid, hbar);
    Real err = 0.0;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        err = std::max(err, std::abs(back.samples[i] - psi.samples[i]));
    }
    CHECK(err < 1e-12);
}

TEST_CASE("Madelung decomposition of a field with a node is refused")
{
    const PeriodicGrid grid{32, 2.0 * kPi, 0.0};
    const auto psi = make_field(grid, [](Real x) { return Complex(std::sin(x), 0.0); });
    CHECK_THROWS_AS((void)madelung_decompose(psi, 1.0, 1.0), Error);
}

TEST_CASE("hydrodynamic residuals of exact states")
{
    const PeriodicGrid grid{64, 2.0 * kPi, 0.0};
    const Real m = 1.0;
    const Real hbar = 1.0;
    // Uniform stationary state.
    const auto rest = make_field(grid, [](Real) { return Complex(1.0, 0.0); });
    const auto rest_fluid = madelung_decompose(rest, m, hbar);
    auto r = hydrodynamic_residuals(rest_fluid, rest_fluid, 0.1, m, hbar);
    CHECK(r.hamilton_jacobi < 1e-14);
    CHECK(r.continuity < 1e-14);

    // Plane wave exp(i(kx - hbar k^2 t/2m)).
    const Real k = 3.0;
    const Real dt = 0.05;
    const auto p0 = make_field(grid, [&](Real x) { return std::exp(Complex(0.0, k * x)); });
    const auto p1 = free_evolve(p0, dt, m, hbar);
    r = hydrodynamic_residuals(madelung_decompose(p0, m, hbar), madelung_decompose(p1, m, hbar), dt, m, hbar);
    CHECK(r.hamilton_jacobi < 1e-11);
    CHECK(r.continuity < 1e-11);
}

TEST_CASE("hydrodynamic residuals converge at second order in dt")
{
    // Periodic von Mises packet with drift, evolved with the exact free propagator.
    const PeriodicGrid grid{128, 2.0 * kPi, 0.0};
    const Real m = 1.0;
    const Real hbar = 1.0;
    const auto psi0 = make_field(grid, [](Real x) {
        return std::exp(Complex(0.5 * std::cos(x), x));
    });
    Real previous_hj = 0.0;
    Real previous_c = 0.0;
    for (const Real dt : {0.04, 0.02, 0.01}) {
        const auto psi1 = free_evolve(psi0, dt, m, hbar);
        const auto r = hydrodynamic_residuals(madelung_decompose(psi0, m, hbar), madelung_decompose(psi1, m, hbar),
                                              dt, m, hbar);
        if (previous_hj > 0.0) {
            CHECK(previous_hj / r.hamilton_jacobi == doctest::Approx(4.0).epsilon(0.1));
            CHECK(previous_c / r.continuity == doctest::Approx(4.0).epsilon(0.1));
        }
        previous_hj = r.hamilton_jacobi;
        previous_c = r.continuity;
    }
}

TEST_CASE("soliton parameters")
{
    const auto p = soliton_params(0.5, 2.0, 1.0, 1.5, 0.3, 1.0);
    CHECK(p.B == doctest::Approx(4.0 * 2.0 * 0.5));
    CHECK(p.v == doctest::Approx(1.5 / 2.0));
    try {
        (void)soliton_params(0.5, 2.0, 1.0, 1.5, 0.3, 0.0);
        FAIL("expected NonPositiveAmplitude");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::NonPositiveAmplitude);
    }
    CHECK_THROWS_AS((void)soliton_params(0.0, 2.0, 1.0, 1.5, 0.3, 1.0), Error);
    CHECK_THROWS_AS((void)soliton_params(0.5, 2.0, 0.0, 1.5, 0.3, 1.0), Error);
}

TEST_CASE("normalized soliton: unit norm, default amplitude, ODE residual")
{
    for (const Real b : {0.1, 0.25, 1.0}) {
        for (const Real m : {1.0, 3.0}) {
            const auto p = normalized_soliton(b, m, 1.0, 0.5);
            CHECK(std::abs(p.A) < 1e-12);
            CHECK(soliton_profile(p, 0.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
            const auto grid = centered_grid(512, 24.0 / std::sqrt(p.B));
            CHECK(sample_soliton(p, grid, 0.0).norm() == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(soliton_ode_residual(p, grid) < 1e-8);
        }
    }
    // Any positive c works; only omega changes.
    const auto p = normalized_soliton(0.25, 1.0, 1.0, 0.5, 0.0, 0.7);
    CHECK(p.c == 0.7);
    CHECK(sample_soliton(p, centered_grid(512, 24.0), 0.0).norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("soliton density equals the limiting Gaussian")
{
    const Real b = 0.3;
    const Real m = 2.0;
    const Real hbar = 0.9;
    const auto p = normalized_soliton(b, m, hbar, 0.0);
    for (const Real xi : {-2.0, -0.5, 0.0, 0.3, 1.7}) {
        CHECK(std::norm(soliton_wavefunction(p, xi, 0.0)) == doctest::Approx(delta_m(xi, b, m, hbar)).epsilon(1e-12));
    }
}

TEST_CASE("classical-limit density")
{
    const Real b = 0.25;
    const Real hbar = 1.0;
    CHECK(classical_limit_width(b, 1.0, hbar) == doctest::Approx(2.0 * classical_limit_width(b, 4.0, hbar)));
    const std::vector<Real> masses{1.0, 4.0, 16.0, 64.0};
    for (const Real m : masses) {
        const auto grid = centered_grid(4096, 40.0);
        Real sum = 0.0;
        for (std::size_t i = 0; i < grid.n_points; ++i) {
            sum += delta_m(grid.x(i), b, m, hbar) * grid.dx();
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
    // Sup distance between the CDF of delta_m and the unit step decreases with m.
    Real previous = 1.0;
    for (const Real m : masses) {
        const Real sigma = classical_limit_width(b, m, hbar);
        Real sup = 0.0;
        for (int i = -200; i <= 200; ++i) {
            const Real x = 0.01 * i;
            const Real cdf = 0.5 * std::erfc(-x / (std::sqrt(2.0) * sigma));
            const Real step = x >= 0.0 ? 1.0 : 0.0;
            if (x != 0.0) {
                sup = std::max(sup, std::abs(cdf - step));
            }
        }
        CHECK(sup < previous);
        previous = sup;
    }
}

TEST_CASE("log-NLS with b = 0 follows the free Gaussian spreading law")
{
    const auto grid = centered_grid(512, 80.0);
    const Real m = 1.0;
    const Real hbar = 1.0;
    const Real s0 = 1.0;
    auto psi = make_field(grid, [&](Real x) { return Complex(std::exp(-x * x / (4.0 * s0 * s0)), 0.0); });
    const Real t = 3.0;
    const std::size_t steps = 300;
    LogNlsPropagator prop(grid, t / steps, 0.0, m, hbar);
    prop.evolve(psi, steps);
    const Real expected = s0 * s0 * (1.0 + std::pow(hbar * t / (2.0 * m * s0 * s0), 2));
    CHECK(density_variance(psi) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("log-NLS conserves the norm and keeps a resting soliton in place")
{
    const auto p = normalized_soliton(0.5, 1.0, 1.0, 0.0);
    const auto grid = centered_grid(256, 16.0);
    auto psi = sample_soliton(p, grid, 0.0);
    const auto initial = psi;
    const Real n0 = psi.norm();
    LogNlsPropagator prop(grid, lognls_max_dt(grid, 1.0, 1.0), 0.5, 1.0, 1.0);
    prop.evolve(psi, 1000);
    CHECK(std::abs(psi.norm() - n0) < 1e-10);
    Real err = 0.0;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        err = std::max(err, std::abs(std::norm(psi.samples[i]) - std::norm(initial.samples[i])));
    }
    CHECK(err < 1e-6);
}

TEST_CASE("step and evolve agree")
{
    const auto p = normalized_soliton(0.5, 1.0, 1.0, 1.0);
    const auto grid = centered_grid(128, 16.0);
    auto a = sample_soliton(p, grid, 0.0);
    auto b = a;
    LogNlsPropagator prop(grid, 0.01, 0.5, 1.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        prop.step(a);
    }
    prop.evolve(b, 10);
    Real err = 0.0;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        err = std::max(err, std::abs(a.samples[i] - b.samples[i]));
    }
    CHECK(err < 1e-12);
    const auto c = lognls_step(sample_soliton(p, grid, 0.0), 0.01, 0.5, 1.0, 1.0);
    CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("log-NLS input checks")
{
    const auto grid = centered_grid(64, 8.0);
    auto psi = make_field(grid, [](Real x) { return Complex(std::exp(-x * x), 0.0); });
    psi.samples[10] = 0.0;
    LogNlsPropagator lenient(grid, 0.01, 0.5, 1.0, 1.0);
    CHECK_NOTHROW(lenient.step(psi));
    psi.samples[10] = 0.0;
    LogNlsPropagator strict(grid, 0.01, 0.5, 1.0, 1.0, LogNlsOptions{1e-12, 1e-10});
    try {
        strict.step(psi);
        FAIL("expected VacuumRegion");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::VacuumRegion);
    }
    psi.samples[10] = Complex(std::nan(""), 0.0);
    try {
        lenient.step(psi);
        FAIL("expected NonFinite");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::NonFinite);
    }
    CHECK_THROWS_AS(LogNlsPropagator(grid, -0.1, 0.5, 1.0, 1.0), Error);
    CHECK_THROWS_AS(LogNlsPropagator(PeriodicGrid{60, 8.0, 0.0}, 0.1, 0.5, 1.0, 1.0), Error);
}

TEST_CASE("soliton transit over one period")
{
    const Real L = 16.0;
    const auto grid = centered_grid(256, L);
    const auto p = normalized_soliton(0.25, 1.0, 1.0, 2.0 * 2.0 * kPi / L);
    const auto tr = soliton_transit(p, grid, 1.0);
    CHECK(tr.duration == doctest::Approx(L / p.v));
    CHECK(tr.max_density_error < 1e-6);
    CHECK(tr.norm_drift < 1e-9);
    CHECK(tr.drift_speed == doctest::Approx(p.v).epsilon(1e-4));
}

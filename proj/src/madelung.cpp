#include "qmhd/madelung.hpp"

#include <algorithm>
#include <cmath>

namespace qmhd {

namespace {

constexpr Real kTwoPi = 2.0 * kPi;

void require_positive(Real value, const char *field)
{
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonFinite, field, "value is not finite");
    }
    if (!(value > 0.0)) {
        throw Error(ErrorCode::NonPositiveParameter, field, "must be positive");
    }
}

void require_matching(std::size_t size, const PeriodicGrid &grid)
{
    validate_grid(grid, 8);
    if (size != grid.n_points) {
        throw Error(ErrorCode::InvalidGrid, "samples", "sample count does not match the grid");
    }
}

void check_floor(std::span<const Real> n, Real relative_floor)
{
    Real peak = 0.0;
    for (const Real value : n) {
        if (!std::isfinite(value)) {
            throw Error(ErrorCode::NonFinite, "n", "density sample is not finite");
        }
        peak = std::max(peak, value);
    }
    const Real floor = relative_floor * peak;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(n[i] > floor) || !(n[i] > 0.0)) {
            throw Error(ErrorCode::VacuumRegion, "n",
                        "density at sample " + std::to_string(i) + " is below the vacuum floor");
        }
    }
}

Real wrap_angle(Real angle) { return angle - kTwoPi * std::round(angle / kTwoPi); }

Real max_abs(std::span<const Real> values)
{
    Real m = 0.0;
    for (const Real v : values) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

} // namespace

Real ComplexField1D::norm() const
{
    Real sum = 0.0;
    for (const Complex &z : samples) {
        sum += std::norm(z);
    }
    return sum * grid.dx();
}

void validate_field(const ComplexField1D &psi) { require_matching(psi.samples.size(), psi.grid); }

std::vector<Real> bohm_potential(std::span<const Real> n, const PeriodicGrid &grid, Real mass, Real hbar,
                                 Real relative_floor)
{
    require_matching(n.size(), grid);
    require_positive(mass, "mass");
    check_floor(n, relative_floor);

    std::vector<Real> root(n.size());
    std::transform(n.begin(), n.end(), root.begin(), [](Real x) { return std::sqrt(x); });
    const auto lap = spectral_derivative(std::span<const Real>(root), grid, 2);

    std::vector<Real> vq(n.size());
    const Real prefactor = -hbar * hbar / (2.0 * mass);
    for (std::size_t i = 0; i < n.size(); ++i) {
        vq[i] = prefactor * lap[i] / root[i];
    }
    return vq;
}

std::pair<std::vector<Real>, long> unwrap_phase(std::span<const Real> wrapped)
{
    std::vector<Real> out(wrapped.size());
    if (wrapped.empty()) {
        return {out, 0};
    }
    out[0] = wrapped[0];
    for (std::size_t i = 1; i < wrapped.size(); ++i) {
        out[i] = out[i - 1] + wrap_angle(wrapped[i] - wrapped[i - 1]);
    }
    const Real closing = out.back() + wrap_angle(wrapped.front() - wrapped.back());
    const auto winding = static_cast<long>(std::lround((closing - out.front()) / kTwoPi));
    return {out, winding};
}

FluidFields1D madelung_decompose(const ComplexField1D &psi, Real mass, Real hbar, Real relative_floor)
{
    validate_field(psi);
    require_positive(mass, "mass");
    require_positive(hbar, "hbar");

    const std::size_t size = psi.samples.size();
    FluidFields1D fluid;
    fluid.grid = psi.grid;
    fluid.n.resize(size);
    std::vector<Real> phase(size);
    for (std::size_t i = 0; i < size; ++i) {
        fluid.n[i] = std::norm(psi.samples[i]);
        phase[i] = std::arg(psi.samples[i]);
    }
    check_floor(fluid.n, relative_floor);

    auto [unwrapped, winding] = unwrap_phase(phase);
    fluid.winding = winding;
    fluid.S.resize(size);
    std::transform(unwrapped.begin(), unwrapped.end(), fluid.S.begin(), [hbar](Real p) { return hbar * p; });

    // S minus its linear winding ramp is periodic and can be differentiated spectrally.
    const Real ramp = kTwoPi * hbar * static_cast<Real>(winding) / psi.grid.length;
    std::vector<Real> periodic(size);
    for (std::size_t i = 0; i < size; ++i) {
        periodic[i] = fluid.S[i] - ramp * (psi.grid.x(i) - psi.grid.origin);
    }
    const auto grad = spectral_derivative(std::span<const Real>(periodic), psi.grid, 1);
    fluid.v.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
        fluid.v[i] = (grad[i] + ramp) / mass;
    }
    return fluid;
}

ComplexField1D madelung_recompose(const FluidFields1D &fluid, Real hbar)
{
    require_positive(hbar, "hbar");
    ComplexField1D psi{fluid.grid, std::vector<Complex>(fluid.n.size())};
    for (std::size_t i = 0; i < fluid.n.size(); ++i) {
        psi.samples[i] = std::polar(std::sqrt(fluid.n[i]), fluid.S[i] / hbar);
    }
    return psi;
}

HydroResiduals hydrodynamic_residuals(const FluidFields1D &before, const FluidFields1D &after, Real dt, Real mass,
                                      Real hbar)
{
    require_positive(dt, "dt");
    require_positive(mass, "mass");
    require_matching(before.n.size(), before.grid);
    if (after.n.size() != before.n.size() || after.grid.length != before.grid.length) {
        throw Error(ErrorCode::InvalidGrid, "after", "states live on different grids");
    }

    const auto vq0 = bohm_potential(before.n, before.grid, mass, hbar);
    const auto vq1 = bohm_potential(after.n, after.grid, mass, hbar);

    const std::size_t size = before.n.size();
    std::vector<Real> flux0(size);
    std::vector<Real> flux1(size);
    for (std::size_t i = 0; i < size; ++i) {
        flux0[i] = before.n[i] * before.v[i];
        flux1[i] = after.n[i] * after.v[i];
    }
    const auto div0 = spectral_derivative(std::span<const Real>(flux0), before.grid, 1);
    const auto div1 = spectral_derivative(std::span<const Real>(flux1), after.grid, 1);

    std::vector<Real> hj(size);
    std::vector<Real> cont(size);
    for (std::size_t i = 0; i < size; ++i) {
        // The two phases may differ by whole turns; only the local change matters.
        const Real dS = hbar * wrap_angle((after.S[i] - before.S[i]) / hbar);
        const Real kinetic = 0.25 * mass * (before.v[i] * before.v[i] + after.v[i] * after.v[i]);
        hj[i] = dS / dt + kinetic + 0.5 * (vq0[i] + vq1[i]);
        cont[i] = (after.n[i] - before.n[i]) / dt + 0.5 * (div0[i] + div1[i]);
    }
    return {max_abs(hj), max_abs(cont)};
}

SolitonParams soliton_params(Real b, Real mass, Real hbar, Real k, Real omega, Real c, Real d)
{
    require_positive(b, "b");
    require_positive(mass, "mass");
    require_positive(hbar, "hbar");
    if (!std::isfinite(k) || !std::isfinite(omega) || !std::isfinite(d)) {
        throw Error(ErrorCode::NonFinite, "soliton", "k, omega and d must be finite");
    }
    if (!std::isfinite(c) || !(c * c > 0.0)) {
        throw Error(ErrorCode::NonPositiveAmplitude, "c", "c^2 must be real and positive");
    }

    SolitonParams p;
    p.b = b;
    p.mass = mass;
    p.hbar = hbar;
    p.k = k;
    p.omega = omega;
    p.c = c;
    p.d = d;
    p.v = hbar * k / mass;
    p.A = 2.0 * mass / hbar * omega - k * k + 2.0 * mass / (hbar * hbar) * b * std::log(c * c);
    p.B = 4.0 * mass * b / (hbar * hbar);
    p.a = 0.5 * p.B - p.A;
    return p;
}

SolitonParams normalized_soliton(Real b, Real mass, Real hbar, Real k, Real d, std::optional<Real> c)
{
    require_positive(b, "b");
    require_positive(mass, "mass");
    require_positive(hbar, "hbar");
    const Real B = 4.0 * mass * b / (hbar * hbar);
    const Real amplitude = c.value_or(std::sqrt(std::sqrt(B / (2.0 * kPi)) / std::exp(1.0)));
    // c^2 e^{2a/B} = e^{1 - 2A'/B} with A' = (2m/hbar) omega - k^2, whatever c is.
    const Real a_prime = 0.5 * B * (1.0 - 0.5 * std::log(B / (2.0 * kPi)));
    const Real omega = hbar / (2.0 * mass) * (a_prime + k * k);
    return soliton_params(b, mass, hbar, k, omega, amplitude, d);
}

Real soliton_profile(const SolitonParams &p, Real xi)
{
    const Real s = xi + p.d;
    return std::exp(p.a / p.B - 0.25 * p.B * s * s);
}

Complex soliton_wavefunction(const SolitonParams &p, Real x, Real t)
{
    return p.c * soliton_profile(p, x - p.v * t) * std::polar(1.0, p.k * x - p.omega * t);
}

ComplexField1D sample_soliton(const SolitonParams &p, const PeriodicGrid &grid, Real t)
{
    validate_grid(grid, 8);
    ComplexField1D psi{grid, std::vector<Complex>(grid.n_points)};
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const Real x = grid.x(i);
        Real s = x - p.v * t + p.d;
        s -= grid.length * std::round(s / grid.length);
        psi.samples[i] = p.c * soliton_profile(p, s - p.d) * std::polar(1.0, p.k * x - p.omega * t);
    }
    return psi;
}

Real soliton_ode_residual(const SolitonParams &p, const PeriodicGrid &grid)
{
    validate_grid(grid, 8);
    std::vector<Real> g(grid.n_points);
    std::vector<Real> log_g(grid.n_points);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        Real s = grid.x(i) + p.d;
        s -= grid.length * std::round(s / grid.length);
        log_g[i] = p.a / p.B - 0.25 * p.B * s * s;
        g[i] = std::exp(log_g[i]);
    }
    const auto g2 = spectral_derivative(std::span<const Real>(g), grid, 2);
    Real worst = 0.0;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        worst = std::max(worst, std::abs(g2[i] + p.A * g[i] + p.B * log_g[i] * g[i]));
    }
    return worst;
}

LogNlsPropagator::LogNlsPropagator(const PeriodicGrid &grid, Real dt, Real b, Real mass, Real hbar,
                                   LogNlsOptions options)
    : grid_(grid), dt_(dt), b_(b), hbar_(hbar), options_(options)
{
    validate_grid(grid, 8);
    require_positive(dt, "dt");
    require_positive(mass, "mass");
    require_positive(hbar, "hbar");
    if (!std::isfinite(b) || b < 0.0) {
        throw Error(ErrorCode::NonPositiveParameter, "b", "nonlinearity must be finite and non-negative");
    }
    kinetic_phase_.resize(grid.n_points);
    for (std::size_t j = 0; j < grid.n_points; ++j) {
        const Real k = grid.wavenumber(j);
        kinetic_phase_[j] = std::polar(1.0, -hbar * k * k * dt / (2.0 * mass));
    }
}

void LogNlsPropagator::nonlinear(std::vector<Complex> &psi, Real tau) const
{
    if (b_ == 0.0) {
        return;
    }
    const Real rate = b_ * tau / hbar_;
    for (Complex &z : psi) {
        const Real density = std::norm(z);
        if (density > 0.0) {
            z *= std::polar(1.0, rate * std::log(density));
        }
    }
}

void LogNlsPropagator::kinetic(std::vector<Complex> &psi)
{
    fft_.forward(psi, work_);
    for (std::size_t j = 0; j < work_.size(); ++j) {
        work_[j] *= kinetic_phase_[j];
    }
    fft_.inverse(work_, psi);
}

void LogNlsPropagator::check_vacuum(const std::vector<Complex> &psi) const
{
    Real peak = 0.0;
    for (const Complex &z : psi) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw Error(ErrorCode::NonFinite, "psi", "wavefunction sample is not finite");
        }
        peak = std::max(peak, std::norm(z));
    }
    if (options_.relative_floor > 0.0) {
        const Real floor = options_.relative_floor * peak;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (!(std::norm(psi[i]) > floor)) {
                throw Error(ErrorCode::VacuumRegion, "psi",
                            "|psi|^2 at sample " + std::to_string(i) + " is below the vacuum floor");
            }
        }
    }
}

void LogNlsPropagator::check_norm(Real before, Real after) const
{
    if (!std::isfinite(after) || std::abs(after - before) > options_.norm_tolerance * before) {
        throw Error(ErrorCode::UnstableStep, "psi", "norm drifted beyond tolerance in one step");
    }
}

void LogNlsPropagator::step(ComplexField1D &psi)
{
    evolve(psi, 1);
}

void LogNlsPropagator::evolve(ComplexField1D &psi, std::size_t steps)
{
    if (psi.samples.size() != grid_.n_points) {
        throw Error(ErrorCode::InvalidGrid, "psi", "field does not match the propagator grid");
    }
    if (steps == 0) {
        return;
    }
    check_vacuum(psi.samples);
    Real norm = psi.norm();
    nonlinear(psi.samples, 0.5 * dt_);
    for (std::size_t s = 0; s < steps; ++s) {
        kinetic(psi.samples);
        nonlinear(psi.samples, s + 1 == steps ? 0.5 * dt_ : dt_);
        const Real next = psi.norm();
        check_norm(norm, next);
        norm = next;
        if (options_.relative_floor > 0.0) {
            check_vacuum(psi.samples);
        }
    }
}

ComplexField1D lognls_step(const ComplexField1D &psi, Real dt, Real b, Real mass, Real hbar, LogNlsOptions options)
{
    validate_field(psi);
    LogNlsPropagator propagator(psi.grid, dt, b, mass, hbar, options);
    ComplexField1D out = psi;
    propagator.step(out);
    return out;
}

namespace {

// Circular mean of the density, as an angle in radians.
Real density_angle(const ComplexField1D &psi)
{
    Complex acc{0.0, 0.0};
    const Real scale = 2.0 * kPi / psi.grid.length;
    for (std::size_t i = 0; i < psi.samples.size(); ++i) {
        acc += std::norm(psi.samples[i]) * std::polar(1.0, scale * psi.grid.x(i));
    }
    return std::arg(acc);
}

std::vector<Real> shift_periodic(std::span<const Real> f, const PeriodicGrid &grid, Real shift)
{
    Fft fft;
    std::vector<Complex> c(f.begin(), f.end());
    auto hat = fft.forward(c);
    const std::size_t n = grid.n_points;
    for (std::size_t j = 0; j < n; ++j) {
        // f(x + shift); the Nyquist bin is kept real.
        const Real k = grid.wavenumber(j);
        hat[j] *= j == n / 2 ? Complex(std::cos(k * shift), 0.0) : std::polar(1.0, k * shift);
    }
    const auto back = fft.inverse(hat);
    std::vector<Real> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = back[i].real();
    }
    return out;
}

} // namespace

SolitonTransit soliton_transit(const SolitonParams &p, const PeriodicGrid &grid, Real transits, Real max_dt,
                               std::size_t moment_samples)
{
    validate_grid(grid, 8);
    require_positive(transits, "transits");
    if (p.v == 0.0) {
        throw Error(ErrorCode::InvalidArgument, "k", "a transit needs a moving soliton (k != 0)");
    }
    moment_samples = std::max<std::size_t>(moment_samples, 2);

    SolitonTransit out;
    out.duration = transits * grid.length / std::abs(p.v);
    const Real bound = max_dt > 0.0 ? max_dt : lognls_max_dt(grid, p.mass, p.hbar);
    const Real interval = out.duration / static_cast<Real>(moment_samples);
    const auto per_interval = static_cast<std::size_t>(std::ceil(interval / bound - 1e-12));
    out.dt = interval / static_cast<Real>(per_interval);
    out.initial = sample_soliton(p, grid, 0.0);

    LogNlsPropagator propagator(grid, out.dt, p.b, p.mass, p.hbar);
    ComplexField1D psi = out.initial;

    std::vector<Real> times{0.0};
    std::vector<Real> angles{density_angle(psi)};
    for (std::size_t s = 1; s <= moment_samples; ++s) {
        propagator.evolve(psi, per_interval);
        out.steps += per_interval;
        times.push_back(static_cast<Real>(s) * interval);
        Real angle = density_angle(psi);
        angle = angles.back() + wrap_angle(angle - angles.back());
        angles.push_back(angle);
    }
    out.final = psi;

    // Least-squares slope of the unwrapped centre.
    Real tm = 0.0;
    Real am = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        tm += times[i];
        am += angles[i];
    }
    tm /= static_cast<Real>(times.size());
    am /= static_cast<Real>(times.size());
    Real stt = 0.0;
    Real sta = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        stt += (times[i] - tm) * (times[i] - tm);
        sta += (times[i] - tm) * (angles[i] - am);
    }
    out.drift_speed = sta / stt * grid.length / (2.0 * kPi);

    std::vector<Real> density(grid.n_points);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        density[i] = std::norm(out.final.samples[i]);
    }
    out.final_density_shifted = shift_periodic(density, grid, p.v * out.duration);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        out.max_density_error = std::max(out.max_density_error,
                                         std::abs(out.final_density_shifted[i] - std::norm(out.initial.samples[i])));
    }
    out.norm_drift = std::abs(out.final.norm() - out.initial.norm());
    return out;
}

Real lognls_max_dt(const PeriodicGrid &grid, Real mass, Real hbar)
{
    return 0.1 * mass * grid.dx() * grid.dx() / hbar;
}

Real classical_limit_width(Real b, Real mass, Real hbar)
{
    require_positive(b, "b");
    require_positive(mass, "mass");
    require_positive(hbar, "hbar");
    const Real alpha = 2.0 * b / (hbar * hbar);
    return 1.0 / std::sqrt(2.0 * alpha * mass);
}

Real delta_m(Real xi, Real b, Real mass, Real hbar)
{
    require_positive(b, "b");
    require_positive(mass, "mass");
    require_positive(hbar, "hbar");
    const Real alpha = 2.0 * b / (hbar * hbar);
    return std::sqrt(mass * alpha / kPi) * std::exp(-alpha * mass * xi * xi);
}

} // namespace qmhd

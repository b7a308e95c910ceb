#include "qmhd/dispersion.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace qmhd {

const char *to_string(ModeBranch branch) noexcept
{
    switch (branch) {
    case ModeBranch::Alfven: return "alfven";
    case ModeBranch::Fast: return "fast";
    case ModeBranch::Slow: return "slow";
    }
    return "unknown";
}

StateVector to_state(const PerturbationAmplitudes &amps)
{
    StateVector s;
    s << amps.v(0), amps.v(1), amps.v(2), amps.h(0), amps.h(1), amps.h(2), amps.rho_prime;
    return s;
}

PerturbationAmplitudes from_state(const StateVector &state)
{
    PerturbationAmplitudes amps;
    amps.v = state.segment<3>(0);
    amps.h = state.segment<3>(3);
    amps.rho_prime = state(6);
    return amps;
}

namespace {

Vec3 unit_direction(const WaveVector &k)
{
    const Real norm = k.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw Error(ErrorCode::ZeroWaveVector, "k", "a propagation direction requires |k| > 0");
    }
    return k.k / norm;
}

Eigen::Matrix3d cross_matrix(const Vec3 &a)
{
    Eigen::Matrix3d m;
    m << 0.0, -a.z(), a.y(),
         a.z(), 0.0, -a.x(),
         -a.y(), a.x(), 0.0;
    return m;
}

Real sqrt_four_pi_rho(const PlasmaBackground &bg) { return std::sqrt(kFourPi * bg.rho0); }

} // namespace

PerturbationAmplitudes CanonicalFrame::to_lab(const PerturbationAmplitudes &canonical) const
{
    const Eigen::Matrix3cd back = rotation.transpose().cast<Complex>();
    return {back * canonical.v, back * canonical.h, canonical.rho_prime};
}

PerturbationAmplitudes CanonicalFrame::to_canonical(const PerturbationAmplitudes &lab) const
{
    const Eigen::Matrix3cd fwd = rotation.cast<Complex>();
    return {fwd * lab.v, fwd * lab.h, lab.rho_prime};
}

CanonicalFrame canonical_frame(const PlasmaBackground &bg, const WaveVector &k)
{
    const Vec3 ex = unit_direction(k);
    const Vec3 perp = bg.H0 - bg.H0.dot(ex) * ex;

    Vec3 ey;
    // Any direction normal to k will do when H0 has no perpendicular part.
    if (perp.norm() > 1e-14 * std::max(bg.H0.norm(), 1e-300)) {
        ey = perp.normalized();
    } else {
        const Vec3 trial = std::abs(ex.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
        ey = (trial - trial.dot(ex) * ex).normalized();
    }
    const Vec3 ez = ex.cross(ey);

    CanonicalFrame frame;
    frame.rotation.row(0) = ex.transpose();
    frame.rotation.row(1) = ey.transpose();
    frame.rotation.row(2) = ez.transpose();
    frame.k = k.norm();
    frame.H0x = bg.H0.dot(ex);
    frame.H0y = bg.H0.dot(ey);
    return frame;
}

Real alfven_speed(const PlasmaBackground &bg) { return alfven_speed(bg, WaveVector{Vec3::UnitX()}); }

Real alfven_speed(const PlasmaBackground &bg, const WaveVector &k)
{
    const Vec3 khat = unit_direction(k);
    return std::abs(bg.H0.dot(khat)) / sqrt_four_pi_rho(bg);
}

Real quantum_sound_speed(const PlasmaBackground &bg, const WaveVector &k)
{
    const Real k2 = k.k.squaredNorm();
    const Real quantum = bg.hbar * bg.hbar / (4.0 * bg.mass * bg.mass) * k2;
    return std::sqrt(bg.u0 * bg.u0 + quantum);
}

MagnetosonicSpeeds magnetosonic_speeds(const PlasmaBackground &bg, const WaveVector &k)
{
    const Vec3 khat = unit_direction(k);
    const Real H0x = bg.H0.dot(khat);
    const Real U0sq = std::pow(quantum_sound_speed(bg, k), 2);
    const Real magnetic = bg.H0.squaredNorm() / (kFourPi * bg.rho0);
    const Real sum = magnetic + U0sq;

    Real disc = sum * sum - H0x * H0x / (kPi * bg.rho0) * U0sq;
    if (disc < 0.0) {
        if (disc < -kDiscriminantTolerance * sum * sum) {
            throw Error(ErrorCode::NegativeDiscriminant, "H0",
                        "magnetosonic discriminant is negative beyond rounding");
        }
        disc = 0.0;
    }
    const Real root = std::sqrt(disc);
    // The slow root is formed from the product of roots to avoid cancellation.
    const Real fast_sq = 0.5 * (sum + root);
    const Real product = H0x * H0x / (kFourPi * bg.rho0) * U0sq;
    const Real slow_sq = fast_sq > 0.0 ? product / fast_sq : 0.0;
    return {std::sqrt(fast_sq), std::sqrt(std::max(slow_sq, 0.0))};
}

Real alfven_frequency(const PlasmaBackground &bg, const WaveVector &k)
{
    return bg.H0.dot(k.k) / sqrt_four_pi_rho(bg);
}

Vec3 alfven_group_velocity(const PlasmaBackground &bg) { return bg.H0 / sqrt_four_pi_rho(bg); }

DispersionResult dispersion_relation(const PlasmaBackground &bg, const WaveVector &k)
{
    const auto ms = magnetosonic_speeds(bg, k);
    return {alfven_speed(bg, k), ms.fast, ms.slow, quantum_sound_speed(bg, k), alfven_frequency(bg, k)};
}

Real branch_speed(const PlasmaBackground &bg, const WaveVector &k, ModeBranch branch)
{
    switch (branch) {
    case ModeBranch::Alfven: return alfven_speed(bg, k);
    case ModeBranch::Fast: return magnetosonic_speeds(bg, k).fast;
    case ModeBranch::Slow: return magnetosonic_speeds(bg, k).slow;
    }
    return 0.0;
}

ModePolarization polarization(const PlasmaBackground &bg, const WaveVector &k, ModeBranch branch,
                              Complex normalization, std::optional<StateComponent> component)
{
    ModePolarization out;
    out.branch = branch;
    out.frame = canonical_frame(bg, k);
    out.phase_speed = branch_speed(bg, k, branch);
    out.omega = out.frame.k * out.phase_speed;

    const Real u = out.phase_speed;
    const Real scale = std::sqrt(bg.H0.squaredNorm() / (kFourPi * bg.rho0) + std::pow(quantum_sound_speed(bg, k), 2));
    if (!(u > 1e-14 * scale)) {
        throw Error(ErrorCode::DegenerateBranch, to_string(branch), "branch phase speed is zero, polarization undefined");
    }

    const Real sq = sqrt_four_pi_rho(bg);
    const Real H0x = out.frame.H0x;
    const Real H0y = out.frame.H0y;
    StateVector s = StateVector::Zero();
    using C = StateComponent;
    auto at = [&s](C c) -> Complex & { return s(static_cast<int>(c)); };

    if (branch == ModeBranch::Alfven) {
        // u h_z = -v_z H0x with u = |H0x|/sqrt(4 pi rho0).
        at(C::Hz) = 1.0;
        at(C::Vz) = -std::copysign(1.0, H0x) / sq;
    } else {
        // Compressive block in (v_x, b) with b = h_y / sqrt(4 pi rho0):
        //   (u^2 - U0^2) v_x - w u b = 0,   -w u v_x + (u^2 - uA^2) b = 0.
        const Real U0sq = std::pow(quantum_sound_speed(bg, k), 2);
        const Real uAsq = H0x * H0x / (kFourPi * bg.rho0);
        const Real w = H0y / sq;
        const Real a11 = u * u - U0sq;
        const Real a22 = u * u - uAsq;
        const Real off = -w * u;
        const Real row1 = std::hypot(a11, off);
        const Real row2 = std::hypot(off, a22);

        Real vx = 0.0;
        Real b = 0.0;
        if (std::max(row1, row2) <= 1e-13 * scale * scale) {
            // u = U0 = uA with H0y = 0: the fast branch is taken acoustic.
            (branch == ModeBranch::Fast ? vx : b) = 1.0;
        } else if (row1 >= row2) {
            vx = -off;
            b = a11;
        } else {
            vx = a22;
            b = -off;
        }
        const Real hy = b * sq;
        at(C::Vx) = vx;
        at(C::Hy) = hy;
        at(C::Vy) = -H0x * hy / (kFourPi * bg.rho0 * u);
        at(C::Rho) = bg.rho0 * vx / u;
    }

    if (!component) {
        if (branch == ModeBranch::Alfven) {
            component = C::Hz;
        } else {
            component = std::abs(at(C::Vx)) > 1e-8 * s.segment<3>(0).norm() ? C::Vx : C::Hy;
        }
    }
    const Complex pivot = at(*component);
    if (std::abs(pivot) <= 1e-14 * s.norm()) {
        throw Error(ErrorCode::InvalidArgument, "component", "requested normalization component vanishes on this branch");
    }
    s *= normalization / pivot;
    out.canonical = from_state(s);
    return out;
}

SystemMatrix linearized_matrix(const PlasmaBackground &bg, const WaveVector &k, const DissipationParams &diss)
{
    const Vec3 &kv = k.k;
    const Real k2 = kv.squaredNorm();
    const Real U0sq = std::pow(quantum_sound_speed(bg, k), 2);
    const Eigen::Matrix3d Hx = cross_matrix(bg.H0);
    const Eigen::Matrix3d Kx = cross_matrix(kv);

    SystemMatrix m = SystemMatrix::Zero();
    // omega v = k U0^2 rho'/rho0 + H0 x (k x h) / (4 pi rho0)
    m.block<3, 3>(0, 3) = (Hx * Kx / (kFourPi * bg.rho0)).cast<Complex>();
    m.block<3, 1>(0, 6) = (kv * (U0sq / bg.rho0)).cast<Complex>();
    // omega h = k x (H0 x v)
    m.block<3, 3>(3, 0) = (Kx * Hx).cast<Complex>();
    // omega rho' = rho0 k.v
    m.block<1, 3>(6, 0) = (bg.rho0 * kv.transpose()).cast<Complex>();

    if (diss.eta != 0.0 || diss.xi != 0.0) {
        const Eigen::Matrix3d viscous = diss.eta / bg.rho0 * k2 * Eigen::Matrix3d::Identity()
                                        + (diss.xi + diss.eta / 3.0) / bg.rho0 * (kv * kv.transpose());
        m.block<3, 3>(0, 0) += Complex(0.0, -1.0) * viscous.cast<Complex>();
    }
    return m;
}

std::array<Complex, kStateSize> matrix_spectrum(const PlasmaBackground &bg, const WaveVector &k,
                                                const DissipationParams &diss)
{
    Eigen::ComplexEigenSolver<SystemMatrix> solver(linearized_matrix(bg, k, diss), false);
    std::array<Complex, kStateSize> out{};
    for (int i = 0; i < kStateSize; ++i) {
        out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    }
    std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

std::array<Real, kStateSize> closed_form_spectrum(const PlasmaBackground &bg, const WaveVector &k)
{
    const Real kn = k.norm();
    const auto d = dispersion_relation(bg, k);
    std::array<Real, kStateSize> out{-kn * d.u_fast, -kn * d.u_alfven, -kn * d.u_slow, 0.0,
                                     kn * d.u_slow,  kn * d.u_alfven,  kn * d.u_fast};
    std::sort(out.begin(), out.end());
    return out;
}

Real plane_wave_residual(const PlasmaBackground &bg, const WaveVector &k, Complex omega,
                         const PerturbationAmplitudes &amps, const DissipationParams &diss)
{
    const StateVector s = to_state(amps);
    const StateVector r = omega * s - linearized_matrix(bg, k, diss) * s;
    return r.cwiseAbs().maxCoeff();
}

Real mode_energy(const PlasmaBackground &bg, Real k_norm, const PerturbationAmplitudes &amps)
{
    const Real U0sq = std::pow(quantum_sound_speed(bg, WaveVector{Vec3(k_norm, 0.0, 0.0)}), 2);
    return 0.5 * bg.rho0 * amps.v.squaredNorm() + amps.h.squaredNorm() / (2.0 * kFourPi)
           + 0.5 * U0sq * std::norm(amps.rho_prime) / bg.rho0;
}

} // namespace qmhd

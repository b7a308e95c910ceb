#pragma once

#include "qmhd/config.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace qmhd {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidationFailed = 1,
    kExitConfigError = 2,
    kExitNumericalFailure = 3,
};

/// Fixed-precision scientific text (17 significant digits).
[[nodiscard]] std::string format_real(Real value);

/// Seeded draws that do not depend on the standard library's distributions,
/// so reports are identical across toolchains.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    [[nodiscard]] Real uniform(Real lo, Real hi);
    [[nodiscard]] Vec3 unit_vector();
    /// rho0 in [0.1, 10], |H0_i| <= 3, u0 in [0, 3], m in [0.5, 5], hbar in [0, 2].
    [[nodiscard]] PlasmaBackground background();
    /// Random direction with |k| in [0.1, 5].
    [[nodiscard]] WaveVector wave_vector();

private:
    std::mt19937_64 engine_;
};

[[nodiscard]] std::string cmd_dispersion(const RunConfig &config);
[[nodiscard]] std::string cmd_simulate(const RunConfig &config);
[[nodiscard]] std::string cmd_soliton(const RunConfig &config);

struct ValidateOptions {
    /// Perturbs the closed-form side of the eigen-oracle check (test mode).
    bool inject_fault = false;
};

struct CheckResult {
    std::string name;
    Real measured = 0.0;
    Real tolerance = 0.0;
    bool passed = false;
};

struct ValidateReport {
    std::vector<CheckResult> checks;
    std::string text;

    [[nodiscard]] bool passed() const;
};

[[nodiscard]] ValidateReport cmd_validate(std::uint64_t seed, ValidateOptions options = {});

} // namespace qmhd

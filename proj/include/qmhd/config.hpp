#pragma once

#include "qmhd/core.hpp"
#include "qmhd/dispersion.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qmhd {

struct GridConfig {
    std::size_t n_points = 64;
    Real length = 2.0 * kPi;
};

struct ScanConfig {
    Real k_min = 0.25;
    Real k_max = 8.0;
    std::size_t k_count = 32;
    ModeBranch branch = ModeBranch::Alfven;
    int k_index = 1;
    Real periods = 10.0;
    Real samples_per_period = 32.0;
    Real amplitude = 1e-3;
};

struct SolitonConfig {
    Real b = 0.25;
    Real mass = 1.0;
    Real hbar = 1.0;
    int k_index = 2; // carrier wavenumber in units of 2 pi / length
    Real d = 0.0;
    std::size_t n_points = 512;
    Real length = 24.0;
    Real transits = 1.0;
    Real dt = 0.0; // 0 selects 0.1 m dx^2 / hbar
};

/// Everything a CLI run needs. Keys outside any section (`seed`, `out`) are global.
struct RunConfig {
    PlasmaBackground background{1.0, 0.0, Vec3(3.0, 1.5, 0.0), 1.0, 1.0, 0.5};
    GridConfig grid;
    DissipationParams dissipation;
    SolitonConfig soliton;
    ScanConfig scan;
    std::string out;
    std::uint64_t seed = 20240611;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, const std::string &what);

    /// 0 when the error is not tied to a line (overrides, validation).
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Parses `key = value` lines with `#` comments and `[section]` headers.
[[nodiscard]] RunConfig parse_config(std::string_view text);
[[nodiscard]] RunConfig load_config(const std::string &path);

/// Writes every key; parse_config(serialize_config(c)) reproduces c exactly.
[[nodiscard]] std::string serialize_config(const RunConfig &config);

/// Applies `section.key` (or global `key`) = value.
void apply_override(RunConfig &config, std::string_view qualified_key, std::string_view value);

/// All `section.key` names accepted by apply_override.
[[nodiscard]] std::vector<std::string> config_keys();

/// Physics and grid checks, run before any computation. Throws ConfigError.
void validate_config(const RunConfig &config);

[[nodiscard]] ModeBranch parse_branch(std::string_view text);

} // namespace qmhd

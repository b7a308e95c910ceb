#pragma once

#include "qmhd/core.hpp"

#include <unsupported/Eigen/FFT>

#include <cstddef>
#include <span>
#include <vector>

namespace qmhd {

/// Uniform periodic grid on [origin, origin + length).
struct PeriodicGrid {
    std::size_t n_points = 0;
    Real length = 0.0;
    Real origin = 0.0;

    [[nodiscard]] Real dx() const { return length / static_cast<Real>(n_points); }
    [[nodiscard]] Real x(std::size_t i) const { return origin + static_cast<Real>(i) * dx(); }
    [[nodiscard]] Real dk() const { return 2.0 * kPi / length; }
    /// Signed wavenumber of FFT bin `j` (bins past n/2 are negative).
    [[nodiscard]] Real wavenumber(std::size_t j) const;
    [[nodiscard]] std::vector<Real> wavenumbers() const;
};

/// Throws InvalidGrid unless n is a power of two >= `min_points` and length > 0.
void validate_grid(const PeriodicGrid &grid, std::size_t min_points);

/// Centered grid [-length/2, length/2).
[[nodiscard]] PeriodicGrid centered_grid(std::size_t n_points, Real length);

/// Forward/inverse FFT with the conventions used throughout: forward is
/// unnormalized, inverse carries 1/n.
class Fft {
public:
    std::vector<Complex> forward(std::span<const Complex> x);
    std::vector<Complex> inverse(std::span<const Complex> x);
    void forward(std::span<const Complex> x, std::vector<Complex> &out);
    void inverse(std::span<const Complex> x, std::vector<Complex> &out);

private:
    Eigen::FFT<Real> fft_;
    std::vector<Complex> in_;
};

/// d^order/dx^order of a smooth periodic real field by FFT. The Nyquist bin is
/// dropped for odd orders.
[[nodiscard]] std::vector<Real> spectral_derivative(std::span<const Real> f, const PeriodicGrid &grid, int order);
[[nodiscard]] std::vector<Complex> spectral_derivative(std::span<const Complex> f, const PeriodicGrid &grid, int order);

} // namespace qmhd

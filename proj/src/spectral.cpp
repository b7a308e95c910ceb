#include "qmhd/spectral.hpp"

#include <bit>
#include <cmath>

namespace qmhd {

Real PeriodicGrid::wavenumber(std::size_t j) const
{
    const auto n = static_cast<long long>(n_points);
    auto jj = static_cast<long long>(j);
    if (jj >= n / 2) {
        jj -= n;
    }
    return static_cast<Real>(jj) * dk();
}

std::vector<Real> PeriodicGrid::wavenumbers() const
{
    std::vector<Real> k(n_points);
    for (std::size_t j = 0; j < n_points; ++j) {
        k[j] = wavenumber(j);
    }
    return k;
}

void validate_grid(const PeriodicGrid &grid, std::size_t min_points)
{
    if (grid.n_points < min_points || !std::has_single_bit(grid.n_points)) {
        throw Error(ErrorCode::InvalidGrid, "n_points",
                    "grid needs a power-of-two point count >= " + std::to_string(min_points));
    }
    if (!(grid.length > 0.0) || !std::isfinite(grid.length)) {
        throw Error(ErrorCode::InvalidGrid, "length", "grid length must be positive and finite");
    }
    if (!std::isfinite(grid.origin)) {
        throw Error(ErrorCode::InvalidGrid, "origin", "grid origin must be finite");
    }
}

PeriodicGrid centered_grid(std::size_t n_points, Real length) { return {n_points, length, -0.5 * length}; }

std::vector<Complex> Fft::forward(std::span<const Complex> x)
{
    std::vector<Complex> out;
    forward(x, out);
    return out;
}

std::vector<Complex> Fft::inverse(std::span<const Complex> x)
{
    std::vector<Complex> out;
    inverse(x, out);
    return out;
}

void Fft::forward(std::span<const Complex> x, std::vector<Complex> &out)
{
    in_.assign(x.begin(), x.end());
    fft_.fwd(out, in_);
}

void Fft::inverse(std::span<const Complex> x, std::vector<Complex> &out)
{
    in_.assign(x.begin(), x.end());
    fft_.inv(out, in_);
}

std::vector<Complex> spectral_derivative(std::span<const Complex> f, const PeriodicGrid &grid, int order)
{
    Fft fft;
    auto hat = fft.forward(f);
    const std::size_t n = grid.n_points;
    for (std::size_t j = 0; j < n; ++j) {
        if (order % 2 == 1 && j == n / 2) {
            hat[j] = 0.0;
            continue;
        }
        Complex factor{1.0, 0.0};
        for (int o = 0; o < order; ++o) {
            factor *= Complex(0.0, grid.wavenumber(j));
        }
        hat[j] *= factor;
    }
    return fft.inverse(hat);
}

std::vector<Real> spectral_derivative(std::span<const Real> f, const PeriodicGrid &grid, int order)
{
    std::vector<Complex> c(f.begin(), f.end());
    const auto d = spectral_derivative(std::span<const Complex>(c), grid, order);
    std::vector<Real> out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        out[i] = d[i].real();
    }
    return out;
}

} // namespace qmhd

#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "npd/grid.hpp"

namespace npd {

using Complex = std::complex<double>;

/// A real scalar field sampled at the points of a Grid.
class RealField {
public:
    RealField() = default;
    /// Zero field on `grid`.
    explicit RealField(GridPtr grid);
    RealField(GridPtr grid, std::vector<double> values);

    /// Samples f(x) at every grid point; x has grid.dim() components.
    static RealField from_function(GridPtr grid, const std::function<double(std::span<const double>)>& f);
    static RealField constant(GridPtr grid, double value);

    const GridPtr& grid_ptr() const noexcept { return grid_; }
    const Grid& grid() const noexcept { return *grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    double mean() const noexcept;
    double min() const noexcept;
    double max() const noexcept;
    double max_abs() const noexcept;
    /// Index of the first non-finite value, or size() when all are finite.
    std::size_t first_non_finite() const noexcept;
    bool all_finite() const noexcept { return first_non_finite() == size(); }

    RealField& operator+=(const RealField& other);
    RealField& operator-=(const RealField& other);
    RealField& operator*=(double s) noexcept;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);
RealField operator*(double s, RealField a);
/// Pointwise product.
RealField hadamard(const RealField& a, const RealField& b);

/// Fourier coefficients of a real field on the full wavenumber lattice,
/// indexed like the grid (see Grid for the ordering).
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(GridPtr grid);
    SpectralField(GridPtr grid, std::vector<Complex> coeffs);

    const GridPtr& grid_ptr() const noexcept { return grid_; }
    const Grid& grid() const noexcept { return *grid_; }
    std::size_t size() const noexcept { return coeffs_.size(); }

    std::span<const Complex> coeffs() const noexcept { return coeffs_; }
    std::span<Complex> coeffs() noexcept { return coeffs_; }
    const Complex& operator[](std::size_t i) const noexcept { return coeffs_[i]; }
    Complex& operator[](std::size_t i) noexcept { return coeffs_[i]; }

    /// Largest |c(-k) - conj(c(k))| relative to max |c|; 0 for the zero field.
    double hermitian_defect() const noexcept;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double s) noexcept;

private:
    GridPtr grid_;
    std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

}  // namespace npd

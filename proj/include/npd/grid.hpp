#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace npd {

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Uniform periodic grid on the torus [0, L_0) x ... x [0, L_{d-1}).
///
/// Points are stored row-major with axis 0 slowest. Wavenumbers follow the
/// FFT ordering: index i maps to the integer m = i for i <= n/2 and m = i - n
/// otherwise, so the lattice per axis is {-n/2+1, ..., n/2} and the physical
/// wavenumber is m * 2 pi / L. Index n/2 is the Nyquist mode.
///
/// Grids are immutable and shared by reference between fields; construct
/// them through Grid::create.
class Grid {
public:
    static constexpr double kTwoPi = 2.0 * std::numbers::pi;

    static GridPtr create(int dim, std::span<const int> n, std::span<const double> length = {});
    static GridPtr create(int dim, int n, double length = kTwoPi);

    int dim() const noexcept { return dim_; }
    int n(int axis) const noexcept { return n_[axis]; }
    double length(int axis) const noexcept { return length_[axis]; }
    double spacing(int axis) const noexcept { return length_[axis] / n_[axis]; }
    double min_spacing() const noexcept;
    std::size_t size() const noexcept { return size_; }
    double volume() const noexcept;

    /// Physical wavenumber k_j at flat index.
    std::span<const double> wavenumber(int axis) const noexcept { return k_[axis]; }
    /// Wavenumber used by odd-order derivatives: k_j with the Nyquist mode zeroed.
    std::span<const double> derivative_wavenumber(int axis) const noexcept { return kd_[axis]; }
    /// Integer lattice coordinate m_j at flat index.
    std::span<const int> lattice(int axis) const noexcept { return m_[axis]; }
    std::span<const double> k_squared() const noexcept { return k2_; }
    /// 1 where every |m_j| <= n_j/3 (kept by the 2/3 rule), 0 otherwise.
    std::span<const unsigned char> dealias_mask() const noexcept { return keep_; }
    /// Flat index of the lattice point -m (with the Nyquist index mapping to itself).
    std::span<const std::size_t> conjugate_index() const noexcept { return conj_; }

    /// Grid coordinate x_j at flat index.
    double coordinate(int axis, std::size_t flat) const noexcept;
    /// Flat index of the lattice vector m (components in (-n/2, n/2]).
    std::size_t flat_index_of_mode(std::span<const int> m) const;

    bool same_shape(const Grid& other) const noexcept;
    std::array<int, 3> shape() const noexcept { return n_; }

private:
    Grid(int dim, std::array<int, 3> n, std::array<double, 3> length);

    int dim_;
    std::array<int, 3> n_{1, 1, 1};
    std::array<double, 3> length_{1.0, 1.0, 1.0};
    std::array<std::size_t, 3> stride_{0, 0, 0};
    std::size_t size_;
    std::array<std::vector<double>, 3> k_;
    std::array<std::vector<double>, 3> kd_;
    std::array<std::vector<int>, 3> m_;
    std::vector<double> k2_;
    std::vector<unsigned char> keep_;
    std::vector<std::size_t> conj_;
};

}  // namespace npd

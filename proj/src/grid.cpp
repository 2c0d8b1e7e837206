#include "npd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "npd/errors.hpp"

namespace npd {

namespace {

int lattice_of_index(int i, int n) { return i <= n / 2 ? i : i - n; }

}  // namespace

GridPtr Grid::create(int dim, std::span<const int> n, std::span<const double> length) {
    if (dim != 2 && dim != 3) {
        throw PreconditionError("grid: dim must be 2 or 3, got " + std::to_string(dim));
    }
    if (n.size() != static_cast<std::size_t>(dim)) {
        throw PreconditionError("grid: expected " + std::to_string(dim) + " axis sizes, got " +
                                std::to_string(n.size()));
    }
    if (!length.empty() && length.size() != static_cast<std::size_t>(dim)) {
        throw PreconditionError("grid: expected " + std::to_string(dim) + " axis lengths, got " +
                                std::to_string(length.size()));
    }
    std::array<int, 3> nn{1, 1, 1};
    std::array<double, 3> ll{1.0, 1.0, 1.0};
    for (int a = 0; a < dim; ++a) {
        if (n[a] < 8 || n[a] % 2 != 0) {
            std::ostringstream os;
            os << "grid: n[" << a << "] = " << n[a] << " must be even and >= 8";
            throw PreconditionError(os.str());
        }
        nn[a] = n[a];
        ll[a] = length.empty() ? kTwoPi : length[a];
        if (!(ll[a] > 0.0) || !std::isfinite(ll[a])) {
            std::ostringstream os;
            os << "grid: length[" << a << "] = " << ll[a] << " must be positive and finite";
            throw PreconditionError(os.str());
        }
    }
    return GridPtr(new Grid(dim, nn, ll));
}

GridPtr Grid::create(int dim, int n, double length) {
    const std::array<int, 3> nn{n, n, n};
    const std::array<double, 3> ll{length, length, length};
    return create(dim, std::span<const int>(nn.data(), dim), std::span<const double>(ll.data(), dim));
}

Grid::Grid(int dim, std::array<int, 3> n, std::array<double, 3> length)
    : dim_(dim), n_(n), length_(length) {
    size_ = 1;
    for (int a = dim_ - 1; a >= 0; --a) {
        stride_[a] = size_;
        size_ *= static_cast<std::size_t>(n_[a]);
    }
    k2_.assign(size_, 0.0);
    keep_.assign(size_, 1);
    conj_.assign(size_, 0);
    for (int a = 0; a < dim_; ++a) {
        k_[a].resize(size_);
        kd_[a].resize(size_);
        m_[a].resize(size_);
    }
    for (std::size_t flat = 0; flat < size_; ++flat) {
        std::size_t conj = 0;
        for (int a = 0; a < dim_; ++a) {
            const int i = static_cast<int>((flat / stride_[a]) % n_[a]);
            const int m = lattice_of_index(i, n_[a]);
            const double k = m * kTwoPi / length_[a];
            m_[a][flat] = m;
            k_[a][flat] = k;
            kd_[a][flat] = (2 * i == n_[a]) ? 0.0 : k;
            k2_[flat] += k * k;
            if (3 * std::abs(m) > n_[a]) keep_[flat] = 0;
            conj += static_cast<std::size_t>((n_[a] - i) % n_[a]) * stride_[a];
        }
        conj_[flat] = conj;
    }
}

double Grid::min_spacing() const noexcept {
    double h = spacing(0);
    for (int a = 1; a < dim_; ++a) h = std::min(h, spacing(a));
    return h;
}

double Grid::volume() const noexcept {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= length_[a];
    return v;
}

double Grid::coordinate(int axis, std::size_t flat) const noexcept {
    const auto i = (flat / stride_[axis]) % static_cast<std::size_t>(n_[axis]);
    return static_cast<double>(i) * spacing(axis);
}

std::size_t Grid::flat_index_of_mode(std::span<const int> m) const {
    if (m.size() != static_cast<std::size_t>(dim_)) {
        throw PreconditionError("grid: mode has wrong dimension");
    }
    std::size_t flat = 0;
    for (int a = 0; a < dim_; ++a) {
        if (m[a] <= -n_[a] / 2 || m[a] > n_[a] / 2) {
            throw PreconditionError("grid: mode component " + std::to_string(m[a]) +
                                    " outside the lattice of axis " + std::to_string(a));
        }
        const int i = m[a] >= 0 ? m[a] : m[a] + n_[a];
        flat += static_cast<std::size_t>(i) * stride_[a];
    }
    return flat;
}

bool Grid::same_shape(const Grid& other) const noexcept {
    if (dim_ != other.dim_) return false;
    for (int a = 0; a < dim_; ++a) {
        if (n_[a] != other.n_[a] || length_[a] != other.length_[a]) return false;
    }
    return true;
}

}  // namespace npd

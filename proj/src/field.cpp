#include "npd/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "npd/errors.hpp"

namespace npd {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (&a != &b && !a.same_shape(b)) throw PreconditionError(std::string(what) + ": grid mismatch");
}

}  // namespace

RealField::RealField(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

RealField::RealField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->size()) {
        throw PreconditionError("RealField: " + std::to_string(values_.size()) + " values for a grid of " +
                                std::to_string(grid_->size()) + " points");
    }
}

RealField RealField::from_function(GridPtr grid, const std::function<double(std::span<const double>)>& f) {
    RealField out(grid);
    std::array<double, 3> x{};
    const int d = grid->dim();
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (int a = 0; a < d; ++a) x[a] = grid->coordinate(a, i);
        out.values_[i] = f(std::span<const double>(x.data(), d));
    }
    return out;
}

RealField RealField::constant(GridPtr grid, double value) {
    RealField out(std::move(grid));
    std::fill(out.values_.begin(), out.values_.end(), value);
    return out;
}

double RealField::mean() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v;
    return values_.empty() ? 0.0 : s / static_cast<double>(values_.size());
}

double RealField::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

double RealField::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

double RealField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

std::size_t RealField::first_non_finite() const noexcept {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) return i;
    }
    return values_.size();
}

RealField& RealField::operator+=(const RealField& other) {
    require_same_grid(*grid_, *other.grid_, "RealField +=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

RealField& RealField::operator-=(const RealField& other) {
    require_same_grid(*grid_, *other.grid_, "RealField -=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

RealField& RealField::operator*=(double s) noexcept {
    for (double& v : values_) v *= s;
    return *this;
}

RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }
RealField operator*(double s, RealField a) { return a *= s; }

RealField hadamard(const RealField& a, const RealField& b) {
    require_same_grid(a.grid(), b.grid(), "hadamard");
    RealField out(a.grid_ptr());
    auto o = out.values();
    auto x = a.values();
    auto y = b.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] * y[i];
    return out;
}

SpectralField::SpectralField(GridPtr grid) : grid_(std::move(grid)), coeffs_(grid_->size()) {}

SpectralField::SpectralField(GridPtr grid, std::vector<Complex> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_->size()) {
        throw PreconditionError("SpectralField: coefficient count does not match the grid");
    }
}

double SpectralField::hermitian_defect() const noexcept {
    const auto conj = grid_->conjugate_index();
    double scale = 0.0;
    double defect = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        scale = std::max(scale, std::abs(coeffs_[i]));
        defect = std::max(defect, std::abs(coeffs_[conj[i]] - std::conj(coeffs_[i])));
    }
    return scale > 0.0 ? defect / scale : 0.0;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    require_same_grid(*grid_, *other.grid_, "SpectralField +=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    require_same_grid(*grid_, *other.grid_, "SpectralField -=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) noexcept {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

}  // namespace npd

#pragma once

#include <span>
#include <vector>

#include "npd/field.hpp"

/// Fourier machinery on the periodic grid.
///
/// Convention: f(x) = sum_k fhat(k) exp(i k.x). The forward transform carries
/// the 1/prod(n) factor, the inverse is unnormalized. All operations are pure.
namespace npd::spectral {

using VectorSpectral = std::vector<SpectralField>;

/// Relative Hermitian defect above which inverse_transform refuses its input.
inline constexpr double kHermitianTolerance = 1e-9;
/// |mean(rho)| allowed by solve_poisson, relative to the rms of rho.
inline constexpr double kNeutralityTolerance = 1e-10;

/// Coefficients are exactly Hermitian. Throws PreconditionError naming the
/// first non-finite index.
SpectralField forward_transform(const RealField& f);
/// Throws PreconditionError when the coefficients are not Hermitian within
/// kHermitianTolerance (the result would not be real).
RealField inverse_transform(const SpectralField& fhat);

/// d/dx_axis, with the Nyquist mode of that axis zeroed.
SpectralField derivative(const SpectralField& fhat, int axis);
VectorSpectral gradient(const SpectralField& fhat);
SpectralField laplacian(const SpectralField& fhat);
/// Divergence built from the same derivative wavenumbers as gradient.
SpectralField divergence(std::span<const SpectralField> vhat);

/// 2/3 rule: zero every coefficient with some |m_j| > n_j/3.
SpectralField dealias(const SpectralField& fhat);
void dealias_in_place(SpectralField& fhat) noexcept;

/// Solves -eps Laplace(phi) = rho with the zero-mean gauge phi(0) = 0.
/// Throws PreconditionError when rho is not neutral (reports the mean).
SpectralField solve_poisson(const SpectralField& rho_hat, double epsilon);

/// Leray projector I - k k^T / |k|^2 applied per mode, using the derivative
/// wavenumbers so the discrete divergence of the result vanishes exactly.
/// Modes with zero derivative wavenumber pass through unchanged.
VectorSpectral leray_project(std::span<const SpectralField> fhat);

/// volume * sum_k |fhat(k)|^2, the squared L2 norm by Parseval.
double parseval_norm_squared(const SpectralField& fhat);
/// volume * sum_k conj(a(k)) b(k), real part: the L2 inner product.
double inner_product(const SpectralField& a, const SpectralField& b);

}  // namespace npd::spectral

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "npd/model.hpp"

namespace npd::diagnostics {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
/// Exponents tracked for rho and sigma - sigma_bar.
inline constexpr std::array<double, 5> kLpExponents{2.0, 3.0, 4.0, 6.0, kInf};

/// (volume * mean |f|^p)^(1/p); p = infinity gives max |f|. Throws for p < 1.
double lp_norm(const RealField& f, double p);
/// L^p norm of the pointwise Euclidean magnitude of a vector field.
double lp_norm(std::span<const RealField> v, double p);
/// (volume * sum_k (1 + |k|^2)^s |fhat(k)|^2)^(1/2), s in {0, 1, 2, 3}.
double sobolev_norm(const RealField& f, int s);
double sobolev_norm(const SpectralField& fhat, int s);

/// Balance laws evaluated at one instant with time derivatives taken from the
/// tendencies. Each residual is the signed sum of its terms; scale is the
/// largest term magnitude.
///   energy:   1/2 d/dt |grad phi|^2 + |u|^2/eps + D/eps^2 |rho|^2 + D/eps int sigma |grad phi|^2
///   lyapunov: 1/2 d/dt (|rho|^2 + |sigma - sigma_bar|^2) + D (|grad rho|^2 + |grad sigma|^2)
///             + D/eps int sigma rho^2
struct IdentityResiduals {
    double energy = 0.0;
    double energy_scale = 0.0;
    double lyapunov = 0.0;
    double lyapunov_scale = 0.0;

    double energy_relative() const noexcept { return energy_scale > 0.0 ? std::abs(energy) / energy_scale : 0.0; }
    double lyapunov_relative() const noexcept {
        return lyapunov_scale > 0.0 ? std::abs(lyapunov) / lyapunov_scale : 0.0;
    }
};

IdentityResiduals identity_residuals(const IonState& state, const Params& params);
IdentityResiduals identity_residuals(const StateFields& fields, const RealField& sigma, const Params& params);

/// Curl of the Darcy law against the curl of the Lorentz force:
/// 2D  curl_perp u = -grad_perp rho . grad phi;  3D  curl u = -grad rho x grad phi.
struct CurlCheck {
    double residual = 0.0;  ///< L2 norm of the difference
    double scale = 0.0;     ///< 1 + |grad rho|_2 |grad phi|_inf
};
CurlCheck curl_identity(const StateFields& fields);

struct DiagnosticsOptions {
    /// Exponents r for the W^{1,r} diagnostics; the CSV carries the largest.
    std::vector<double> r_values{2.0, 4.0};
};

struct DiagnosticsRecord {
    double time = 0.0;
    std::array<double, 5> lp_rho{};        ///< indexed like kLpExponents
    std::array<double, 5> lp_sigma_dev{};  ///< indexed like kLpExponents
    double l2_grad_rho = 0.0;
    double l2_grad_sigma = 0.0;
    std::vector<std::pair<double, double>> lr_grad_rho;  ///< (r, |grad rho|_r)
    double l2_grad_phi = 0.0;
    double linf_grad_phi = 0.0;
    double l2_u = 0.0;
    std::vector<std::pair<double, double>> lr_grad_u;  ///< (r, |grad u|_r)
    double l2_rho_grad_phi = 0.0;                       ///< of the product the projector acts on
    double h2_rho = 0.0, h2_sigma = 0.0, h3_rho = 0.0, h3_sigma = 0.0;
    double l2_lap_rho = 0.0, l2_lap_sigma = 0.0;
    double l2_grad_lap_rho = 0.0, l2_grad_lap_sigma = 0.0;
    double min_c1 = 0.0, min_c2 = 0.0;
    double mean_rho = 0.0, mean_sigma = 0.0;
    IdentityResiduals identities;
    CurlCheck curl;

    double l2_rho() const noexcept { return lp_rho[0]; }
    double l2_sigma_dev() const noexcept { return lp_sigma_dev[0]; }
    /// |rho|^2 + |sigma - sigma_bar|^2.
    double lyapunov_functional() const noexcept { return lp_rho[0] * lp_rho[0] + lp_sigma_dev[0] * lp_sigma_dev[0]; }
    double lr_grad_rho_max_r() const noexcept { return lr_grad_rho.empty() ? 0.0 : lr_grad_rho.back().second; }
    double lr_grad_u_max_r() const noexcept { return lr_grad_u.empty() ? 0.0 : lr_grad_u.back().second; }
};

DiagnosticsRecord compute_record(const IonState& state, const Params& params, const DiagnosticsOptions& options = {});

/// Log-linear least-squares fit value(t) ~ prefactor * exp(-rate t).
struct DecayFit {
    double rate = 0.0;
    double prefactor = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
    double residual = 0.0;  ///< RMS of the fit in log space
    std::size_t samples = 0;
};

/// Uses the samples with t0 <= t <= t1. Requires at least five of them, all
/// strictly positive; throws PreconditionError otherwise.
DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values, double t0, double t1);

}  // namespace npd::diagnostics

#pragma once

#include <optional>
#include <vector>

#include "npd/field.hpp"
#include "npd/spectral.hpp"

namespace npd {

/// Physical constants. The Darcy friction coefficient is fixed to one.
struct Params {
    double epsilon = 1.0;      ///< Poisson coefficient, proportional to the squared Debye length.
    double diffusivity = 1.0;  ///< Common ionic diffusivity D.

    /// Throws PreconditionError unless both values are positive and finite.
    void validate() const;
};

/// Charge density rho = c1 - c2 and total concentration sigma = c1 + c2.
struct IonState {
    RealField rho;
    RealField sigma;
    double time = 0.0;

    const Grid& grid() const noexcept { return rho.grid(); }
    const GridPtr& grid_ptr() const noexcept { return rho.grid_ptr(); }

    RealField c1() const;
    RealField c2() const;
    /// Spatial mean of sigma; conserved by the dynamics.
    double sigma_bar() const noexcept { return sigma.mean(); }
    /// min over the grid of min(c1, c2).
    double min_concentration() const noexcept;
    bool all_finite() const noexcept { return rho.all_finite() && sigma.all_finite(); }
};

/// Tolerances used by from_concentrations and the admissibility checks.
inline constexpr double kNegativityTolerance = 1e-12;
inline constexpr double kMeanTolerance = 1e-10;
inline constexpr double kOrderingTolerance = 1e-8;

/// Builds (rho, sigma) at time 0. Rejects negative concentrations (beyond
/// kNegativityTolerance) and unequal species means, naming the location.
IonState from_concentrations(const RealField& c1, const RealField& c2);

/// Non-throwing admissibility report: neutrality, sigma >= |rho| - tol.
struct Admissibility {
    bool neutral = true;
    bool ordered = true;
    double mean_rho = 0.0;
    double worst_ordering = 0.0;  ///< min over the grid of sigma - |rho|
};
Admissibility check_admissible(const IonState& state);

/// Zero-mean potential solving -eps Laplace(phi) = rho.
RealField potential(const IonState& state, const Params& params);

struct VelocitySolve {
    std::vector<RealField> u;
    std::optional<RealField> pressure;
    RealField phi;
};

/// Darcy velocity u = P(-rho grad phi), the product formed from 2/3-truncated
/// factors and truncated again. The pressure is recovered only on request.
VelocitySolve velocity(const IonState& state, const Params& params, bool with_pressure = false);

struct Tendency {
    RealField drho;
    RealField dsigma;
};

/// Right-hand sides of the (rho, sigma) system with Laplace(phi) = -rho/eps
/// substituted:
///   drho/dt   = -u.grad rho   + D (Laplace rho   + grad sigma.grad phi - sigma rho / eps)
///   dsigma/dt = -u.grad sigma + D (Laplace sigma + grad rho.grad phi   - rho^2 / eps)
Tendency tendency(const IonState& state, const Params& params);

/// Everything the right-hand side needs, computed once per evaluation.
/// Fields with the `_t` suffix are 2/3-truncated grid fields.
struct StateFields {
    GridPtr grid;
    SpectralField rho_hat;
    SpectralField sigma_hat;
    SpectralField phi_hat;
    RealField rho_t;
    RealField sigma_t;
    std::vector<RealField> grad_rho_t;
    std::vector<RealField> grad_sigma_t;
    std::vector<RealField> grad_phi_t;
    /// -rho_t grad phi_t on the grid, before projection.
    std::vector<RealField> force;
    std::vector<SpectralField> u_hat;
    std::vector<RealField> u;
};

StateFields evaluate_fields(const SpectralField& rho_hat, const SpectralField& sigma_hat, const Params& params);
StateFields evaluate_fields(const IonState& state, const Params& params);

/// Nonlinear part N of the right-hand side (everything except D Laplace),
/// dealiased, in spectral space.
struct NonlinearTerms {
    SpectralField rho;
    SpectralField sigma;
};
NonlinearTerms nonlinear_terms(const StateFields& fields, const Params& params);

}  // namespace npd

#pragma once

#include <utility>

#include "npd/config.hpp"
#include "npd/field.hpp"

namespace npd {

/// Concentrations (c1, c2) for the configured initial condition.
///
/// - equilibrium:    c1 = c2 = sigma_bar / 2.
/// - single_mode:    c1,2 = sigma_bar/2 +- (a/2) cos(k.x), k = 2 pi m / L; needs a <= sigma_bar.
/// - gaussian_blobs: a periodized Gaussian of c1 at centers[0] and of c2 at
///   centers[1] on a uniform background, scaled so rho = amplitude at the c1
///   centre and mean(sigma) = sigma_bar; rejected when the background would
///   be negative. The scale does not depend on the grid.
/// - random_band:    c_i = sigma_bar/2 (1 + amplitude f_i / sum(|a| + |b|)) with
///   f_i = sum over half-lattice m, 0 < |m| <= k_max, of a cos(k.x) + b sin(k.x).
///   A root SplitMix64(seed) is split once per species (c1 then c2); each child
///   draws (a, b) = 2 u - 1 per mode, modes visited lexicographically over
///   [-k_max, k_max]^d keeping those whose first nonzero component is positive.
///
/// Blob and random fields then subtract half the discrete mean of c1 - c2
/// from c1 and add it to c2, so the charge is neutral to round-off. Throws
/// ConfigError naming the largest admissible amplitude when nonnegativity fails.
std::pair<RealField, RealField> generate_initial(const RunConfig& config);
std::pair<RealField, RealField> generate_initial(const InitialCondition& ic, const GridPtr& grid);

/// from_concentrations(generate_initial(...)).
IonState initial_state(const RunConfig& config);

}  // namespace npd

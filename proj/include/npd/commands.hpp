#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "npd/config.hpp"
#include "npd/diagnostics.hpp"
#include "npd/report.hpp"

/// Subcommands of the npd tool. Each prints a human-readable report to `out`,
/// problems to `err`, and returns the process exit code:
/// 0 success, 1 usage or configuration error, 2 numerical failure.
namespace npd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Integrates the configured run, writing into `out_dir` (the config's
/// output.directory when empty): config.json, diagnostics.csv, snapshots
/// snapshot_<step>.npd at the configured cadence and final.npd. On a numerical
/// failure the last valid state goes to failure.npd.
int cmd_run(const std::string& config_path, const std::string& out_dir, std::ostream& out, std::ostream& err);

enum class Suite { Identities, Theorems, All };

/// Runs the trajectory and checks the identities and/or the decay claims.
/// The theorems suite includes the two-trajectory stability test. When
/// `out_dir` is set it receives report.txt and diagnostics.csv.
int cmd_verify(const std::string& config_path, Suite suite, const std::string& out_dir, std::ostream& out,
               std::ostream& err);

enum class Axis { Space, Time };

/// Refinement ladder. Time: dt, dt/2, dt/4, dt/8 with observed orders from
/// successive differences; passes when every order is >= 1.9. Space: grids
/// n/8, n/4, n/2 compared against the configured n; passes when each rung
/// cuts the error by >= 10x or reaches the round-off floor.
int cmd_convergence(const std::string& config_path, Axis axis, const std::string& out_dir, std::ostream& out,
                    std::ostream& err);

/// Log-linear fit of one diagnostics column over [t0, t1].
int cmd_decay_fit(const std::string& csv_path, const std::string& column, double t0, double t1, std::ostream& out,
                  std::ostream& err);

// Building blocks shared with the tests.

/// Diagnostics options derived from the output section.
diagnostics::DiagnosticsOptions diagnostics_options(const RunConfig& config);

/// Records at the configured diagnostics cadence plus the final state.
struct Trajectory {
    IonState final_state;
    std::vector<diagnostics::DiagnosticsRecord> records;
    std::size_t steps = 0;
    double min_dt = 0.0;
};
Trajectory run_trajectory(const IonState& initial, const RunConfig& config);

/// Report options for `config`: Poincare constant of the box, and the
/// linearized rate D (|k|^2 + sigma_bar / eps) for small single-mode data.
ReportOptions report_options(const RunConfig& config);

/// Mean-zero perturbation cos(k1 x1) / sqrt(V) * delta of rho and the matching
/// sin term of sigma, at combined L2 distance delta from `state`.
IonState perturbed(const IonState& state, double delta);

/// Steps two states in lockstep with a fixed dt and records their combined L2
/// distance sqrt(|d rho|^2 + |d sigma|^2) every `every` steps and at the end.
StabilitySeries stability_series(const IonState& a, const IonState& b, const Params& params, double dt, double t_end,
                                 std::size_t every);

/// Combined L2 distance of (rho, sigma) between states on the same grid.
double state_distance(const IonState& a, const IonState& b);

/// L2 distance between a coarse state and a finer reference, computed mode by
/// mode; reference modes absent from the coarse lattice count in full.
double spectral_distance(const IonState& coarse, const IonState& reference);

}  // namespace npd

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "npd/diagnostics.hpp"

namespace npd {

/// One checked claim: a stable key, PASS/FAIL, and the measured numbers.
struct Verdict {
    std::string key;
    bool pass = true;
    std::string detail;
    /// Failure class printed next to FAIL, e.g. "resolution" for identity
    /// residuals, which vanish in the continuum and so measure discretization.
    std::string failure_class;
};

struct TheoremReport {
    std::vector<Verdict> verdicts;

    bool all_pass() const noexcept;
    /// "key: PASS|FAIL [class] detail", one verdict per line.
    std::string to_text() const;
    void append(const TheoremReport& other);
};

struct ReportOptions {
    /// Decay fits use t in [fit_start_fraction * t_end, t_end].
    double fit_start_fraction = 0.2;
    /// Samples below floor_fraction * max(series) are treated as round-off.
    double floor_fraction = 1e-11;
    double positivity_tolerance = 1e-8;  ///< relative to sigma_bar
    double mean_tolerance = 1e-10;       ///< relative to sigma_bar
    double poincare_slack = 0.05;
    /// Smallest nonzero |k|^2 on the grid; 1 on the 2 pi torus.
    double poincare_constant = 1.0;
    /// Expected L2 decay rate of rho for small single-mode data, D (|k|^2 + sigma_bar / eps).
    std::optional<double> linearized_rate;
    double linearized_tolerance = 0.02;
    /// Minimum ratio of the L^p decay rates of sigma - sigma_bar to the p = 2 rate.
    double uniform_p_ratio = 0.5;
    double identity_tolerance = 1e-6;
    double curl_tolerance = 1e-10;
};

/// Fits `values` over the report window, dropping samples at the round-off
/// floor. Returns std::nullopt when the series carries no decay signal.
struct SeriesFit {
    std::optional<diagnostics::DecayFit> fit;
    std::string note;
};
SeriesFit fit_series(const std::vector<double>& times, const std::vector<double>& values, const ReportOptions& options);

/// Decay, boundedness, positivity and conservation claims along a trajectory.
TheoremReport theorem_report(const std::vector<diagnostics::DiagnosticsRecord>& records, const Params& params,
                             const ReportOptions& options = {});

/// Exact balance laws and velocity identities at every record, plus the
/// monotone decay of |rho|^2 + |sigma - sigma_bar|^2.
TheoremReport identity_report(const std::vector<diagnostics::DiagnosticsRecord>& records,
                              const ReportOptions& options = {});

/// Distance between two trajectories started delta apart.
struct StabilitySeries {
    std::vector<double> times;
    std::vector<double> distances;
    double delta = 0.0;
};
/// distance <= growth_bound * delta for t <= 1, non-increasing for t >= 2.
TheoremReport stability_report(const StabilitySeries& series, double growth_bound = 100.0);

}  // namespace npd

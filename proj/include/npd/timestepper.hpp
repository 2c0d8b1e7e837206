#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "npd/errors.hpp"
#include "npd/model.hpp"

namespace npd {

struct StepperConfig {
    /// Fixed step; std::nullopt selects the adaptive bound of stable_dt.
    std::optional<double> dt;
    double cfl_advective = 0.5;
    double reaction_safety = 0.5;
    double t_end = 1.0;
    std::size_t max_steps = 10'000'000;
    /// A run halts as under-resolved when min(c1, c2) < -positivity_abort * sigma_bar.
    double positivity_abort = 1e-6;

    void validate() const;
};

/// Small, cheap summary of a state, attached to failure reports.
struct StateSummary {
    std::size_t step = 0;
    double time = 0.0;
    double l2_rho = 0.0;
    double l2_sigma_dev = 0.0;
    double max_abs_rho = 0.0;
    double min_concentration = 0.0;

    static StateSummary of(const IonState& state, std::size_t step);
    std::string describe() const;
};

/// The trajectory could not be continued: a stage produced NaN/Inf, the
/// concentrations went negative beyond the abort threshold, or the step
/// budget ran out. Carries the last valid state.
class NumericalFailure : public Error {
public:
    enum class Kind { BlowUp, Positivity, MaxSteps };

    NumericalFailure(Kind kind, const std::string& what, IonState last_valid, StateSummary summary);

    Kind kind() const noexcept { return kind_; }
    const IonState& last_valid() const noexcept { return last_valid_; }
    const StateSummary& summary() const noexcept { return summary_; }

private:
    Kind kind_;
    IonState last_valid_;
    StateSummary summary_;
};

/// One integrating-factor Heun step. The diffusion D Laplace is integrated
/// exactly per mode through exp(-D |k|^2 dt); the nonlinear remainder N uses
///   y1     = E (y0 + dt N(y0))
///   y_new  = E y0 + dt/2 (E N(y0) + N(y1)),   E = exp(-D |k|^2 dt).
/// The k = 0 modes are held fixed (rho exactly neutral, sigma_bar conserved).
/// Throws NumericalFailure(BlowUp) if any stage is non-finite.
IonState step(const IonState& state, double dt, const Params& params);

/// min(cfl * h / max_speed, safety * eps / (D * max_sigma)); the advective
/// bound is dropped when max_speed == 0 and the reaction bound when max_sigma <= 0.
double stable_dt(double max_speed, double max_sigma, double h, const Params& params, const StepperConfig& cfg);
/// As above from the current state, further clipped to the time remaining until t_end.
double stable_dt(const IonState& state, const Params& params, const StepperConfig& cfg);

/// Called with read-only snapshots of the trajectory and the step index.
using Observer = std::function<void(const IonState&, std::size_t)>;

/// Advances to cfg.t_end. The observer sees step 0, every `observe_every`-th
/// step, and the final state.
IonState integrate(const IonState& state0, const Params& params, const StepperConfig& cfg,
                   const Observer& observer = {}, std::size_t observe_every = 1);

}  // namespace npd

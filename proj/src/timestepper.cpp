#include "npd/timestepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace npd {

namespace sp = spectral;

void StepperConfig::validate() const {
    if (dt && (!(*dt > 0.0) || !std::isfinite(*dt))) throw PreconditionError("stepper.dt: must be > 0");
    if (!(cfl_advective > 0.0 && cfl_advective <= 1.0)) {
        throw PreconditionError("stepper.cfl_advective: must be in (0, 1]");
    }
    if (!(reaction_safety > 0.0 && reaction_safety <= 1.0)) {
        throw PreconditionError("stepper.reaction_safety: must be in (0, 1]");
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw PreconditionError("stepper.t_end: must be >= 0");
    if (max_steps == 0) throw PreconditionError("stepper.max_steps: must be > 0");
    if (!(positivity_abort > 0.0)) throw PreconditionError("stepper.positivity_abort: must be > 0");
}

StateSummary StateSummary::of(const IonState& state, std::size_t step) {
    StateSummary s;
    s.step = step;
    s.time = state.time;
    const double cell = state.grid().volume() / static_cast<double>(state.grid().size());
    const double sbar = state.sigma.mean();
    double r2 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < state.rho.size(); ++i) {
        r2 += state.rho[i] * state.rho[i];
        s2 += (state.sigma[i] - sbar) * (state.sigma[i] - sbar);
    }
    s.l2_rho = std::sqrt(cell * r2);
    s.l2_sigma_dev = std::sqrt(cell * s2);
    s.max_abs_rho = state.rho.max_abs();
    s.min_concentration = state.min_concentration();
    return s;
}

std::string StateSummary::describe() const {
    std::ostringstream os;
    os.precision(6);
    os << "last valid state: step " << step << ", t = " << time << ", |rho|_2 = " << l2_rho
       << ", |sigma - sigma_bar|_2 = " << l2_sigma_dev << ", max|rho| = " << max_abs_rho
       << ", min c_i = " << min_concentration;
    return os.str();
}

NumericalFailure::NumericalFailure(Kind kind, const std::string& what, IonState last_valid, StateSummary summary)
    : Error(what + " (" + summary.describe() + ")"),
      kind_(kind),
      last_valid_(std::move(last_valid)),
      summary_(summary) {}

namespace {

bool finite(const SpectralField& f) {
    for (const auto& c : f.coeffs()) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
}

[[noreturn]] void blow_up(const IonState& state, const char* stage) {
    throw NumericalFailure(NumericalFailure::Kind::BlowUp,
                           std::string("blow-up/under-resolution: non-finite values in ") + stage, state,
                           StateSummary::of(state, 0));
}

}  // namespace

IonState step(const IonState& state, double dt, const Params& params) {
    params.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("step: dt must be positive and finite");
    if (!state.all_finite()) blow_up(state, "the input state");

    const Grid& grid = state.grid();
    const auto k2 = grid.k_squared();
    const double D = params.diffusivity;

    const SpectralField rho0 = sp::forward_transform(state.rho);
    const SpectralField sigma0 = sp::forward_transform(state.sigma);
    NonlinearTerms n0 = nonlinear_terms(evaluate_fields(rho0, sigma0, params), params);
    n0.rho[0] = 0.0;
    n0.sigma[0] = 0.0;

    std::vector<double> decay(grid.size());
    std::vector<double> decay_m1(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        decay[i] = std::exp(-D * k2[i] * dt);
        decay_m1[i] = std::expm1(-D * k2[i] * dt);
    }

    SpectralField rho1(state.grid_ptr());
    SpectralField sigma1(state.grid_ptr());
    for (std::size_t i = 1; i < grid.size(); ++i) {
        rho1[i] = decay[i] * (rho0[i] + dt * n0.rho[i]);
        sigma1[i] = decay[i] * (sigma0[i] + dt * n0.sigma[i]);
    }
    sigma1[0] = sigma0[0];
    if (!finite(rho1) || !finite(sigma1)) blow_up(state, "the predictor stage");

    NonlinearTerms n1 = nonlinear_terms(evaluate_fields(rho1, sigma1, params), params);
    if (!finite(n1.rho) || !finite(n1.sigma)) blow_up(state, "the corrector stage");

    // Increment form: an equilibrium input produces an exactly zero increment.
    SpectralField drho(state.grid_ptr());
    SpectralField dsigma(state.grid_ptr());
    const double half = 0.5 * dt;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        drho[i] = decay_m1[i] * rho0[i] + half * (decay[i] * n0.rho[i] + n1.rho[i]);
        dsigma[i] = decay_m1[i] * sigma0[i] + half * (decay[i] * n0.sigma[i] + n1.sigma[i]);
    }
    drho[0] = -rho0[0];

    IonState out{state.rho + sp::inverse_transform(drho), state.sigma + sp::inverse_transform(dsigma),
                 state.time + dt};
    if (!out.all_finite()) blow_up(state, "the updated state");
    return out;
}

double stable_dt(double max_speed, double max_sigma, double h, const Params& params, const StepperConfig& cfg) {
    double dt = std::numeric_limits<double>::infinity();
    if (max_speed > 0.0) dt = std::min(dt, cfg.cfl_advective * h / max_speed);
    if (max_sigma > 0.0) dt = std::min(dt, cfg.reaction_safety * params.epsilon / (params.diffusivity * max_sigma));
    return dt;
}

double stable_dt(const IonState& state, const Params& params, const StepperConfig& cfg) {
    const StateFields f = evaluate_fields(state, params);
    double speed = 0.0;
    for (std::size_t i = 0; i < state.rho.size(); ++i) {
        double s2 = 0.0;
        for (const auto& c : f.u) s2 += c[i] * c[i];
        speed = std::max(speed, std::sqrt(s2));
    }
    double dt = stable_dt(speed, state.sigma.max(), state.grid().min_spacing(), params, cfg);
    const double remaining = cfg.t_end - state.time;
    if (remaining > 0.0) dt = std::min(dt, remaining);
    if (!std::isfinite(dt)) dt = remaining > 0.0 ? remaining : 1.0;
    return dt;
}

IonState integrate(const IonState& state0, const Params& params, const StepperConfig& cfg, const Observer& observer,
                   std::size_t observe_every) {
    params.validate();
    cfg.validate();
    if (observe_every == 0) observe_every = 1;

    IonState state = state0;
    std::size_t steps = 0;
    std::size_t last_observed = 0;
    if (observer) observer(state, 0);
    const double t0 = state0.time;
    const double sigma_bar = state0.sigma.mean();
    const double abort_level = -cfg.positivity_abort * std::max(sigma_bar, std::numeric_limits<double>::min());

    // Fixed steps land on t0 + k dt exactly; only the last one may be shortened.
    std::size_t fixed_steps = 0;
    if (cfg.dt && cfg.t_end > t0) {
        fixed_steps = static_cast<std::size_t>(std::ceil((cfg.t_end - t0) / *cfg.dt * (1.0 - 1e-12)));
    }

    while (state.time < cfg.t_end && (!cfg.dt || steps < fixed_steps)) {
        if (steps >= cfg.max_steps) {
            throw NumericalFailure(NumericalFailure::Kind::MaxSteps,
                                   "max_steps = " + std::to_string(cfg.max_steps) + " exceeded before t_end",
                                   state, StateSummary::of(state, steps));
        }
        double dt = 0.0;
        double t_next = 0.0;
        if (cfg.dt) {
            const bool last = steps + 1 == fixed_steps;
            t_next = last ? cfg.t_end : t0 + static_cast<double>(steps + 1) * *cfg.dt;
            dt = t_next - state.time;
        } else {
            dt = stable_dt(state, params, cfg);
            t_next = state.time + dt;
            if (cfg.t_end - t_next <= 1e-12 * cfg.t_end) t_next = cfg.t_end;
        }
        IonState next;
        try {
            next = step(state, dt, params);
        } catch (const NumericalFailure& e) {
            throw NumericalFailure(e.kind(), std::string("step ") + std::to_string(steps + 1) + ": " +
                                                 "blow-up/under-resolution: non-finite values",
                                   state, StateSummary::of(state, steps));
        }
        next.time = t_next;
        ++steps;
        if (const double cmin = next.min_concentration(); cmin < abort_level) {
            std::ostringstream os;
            os.precision(6);
            os << "under-resolution: min c_i = " << cmin << " < " << abort_level << " at t = " << next.time;
            throw NumericalFailure(NumericalFailure::Kind::Positivity, os.str(), state,
                                   StateSummary::of(state, steps - 1));
        }
        state = std::move(next);
        if (observer && steps % observe_every == 0) {
            observer(state, steps);
            last_observed = steps;
        }
    }
    if (observer && last_observed != steps) observer(state, steps);
    return state;
}

}  // namespace npd

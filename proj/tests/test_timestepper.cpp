#include <cmath>
#include <numbers>

#include "doctest.h"
#include "npd/diagnostics.hpp"
#include "npd/timestepper.hpp"
#include "support.hpp"

using namespace npd;
using namespace npd::testing;

namespace {

double distance(const IonState& a, const IonState& b) {
    return std::max(max_diff(a.rho, b.rho), max_diff(a.sigma, b.sigma));
}

IonState run(const IonState& s, const Params& p, double dt, double t_end) {
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    return integrate(s, p, cfg);
}

}  // namespace

TEST_SUITE("timestepper") {

TEST_CASE("equilibrium is an exact fixed point") {
    auto g = Grid::create(2, 16);
    const IonState eq{RealField(g), RealField::constant(g, 2.0), 0.0};
    const IonState next = step(eq, 0.1, Params{1.0, 1.0});
    for (std::size_t i = 0; i < g->size(); ++i) {
        CHECK(next.rho[i] == 0.0);
        CHECK(next.sigma[i] == 2.0);
    }
}

TEST_CASE("pure diffusion of sigma is integrated exactly") {
    auto g = Grid::create(2, 16);
    const double D = 0.7, a = 0.4;
    auto sigma = RealField::from_function(g, [&](auto x) { return 2.0 + a * std::cos(x[0] + x[1]); });
    const IonState s{RealField(g), sigma, 0.0};
    const IonState out = run(s, Params{1.0, D}, 0.25, 1.0);
    auto exact = RealField::from_function(g, [&](auto x) { return 2.0 + a * std::exp(-2 * D) * std::cos(x[0] + x[1]); });
    CHECK(max_diff(out.sigma, exact) < 1e-14);
    CHECK(out.rho.max_abs() == 0.0);
    CHECK(out.time == 1.0);
}

TEST_CASE("step keeps the charge exactly neutral and conserves sigma_bar") {
    auto g = Grid::create(2, 32);
    IonState s = smooth_state(g, 0.6);
    const double sbar = s.sigma_bar();
    for (int k = 0; k < 20; ++k) s = step(s, 0.02, Params{0.5, 1.0});
    CHECK(std::abs(s.rho.mean()) < 1e-16);
    CHECK(std::abs(s.sigma_bar() - sbar) < 1e-14);
}

TEST_CASE("self-convergence is second order in time") {
    auto g = Grid::create(2, 32);
    const IonState s = smooth_state(g, 0.8);
    const Params p{0.5, 1.0};
    std::vector<IonState> out;
    for (double dt : {0.04, 0.02, 0.01, 0.005}) out.push_back(run(s, p, dt, 0.4));
    const double e1 = distance(out[0], out[1]), e2 = distance(out[1], out[2]), e3 = distance(out[2], out[3]);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.08));
    CHECK(std::log2(e2 / e3) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("stable_dt takes the smaller bound and drops absent ones") {
    const Params p{0.5, 2.0};
    StepperConfig cfg;
    cfg.cfl_advective = 0.5;
    cfg.reaction_safety = 0.4;
    CHECK(stable_dt(2.0, 1.0, 0.1, p, cfg) == doctest::Approx(std::min(0.5 * 0.1 / 2.0, 0.4 * 0.5 / 2.0)));
    CHECK(stable_dt(0.0, 1.0, 0.1, p, cfg) == doctest::Approx(0.1));
    CHECK(stable_dt(1.0, 0.0, 0.1, p, cfg) == doctest::Approx(0.05));
    CHECK(std::isinf(stable_dt(0.0, 0.0, 0.1, p, cfg)));
}

TEST_CASE("adaptive integration clips to t_end") {
    auto g = Grid::create(2, 16);
    StepperConfig cfg;
    cfg.t_end = 0.3;
    std::size_t calls = 0;
    double last = -1;
    const IonState out = integrate(smooth_state(g), Params{1.0, 1.0}, cfg, [&](const IonState& s, std::size_t) {
        ++calls;
        CHECK(s.time > last);
        last = s.time;
    });
    CHECK(out.time == 0.3);
    CHECK(calls > 2);
}

TEST_CASE("observer sees step 0, the cadence and the final step") {
    auto g = Grid::create(2, 16);
    StepperConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 0.75;
    std::vector<std::size_t> steps;
    std::vector<double> times;
    const IonState out = integrate(smooth_state(g), Params{1.0, 1.0}, cfg,
                                   [&](const IonState& s, std::size_t k) {
                                       steps.push_back(k);
                                       times.push_back(s.time);
                                   },
                                   3);
    CHECK(steps == std::vector<std::size_t>{0, 3, 6, 8});
    CHECK(times[1] == 0.30000000000000004);  // 0 + 3 * 0.1, not a running sum
    CHECK(out.time == 0.75);
}

TEST_CASE("huge steps are reported as numerical failures with the last valid state") {
    auto g = Grid::create(2, 16);
    const IonState s = smooth_state(g, 0.9, 2.0);
    StepperConfig cfg;
    // Stable for the integrated diffusion, far beyond the explicit reaction limit.
    cfg.dt = 0.5;
    cfg.t_end = 20.0;
    try {
        integrate(s, Params{0.01, 1.0}, cfg);
        FAIL("expected a numerical failure");
    } catch (const NumericalFailure& e) {
        CHECK(e.last_valid().all_finite());
        CHECK(e.summary().time >= 0.0);
        CHECK(!e.summary().describe().empty());
    }
}

TEST_CASE("max_steps is enforced") {
    auto g = Grid::create(2, 16);
    StepperConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 1.0;
    cfg.max_steps = 5;
    try {
        integrate(smooth_state(g), Params{1.0, 1.0}, cfg);
        FAIL("expected max-steps failure");
    } catch (const NumericalFailure& e) {
        CHECK(e.kind() == NumericalFailure::Kind::MaxSteps);
        CHECK(e.summary().step == 5);
    }
}

TEST_CASE("stepper config validation") {
    StepperConfig cfg;
    cfg.dt = -1.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("stepper.dt"), PreconditionError);
    cfg.dt = std::nullopt;
    cfg.cfl_advective = 2.0;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
}

TEST_CASE("non-finite input is a blow-up") {
    auto g = Grid::create(2, 8);
    IonState s = smooth_state(g);
    s.rho[3] = INFINITY;
    try {
        step(s, 0.1, Params{1.0, 1.0});
        FAIL("expected failure");
    } catch (const NumericalFailure& e) {
        CHECK(e.kind() == NumericalFailure::Kind::BlowUp);
    }
}

TEST_CASE("stable_dt worked examples") {
    StepperConfig cfg;
    cfg.cfl_advective = 0.5;
    cfg.reaction_safety = 0.5;
    CHECK(stable_dt(0.0, 2.0, Grid::kTwoPi / 64, Params{1.0, 1.0}, cfg) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(stable_dt(1.0, 2.0, Grid::kTwoPi / 64, Params{1.0, 0.01}, cfg) ==
          doctest::Approx(std::numbers::pi / 64).epsilon(1e-15));
    CHECK(stable_dt(0.0, 2.0, 0.1, Params{1.0, 2.0}, cfg) ==
          doctest::Approx(stable_dt(0.0, 2.0, 0.1, Params{1.0, 1.0}, cfg) / 2).epsilon(1e-15));
}

TEST_CASE("small single mode decays at the linearized rate") {
    auto g = Grid::create(2, 32);
    const double a = 0.01, sbar = 2.0, eps = 1.0, D = 1.0;
    auto rho = RealField::from_function(g, [&](auto x) { return a * std::cos(x[0]); });
    const IonState s{rho, RealField::constant(g, sbar), 0.0};
    const IonState out = run(s, Params{eps, D}, 0.005, 1.0);
    const double expected = a * std::exp(-D * (1 + sbar / eps)) * std::sqrt(g->volume() / 2);
    CHECK(npd::diagnostics::lp_norm(out.rho, 2) == doctest::Approx(expected).epsilon(0.02));
}

}

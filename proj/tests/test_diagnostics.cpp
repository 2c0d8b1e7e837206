#include <cmath>

#include "doctest.h"
#include "npd/diagnostics.hpp"
#include "npd/errors.hpp"
#include "npd/timestepper.hpp"
#include "support.hpp"

using namespace npd;
using namespace npd::testing;
namespace dg = npd::diagnostics;

TEST_SUITE("diagnostics") {

TEST_CASE("Lp norms of cos x on the 2 pi torus") {
    auto g = Grid::create(2, 32);
    auto f = RealField::from_function(g, [](auto x) { return std::cos(x[0]); });
    const double V = 4 * kPi * kPi;
    CHECK(dg::lp_norm(f, 2) == doctest::Approx(std::sqrt(V / 2)).epsilon(1e-14));
    CHECK(dg::lp_norm(f, 4) == doctest::Approx(std::pow(3 * V / 8, 0.25)).epsilon(1e-14));
    CHECK(dg::lp_norm(f, 6) == doctest::Approx(std::pow(5 * V / 16, 1.0 / 6)).epsilon(1e-14));
    CHECK(dg::lp_norm(f, dg::kInf) == 1.0);
    CHECK_THROWS_AS(dg::lp_norm(f, 0.5), PreconditionError);
    const std::vector<RealField> v{f, RealField::from_function(g, [](auto x) { return std::sin(x[0]); })};
    CHECK(dg::lp_norm(v, 2) == doctest::Approx(std::sqrt(V)).epsilon(1e-14));
    CHECK(dg::lp_norm(v, dg::kInf) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Sobolev norms weight by (1 + |k|^2)^s") {
    auto g = Grid::create(2, 16);
    auto f = RealField::from_function(g, [](auto x) { return std::cos(2 * x[0]); });
    const double V = 4 * kPi * kPi;
    for (int s = 0; s <= 3; ++s) {
        CHECK(dg::sobolev_norm(f, s) == doctest::Approx(std::sqrt(std::pow(5.0, s) * V / 2)).epsilon(1e-13));
    }
}

TEST_CASE("identity residuals vanish on resolved data") {
    auto g = Grid::create(2, 32);
    const IonState s = smooth_state(g, 0.5);
    const auto r = dg::identity_residuals(s, Params{0.7, 1.3});
    CHECK(r.energy_relative() < 1e-13);
    CHECK(r.lyapunov_relative() < 1e-13);
    CHECK(r.energy_scale > 0);
}

TEST_CASE("identity residuals grow when the data are under-resolved") {
    // Narrow bumps put most of their spectrum beyond the 2/3 band of an 8^2 grid.
    auto g = Grid::create(2, 8);
    auto bump = [](double x, double y) { return std::exp(4 * (std::cos(x) + std::cos(y)) - 8); };
    auto rho = RealField::from_function(g, [&](auto x) { return 0.9 * (bump(x[0], x[1]) - bump(x[0] - kPi, x[1] - kPi)); });
    auto sigma = RealField::from_function(g, [&](auto x) { return 2.0 + bump(x[0] - kPi, x[1]); });
    const auto r = dg::identity_residuals(IonState{rho - RealField::constant(g, rho.mean()), sigma, 0.0}, Params{1.0, 1.0});
    CHECK(std::max(r.energy_relative(), r.lyapunov_relative()) > 1e-6);
}

TEST_CASE("Lyapunov dissipation matches a finite-difference time derivative") {
    // d/dt (|rho|^2 + |sigma - sigma_bar|^2)/2 from tiny steps versus the
    // dissipation terms the identity balances it with.
    auto g = Grid::create(2, 32);
    const IonState s = smooth_state(g, 0.5);
    const Params p{0.7, 1.3};
    const auto rec = dg::compute_record(s, p);
    const double h = 1e-4;
    const IonState fwd = step(s, h, p);
    const double e0 = rec.lyapunov_functional();
    const auto rec1 = dg::compute_record(fwd, p);
    const double slope = (rec1.lyapunov_functional() - e0) / h;
    // The identity says slope/2 = -(dissipation); reconstruct it from the record.
    const double dissipation =
        p.diffusivity * (rec.l2_grad_rho * rec.l2_grad_rho + rec.l2_grad_sigma * rec.l2_grad_sigma);
    CHECK(-slope / 2 > dissipation * 0.9);  // the sigma rho^2 term adds to it
    CHECK(rec1.lyapunov_functional() < e0);
}

TEST_CASE("curl identity holds to round-off") {
    for (int dim : {2, 3}) {
        auto g = Grid::create(dim, 16);
        const auto f = evaluate_fields(smooth_state(g, 0.6), Params{0.5, 1.0});
        const auto c = dg::curl_identity(f);
        CHECK(c.residual <= 1e-10 * c.scale);
    }
}

TEST_CASE("record carries consistent norms") {
    auto g = Grid::create(2, 32);
    const IonState s = smooth_state(g, 0.5);
    const Params p{1.0, 1.0};
    const auto rec = dg::compute_record(s, p, dg::DiagnosticsOptions{{2.0, 4.0, 8.0}});
    CHECK(rec.lp_rho[0] == doctest::Approx(dg::lp_norm(s.rho, 2)));
    CHECK(rec.lr_grad_rho.size() == 3);
    CHECK(rec.lr_grad_rho_max_r() == rec.lr_grad_rho.back().second);
    CHECK(rec.lr_grad_rho.front().second == doctest::Approx(rec.l2_grad_rho));
    CHECK(rec.l2_u <= rec.l2_rho_grad_phi);
    CHECK(rec.h3_rho >= rec.h2_rho);
    CHECK(rec.min_c1 == doctest::Approx(s.c1().min()));
    CHECK(std::abs(rec.mean_rho) < 1e-16);
    CHECK(rec.mean_sigma == doctest::Approx(s.sigma_bar()));
}

TEST_CASE("decay fit recovers a synthetic rate") {
    std::vector<double> t, v;
    for (int i = 0; i <= 50; ++i) {
        t.push_back(0.1 * i);
        v.push_back(2.5 * std::exp(-3.0 * t.back()));
    }
    const auto fit = dg::fit_decay_rate(t, v, 0.0, 5.0);
    CHECK(fit.rate == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.prefactor == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(fit.samples == 51);
    CHECK(fit.residual < 1e-12);
    v[30] = 0.0;
    CHECK_THROWS_WITH_AS(dg::fit_decay_rate(t, v, 0.0, 5.0), doctest::Contains("shorten"), PreconditionError);
    CHECK_THROWS_AS(dg::fit_decay_rate(t, v, 0.0, 0.3), PreconditionError);
}

TEST_CASE("Sobolev norms are unchanged by refinement of band-limited data") {
    const auto f = [](auto x) { return std::cos(x[0]) + 0.3 * std::sin(x[0] + 2 * x[1]); };
    for (int s = 0; s <= 3; ++s) {
        const double coarse = dg::sobolev_norm(RealField::from_function(Grid::create(2, 8), f), s);
        const double fine = dg::sobolev_norm(RealField::from_function(Grid::create(2, 32), f), s);
        CHECK(std::abs(coarse - fine) <= 1e-10 * fine);
    }
    CHECK(dg::sobolev_norm(RealField(Grid::create(2, 8)), 2) == 0.0);
    auto g = Grid::create(2, 16);
    CHECK(dg::sobolev_norm(RealField::from_function(g, [](auto x) { return std::cos(x[0]); }), 1) ==
          doctest::Approx(2 * kPi).epsilon(1e-14));
}

TEST_CASE("identity residuals of single-mode data") {
    auto g = Grid::create(2, 16);
    auto rho = RealField::from_function(g, [](auto x) { return 0.1 * std::cos(x[0]); });
    const auto r = dg::identity_residuals(IonState{rho, RealField::constant(g, 1.0), 0.0}, Params{1.0, 1.0});
    CHECK(r.energy_relative() <= 1e-8);
    CHECK(r.lyapunov_relative() <= 1e-8);
    const auto eq = dg::identity_residuals(IonState{RealField(g), RealField::constant(g, 2.0), 0.0}, Params{1.0, 1.0});
    CHECK(std::abs(eq.energy) <= 1e-12);
    CHECK(std::abs(eq.lyapunov) <= 1e-12);
}

TEST_CASE("decay fit of constant and perturbed series") {
    std::vector<double> t, flat, wavy;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(0.05 * i);
        flat.push_back(0.7);
        wavy.push_back(std::exp(-2 * t.back()) * (1 + 0.01 * std::sin(t.back())));
    }
    CHECK(std::abs(dg::fit_decay_rate(t, flat, 0.0, 5.0).rate) < 1e-14);
    CHECK(dg::fit_decay_rate(t, wavy, 0.0, 5.0).rate == doctest::Approx(2.0).epsilon(0.01));
}

}

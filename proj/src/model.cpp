#include "npd/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "npd/errors.hpp"

namespace npd {

namespace sp = spectral;

void Params::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw PreconditionError("params.epsilon: must be > 0 and finite");
    }
    if (!(diffusivity > 0.0) || !std::isfinite(diffusivity)) {
        throw PreconditionError("params.diffusivity: must be > 0 and finite");
    }
}

RealField IonState::c1() const {
    RealField out = rho + sigma;
    return out *= 0.5;
}

RealField IonState::c2() const {
    RealField out = sigma - rho;
    return out *= 0.5;
}

double IonState::min_concentration() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    auto r = rho.values();
    auto s = sigma.values();
    for (std::size_t i = 0; i < r.size(); ++i) m = std::min(m, 0.5 * (s[i] - std::abs(r[i])));
    return m;
}

IonState from_concentrations(const RealField& c1, const RealField& c2) {
    if (!c1.grid().same_shape(c2.grid())) throw PreconditionError("from_concentrations: grid mismatch");
    for (const auto* c : {&c1, &c2}) {
        const char* name = c == &c1 ? "c1" : "c2";
        if (const auto bad = c->first_non_finite(); bad != c->size()) {
            std::ostringstream os;
            os << "from_concentrations: " << name << " is not finite at flat index " << bad;
            throw PreconditionError(os.str());
        }
        for (std::size_t i = 0; i < c->size(); ++i) {
            if ((*c)[i] < -kNegativityTolerance) {
                std::ostringstream os;
                os.precision(17);
                os << "from_concentrations: " << name << " = " << (*c)[i] << " < 0 at flat index " << i;
                throw PreconditionError(os.str());
            }
        }
    }
    const double m1 = c1.mean();
    const double m2 = c2.mean();
    if (std::abs(m1 - m2) > kMeanTolerance * std::max(m1 + m2, std::numeric_limits<double>::min())) {
        std::ostringstream os;
        os.precision(17);
        os << "from_concentrations: species means differ (mean c1 = " << m1 << ", mean c2 = " << m2
           << "); the total charge must vanish";
        throw PreconditionError(os.str());
    }
    IonState state{c1 - c2, c1 + c2, 0.0};
    const double mean = state.rho.mean();
    for (double& v : state.rho.values()) v -= mean;
    return state;
}

Admissibility check_admissible(const IonState& state) {
    Admissibility a;
    a.mean_rho = state.rho.mean();
    double power = 0.0;
    for (double v : state.rho.values()) power += v * v;
    const double rms = std::sqrt(power / static_cast<double>(state.rho.size()));
    a.neutral = std::abs(a.mean_rho) <= kMeanTolerance * std::max(rms, std::abs(state.sigma_bar()));
    a.worst_ordering = std::numeric_limits<double>::infinity();
    auto r = state.rho.values();
    auto s = state.sigma.values();
    for (std::size_t i = 0; i < r.size(); ++i) a.worst_ordering = std::min(a.worst_ordering, s[i] - std::abs(r[i]));
    a.ordered = a.worst_ordering >= -kOrderingTolerance;
    return a;
}

namespace {

// A charge mean within kMeanTolerance of max(rms rho, sigma_bar) is round-off
// and is removed; anything larger is left for solve_poisson to reject. Once
// rho has decayed to round-off its own rms is no usable scale.
SpectralField neutral_charge(const SpectralField& rho_hat, double sigma_bar) {
    double power = 0.0;
    for (const auto& c : rho_hat.coeffs()) power += std::norm(c);
    SpectralField out = rho_hat;
    if (std::abs(out[0]) <= kMeanTolerance * std::max(std::sqrt(power), std::abs(sigma_bar))) out[0] = 0.0;
    return out;
}

RealField truncated(const SpectralField& fhat) { return sp::inverse_transform(sp::dealias(fhat)); }

std::vector<RealField> truncated_gradient(const SpectralField& fhat) {
    const SpectralField t = sp::dealias(fhat);
    std::vector<RealField> out;
    for (int a = 0; a < fhat.grid().dim(); ++a) out.push_back(sp::inverse_transform(sp::derivative(t, a)));
    return out;
}

RealField dot(const std::vector<RealField>& a, const std::vector<RealField>& b) {
    RealField out(a[0].grid_ptr());
    auto o = out.values();
    for (std::size_t c = 0; c < a.size(); ++c) {
        auto x = a[c].values();
        auto y = b[c].values();
        for (std::size_t i = 0; i < o.size(); ++i) o[i] += x[i] * y[i];
    }
    return out;
}

}  // namespace

StateFields evaluate_fields(const SpectralField& rho_hat, const SpectralField& sigma_hat, const Params& params) {
    params.validate();
    StateFields f;
    f.grid = rho_hat.grid_ptr();
    f.rho_hat = neutral_charge(rho_hat, sigma_hat[0].real());
    f.sigma_hat = sigma_hat;
    f.phi_hat = sp::solve_poisson(f.rho_hat, params.epsilon);
    f.rho_t = truncated(f.rho_hat);
    f.sigma_t = truncated(sigma_hat);
    f.grad_rho_t = truncated_gradient(f.rho_hat);
    f.grad_sigma_t = truncated_gradient(sigma_hat);
    f.grad_phi_t = truncated_gradient(f.phi_hat);

    const int d = f.grid->dim();
    std::vector<SpectralField> force_hat;
    for (int a = 0; a < d; ++a) {
        RealField g = hadamard(f.rho_t, f.grad_phi_t[a]);
        g *= -1.0;
        SpectralField ghat = sp::forward_transform(g);
        sp::dealias_in_place(ghat);
        force_hat.push_back(std::move(ghat));
        f.force.push_back(std::move(g));
    }
    f.u_hat = sp::leray_project(force_hat);
    for (int a = 0; a < d; ++a) f.u.push_back(sp::inverse_transform(f.u_hat[a]));
    return f;
}

StateFields evaluate_fields(const IonState& state, const Params& params) {
    return evaluate_fields(sp::forward_transform(state.rho), sp::forward_transform(state.sigma), params);
}

NonlinearTerms nonlinear_terms(const StateFields& f, const Params& params) {
    const double D = params.diffusivity;
    const double inv_eps = 1.0 / params.epsilon;
    const RealField u_grad_rho = dot(f.u, f.grad_rho_t);
    const RealField u_grad_sigma = dot(f.u, f.grad_sigma_t);
    const RealField grad_sigma_grad_phi = dot(f.grad_sigma_t, f.grad_phi_t);
    const RealField grad_rho_grad_phi = dot(f.grad_rho_t, f.grad_phi_t);

    RealField n_rho(f.grid);
    RealField n_sigma(f.grid);
    auto r = f.rho_t.values();
    auto s = f.sigma_t.values();
    for (std::size_t i = 0; i < n_rho.size(); ++i) {
        n_rho[i] = -u_grad_rho[i] + D * (grad_sigma_grad_phi[i] - inv_eps * s[i] * r[i]);
        n_sigma[i] = -u_grad_sigma[i] + D * (grad_rho_grad_phi[i] - inv_eps * r[i] * r[i]);
    }
    NonlinearTerms out{sp::forward_transform(n_rho), sp::forward_transform(n_sigma)};
    sp::dealias_in_place(out.rho);
    sp::dealias_in_place(out.sigma);
    return out;
}

RealField potential(const IonState& state, const Params& params) {
    params.validate();
    const SpectralField rho_hat = neutral_charge(sp::forward_transform(state.rho), state.sigma_bar());
    return sp::inverse_transform(sp::solve_poisson(rho_hat, params.epsilon));
}

VelocitySolve velocity(const IonState& state, const Params& params, bool with_pressure) {
    StateFields f = evaluate_fields(state, params);
    VelocitySolve out;
    out.u = std::move(f.u);
    out.phi = sp::inverse_transform(f.phi_hat);
    if (with_pressure) {
        // Laplace p = div(force) with the truncated force; zero-mean gauge.
        std::vector<SpectralField> force_hat;
        for (const auto& g : f.force) force_hat.push_back(sp::dealias(sp::forward_transform(g)));
        SpectralField p_hat = sp::divergence(force_hat);
        const auto k2 = f.grid->k_squared();
        auto p = p_hat.coeffs();
        p[0] = 0.0;
        for (std::size_t i = 1; i < p.size(); ++i) p[i] = -p[i] / k2[i];
        out.pressure = sp::inverse_transform(p_hat);
    }
    return out;
}

Tendency tendency(const IonState& state, const Params& params) {
    const StateFields f = evaluate_fields(state, params);
    NonlinearTerms n = nonlinear_terms(f, params);
    n.rho += params.diffusivity * sp::laplacian(f.rho_hat);
    n.sigma += params.diffusivity * sp::laplacian(f.sigma_hat);
    return {sp::inverse_transform(n.rho), sp::inverse_transform(n.sigma)};
}

}  // namespace npd

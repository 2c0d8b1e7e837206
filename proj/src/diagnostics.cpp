#include "npd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "npd/errors.hpp"

namespace npd::diagnostics {

namespace sp = spectral;

namespace {

double cell_volume(const Grid& g) { return g.volume() / static_cast<double>(g.size()); }

double lp_of_magnitudes(const Grid& grid, std::span<const double> mag, double p) {
    if (!(p >= 1.0)) {
        std::ostringstream os;
        os << "lp_norm: p = " << p << " must be >= 1";
        throw PreconditionError(os.str());
    }
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : mag) m = std::max(m, v);
        return m;
    }
    // Scale by the maximum to avoid overflow for large p.
    double m = 0.0;
    for (double v : mag) m = std::max(m, v);
    if (m == 0.0) return 0.0;
    double s = 0.0;
    if (p == 2.0) {
        for (double v : mag) s += (v / m) * (v / m);
        return m * std::sqrt(cell_volume(grid) * s);
    }
    for (double v : mag) s += std::pow(v / m, p);
    return m * std::pow(cell_volume(grid) * s, 1.0 / p);
}

RealField deviation(const RealField& f) {
    RealField out = f;
    const double mean = f.mean();
    for (double& v : out.values()) v -= mean;
    return out;
}

double grid_integral(std::span<const double> v, const Grid& g) {
    double s = 0.0;
    for (double x : v) s += x;
    return s * cell_volume(g);
}

std::vector<RealField> full_gradient(const SpectralField& fhat) {
    std::vector<RealField> out;
    for (int a = 0; a < fhat.grid().dim(); ++a) out.push_back(sp::inverse_transform(sp::derivative(fhat, a)));
    return out;
}

double gradient_norm_squared(const SpectralField& fhat) {
    const auto k2 = fhat.grid().k_squared();
    double s = 0.0;
    auto c = fhat.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) s += k2[i] * std::norm(c[i]);
    return fhat.grid().volume() * s;
}

}  // namespace

double lp_norm(const RealField& f, double p) {
    std::vector<double> mag(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) mag[i] = std::abs(f[i]);
    return lp_of_magnitudes(f.grid(), mag, p);
}

double lp_norm(std::span<const RealField> v, double p) {
    if (v.empty()) throw PreconditionError("lp_norm: empty vector field");
    std::vector<double> mag(v[0].size(), 0.0);
    for (const auto& c : v) {
        for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += c[i] * c[i];
    }
    for (double& m : mag) m = std::sqrt(m);
    return lp_of_magnitudes(v[0].grid(), mag, p);
}

double sobolev_norm(const SpectralField& fhat, int s) {
    if (s < 0 || s > 3) throw PreconditionError("sobolev_norm: s must be in {0, 1, 2, 3}");
    const auto k2 = fhat.grid().k_squared();
    double sum = 0.0;
    auto c = fhat.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) sum += std::pow(1.0 + k2[i], s) * std::norm(c[i]);
    return std::sqrt(fhat.grid().volume() * sum);
}

double sobolev_norm(const RealField& f, int s) { return sobolev_norm(sp::forward_transform(f), s); }

IdentityResiduals identity_residuals(const StateFields& f, const RealField& sigma, const Params& params) {
    const double D = params.diffusivity;
    const double eps = params.epsilon;
    const Grid& grid = *f.grid;

    NonlinearTerms n = nonlinear_terms(f, params);
    SpectralField rho_t = n.rho + D * sp::laplacian(f.rho_hat);
    SpectralField sigma_t = n.sigma + D * sp::laplacian(f.sigma_hat);
    SpectralField sigma_dev = f.sigma_hat;
    sigma_dev[0] = 0.0;

    const RealField rho = sp::inverse_transform(f.rho_hat);
    const auto grad_phi = full_gradient(f.phi_hat);
    std::vector<double> sigma_grad_phi2(grid.size(), 0.0);
    std::vector<double> sigma_rho2(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double g2 = 0.0;
        for (const auto& g : grad_phi) g2 += g[i] * g[i];
        sigma_grad_phi2[i] = sigma[i] * g2;
        sigma_rho2[i] = sigma[i] * rho[i] * rho[i];
    }

    IdentityResiduals out;
    {
        double u2 = 0.0;
        for (const auto& c : f.u_hat) u2 += sp::parseval_norm_squared(c);
        const std::array<double, 4> terms{
            sp::inner_product(f.phi_hat, rho_t) / eps,
            u2 / eps,
            D / (eps * eps) * sp::parseval_norm_squared(f.rho_hat),
            D / eps * grid_integral(sigma_grad_phi2, grid),
        };
        for (double t : terms) {
            out.energy += t;
            out.energy_scale = std::max(out.energy_scale, std::abs(t));
        }
    }
    {
        const std::array<double, 3> terms{
            sp::inner_product(f.rho_hat, rho_t) + sp::inner_product(sigma_dev, sigma_t),
            D * (gradient_norm_squared(f.rho_hat) + gradient_norm_squared(f.sigma_hat)),
            D / eps * grid_integral(sigma_rho2, grid),
        };
        for (double t : terms) {
            out.lyapunov += t;
            out.lyapunov_scale = std::max(out.lyapunov_scale, std::abs(t));
        }
    }
    return out;
}

IdentityResiduals identity_residuals(const IonState& state, const Params& params) {
    return identity_residuals(evaluate_fields(state, params), state.sigma, params);
}

CurlCheck curl_identity(const StateFields& f) {
    const Grid& grid = *f.grid;
    const auto& gr = f.grad_rho_t;
    const auto& gp = f.grad_phi_t;
    std::vector<SpectralField> diff;
    auto add_component = [&](const SpectralField& curl_u, const RealField& rhs) {
        SpectralField r = sp::dealias(sp::forward_transform(rhs));
        diff.push_back(curl_u - r);
    };
    if (grid.dim() == 2) {
        // curl_perp u = d_x u_y - d_y u_x;  -grad_perp rho . grad phi = d_y rho d_x phi - d_x rho d_y phi.
        SpectralField curl_u = sp::derivative(f.u_hat[1], 0) - sp::derivative(f.u_hat[0], 1);
        RealField rhs = hadamard(gr[1], gp[0]) - hadamard(gr[0], gp[1]);
        add_component(curl_u, rhs);
    } else {
        for (int a = 0; a < 3; ++a) {
            const int b = (a + 1) % 3;
            const int c = (a + 2) % 3;
            SpectralField curl_u = sp::derivative(f.u_hat[c], b) - sp::derivative(f.u_hat[b], c);
            // -(grad rho x grad phi)_a
            RealField rhs = hadamard(gr[c], gp[b]) - hadamard(gr[b], gp[c]);
            add_component(curl_u, rhs);
        }
    }
    double r2 = 0.0;
    for (const auto& d : diff) r2 += sp::parseval_norm_squared(d);
    CurlCheck out;
    out.residual = std::sqrt(r2);
    out.scale = 1.0 + lp_norm(std::span<const RealField>(full_gradient(f.rho_hat)), 2.0) *
                          lp_norm(std::span<const RealField>(full_gradient(f.phi_hat)), kInf);
    return out;
}

DiagnosticsRecord compute_record(const IonState& state, const Params& params, const DiagnosticsOptions& options) {
    const StateFields f = evaluate_fields(state, params);
    const Grid& grid = state.grid();
    DiagnosticsRecord r;
    r.time = state.time;

    const RealField sigma_dev = deviation(state.sigma);
    for (std::size_t i = 0; i < kLpExponents.size(); ++i) {
        r.lp_rho[i] = lp_norm(state.rho, kLpExponents[i]);
        r.lp_sigma_dev[i] = lp_norm(sigma_dev, kLpExponents[i]);
    }

    const auto grad_rho = full_gradient(f.rho_hat);
    const auto grad_sigma = full_gradient(f.sigma_hat);
    const auto grad_phi = full_gradient(f.phi_hat);
    r.l2_grad_rho = std::sqrt(gradient_norm_squared(f.rho_hat));
    r.l2_grad_sigma = std::sqrt(gradient_norm_squared(f.sigma_hat));
    r.l2_grad_phi = std::sqrt(gradient_norm_squared(f.phi_hat));
    r.linf_grad_phi = lp_norm(std::span<const RealField>(grad_phi), kInf);

    double u2 = 0.0;
    for (const auto& c : f.u_hat) u2 += sp::parseval_norm_squared(c);
    r.l2_u = std::sqrt(u2);
    r.l2_rho_grad_phi = lp_norm(std::span<const RealField>(f.force), 2.0);

    // grad u as a d x d tensor field; the L^r norm uses its Frobenius magnitude.
    std::vector<RealField> grad_u;
    for (const auto& uc : f.u_hat) {
        for (int a = 0; a < grid.dim(); ++a) grad_u.push_back(sp::inverse_transform(sp::derivative(uc, a)));
    }
    auto r_values = options.r_values;
    std::sort(r_values.begin(), r_values.end());
    for (double rv : r_values) {
        r.lr_grad_rho.emplace_back(rv, lp_norm(std::span<const RealField>(grad_rho), rv));
        r.lr_grad_u.emplace_back(rv, lp_norm(std::span<const RealField>(grad_u), rv));
    }

    r.h2_rho = sobolev_norm(f.rho_hat, 2);
    r.h2_sigma = sobolev_norm(f.sigma_hat, 2);
    r.h3_rho = sobolev_norm(f.rho_hat, 3);
    r.h3_sigma = sobolev_norm(f.sigma_hat, 3);

    const auto k2 = grid.k_squared();
    double lr = 0.0, ls = 0.0, glr = 0.0, gls = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double k4 = k2[i] * k2[i];
        lr += k4 * std::norm(f.rho_hat[i]);
        ls += k4 * std::norm(f.sigma_hat[i]);
        glr += k4 * k2[i] * std::norm(f.rho_hat[i]);
        gls += k4 * k2[i] * std::norm(f.sigma_hat[i]);
    }
    r.l2_lap_rho = std::sqrt(grid.volume() * lr);
    r.l2_lap_sigma = std::sqrt(grid.volume() * ls);
    r.l2_grad_lap_rho = std::sqrt(grid.volume() * glr);
    r.l2_grad_lap_sigma = std::sqrt(grid.volume() * gls);

    r.min_c1 = state.c1().min();
    r.min_c2 = state.c2().min();
    r.mean_rho = state.rho.mean();
    r.mean_sigma = state.sigma.mean();
    r.identities = identity_residuals(f, state.sigma, params);
    r.curl = curl_identity(f);
    return r;
}

DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values, double t0, double t1) {
    if (times.size() != values.size()) throw PreconditionError("fit_decay_rate: times and values differ in length");
    if (!(t1 > t0)) throw PreconditionError("fit_decay_rate: window must satisfy t1 > t0");
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t0 || times[i] > t1) continue;
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
            std::ostringstream os;
            os << "fit_decay_rate: value " << values[i] << " at t = " << times[i]
               << " is not positive; shorten the window to exclude the round-off floor";
            throw PreconditionError(os.str());
        }
        ts.push_back(times[i]);
        ys.push_back(std::log(values[i]));
    }
    if (ts.size() < 5) {
        throw PreconditionError("fit_decay_rate: window [" + std::to_string(t0) + ", " + std::to_string(t1) +
                                "] holds " + std::to_string(ts.size()) + " samples, need at least 5");
    }
    const double n = static_cast<double>(ts.size());
    double tm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        tm += ts[i];
        ym += ys[i];
    }
    tm /= n;
    ym /= n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - tm) * (ts[i] - tm);
        sty += (ts[i] - tm) * (ys[i] - ym);
    }
    if (stt == 0.0) throw PreconditionError("fit_decay_rate: all samples share one time");
    const double slope = sty / stt;
    const double intercept = ym - slope * tm;
    double ss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double e = ys[i] - (intercept + slope * ts[i]);
        ss += e * e;
    }
    DecayFit fit;
    fit.rate = -slope;
    fit.prefactor = std::exp(intercept);
    fit.t0 = t0;
    fit.t1 = t1;
    fit.residual = std::sqrt(ss / n);
    fit.samples = ts.size();
    return fit;
}

}  // namespace npd::diagnostics

#include "npd/report.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace npd {

using diagnostics::DiagnosticsRecord;

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::vector<double> column(const std::vector<DiagnosticsRecord>& records,
                           const std::function<double(const DiagnosticsRecord&)>& get) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(get(r));
    return out;
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

const char* p_label(std::size_t i) {
    static const char* labels[] = {"2", "3", "4", "6", "inf"};
    return labels[i];
}

}  // namespace

bool TheoremReport::all_pass() const noexcept {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::string TheoremReport::to_text() const {
    std::ostringstream os;
    for (const auto& v : verdicts) {
        os << v.key << ": " << (v.pass ? "PASS" : "FAIL");
        if (!v.pass && !v.failure_class.empty()) os << " [" << v.failure_class << "]";
        if (!v.detail.empty()) os << " " << v.detail;
        os << '\n';
    }
    return os.str();
}

void TheoremReport::append(const TheoremReport& other) {
    verdicts.insert(verdicts.end(), other.verdicts.begin(), other.verdicts.end());
}

SeriesFit fit_series(const std::vector<double>& times, const std::vector<double>& values,
                     const ReportOptions& options) {
    SeriesFit out;
    if (times.size() < 2) {
        out.note = "no decay signal (fewer than two records)";
        return out;
    }
    const double peak = *std::max_element(values.begin(), values.end());
    if (!(peak > 0.0)) {
        out.note = "no decay signal (identically zero series)";
        return out;
    }
    const double t_begin = times.front();
    const double t_end = times.back();
    const double floor = options.floor_fraction * peak;
    const double w0 = t_begin + options.fit_start_fraction * (t_end - t_begin);
    // The window ends at the first sample that reaches the round-off floor.
    double w1 = t_end;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] >= w0 && !(values[i] > floor)) {
            w1 = i > 0 ? times[i - 1] : times[i];
            break;
        }
    }
    std::size_t count = 0;
    for (double t : times) count += (t >= w0 && t <= w1) ? 1 : 0;
    if (count < 5 || !(w1 > w0)) {
        const double first = values.front();
        const double last = values.back();
        out.note = last < first ? "decayed to the round-off floor before the fit window"
                                : "no decay signal (too few samples above the floor)";
        return out;
    }
    out.fit = diagnostics::fit_decay_rate(times, values, w0, w1);
    return out;
}

TheoremReport theorem_report(const std::vector<DiagnosticsRecord>& records, const Params& params,
                             const ReportOptions& options) {
    TheoremReport report;
    if (records.empty()) {
        report.verdicts.push_back({"records", false, "no diagnostics records", ""});
        return report;
    }
    const auto times = column(records, [](const auto& r) { return r.time; });
    const double sigma_bar = records.front().mean_sigma;
    const double D = params.diffusivity;

    // (a) exponential decay of the L^p norms and of grad phi in L^inf.
    std::array<std::optional<double>, 5> sigma_rates{};
    auto decay_verdict = [&](const std::string& key, const std::vector<double>& series) -> std::optional<double> {
        const SeriesFit f = fit_series(times, series, options);
        if (!f.fit) {
            report.verdicts.push_back({key, true, f.note, ""});
            return std::nullopt;
        }
        const bool pass = f.fit->rate > 0.0;
        report.verdicts.push_back({key, pass,
                                   "rate = " + fmt(f.fit->rate) + " over [" + fmt(f.fit->t0) + ", " + fmt(f.fit->t1) +
                                       "] (fit rms " + fmt(f.fit->residual) + ")",
                                   "theorem"});
        return f.fit->rate;
    };
    std::optional<double> rho_l2_rate;
    for (std::size_t i = 0; i < diagnostics::kLpExponents.size(); ++i) {
        if (i == 1) continue;  // p = 3 is recorded but not fitted
        const auto rate = decay_verdict(std::string("decay.rho_l") + p_label(i),
                                        column(records, [i](const auto& r) { return r.lp_rho[i]; }));
        if (i == 0) rho_l2_rate = rate;
    }
    for (std::size_t i = 0; i < diagnostics::kLpExponents.size(); ++i) {
        if (i == 1) continue;
        sigma_rates[i] = decay_verdict(std::string("decay.sigma_dev_l") + p_label(i),
                                       column(records, [i](const auto& r) { return r.lp_sigma_dev[i]; }));
    }
    decay_verdict("decay.grad_phi_linf", column(records, [](const auto& r) { return r.linf_grad_phi; }));

    // Uniform-in-p decay of sigma - sigma_bar.
    if (sigma_rates[0] && *sigma_rates[0] > 0.0) {
        double worst = std::numeric_limits<double>::infinity();
        std::string detail;
        for (std::size_t i : {2u, 3u, 4u}) {
            if (!sigma_rates[i]) continue;
            const double ratio = *sigma_rates[i] / *sigma_rates[0];
            worst = std::min(worst, ratio);
            detail += std::string(" p=") + p_label(i) + ":" + fmt(ratio);
        }
        report.verdicts.push_back({"decay.sigma_dev_uniform_in_p", worst >= options.uniform_p_ratio,
                                   "rate ratios to p=2 (need >= " + fmt(options.uniform_p_ratio) + "):" + detail,
                                   "theorem"});
    } else {
        report.verdicts.push_back({"decay.sigma_dev_uniform_in_p", true, "no decay signal for p = 2", ""});
    }

    // Poincare bound on |rho|^2 + |sigma - sigma_bar|^2 and its fitted rate.
    {
        const auto energy = column(records, [](const auto& r) { return r.lyapunov_functional(); });
        const double e0 = energy.front();
        const double lambda = 2.0 * D * options.poincare_constant;
        double worst = 0.0;
        bool pass = true;
        for (std::size_t i = 0; i < energy.size(); ++i) {
            const double bound = e0 * std::exp(-lambda * (times[i] - times.front())) * (1.0 + options.poincare_slack);
            if (energy[i] > bound) pass = false;
            if (bound > 0.0) worst = std::max(worst, energy[i] / bound);
        }
        report.verdicts.push_back({"decay.l2_sum_poincare_bound", pass,
                                   "max ratio to E(0) exp(-" + fmt(lambda) + " t)(1+" + fmt(options.poincare_slack) +
                                       ") = " + fmt(worst),
                                   "theorem"});
        const SeriesFit f = fit_series(times, energy, options);
        if (f.fit) {
            const double need = lambda * (1.0 - options.poincare_slack);
            report.verdicts.push_back({"decay.l2_sum_rate", f.fit->rate >= need,
                                       "rate = " + fmt(f.fit->rate) + " (need >= " + fmt(need) + ")", "theorem"});
        } else {
            report.verdicts.push_back({"decay.l2_sum_rate", true, f.note, ""});
        }
    }

    if (options.linearized_rate) {
        const double expected = *options.linearized_rate;
        if (rho_l2_rate) {
            const double rel = std::abs(*rho_l2_rate - expected) / expected;
            report.verdicts.push_back({"decay.rho_l2_linearized", rel <= options.linearized_tolerance,
                                       "rate = " + fmt(*rho_l2_rate) + ", expected " + fmt(expected) +
                                           ", relative error " + fmt(rel),
                                       "theorem"});
        } else {
            report.verdicts.push_back({"decay.rho_l2_linearized", false, "no decay signal to compare", "theorem"});
        }
    }

    // (b) boundedness: finite, and no growth over the second half of the run.
    auto bounded = [&](const std::string& key, const std::vector<double>& series) {
        const std::size_t half = series.size() / 2;
        const double early = *std::max_element(series.begin(), series.begin() + std::max<std::size_t>(half, 1));
        const double late = *std::max_element(series.begin() + half, series.end());
        const bool pass = all_finite(series) && late <= early * (1.0 + 1e-9) + 1e-300;
        report.verdicts.push_back(
            {key, pass, "max = " + fmt(std::max(early, late)) + ", final = " + fmt(series.back()), "theorem"});
    };
    bounded("bounded.grad_rho_l2", column(records, [](const auto& r) { return r.l2_grad_rho; }));
    bounded("bounded.grad_sigma_l2", column(records, [](const auto& r) { return r.l2_grad_sigma; }));
    bounded("bounded.rho_h2", column(records, [](const auto& r) { return r.h2_rho; }));
    bounded("bounded.sigma_h2", column(records, [](const auto& r) { return r.h2_sigma; }));
    bounded("bounded.rho_h3", column(records, [](const auto& r) { return r.h3_rho; }));
    bounded("bounded.sigma_h3", column(records, [](const auto& r) { return r.h3_sigma; }));

    // (c) time integrals of the dissipation, trapezoidal in time.
    {
        double lap = 0.0, grad_lap = 0.0;
        for (std::size_t i = 1; i < records.size(); ++i) {
            const double dt = times[i] - times[i - 1];
            auto l = [](const DiagnosticsRecord& r) {
                return r.l2_lap_rho * r.l2_lap_rho + r.l2_lap_sigma * r.l2_lap_sigma;
            };
            auto g = [](const DiagnosticsRecord& r) {
                return r.l2_grad_lap_rho * r.l2_grad_lap_rho + r.l2_grad_lap_sigma * r.l2_grad_lap_sigma;
            };
            lap += 0.5 * dt * (l(records[i - 1]) + l(records[i]));
            grad_lap += 0.5 * dt * (g(records[i - 1]) + g(records[i]));
        }
        report.verdicts.push_back({"integral.laplacian_l2_squared", std::isfinite(lap), "value = " + fmt(lap), "theorem"});
        report.verdicts.push_back(
            {"integral.grad_laplacian_l2_squared", std::isfinite(grad_lap), "value = " + fmt(grad_lap), "theorem"});
    }

    // (d) positivity of the concentrations.
    {
        double cmin = std::numeric_limits<double>::infinity();
        for (const auto& r : records) cmin = std::min({cmin, r.min_c1, r.min_c2});
        const double tol = options.positivity_tolerance * sigma_bar;
        report.verdicts.push_back({"positivity.min_concentration", cmin >= -tol,
                                   "min c_i = " + fmt(cmin) + " (tolerance " + fmt(-tol) + ")", "theorem"});
    }

    // (e) conservation of neutrality and of sigma_bar.
    {
        double rho_drift = 0.0, sigma_drift = 0.0;
        for (const auto& r : records) {
            rho_drift = std::max(rho_drift, std::abs(r.mean_rho));
            sigma_drift = std::max(sigma_drift, std::abs(r.mean_sigma - sigma_bar));
        }
        const double tol = options.mean_tolerance * sigma_bar;
        report.verdicts.push_back({"conservation.mean_rho", rho_drift <= tol,
                                   "max |mean rho| = " + fmt(rho_drift) + " (tolerance " + fmt(tol) + ")", "theorem"});
        report.verdicts.push_back({"conservation.mean_sigma", sigma_drift <= tol,
                                   "max |mean sigma - sigma_bar| = " + fmt(sigma_drift) + " (tolerance " + fmt(tol) + ")",
                                   "theorem"});
    }

    // Velocity gradient growth is reported; its rate constant may have either sign.
    {
        const auto gu = column(records, [](const auto& r) { return r.lr_grad_u_max_r(); });
        const SeriesFit f = fit_series(times, gu, options);
        std::string detail = "initial = " + fmt(gu.front()) + ", final = " + fmt(gu.back());
        if (f.fit) detail += ", fitted exponent = " + fmt(-f.fit->rate);
        report.verdicts.push_back({"report.grad_u_lr", all_finite(gu), detail, "theorem"});
    }
    return report;
}

TheoremReport identity_report(const std::vector<DiagnosticsRecord>& records, const ReportOptions& options) {
    TheoremReport report;
    double energy = 0.0, lyapunov = 0.0, curl = 0.0, contraction = 0.0;
    double energy_t = 0.0, lyapunov_t = 0.0;
    bool contraction_ok = true;
    for (const auto& r : records) {
        if (r.identities.energy_relative() > energy) {
            energy = r.identities.energy_relative();
            energy_t = r.time;
        }
        if (r.identities.lyapunov_relative() > lyapunov) {
            lyapunov = r.identities.lyapunov_relative();
            lyapunov_t = r.time;
        }
        curl = std::max(curl, r.curl.residual / r.curl.scale);
        // The projector is an L2 contraction; allow only round-off.
        if (r.l2_u > r.l2_rho_grad_phi * (1.0 + 1e-12)) contraction_ok = false;
        if (r.l2_rho_grad_phi > 0.0) contraction = std::max(contraction, r.l2_u / r.l2_rho_grad_phi);
    }
    report.verdicts.push_back({"identity.energy", energy <= options.identity_tolerance,
                               "max relative residual = " + fmt(energy) + " at t = " + fmt(energy_t) + " (tolerance " +
                                   fmt(options.identity_tolerance) + ")",
                               "resolution"});
    report.verdicts.push_back({"identity.lyapunov", lyapunov <= options.identity_tolerance,
                               "max relative residual = " + fmt(lyapunov) + " at t = " + fmt(lyapunov_t) +
                                   " (tolerance " + fmt(options.identity_tolerance) + ")",
                               "resolution"});
    report.verdicts.push_back({"identity.curl", curl <= options.curl_tolerance,
                               "max residual / scale = " + fmt(curl) + " (tolerance " + fmt(options.curl_tolerance) + ")",
                               "resolution"});
    report.verdicts.push_back({"identity.velocity_contraction", contraction_ok,
                               "max |u|_2 / |rho grad phi|_2 = " + fmt(contraction), "resolution"});

    bool monotone = true;
    double worst_growth = 0.0;
    if (!records.empty()) {
        const double floor = 1e-14 * records.front().lyapunov_functional();
        for (std::size_t i = 1; i < records.size(); ++i) {
            const double growth = records[i].lyapunov_functional() - records[i - 1].lyapunov_functional();
            worst_growth = std::max(worst_growth, growth);
            if (growth > floor) monotone = false;
        }
    }
    report.verdicts.push_back({"identity.lyapunov_monotone", monotone,
                               "largest increase between records = " + fmt(worst_growth), "resolution"});
    return report;
}

TheoremReport stability_report(const StabilitySeries& s, double growth_bound) {
    TheoremReport report;
    double early = 0.0;
    bool early_ok = true;
    bool late_ok = true;
    std::size_t late_points = 0;
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        if (s.times[i] <= 1.0) {
            early = std::max(early, s.distances[i] / s.delta);
            if (!(s.distances[i] <= growth_bound * s.delta)) early_ok = false;
        }
        if (s.times[i] >= 2.0 && i > 0 && s.times[i - 1] >= 2.0) {
            ++late_points;
            if (!(s.distances[i] <= s.distances[i - 1])) late_ok = false;
        }
    }
    report.verdicts.push_back({"stability.early_growth", early_ok,
                               "max distance/delta for t <= 1 = " + fmt(early) + " (bound " + fmt(growth_bound) + ")",
                               "theorem"});
    if (late_points == 0) {
        report.verdicts.push_back({"stability.late_decrease", true, "not applicable (run ends before t = 2)", ""});
    } else {
        report.verdicts.push_back({"stability.late_decrease", late_ok,
                                   "final distance/delta = " + fmt(s.distances.back() / s.delta) + " over " +
                                       std::to_string(late_points) + " intervals with t >= 2",
                                   "theorem"});
    }
    return report;
}

}  // namespace npd

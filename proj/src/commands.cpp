#include "npd/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "npd/diagnostics_csv.hpp"
#include "npd/errors.hpp"
#include "npd/initial.hpp"
#include "npd/snapshot.hpp"
#include "npd/spectral.hpp"
#include "npd/timestepper.hpp"

namespace npd {

namespace fs = std::filesystem;

namespace {

std::string num(double v, int digits = 6) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

const char* kind_name(NumericalFailure::Kind k) {
    switch (k) {
        case NumericalFailure::Kind::BlowUp: return "blow-up";
        case NumericalFailure::Kind::Positivity: return "positivity";
        case NumericalFailure::Kind::MaxSteps: return "max-steps";
    }
    return "unknown";
}

void report_failure(const NumericalFailure& e, std::ostream& err) {
    err << "numerical failure (" << kind_name(e.kind()) << "): " << e.what() << '\n';
}

// Runs `body`, mapping library exceptions onto exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "configuration error:\n";
        for (const auto& issue : e.issues()) err << "  " << issue << '\n';
        return kExitUsage;
    } catch (const NumericalFailure& e) {
        report_failure(e, err);
        return kExitNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError(path.string() + ": cannot open for writing");
    out << text;
}

double state_norm(const IonState& s) {
    const double r = diagnostics::lp_norm(s.rho, 2.0);
    const double g = diagnostics::lp_norm(s.sigma, 2.0);
    return std::sqrt(r * r + g * g);
}

std::string summary_line(const IonState& s, std::size_t steps) {
    const double sigma_bar = s.sigma_bar();
    RealField dev = s.sigma;
    for (double& v : dev.values()) v -= sigma_bar;
    std::ostringstream os;
    os << "t = " << num(s.time) << ", steps = " << steps << ", |rho|_2 = " << num(diagnostics::lp_norm(s.rho, 2.0))
       << ", |sigma - sigma_bar|_2 = " << num(diagnostics::lp_norm(dev, 2.0))
       << ", |rho|_inf = " << num(s.rho.max_abs()) << ", min c_i = " << num(s.min_concentration());
    return os.str();
}

IonState run_fixed(const IonState& initial, const Params& params, StepperConfig cfg, double dt) {
    cfg.dt = dt;
    return integrate(initial, params, cfg);
}

}  // namespace

diagnostics::DiagnosticsOptions diagnostics_options(const RunConfig& config) {
    diagnostics::DiagnosticsOptions o;
    o.r_values = config.output.w1r_exponents;
    std::sort(o.r_values.begin(), o.r_values.end());
    return o;
}

Trajectory run_trajectory(const IonState& initial, const RunConfig& config) {
    Trajectory t;
    const auto options = diagnostics_options(config);
    const std::size_t every = std::max<std::size_t>(config.output.diagnostics_every, 1);
    std::size_t last_step = 0;
    std::size_t last_recorded = std::numeric_limits<std::size_t>::max();
    double last_time = initial.time;
    std::vector<double> dts;
    t.final_state = integrate(initial, config.params, config.stepper, [&](const IonState& s, std::size_t step) {
        if (step > 0) dts.push_back(s.time - last_time);
        last_time = s.time;
        last_step = step;
        if (step % every == 0) {
            t.records.push_back(diagnostics::compute_record(s, config.params, options));
            last_recorded = step;
        }
    });
    if (last_recorded != last_step) t.records.push_back(diagnostics::compute_record(t.final_state, config.params, options));
    t.steps = last_step;
    // The last step may have been shortened to land on t_end.
    if (dts.size() > 1) dts.pop_back();
    t.min_dt = dts.empty() ? 0.0 : *std::min_element(dts.begin(), dts.end());
    return t;
}

ReportOptions report_options(const RunConfig& config) {
    ReportOptions o;
    const auto& g = config.grid;
    double lambda = std::numeric_limits<double>::infinity();
    for (int a = 0; a < g.dim; ++a) {
        const double k = Grid::kTwoPi / g.length[a];
        lambda = std::min(lambda, k * k);
    }
    o.poincare_constant = lambda;
    const auto& ic = config.initial;
    if (ic.kind == "single_mode" && ic.amplitude > 0.0 && ic.amplitude <= 0.05 * ic.sigma_bar) {
        double k2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double k = Grid::kTwoPi * ic.mode[a] / g.length[a];
            k2 += k * k;
        }
        o.linearized_rate = config.params.diffusivity * (k2 + ic.sigma_bar / config.params.epsilon);
    }
    return o;
}

IonState perturbed(const IonState& state, double delta) {
    const auto& grid = state.grid_ptr();
    const double k = Grid::kTwoPi / grid->length(0);
    const double a = delta / std::sqrt(grid->volume());
    IonState out = state;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double x = grid->coordinate(0, i);
        out.rho[i] += a * std::cos(k * x);
        out.sigma[i] += a * std::sin(k * x);
    }
    return out;
}

double state_distance(const IonState& a, const IonState& b) {
    const double r = diagnostics::lp_norm(a.rho - b.rho, 2.0);
    const double s = diagnostics::lp_norm(a.sigma - b.sigma, 2.0);
    return std::sqrt(r * r + s * s);
}

StabilitySeries stability_series(const IonState& a0, const IonState& b0, const Params& params, double dt,
                                 double t_end, std::size_t every) {
    if (!(dt > 0.0)) throw PreconditionError("stability_series: dt must be > 0");
    every = std::max<std::size_t>(every, 1);
    StabilitySeries s;
    s.delta = state_distance(a0, b0);
    IonState a = a0, b = b0;
    s.times.push_back(a.time);
    s.distances.push_back(s.delta);
    const double t0 = a0.time;
    const auto steps = static_cast<std::size_t>(std::ceil((t_end - t0) / dt * (1.0 - 1e-12)));
    for (std::size_t n = 1; n <= steps; ++n) {
        const double t_next = n == steps ? t_end : t0 + static_cast<double>(n) * dt;
        const double h = t_next - a.time;
        a = step(a, h, params);
        b = step(b, h, params);
        a.time = b.time = t_next;
        if (n % every == 0 || n == steps) {
            s.times.push_back(t_next);
            s.distances.push_back(state_distance(a, b));
        }
    }
    return s;
}

double spectral_distance(const IonState& coarse, const IonState& reference) {
    const Grid& gc = coarse.grid();
    const Grid& gf = reference.grid();
    if (gc.dim() != gf.dim()) throw PreconditionError("spectral_distance: dimensions differ");
    for (int a = 0; a < gc.dim(); ++a) {
        if (gc.length(a) != gf.length(a) || gc.n(a) > gf.n(a)) {
            throw PreconditionError("spectral_distance: reference must be a refinement of the coarse grid");
        }
    }
    double total = 0.0;
    const std::pair<const RealField*, const RealField*> pairs[] = {{&coarse.rho, &reference.rho},
                                                                   {&coarse.sigma, &reference.sigma}};
    for (const auto& [fc, ff] : pairs) {
        const SpectralField c = spectral::forward_transform(*fc);
        const SpectralField f = spectral::forward_transform(*ff);
        double sum = 0.0;
        std::vector<bool> matched(f.size(), false);
        std::array<int, 3> m{};
        for (std::size_t i = 0; i < c.size(); ++i) {
            bool nyquist = false;
            for (int a = 0; a < gc.dim(); ++a) {
                m[a] = gc.lattice(a)[i];
                if (2 * m[a] == gc.n(a)) nyquist = true;
            }
            // Coarse Nyquist modes have no faithful counterpart; count them as error.
            if (nyquist) {
                sum += std::norm(c[i]);
                continue;
            }
            const std::size_t j = gf.flat_index_of_mode(std::span<const int>(m.data(), gc.dim()));
            matched[j] = true;
            sum += std::norm(c[i] - f[j]);
        }
        for (std::size_t j = 0; j < f.size(); ++j) {
            if (!matched[j]) sum += std::norm(f[j]);
        }
        total += sum;
    }
    return std::sqrt(total * gf.volume());
}

int cmd_run(const std::string& config_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig config = load_config(config_path);
        const IonState initial = initial_state(config);
        const fs::path dir = out_dir.empty() ? fs::path(config.output.directory) : fs::path(out_dir);
        fs::create_directories(dir);
        write_text(dir / "config.json", emit_config(config));
        const std::string csv = (dir / "diagnostics.csv").string();
        fs::remove(csv);

        const auto options = diagnostics_options(config);
        const std::size_t diag_every = std::max<std::size_t>(config.output.diagnostics_every, 1);
        const std::size_t snap_every = config.output.snapshot_every;
        std::size_t last_step = 0;
        std::size_t last_recorded = std::numeric_limits<std::size_t>::max();
        auto observer = [&](const IonState& s, std::size_t step) {
            last_step = step;
            if (step % diag_every == 0) {
                append_diagnostics(diagnostics::compute_record(s, config.params, options), csv);
                last_recorded = step;
            }
            if (snap_every > 0 && step % snap_every == 0) {
                char name[40];
                std::snprintf(name, sizeof name, "snapshot_%08zu.npd", step);
                write_snapshot(s, (dir / name).string());
            }
        };
        IonState final_state;
        try {
            final_state = integrate(initial, config.params, config.stepper, observer);
        } catch (const NumericalFailure& e) {
            write_snapshot(e.last_valid(), (dir / "failure.npd").string());
            report_failure(e, err);
            err << "last valid state written to " << (dir / "failure.npd").string() << '\n';
            return kExitNumerical;
        }
        if (last_recorded != last_step) {
            append_diagnostics(diagnostics::compute_record(final_state, config.params, options), csv);
        }
        write_snapshot(final_state, (dir / "final.npd").string());
        out << "run complete: " << summary_line(final_state, last_step) << '\n';
        return kExitOk;
    });
}

int cmd_verify(const std::string& config_path, Suite suite, const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig config = load_config(config_path);
        const IonState initial = initial_state(config);
        const Trajectory traj = run_trajectory(initial, config);
        const ReportOptions options = report_options(config);

        TheoremReport report;
        if (suite == Suite::Identities || suite == Suite::All) report.append(identity_report(traj.records, options));
        if (suite == Suite::Theorems || suite == Suite::All) {
            report.append(theorem_report(traj.records, config.params, options));
            const double dt = config.stepper.dt ? *config.stepper.dt
                                                : (traj.min_dt > 0.0 ? traj.min_dt : config.stepper.t_end);
            const StabilitySeries series = stability_series(initial, perturbed(initial, 1e-6), config.params, dt,
                                                            config.stepper.t_end, config.output.diagnostics_every);
            report.append(stability_report(series));
        }
        const std::string text = report.to_text();
        out << text;
        out << (report.all_pass() ? "verify: all claims PASS" : "verify: some claims FAIL") << " ("
            << report.verdicts.size() << " checks, " << traj.records.size() << " records, "
            << summary_line(traj.final_state, traj.steps) << ")\n";
        if (!out_dir.empty()) {
            fs::create_directories(out_dir);
            write_text(fs::path(out_dir) / "report.txt", text);
            const std::string csv = (fs::path(out_dir) / "diagnostics.csv").string();
            fs::remove(csv);
            for (const auto& r : traj.records) append_diagnostics(r, csv);
        }
        return report.all_pass() ? kExitOk : kExitNumerical;
    });
}

int cmd_convergence(const std::string& config_path, Axis axis, const std::string& out_dir, std::ostream& out,
                    std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig config = load_config(config_path);
        std::ostringstream table;
        bool pass = true;

        if (axis == Axis::Time) {
            const IonState initial = initial_state(config);
            const double dt0 = config.stepper.dt ? *config.stepper.dt
                                                 : stable_dt(initial, config.params, config.stepper);
            constexpr int kRungs = 4;
            std::vector<IonState> finals;
            std::vector<double> dts;
            for (int r = 0; r < kRungs; ++r) {
                dts.push_back(dt0 / std::pow(2.0, r));
                finals.push_back(run_fixed(initial, config.params, config.stepper, dts.back()));
            }
            const double floor = 1e-13 * state_norm(finals.back());
            table << "dt,difference,order\n";
            double prev = 0.0;
            for (int r = 0; r + 1 < kRungs; ++r) {
                const double e = state_distance(finals[r], finals[r + 1]);
                std::string order = "";
                if (r > 0 && prev > floor && e > floor) {
                    const double p = std::log2(prev / e);
                    order = num(p, 4);
                    if (!(p >= 1.9 && p <= 2.3)) pass = false;
                }
                table << num(dts[r], 6) << "," << num(e, 6) << "," << order << '\n';
                prev = e;
            }
            table << "temporal order: " << (pass ? "PASS" : "FAIL") << " (need [1.9, 2.3] between successive rungs)\n";
        } else {
            const GridPtr ref_grid = config.grid.make();
            std::vector<GridPtr> grids;
            for (int div : {8, 4, 2}) {
                GridConfig g = config.grid;
                for (int& n : g.n) {
                    if (n % div != 0 || n / div < 8 || (n / div) % 2 != 0) {
                        throw PreconditionError("convergence: grid.n must be divisible by 8 with n/8 >= 8 and even");
                    }
                    n /= div;
                }
                grids.push_back(g.make());
            }
            const auto [r1, r2] = generate_initial(config.initial, ref_grid);
            const IonState ref_initial = from_concentrations(r1, r2);
            const double dt = config.stepper.dt ? *config.stepper.dt
                                                : stable_dt(ref_initial, config.params, config.stepper);
            const IonState reference = run_fixed(ref_initial, config.params, config.stepper, dt);
            const double floor = 1e-12 * state_norm(reference);
            table << "n,error,ratio\n";
            double prev = 0.0;
            for (std::size_t r = 0; r < grids.size(); ++r) {
                const auto [c1, c2] = generate_initial(config.initial, grids[r]);
                const IonState fin = run_fixed(from_concentrations(c1, c2), config.params, config.stepper, dt);
                const double e = spectral_distance(fin, reference);
                std::string ratio;
                if (r > 0) {
                    ratio = e > 0.0 ? num(prev / e, 4) : "inf";
                    if (!(e <= std::max(prev / 10.0, floor))) pass = false;
                }
                table << grids[r]->n(0) << "," << num(e, 6) << "," << ratio << '\n';
                prev = e;
            }
            table << "reference n = " << ref_grid->n(0) << ", round-off floor = " << num(floor, 3) << '\n';
            table << "spatial convergence: " << (pass ? "PASS" : "FAIL")
                  << " (need >= 10x per rung until the floor)\n";
        }
        out << table.str();
        if (!out_dir.empty()) {
            fs::create_directories(out_dir);
            write_text(fs::path(out_dir) / (axis == Axis::Time ? "convergence_time.txt" : "convergence_space.txt"),
                       table.str());
        }
        return pass ? kExitOk : kExitNumerical;
    });
}

int cmd_decay_fit(const std::string& csv_path, const std::string& column, double t0, double t1, std::ostream& out,
                  std::ostream& err) {
    return guarded(err, [&] {
        const CsvTable table = read_csv(csv_path);
        if (!table.has(column)) {
            err << "no column '" << column << "' in " << csv_path << "; available:";
            for (const auto& c : table.columns) err << ' ' << c;
            err << '\n';
            return kExitUsage;
        }
        if (!table.has("time")) {
            err << csv_path << ": no 'time' column\n";
            return kExitUsage;
        }
        const auto times = table.column("time");
        const auto values = table.column(column);
        diagnostics::DecayFit fit;
        try {
            fit = diagnostics::fit_decay_rate(times, values, t0, t1);
        } catch (const PreconditionError& e) {
            err << e.what() << '\n';
            return kExitUsage;
        }
        out << "column = " << column << ", window = [" << num(t0) << ", " << num(t1) << "], samples = " << fit.samples
            << ", rate = " << num(fit.rate, 10) << ", prefactor = " << num(fit.prefactor, 10)
            << ", residual = " << num(fit.residual, 3) << '\n';
        return kExitOk;
    });
}

}  // namespace npd

#include "npd/initial.hpp"

#include <cmath>
#include <sstream>

#include "npd/errors.hpp"
#include "npd/rng.hpp"

namespace npd {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Periodized 1D Gaussian factor; images up to two periods away.
double periodic_gaussian(double x, double center, double width, double length) {
    double s = 0.0;
    for (int m = -2; m <= 2; ++m) {
        const double d = x - center + m * length;
        s += std::exp(-0.5 * d * d / (width * width));
    }
    return s;
}

double gaussian_at(const Grid& grid, std::span<const double> x, const std::vector<double>& center, double width) {
    double g = 1.0;
    for (int a = 0; a < grid.dim(); ++a) g *= periodic_gaussian(x[a], center[a], width, grid.length(a));
    return g;
}

RealField gaussian(const GridPtr& grid, const std::vector<double>& center, double width) {
    return RealField::from_function(grid, [&](std::span<const double> x) { return gaussian_at(*grid, x, center, width); });
}

void neutralize(RealField& c1, RealField& c2) {
    const double half = 0.5 * (c1.mean() - c2.mean());
    for (double& v : c1.values()) v -= half;
    for (double& v : c2.values()) v += half;
}

// Returns f / sum(|a| + |b|), so |f| <= 1 on any grid.
RealField random_band_field(const GridPtr& grid, int k_max, SplitMix64 rng) {
    const int d = grid->dim();
    struct Mode {
        std::array<int, 3> m;
        double a, b;
    };
    std::vector<Mode> modes;
    std::array<int, 3> m{0, 0, 0};
    const int span = 2 * k_max + 1;
    int total = 1;
    for (int a = 0; a < d; ++a) total *= span;
    for (int idx = 0; idx < total; ++idx) {
        int rest = idx;
        for (int a = d - 1; a >= 0; --a) {
            m[a] = rest % span - k_max;
            rest /= span;
        }
        int norm2 = 0;
        int first = 0;
        for (int a = 0; a < d; ++a) {
            norm2 += m[a] * m[a];
            if (first == 0) first = m[a];
        }
        if (norm2 == 0 || norm2 > k_max * k_max || first < 0) continue;
        const double a_coef = 2.0 * rng.uniform() - 1.0;
        const double b_coef = 2.0 * rng.uniform() - 1.0;
        modes.push_back({m, a_coef, b_coef});
    }
    double bound = 0.0;
    for (const auto& mode : modes) bound += std::abs(mode.a) + std::abs(mode.b);
    if (bound == 0.0) bound = 1.0;
    return RealField::from_function(grid, [&](std::span<const double> x) {
        double s = 0.0;
        for (const auto& mode : modes) {
            double phase = 0.0;
            for (int a = 0; a < d; ++a) phase += mode.m[a] * Grid::kTwoPi / grid->length(a) * x[a];
            s += mode.a * std::cos(phase) + mode.b * std::sin(phase);
        }
        return s / bound;
    });
}

}  // namespace

std::pair<RealField, RealField> generate_initial(const InitialCondition& ic, const GridPtr& grid) {
    const double sbar = ic.sigma_bar;
    if (!(sbar > 0.0)) throw ConfigError({"initial_condition.sigma_bar: must be > 0"});
    const double half = 0.5 * sbar;
    if (ic.kind == "equilibrium") {
        return {RealField::constant(grid, half), RealField::constant(grid, half)};
    }
    if (ic.kind == "single_mode") {
        if (ic.amplitude > sbar) {
            throw ConfigError({"initial_condition.amplitude: " + fmt(ic.amplitude) +
                               " makes a concentration negative; max admissible amplitude is " + fmt(sbar)});
        }
        if (static_cast<int>(ic.mode.size()) != grid->dim()) {
            throw ConfigError({"initial_condition.mode: expected " + std::to_string(grid->dim()) + " components"});
        }
        const double a = 0.5 * ic.amplitude;
        const RealField wave = RealField::from_function(grid, [&](std::span<const double> x) {
            double phase = 0.0;
            for (int k = 0; k < grid->dim(); ++k) phase += ic.mode[k] * Grid::kTwoPi / grid->length(k) * x[k];
            return std::cos(phase);
        });
        RealField c1(grid), c2(grid);
        for (std::size_t i = 0; i < wave.size(); ++i) {
            c1[i] = half + a * wave[i];
            c2[i] = half - a * wave[i];
        }
        return {std::move(c1), std::move(c2)};
    }
    if (ic.kind == "gaussian_blobs") {
        if (ic.centers.size() != 2) throw ConfigError({"initial_condition.centers: need two blob centers"});
        const RealField g1 = gaussian(grid, ic.centers[0], ic.width);
        const RealField g2 = gaussian(grid, ic.centers[1], ic.width);
        // Charge at the c1 centre, independent of the sampling grid.
        const double peak = gaussian_at(*grid, ic.centers[0], ic.centers[0], ic.width) -
                            gaussian_at(*grid, ic.centers[0], ic.centers[1], ic.width);
        if (!(peak > 1e-3)) throw ConfigError({"initial_condition.centers: the two blobs coincide"});
        const double scale = ic.amplitude / peak;
        const double max_mean = std::max(g1.mean(), g2.mean());
        const double max_amplitude = peak * half / max_mean;
        if (ic.amplitude > max_amplitude) {
            throw ConfigError({"initial_condition.amplitude: " + fmt(ic.amplitude) +
                               " leaves a negative background; max admissible amplitude is " + fmt(max_amplitude)});
        }
        RealField c1(grid), c2(grid);
        const double b1 = half - scale * g1.mean();
        const double b2 = half - scale * g2.mean();
        for (std::size_t i = 0; i < c1.size(); ++i) {
            c1[i] = std::max(b1, 0.0) + scale * g1[i];
            c2[i] = std::max(b2, 0.0) + scale * g2[i];
        }
        neutralize(c1, c2);
        return {std::move(c1), std::move(c2)};
    }
    if (ic.kind == "random_band") {
        if (!ic.seed) throw ConfigError({"initial_condition.seed: random_band needs a seed"});
        if (ic.amplitude < 0.0 || ic.amplitude > 1.0) {
            throw ConfigError({"initial_condition.amplitude: " + fmt(ic.amplitude) +
                               " is outside [0, 1]; max admissible amplitude is 1"});
        }
        SplitMix64 root(*ic.seed);
        SplitMix64 s1 = root.split();
        SplitMix64 s2 = root.split();
        std::array<RealField, 2> c{random_band_field(grid, ic.k_max, s1), random_band_field(grid, ic.k_max, s2)};
        for (auto& f : c) {
            for (double& v : f.values()) v = half * (1.0 + ic.amplitude * v);
        }
        neutralize(c[0], c[1]);
        return {std::move(c[0]), std::move(c[1])};
    }
    throw ConfigError({"initial_condition.kind: unknown kind \"" + ic.kind + "\""});
}

std::pair<RealField, RealField> generate_initial(const RunConfig& config) {
    return generate_initial(config.initial, config.grid.make());
}

IonState initial_state(const RunConfig& config) {
    auto [c1, c2] = generate_initial(config);
    return from_concentrations(c1, c2);
}

}  // namespace npd

#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "npd/field.hpp"
#include "npd/grid.hpp"
#include "npd/model.hpp"

namespace npd::testing {

inline constexpr double kPi = 3.14159265358979323846;

// O(N^2) discrete Fourier transform straight from the definition,
// fhat(m) = 1/N sum_x f(x) exp(-i k(m).x). Shares nothing with the FFT path
// except the grid's coordinate and lattice tables.
inline std::vector<std::complex<double>> brute_dft(const RealField& f) {
    const Grid& g = f.grid();
    const std::size_t n = g.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::complex<double> s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double phase = 0.0;
            for (int a = 0; a < g.dim(); ++a) {
                phase += 2.0 * kPi / g.length(a) * g.lattice(a)[j] * g.coordinate(a, i);
            }
            s += f[i] * std::polar(1.0, -phase);
        }
        out[j] = s / static_cast<double>(n);
    }
    return out;
}

// Evaluates sum_m c(m) exp(i k(m).x) at the grid points of `g`.
inline RealField brute_synthesis(const GridPtr& g, const std::vector<std::vector<int>>& modes,
                                 const std::vector<std::complex<double>>& coeffs) {
    return RealField::from_function(g, [&](std::span<const double> x) {
        std::complex<double> s = 0.0;
        for (std::size_t q = 0; q < modes.size(); ++q) {
            double phase = 0.0;
            for (int a = 0; a < g->dim(); ++a) phase += 2.0 * kPi / g->length(a) * modes[q][a] * x[a];
            s += coeffs[q] * std::polar(1.0, phase);
        }
        return s.real();
    });
}

inline double max_diff(const RealField& a, const RealField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// A smooth neutral admissible state with modes |m_j| <= 2 on every axis.
inline IonState smooth_state(const GridPtr& g, double amp = 0.3, double sigma_bar = 2.0) {
    auto rho = RealField::from_function(g, [&](std::span<const double> x) {
        double y = x.size() > 1 ? x[1] : 0.0;
        double z = x.size() > 2 ? x[2] : 0.0;
        return amp * (std::cos(x[0]) + 0.5 * std::sin(x[0] + y) + 0.3 * std::cos(2 * y - z) + 0.2 * std::sin(z));
    });
    auto sigma = RealField::from_function(g, [&](std::span<const double> x) {
        double y = x.size() > 1 ? x[1] : 0.0;
        double z = x.size() > 2 ? x[2] : 0.0;
        return sigma_bar + amp * (0.7 * std::sin(y) + 0.4 * std::cos(x[0] - 2 * y) + 0.1 * std::cos(2 * z));
    });
    return IonState{rho, sigma, 0.0};
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("npd_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace npd::testing

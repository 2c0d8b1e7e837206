#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "npd/grid.hpp"
#include "npd/model.hpp"
#include "npd/timestepper.hpp"

namespace npd {

struct GridConfig {
    int dim = 2;
    std::vector<int> n;
    std::vector<double> length;  ///< filled with 2 pi per axis when omitted

    GridPtr make() const { return Grid::create(dim, n, length); }
};

/// Initial-condition family and its parameters. Fields not used by `kind`
/// keep their defaults and are neither parsed nor emitted.
struct InitialCondition {
    std::string kind;  ///< equilibrium | single_mode | gaussian_blobs | random_band
    double sigma_bar = 0.0;
    /// single_mode: charge amplitude a (requires a <= sigma_bar);
    /// gaussian_blobs: target max |rho|; random_band: relative amplitude in [0, 1].
    double amplitude = 0.0;
    std::vector<int> mode;                     ///< single_mode lattice vector
    double width = 0.5;                        ///< gaussian_blobs standard deviation
    std::vector<std::vector<double>> centers;  ///< gaussian_blobs: {c1 blob, c2 blob}
    int k_max = 3;                             ///< random_band lattice radius
    std::optional<std::uint64_t> seed;         ///< random_band
};

struct OutputConfig {
    std::string directory = "out";
    std::size_t snapshot_every = 0;  ///< steps between snapshots; 0 keeps only the final one
    std::size_t diagnostics_every = 1;
    std::vector<double> w1r_exponents{2.0, 4.0};
};

struct RunConfig {
    GridConfig grid;
    Params params;
    StepperConfig stepper;
    InitialCondition initial;
    OutputConfig output;
};

/// Parses the JSON configuration. Unknown keys are rejected, every missing
/// required key is listed, and each problem names its path. Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Normalized JSON with every default spelled out.
std::string emit_config(const RunConfig& config);

}  // namespace npd

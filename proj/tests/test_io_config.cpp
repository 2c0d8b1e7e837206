#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "npd/config.hpp"
#include "npd/diagnostics_csv.hpp"
#include "npd/errors.hpp"
#include "npd/initial.hpp"
#include "npd/rng.hpp"
#include "npd/snapshot.hpp"
#include "support.hpp"

using namespace npd;
using namespace npd::testing;

namespace {

const char* kMinimal = R"({
  "grid": {"dim": 2, "n": 16},
  "params": {"epsilon": 1.0, "diffusivity": 1.0},
  "stepper": {"dt": 0.01, "t_end": 1.0},
  "initial_condition": {"kind": "equilibrium", "sigma_bar": 2.0}
})";

std::string with_ic(const std::string& ic) {
    return R"({"grid": {"dim": 2, "n": 16}, "params": {"epsilon": 1.0, "diffusivity": 1.0},
               "stepper": {"dt": "adaptive", "t_end": 1.0}, "initial_condition": )" +
           ic + "}";
}

std::vector<std::string> issues_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.issues();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& s) {
    for (const auto& x : v)
        if (x.find(s) != std::string::npos) return true;
    return false;
}

std::uint64_t fnv1a(const RealField& a, const RealField& b) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const RealField* f : {&a, &b}) {
        for (double v : f->values()) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, 8);
            for (int k = 0; k < 8; ++k) {
                h ^= (bits >> (8 * k)) & 0xff;
                h *= 0x100000001b3ULL;
            }
        }
    }
    return h;
}

}  // namespace

TEST_SUITE("io_config") {

TEST_CASE("minimal config is filled with defaults") {
    const RunConfig c = parse_config(kMinimal);
    REQUIRE(c.grid.length.size() == 2);
    CHECK(c.grid.length[0] == doctest::Approx(2 * kPi));
    CHECK(c.grid.n == std::vector<int>{16, 16});
    CHECK(c.stepper.cfl_advective == 0.5);
    CHECK(c.stepper.reaction_safety == 0.5);
    CHECK(c.stepper.dt == 0.01);
    CHECK(c.output.diagnostics_every == 1);
    CHECK(parse_config(with_ic(R"({"kind": "equilibrium", "sigma_bar": 1})")).stepper.dt == std::nullopt);
}

TEST_CASE("invalid values name their path") {
    std::string text = kMinimal;
    text.replace(text.find("\"epsilon\": 1.0"), 14, "\"epsilon\": 0");
    const auto issues = issues_of(text);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].find("params.epsilon") == 0);
    CHECK(issues[0].find("> 0") != std::string::npos);
}

TEST_CASE("unknown keys are rejected and missing keys listed exhaustively") {
    std::string text = kMinimal;
    text.replace(text.find("\"dim\""), 5, "\"dimm\"");
    CHECK(any_contains(issues_of(text), "grid.dimm"));
    const auto missing = issues_of(R"({"grid": {}, "params": {}, "stepper": {}, "initial_condition": {}})");
    for (const char* key : {"grid.dim", "grid.n", "params.epsilon", "params.diffusivity", "stepper.dt",
                            "stepper.t_end", "initial_condition.kind", "initial_condition.sigma_bar"}) {
        CHECK_MESSAGE(any_contains(missing, key), key);
    }
    CHECK(!issues_of("{not json").empty());
    CHECK(any_contains(issues_of(with_ic(R"({"kind": "random_band", "sigma_bar": 2, "amplitude": 0.5})")),
                       "initial_condition.seed"));
    CHECK(any_contains(issues_of(with_ic(R"({"kind": "random_band", "sigma_bar": 2, "amplitude": 0.5, "seed": 1,
                                             "k_max": 9})")),
                       "initial_condition.k_max"));
}

TEST_CASE("emit is a normalization: emit(parse(c)) is a fixed point") {
    for (const std::string& text :
         {std::string(kMinimal),
          with_ic(R"({"kind": "gaussian_blobs", "sigma_bar": 2, "amplitude": 0.8, "width": 0.4})"),
          with_ic(R"({"kind": "random_band", "sigma_bar": 2, "amplitude": 0.5, "seed": 18446744073709551615})"),
          with_ic(R"({"kind": "single_mode", "sigma_bar": 2, "amplitude": 0.02, "mode": [1, 2]})")}) {
        const std::string once = emit_config(parse_config(text));
        CHECK(emit_config(parse_config(once)) == once);
    }
    const RunConfig rb = parse_config(with_ic(R"({"kind": "random_band", "sigma_bar": 2, "amplitude": 0.5,
                                                 "seed": 18446744073709551615})"));
    CHECK(*rb.initial.seed == 18446744073709551615ULL);
}

TEST_CASE("SplitMix64 reproduces the published reference stream") {
    SplitMix64 a(0);
    CHECK(a.next() == 0xE220A8397B1DCDAFULL);
    CHECK(a.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(a.next() == 0x06C45D188009454FULL);
    SplitMix64 b(1234567);
    CHECK(b.next() == 6457827717110365317ULL);
    CHECK(b.next() == 3203168211198807973ULL);
    SplitMix64 c(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = c.uniform();
        CHECK((u >= 0.0 && u < 1.0));
    }
}

TEST_CASE("equilibrium and single-mode data") {
    RunConfig c = parse_config(kMinimal);
    auto [c1, c2] = generate_initial(c);
    CHECK(c1.min() == 1.0);
    CHECK(c1.max() == 1.0);
    CHECK(c2.max() == 1.0);

    c = parse_config(with_ic(R"({"kind": "single_mode", "sigma_bar": 2, "amplitude": 2})"));
    auto [s1, s2] = generate_initial(c);
    CHECK(std::min(s1.min(), s2.min()) == 0.0);
    CHECK_NOTHROW(from_concentrations(s1, s2));

    c.initial.amplitude = 2.5;
    CHECK_THROWS_WITH_AS(generate_initial(c), doctest::Contains("max admissible amplitude is 2"), ConfigError);
}

TEST_CASE("gaussian blobs are neutral, nonnegative and rejected beyond the admissible amplitude") {
    RunConfig c = parse_config(with_ic(R"({"kind": "gaussian_blobs", "sigma_bar": 2, "amplitude": 1.0})"));
    const IonState s = initial_state(c);
    CHECK(std::abs(s.rho.mean()) < 1e-16);
    CHECK(s.sigma_bar() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s.rho.max_abs() <= 1.0 + 1e-12);
    CHECK(s.rho.max_abs() > 0.85);
    c.initial.amplitude = 1e3;
    CHECK_THROWS_WITH_AS(generate_initial(c), doctest::Contains("max admissible amplitude"), ConfigError);
}

TEST_CASE("generated data always pass from_concentrations") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const double sbar = 0.5 + 3 * u(gen);
        const double amp = u(gen);
        const std::uint64_t seed = gen();
        const int dim = trial % 5 == 0 ? 3 : 2;
        for (const std::string kind : {"equilibrium", "single_mode", "gaussian_blobs", "random_band"}) {
            RunConfig c = parse_config(kMinimal);
            c.grid.dim = dim;
            c.grid.n.assign(static_cast<std::size_t>(dim), dim == 3 ? 8 : 16);
            c.grid.length.assign(static_cast<std::size_t>(dim), 2 * kPi);
            c.initial.kind = kind;
            c.initial.sigma_bar = sbar;
            c.initial.amplitude = kind == "single_mode" ? amp * sbar : (kind == "gaussian_blobs" ? amp * 0.3 * sbar : amp);
            c.initial.mode.assign(static_cast<std::size_t>(dim), 0);
            c.initial.mode[0] = 1;
            c.initial.k_max = 2;
            c.initial.seed = seed;
            c.initial.centers = {std::vector<double>(static_cast<std::size_t>(dim), 2 * kPi / 3),
                                 std::vector<double>(static_cast<std::size_t>(dim), 4 * kPi / 3)};
            auto [c1, c2] = generate_initial(c);
            const IonState s = from_concentrations(c1, c2);
            CHECK(std::abs(s.rho.mean()) < 1e-14 * sbar);
            CHECK(s.sigma_bar() == doctest::Approx(sbar).epsilon(1e-12));
            CHECK(s.min_concentration() >= -1e-12);
        }
    }
}

TEST_CASE("random_band matches the independent reference and is bit-reproducible") {
    const RunConfig c = parse_config(R"({"grid": {"dim": 2, "n": 8}, "params": {"epsilon": 1, "diffusivity": 1},
        "stepper": {"dt": 0.01, "t_end": 1},
        "initial_condition": {"kind": "random_band", "sigma_bar": 2, "amplitude": 0.5, "seed": 42, "k_max": 2}})");
    auto [c1, c2] = generate_initial(c);
    std::ifstream in(NPD_GOLDEN_DIR "/random_band_2d_n8.txt");
    REQUIRE(in);
    std::string line;
    std::getline(in, line);
    std::vector<double> ref;
    double v;
    while (in >> v) ref.push_back(v);
    REQUIRE(ref.size() == 128);
    double err = 0.0;
    for (std::size_t i = 0; i < 64; ++i) {
        err = std::max(err, std::abs(c1[i] - ref[i]));
        err = std::max(err, std::abs(c2[i] - ref[64 + i]));
    }
    CHECK(err < 1e-14);
    auto [d1, d2] = generate_initial(c);
    CHECK(fnv1a(c1, c2) == fnv1a(d1, d2));
    CHECK(fnv1a(c1, c2) != 0);
}

TEST_CASE("snapshot round trip is bit-identical") {
    const auto dir = temp_dir("snap");
    auto g = Grid::create(3, std::vector<int>{8, 10, 12}, std::vector<double>{1.0, 2.0, 3.0});
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Snapshot s;
    s.grid = g;
    s.time = 0.123456789;
    s.c1 = RealField(g);
    s.c2 = RealField(g);
    for (std::size_t i = 0; i < g->size(); ++i) {
        s.c1[i] = u(gen);
        s.c2[i] = u(gen);
    }
    const auto path = (dir / "a.npd").string();
    write_snapshot(s, path);
    CHECK(std::filesystem::file_size(path) == 4 + 4 + 4 + 12 + 24 + 8 + 4 + 2 * (4 + 2) + 2 * g->size() * 8);
    const Snapshot r = read_snapshot(path);
    CHECK(r.time == s.time);
    CHECK(r.grid->same_shape(*g));
    CHECK(std::memcmp(r.c1.values().data(), s.c1.values().data(), g->size() * 8) == 0);
    CHECK(std::memcmp(r.c2.values().data(), s.c2.values().data(), g->size() * 8) == 0);
    // Writing the read snapshot reproduces the file byte for byte.
    write_snapshot(r, (dir / "b.npd").string());
    CHECK(read_file(dir / "a.npd") == read_file(dir / "b.npd"));
}

TEST_CASE("snapshot layout is little-endian with the documented header") {
    const auto dir = temp_dir("snap_layout");
    auto g = Grid::create(2, 8);
    IonState s{RealField(g), RealField::constant(g, 1.0), 2.5};
    write_snapshot(s, (dir / "s.npd").string());
    const std::string bytes = read_file(dir / "s.npd");
    CHECK(bytes.substr(0, 4) == "NPD1");
    CHECK(bytes.substr(4, 4) == std::string("\x04\x03\x02\x01", 4));
    CHECK(bytes.substr(8, 4) == std::string("\x02\x00\x00\x00", 4));
    CHECK(bytes.substr(12, 8) == std::string("\x08\x00\x00\x00\x08\x00\x00\x00", 8));
    // time 2.5 = 0x4004000000000000
    CHECK(bytes.substr(36, 8) == std::string("\x00\x00\x00\x00\x00\x00\x04\x40", 8));
    CHECK(bytes.substr(44, 4) == std::string("\x02\x00\x00\x00", 4));
    CHECK(bytes.substr(48, 6) == std::string("\x02\x00\x00\x00" "c1", 6));
    // first c1 value 0.5 = 0x3FE0000000000000
    CHECK(bytes.substr(60, 8) == std::string("\x00\x00\x00\x00\x00\x00\xE0\x3F", 8));
}

TEST_CASE("snapshot reader rejects damaged or mismatched files") {
    const auto dir = temp_dir("snap_bad");
    auto g = Grid::create(2, 8);
    const IonState s = smooth_state(g);
    const auto path = dir / "s.npd";
    write_snapshot(s, path.string());
    const std::string bytes = read_file(path);

    write_file(dir / "t.npd", bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_WITH_AS(read_snapshot((dir / "t.npd").string()), doctest::Contains("payload"), FormatError);
    write_file(dir / "h.npd", bytes.substr(0, 30));
    CHECK_THROWS_WITH_AS(read_snapshot((dir / "h.npd").string()), doctest::Contains("truncated"), FormatError);
    write_file(dir / "x.npd", bytes + "z");
    CHECK_THROWS_AS(read_snapshot((dir / "x.npd").string()), FormatError);
    std::string bad = bytes;
    bad[3] = '2';
    write_file(dir / "m.npd", bad);
    CHECK_THROWS_WITH_AS(read_snapshot((dir / "m.npd").string()), doctest::Contains("magic"), FormatError);

    auto g3 = Grid::create(3, 8);
    CHECK_THROWS_WITH_AS(read_snapshot(path.string(), *g3), doctest::Contains("2D n=(8,8)"), FormatError);
    const Snapshot ok = read_snapshot(path.string(), *g);
    const IonState back = ok.to_state();
    CHECK(max_diff(back.rho, s.rho) < 1e-15);
}

TEST_CASE("diagnostics CSV writes one header and round-trips every digit") {
    const auto dir = temp_dir("csv");
    const auto path = (dir / "d.csv").string();
    auto g = Grid::create(2, 16);
    const Params p{1.0, 1.0};
    auto r1 = diagnostics::compute_record(smooth_state(g, 0.3), p);
    auto r2 = diagnostics::compute_record(smooth_state(g, 0.2), p);
    r2.time = 0.1;
    append_diagnostics(r1, path);
    append_diagnostics(r2, path);
    const std::string text = read_file(path);
    CHECK(text.find(diagnostics_csv_header() + "\n") == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(diagnostics_csv_header() ==
          "time,l2_rho,l2_sigma_dev,l3_rho,l4_rho,l6_rho,linf_rho,linf_sigma_dev,l2_grad_rho,l2_grad_sigma,"
          "lr_grad_rho,l2_grad_phi,linf_grad_phi,l2_u,lr_grad_u,h2_rho,h2_sigma,h3_rho,h3_sigma,min_c1,min_c2,"
          "mean_rho,mean_sigma,energy_residual,lyapunov_residual");
    const CsvTable t = read_csv(path);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.column("l2_rho")[0] == r1.lp_rho[0]);
    CHECK(t.column("h3_sigma")[1] == r2.h3_sigma);
    CHECK(t.column("lr_grad_u")[0] == r1.lr_grad_u_max_r());
    CHECK(t.column("mean_rho")[0] == r1.mean_rho);
    CHECK(t.column("time")[1] == 0.1);

    write_file(dir / "other.csv", "time,foo\n0,1\n");
    CHECK_THROWS_WITH_AS(append_diagnostics(r1, (dir / "other.csv").string()), doctest::Contains("header"),
                         FormatError);
}

}

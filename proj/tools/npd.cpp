#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "npd/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Nernst-Planck-Darcy pseudo-spectral solver"};
    app.require_subcommand(1);

    std::string config, out, diagnostics, column;
    std::string suite = "all", axis = "time";
    std::vector<double> window;

    auto* run = app.add_subcommand("run", "integrate a configured run to t_end");
    run->add_option("--config", config, "JSON run configuration")->required();
    run->add_option("--out", out, "output directory (default: output.directory)");

    auto* verify = app.add_subcommand("verify", "check identities and decay claims along a run");
    verify->add_option("--config", config, "JSON run configuration")->required();
    verify->add_option("--suite", suite, "identities | theorems | all")
        ->check(CLI::IsMember({"identities", "theorems", "all"}));
    verify->add_option("--out", out, "directory for report.txt and diagnostics.csv");

    auto* conv = app.add_subcommand("convergence", "refinement study in space or time");
    conv->add_option("--config", config, "JSON run configuration")->required();
    conv->add_option("--axis", axis, "space | time")->check(CLI::IsMember({"space", "time"}));
    conv->add_option("--out", out, "directory for the convergence table");

    auto* fit = app.add_subcommand("decay-fit", "fit an exponential decay rate to a diagnostics column");
    fit->add_option("--diagnostics", diagnostics, "diagnostics CSV file")->required();
    fit->add_option("--column", column, "column name")->required();
    fit->add_option("--window", window, "fit window T0 T1")->expected(2)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : npd::kExitUsage;
    }

    if (*run) return npd::cmd_run(config, out, std::cout, std::cerr);
    if (*verify) {
        const std::map<std::string, npd::Suite> suites{
            {"identities", npd::Suite::Identities}, {"theorems", npd::Suite::Theorems}, {"all", npd::Suite::All}};
        return npd::cmd_verify(config, suites.at(suite), out, std::cout, std::cerr);
    }
    if (*conv) {
        return npd::cmd_convergence(config, axis == "space" ? npd::Axis::Space : npd::Axis::Time, out, std::cout,
                                    std::cerr);
    }
    return npd::cmd_decay_fit(diagnostics, column, window[0], window[1], std::cout, std::cerr);
}

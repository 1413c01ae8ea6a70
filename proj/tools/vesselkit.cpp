#include <iostream>

#include <CLI11.hpp>

#include "vesselkit/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"vesselkit: sigma1-inner functions, vessels, moments and Nevanlinna-Pick interpolation"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir;
    std::size_t steps = 0;
    std::uint64_t seed = 0;
    auto* run = app.add_subcommand("run", "run a scenario config");
    run->add_option("config", config, "scenario JSON")->required();
    auto* out_opt = run->add_option("--out", out_dir, "output directory");
    auto* steps_opt = run->add_option("--steps", steps, "grid steps override")->check(CLI::PositiveNumber);
    auto* seed_opt = run->add_option("--seed", seed, "RNG seed override");

    auto* fx = app.add_subcommand("fixtures", "print the built-in fixtures as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (fx->parsed()) {
        std::cout << vesselkit::io::dump(vesselkit::cli::fixtures_json());
        return 0;
    }
    vesselkit::cli::RunOptions opts;
    if (*out_opt) opts.out_dir = out_dir;
    if (*steps_opt) opts.steps = steps;
    if (*seed_opt) opts.seed = seed;
    return vesselkit::cli::run_file(config, opts, std::cout, std::cerr);
}

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "experiment_config.hpp"

using namespace ergoswitch::cli;

int main(int argc, char** argv) {
    CLI::App app{"ergoswitch: solvers and Monte Carlo checks for ergodic switching control"};
    app.require_subcommand(1);

    std::string validate_config;
    auto* validate = app.add_subcommand("validate", "audit the model assumptions");
    validate->add_option("config", validate_config, "experiment config file")->required();

    std::string run_config;
    std::string stage = "all";
    std::uint64_t seed = 0;
    std::string out_dir;
    bool force = false;
    auto* run = app.add_subcommand("run", "run solver stages and write CSV outputs");
    run->add_option("config", run_config, "experiment config file")->required();
    run->add_option("--stage", stage, "parabolic, elliptic, ergodic, dualgame or all")
        ->check(CLI::IsMember({"parabolic", "elliptic", "ergodic", "dualgame", "all"}));
    auto* seed_opt = run->add_option("--seed", seed, "Monte Carlo master seed");
    auto* out_opt = run->add_option("--out", out_dir, "output directory");
    run->add_flag("--force", force, "proceed even if validation fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code::usage;
    }

    if (*validate) return cmd_validate(validate_config, std::cout, std::cerr);

    RunOptions options;
    options.stage = parse_stage(stage);
    if (*seed_opt) options.seed = seed;
    if (*out_opt) options.out_dir = out_dir;
    options.force = force;
    return cmd_run(run_config, options, std::cout, std::cerr);
}

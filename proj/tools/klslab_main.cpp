#include <CLI11.hpp>
#include <iostream>

#include "klslab/config.hpp"
#include "klslab/errors.hpp"
#include "klslab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for stochastic localization and KLS bounds"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool seed_set = false;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--seed", seed, "master seed override")
            ->each([&seed_set](const std::string&) { seed_set = true; });
        sub->add_option("--out", out_dir, "output directory override");
    };
    CLI::App* simulate = app.add_subcommand("simulate", "run localization paths");
    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    CLI::App* bounds = app.add_subcommand("bounds", "evaluate closed-form bounds");
    add_common(simulate);
    add_common(verify);
    add_common(bounds);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        klslab::ExperimentConfig config = klslab::load_config(config_path);
        config.command = app.get_subcommands().front()->get_name();
        if (seed_set) config.master_seed = seed;
        if (!out_dir.empty()) config.out_dir = out_dir;
        return klslab::run_command(config);
    } catch (const klslab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const klslab::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

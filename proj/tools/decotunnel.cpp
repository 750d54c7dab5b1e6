#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "decotunnel/config.hpp"
#include "decotunnel/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"decotunnel: tunnelling in a partitioned box under decoherence"};
    app.require_subcommand(1);

    std::string config_path;
    decotunnel::cli::RunOptions options;
    std::uint64_t seed = 0;
    bool dump = false;
    int threads = 0;

    const char* subcommands[] = {"modes", "evolve", "rates", "regime-map", "env", "validate"};
    const char* descriptions[] = {
        "export the eigenmode table",
        "two-state trajectory of a selected pair",
        "closed-form tunnelling-rate table over an omega_d grid",
        "tunnelling frequency vs decoherence frequency per mode class",
        "environment-coupled trajectories of the reduced density matrix",
        "brute-force oracle suite (exit 3 if any check fails)"};

    for (int i = 0; i < 6; ++i) {
        auto* sub = app.add_subcommand(subcommands[i], descriptions[i]);
        sub->add_option("-c,--config", config_path, "experiment configuration file")
            ->required();
        sub->add_option("--out", options.out_dir, "output directory (default: .)");
        auto* seed_opt = sub->add_option("--seed", seed, "override the configured RNG seed");
        sub->add_option("--threads", threads, "worker threads for grid sweeps");
        sub->add_flag("--normalized", options.force_normalized,
                      "emit frequencies in 1/tau_0 units and rates in omega_r units");
        sub->add_flag("--dump-config", dump, "print the validated configuration and exit");
        sub->callback([&, seed_opt] {
            if (seed_opt->count() > 0) options.seed = seed;
        });
    }

    CLI11_PARSE(app, argc, argv);

    if (threads <= 0) {
        if (const char* env = std::getenv("DECOTUNNEL_THREADS")) threads = std::atoi(env);
    }
    options.threads = threads > 0 ? threads : 1;

    const std::string sub = app.get_subcommands().front()->get_name();
    if (dump) {
        try {
            std::cout << decotunnel::cli::dump_config(decotunnel::cli::load_config(config_path));
            return 0;
        } catch (const decotunnel::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 1;
        }
    }
    return decotunnel::cli::run(sub, config_path, options);
}

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiment/experiment.hpp"
#include "experiment/run_config.hpp"

namespace {

constexpr int exit_config_error = 1;
constexpr int exit_divergence = 2;

}  // namespace

int main(int argc, char** argv) {
    using namespace elf::experiment;

    CLI::App app{"Empirical-loss-fitting line search experiments"};
    std::optional<std::string> config_path;
    std::optional<std::string> problem;
    std::optional<std::string> optimizer;
    std::optional<long> steps;
    std::optional<std::size_t> batch_size;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> overrides;
    bool dump = false;
    bool quiet = false;

    app.add_option("--config", config_path, "key=value configuration file");
    app.add_option("--problem", problem, "quadratic | logistic | mlp");
    app.add_option("--optimizer", optimizer, "elf | sgd | adam");
    app.add_option("--steps", steps, "training budget in batch loads");
    app.add_option("--batch-size", batch_size, "samples per batch (classification problems)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out, "output directory");
    app.add_option("--set", overrides, "override a configuration key (key=value), repeatable");
    app.add_flag("--dump-cross-section", dump, "write the loss cross section instead of training");
    app.add_flag("--quiet", quiet, "no summary on stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config_error;
    }

    RunConfig config;
    try {
        if (config_path) {
            std::ifstream in(*config_path);
            if (!in) {
                throw ConfigError("cannot read config file '" + *config_path + "'");
            }
            std::stringstream buffer;
            buffer << in.rdbuf();
            config = parse_config_text(buffer.str(), config);
        }
        if (problem) config.problem = *problem;
        if (optimizer) config.optimizer = *optimizer;
        if (steps) config.steps = *steps;
        if (batch_size) config.batch_size = *batch_size;
        if (seed) config.seed = *seed;
        if (out) config.out = *out;
        for (const auto& assignment : overrides) {
            const auto [key, value] = split_assignment(assignment);
            set_value(config, key, value);
        }
        if (quiet) config.verbosity = 0;
        validate(config);

        const ExperimentResult result = dump ? dump_cross_section(config) : run_experiment(config);
        write_artifacts(config.out, result.artifacts);
        if (config.verbosity > 0) {
            if (dump) {
                std::cout << "cross section written to " << config.out << " (empirical loss at origin "
                          << format_double(result.final_loss) << ")\n";
            } else {
                std::cout << config.optimizer << " on " << config.problem << ": " << result.total_steps
                          << " steps, " << result.line_searches << " line searches, final loss "
                          << format_double(result.final_loss);
                if (result.train_accuracy) {
                    std::cout << ", train accuracy " << format_double(*result.train_accuracy);
                }
                std::cout << "\nartifacts in " << config.out << '\n';
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const elf::DivergenceError& e) {
        std::cerr << "diverged: " << e.what() << '\n';
        return exit_divergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config_error;
    }
    return 0;
}

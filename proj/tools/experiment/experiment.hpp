#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "elf/controller.hpp"
#include "elf/problems.hpp"
#include "experiment/run_config.hpp"

namespace elf::experiment {

/// A file produced by an experiment, held in memory until written.
struct Artifact {
    std::string name;
    std::string content;
};

struct ExperimentResult {
    std::vector<Artifact> artifacts;
    double final_loss = 0.0;  // empirical training loss at the final parameters
    std::optional<double> train_accuracy;
    long total_steps = 0;
    std::size_t line_searches = 0;

    [[nodiscard]] const Artifact* find(std::string_view name) const;
};

[[nodiscard]] std::unique_ptr<StochasticProblem> make_problem(const RunConfig& config);

/// Runs the configured optimizer and renders training_log.csv, one
/// line_<i>.csv per line search, fits.csv, summary.txt and config.txt.
/// Throws ConfigError or DivergenceError.
[[nodiscard]] ExperimentResult run_experiment(const RunConfig& config);

/// Per-batch and summary cross-section profiles (cross_section.csv,
/// cross_section_summary.csv, config.txt) at the configured snapshot.
[[nodiscard]] ExperimentResult dump_cross_section(const RunConfig& config);

/// Writes every artifact into `directory`, creating it when needed. On
/// failure, files already written are removed and std::runtime_error is thrown.
void write_artifacts(const std::filesystem::path& directory, const std::vector<Artifact>& artifacts);

[[nodiscard]] std::string render_training_log(const TrainingLog& log);
[[nodiscard]] std::string render_line_samples(const LineSearchResult& result);
[[nodiscard]] std::string render_fits(const std::vector<LineSearchRecord>& searches, int max_degree);

}  // namespace elf::experiment

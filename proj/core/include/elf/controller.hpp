#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "elf/line_search.hpp"
#include "elf/problems.hpp"
#include "elf/random.hpp"
#include "elf/training_log.hpp"

namespace elf {

struct ElfConfig {
    int window_size = 150;
    double loss_improvement_factor = 0.01;
    double momentum_beta = 0.4;
    double decrease_factor_delta = 0.2;
    int lines_to_average = 3;
    LineSearchConfig line_search{};
    std::vector<double> grid_search_candidates{1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
    int grid_search_probe_steps = 20;
    bool sample_from_validation = true;

    void validate() const;
};

struct OptimizerState {
    Vector theta;
    Vector momentum_buffer;
    double update_step = 0.0;
    std::vector<double> losses;  // training losses since the last search phase
    double last_mean_loss = 0.0;
    long t = 0;
    long t_of_last_update = -1;
    double expected_per_step_improvement = std::numeric_limits<double>::infinity();
    double interval_width = 1.0;  // initial sampling width of every search, set by the grid search
};

/// Inputs of the re-search decision evaluated before every step.
struct TriggerInputs {
    long t = 0;
    long t_of_last_update = -1;
    int window_size = 150;
    double last_mean_loss = 0.0;
    double window_mean_loss = not_available;  // mean of the loss window, NaN when empty
    double expected_per_step_improvement = std::numeric_limits<double>::infinity();
    double loss_improvement_factor = 0.01;
};

[[nodiscard]] double real_improvement(const TriggerInputs& in);
[[nodiscard]] double expected_improvement(const TriggerInputs& in);

/// True when (t - t_of_last_update + 1) is a multiple of (window_size + 1)
/// and the real improvement is at most factor times the expected one.
[[nodiscard]] bool line_search_due(const TriggerInputs& in);

/// Smallest s > s_min with fit(s) = fit(s_min) + delta (fit(0) - fit(s_min)),
/// searched on (s_min, bracket_end]. Returns s_min for delta == 0 or when the
/// level is not reached inside the bracket.
[[nodiscard]] double apply_decrease_factor(const Polynomial& fit, double s_min, double delta,
                                           double bracket_end, const ScanOptions& scan = {});

using LineSearchRoutine = std::function<LineSearchResult(const LineOracle&, const LineSearchConfig&, Rng&)>;

/// Applied result of one line search inside a search phase.
struct LineSearchRecord {
    LineSearchResult result;
    double applied_step = 0.0;  // 0 for discarded searches
};

struct ElfRun {
    TrainingLog log;
    std::vector<LineSearchRecord> searches;
    OptimizerState final_state;
    double grid_search_step = 0.0;
};

/// Named random streams the optimizer draws from.
struct ElfStreams {
    Rng train_order;
    Rng validation_order;
    Rng line_search;
};

/// Empirical-loss-fitting optimizer.
///
/// A run starts with the step-size grid search and one search phase, then
/// alternates normalized SGD steps of length update_step with new search
/// phases whenever line_search_due() holds. Every batch load advances t.
class ElfOptimizer {
public:
    ElfOptimizer(const StochasticProblem& problem, ElfConfig config, ElfStreams streams, Vector initial_theta);

    /// Replaces the line search (tests inject rigged searches here).
    void set_line_search(LineSearchRoutine routine) { line_search_ = std::move(routine); }

    /// Throws DivergenceError on a non-finite training loss.
    [[nodiscard]] ElfRun run(long steps_to_train);

    /// Largest grid candidate whose probe lowers the mean batch loss; the
    /// smallest candidate when none does. Seeds update_step and the first
    /// sampling width.
    double initial_grid_search();

    /// `lines_to_average` consecutive searches, each applied immediately;
    /// update_step becomes the mean of the valid decreased steps.
    void trigger_line_searches();

    /// One normalized step of length update_step along the momentum direction.
    double sgd_step();

    [[nodiscard]] const OptimizerState& state() const noexcept { return state_; }
    [[nodiscard]] OptimizerState& state() noexcept { return state_; }
    [[nodiscard]] const TrainingLog& log() const noexcept { return log_; }
    [[nodiscard]] const std::vector<LineSearchRecord>& searches() const noexcept { return searches_; }

private:
    double load_training_batch(const Vector& theta, Vector& gradient);
    Vector momentum_direction(const Vector& gradient);

    const StochasticProblem& problem_;
    ElfConfig config_;
    BatchStream train_stream_;
    BatchStream validation_stream_;
    Rng line_search_rng_;
    LineSearchRoutine line_search_;
    OptimizerState state_;
    TrainingLog log_;
    std::vector<LineSearchRecord> searches_;
    double grid_search_step_ = 0.0;
};

}  // namespace elf

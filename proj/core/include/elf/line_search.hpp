#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "elf/polynomial.hpp"
#include "elf/random.hpp"
#include "elf/regression.hpp"

namespace elf {

struct LineSearchConfig {
    int adaptations = 5;               // sampling rounds, each after the first re-sizes the interval
    int samples_per_adaptation = 100;  // losses measured per round
    double initial_interval_width = 1.0;
    int min_window_size = 50;
    int folds = 5;
    int max_degree = 10;
    ScanOptions scan{};

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Batch loss at step size s along the fixed search line; each call is
/// expected to draw a fresh batch.
using LineOracle = std::function<double(double)>;

struct LineSearchResult {
    bool valid = false;
    double minimum_position = 0.0;
    double expected_improvement = 0.0;  // fit(0) - fit(minimum_position)
    std::size_t batches_consumed = 0;   // oracle invocations
    double final_interval_width = 0.0;
    FitReport fit;
    SampleSet samples;
    std::vector<int> rounds;  // round index of each sample
};

/// Empirical-loss line search.
///
/// Round 0 measures one baseline loss at s = 0 and `samples_per_adaptation`
/// losses at uniformly random positions in [0, width]; later rounds first
/// re-size the width with choose_sample_interval. After every round a
/// polynomial is fitted to all samples (CV-selected degree) and its minimum
/// closest to 0 located on [0, 2 * width]. Positions of a round are sorted
/// before the oracle is called, so the batch-to-position pairing does not
/// depend on generation order.
///
/// The result is valid when the final fit has a minimum at a positive step
/// that lies below fit(0).
[[nodiscard]] LineSearchResult elf_line_search(const LineOracle& oracle, const LineSearchConfig& config,
                                               Rng& rng);

/// Width of the next sampling interval.
///
/// The window is every sample in [0, 2 * minimum_position], or the
/// `min_window_size` samples nearest to the minimum when that is too few. The
/// returned width is the position at or beyond the minimum, nearest to it,
/// where |fit| reaches the third quartile of the window's losses, searched on
/// [minimum_position, max(4 * minimum_position, previous_width)]. Without a
/// crossing it is 2 * max(minimum_position, smallest positive sample position).
[[nodiscard]] double choose_sample_interval(double minimum_position, const SampleSet& samples,
                                            const Polynomial& fit, int min_window_size,
                                            double previous_width, const ScanOptions& scan = {});

/// Indices of the `count` samples nearest to `position` (ties by smaller
/// index), ordered by distance.
[[nodiscard]] std::vector<std::size_t> nearest_samples(const SampleSet& samples, double position,
                                                       std::size_t count);

}  // namespace elf

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "elf/polynomial.hpp"
#include "elf/random.hpp"

namespace elf {

/// Parallel arrays of sampled step positions and the batch losses measured
/// there. Only finite values are admitted.
class SampleSet {
public:
    SampleSet() = default;

    /// Throws std::invalid_argument on length mismatch or non-finite values.
    SampleSet(std::vector<double> positions, std::vector<double> losses);

    void add(double position, double loss);

    [[nodiscard]] std::size_t size() const noexcept { return positions_.size(); }
    [[nodiscard]] bool empty() const noexcept { return positions_.empty(); }
    [[nodiscard]] std::span<const double> positions() const noexcept { return positions_; }
    [[nodiscard]] std::span<const double> losses() const noexcept { return losses_; }
    [[nodiscard]] double position(std::size_t i) const { return positions_.at(i); }
    [[nodiscard]] double loss(std::size_t i) const { return losses_.at(i); }

    /// Samples at the given indices, in the given order.
    [[nodiscard]] SampleSet subset(std::span<const std::size_t> indices) const;

private:
    std::vector<double> positions_;
    std::vector<double> losses_;
};

struct FitReport {
    Polynomial polynomial;
    int chosen_degree = 0;
    std::vector<double> cv_test_errors;  // one entry per degree tried, starting at 0
};

/// Least-squares polynomial of the given degree. Positions are mapped affinely
/// onto [-1, 1], solved with column-pivoting Householder QR and mapped back,
/// so the coefficients apply to raw positions.
///
/// Throws std::invalid_argument for a negative degree, degree >= sample count
/// or an empty sample set.
[[nodiscard]] Polynomial fit_polynomial(int degree, const SampleSet& samples);

/// Mean squared error of `p` over `samples`.
[[nodiscard]] double mean_squared_error(const Polynomial& p, const SampleSet& samples);

/// Assignment of samples to cross-validation folds: one shuffle of the sample
/// indices, then a contiguous split into near-equal folds.
class FoldPlan {
public:
    /// Throws std::invalid_argument unless 2 <= folds <= sample_count.
    FoldPlan(std::size_t sample_count, int folds, Rng& rng);

    [[nodiscard]] int folds() const noexcept { return static_cast<int>(bounds_.size()) - 1; }
    [[nodiscard]] std::size_t sample_count() const noexcept { return order_.size(); }
    [[nodiscard]] std::span<const std::size_t> test_indices(int fold) const;
    [[nodiscard]] std::vector<std::size_t> training_indices(int fold) const;
    [[nodiscard]] std::size_t smallest_training_size() const;

private:
    std::vector<std::size_t> order_;
    std::vector<std::size_t> bounds_;
};

/// Mean over folds of the test-fold MSE, summed in fold order.
[[nodiscard]] double cross_validation_error(int degree, const SampleSet& samples, const FoldPlan& plan);

/// Builds a fresh FoldPlan from `rng` and returns cross_validation_error.
[[nodiscard]] double kfold_cv_error(int degree, const SampleSet& samples, int folds, Rng& rng);

/// CV errors at or below this level (1e-24 times the mean squared loss) are
/// round-off: the data is already fitted exactly.
[[nodiscard]] double roundoff_floor(const SampleSet& samples);

/// Increasing-degree model selection: degrees 0, 1, ... are scored on one
/// shared FoldPlan; the search stops at the first degree whose CV error
/// exceeds its predecessor's, or when both are at the round-off floor, and
/// keeps the predecessor. Without a stop, the largest degree tried is kept. The chosen degree is refitted on all
/// samples. Degrees are capped so every training fold can determine them.
[[nodiscard]] FitReport select_degree_and_fit(const SampleSet& samples, int max_degree, int folds, Rng& rng);

}  // namespace elf

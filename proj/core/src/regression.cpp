#include "elf/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace elf {

SampleSet::SampleSet(std::vector<double> positions, std::vector<double> losses)
    : positions_(std::move(positions)), losses_(std::move(losses)) {
    if (positions_.size() != losses_.size()) {
        throw std::invalid_argument("SampleSet: positions and losses differ in length");
    }
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(positions_.begin(), positions_.end(), finite) ||
        !std::all_of(losses_.begin(), losses_.end(), finite)) {
        throw std::invalid_argument("SampleSet: non-finite value");
    }
}

void SampleSet::add(double position, double loss) {
    if (!std::isfinite(position) || !std::isfinite(loss)) {
        throw std::invalid_argument("SampleSet: non-finite value");
    }
    positions_.push_back(position);
    losses_.push_back(loss);
}

SampleSet SampleSet::subset(std::span<const std::size_t> indices) const {
    SampleSet out;
    out.positions_.reserve(indices.size());
    out.losses_.reserve(indices.size());
    for (const std::size_t i : indices) {
        out.positions_.push_back(positions_.at(i));
        out.losses_.push_back(losses_.at(i));
    }
    return out;
}

Polynomial fit_polynomial(int degree, const SampleSet& samples) {
    if (degree < 0) {
        throw std::invalid_argument("fit_polynomial: negative degree");
    }
    if (samples.empty() || static_cast<std::size_t>(degree) >= samples.size()) {
        throw std::invalid_argument("fit_polynomial: degree " + std::to_string(degree) + " needs more than " +
                                    std::to_string(samples.size()) + " samples");
    }
    const auto positions = samples.positions();
    const auto [lo, hi] = std::minmax_element(positions.begin(), positions.end());
    const double centre = 0.5 * (*lo + *hi);
    const double half_width = *hi > *lo ? 0.5 * (*hi - *lo) : 1.0;

    const auto rows = static_cast<Eigen::Index>(samples.size());
    const Eigen::Index cols = degree + 1;
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd target(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double u = (positions[static_cast<std::size_t>(i)] - centre) / half_width;
        double power = 1.0;
        for (Eigen::Index j = 0; j < cols; ++j) {
            design(i, j) = power;
            power *= u;
        }
        target(i) = samples.loss(static_cast<std::size_t>(i));
    }
    const Eigen::VectorXd q = design.colPivHouseholderQr().solve(target);

    // Horner in the rescaled variable u = a s + b, expanded back to powers of s.
    const double a = 1.0 / half_width;
    const double b = -centre / half_width;
    std::vector<double> raw{q(cols - 1)};
    for (Eigen::Index j = cols - 2; j >= 0; --j) {
        std::vector<double> next(raw.size() + 1, 0.0);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            next[i] += b * raw[i];
            next[i + 1] += a * raw[i];
        }
        next[0] += q(j);
        raw = std::move(next);
    }
    return Polynomial{std::move(raw)};
}

double mean_squared_error(const Polynomial& p, const SampleSet& samples) {
    if (samples.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double r = p(samples.position(i)) - samples.loss(i);
        sum += r * r;
    }
    return sum / static_cast<double>(samples.size());
}

FoldPlan::FoldPlan(std::size_t sample_count, int folds, Rng& rng) {
    if (folds < 2 || static_cast<std::size_t>(folds) > sample_count) {
        throw std::invalid_argument("FoldPlan: need 2 <= folds <= sample count");
    }
    order_.resize(sample_count);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::shuffle(order_.begin(), order_.end(), rng);
    const auto k = static_cast<std::size_t>(folds);
    bounds_.resize(k + 1);
    for (std::size_t f = 0; f <= k; ++f) {
        bounds_[f] = f * sample_count / k;
    }
}

std::span<const std::size_t> FoldPlan::test_indices(int fold) const {
    const auto f = static_cast<std::size_t>(fold);
    if (fold < 0 || f + 1 >= bounds_.size()) {
        throw std::out_of_range("FoldPlan: fold index");
    }
    return std::span<const std::size_t>(order_).subspan(bounds_[f], bounds_[f + 1] - bounds_[f]);
}

std::vector<std::size_t> FoldPlan::training_indices(int fold) const {
    const auto f = static_cast<std::size_t>(fold);
    if (fold < 0 || f + 1 >= bounds_.size()) {
        throw std::out_of_range("FoldPlan: fold index");
    }
    std::vector<std::size_t> out(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(bounds_[f]));
    out.insert(out.end(), order_.begin() + static_cast<std::ptrdiff_t>(bounds_[f + 1]), order_.end());
    return out;
}

std::size_t FoldPlan::smallest_training_size() const {
    std::size_t largest_test = 0;
    for (std::size_t f = 0; f + 1 < bounds_.size(); ++f) {
        largest_test = std::max(largest_test, bounds_[f + 1] - bounds_[f]);
    }
    return order_.size() - largest_test;
}

double cross_validation_error(int degree, const SampleSet& samples, const FoldPlan& plan) {
    if (plan.sample_count() != samples.size()) {
        throw std::invalid_argument("cross_validation_error: fold plan built for a different sample count");
    }
    double total = 0.0;
    for (int f = 0; f < plan.folds(); ++f) {
        const auto train = samples.subset(plan.training_indices(f));
        const auto test = samples.subset(plan.test_indices(f));
        total += mean_squared_error(fit_polynomial(degree, train), test);
    }
    return total / static_cast<double>(plan.folds());
}

double kfold_cv_error(int degree, const SampleSet& samples, int folds, Rng& rng) {
    const FoldPlan plan(samples.size(), folds, rng);
    return cross_validation_error(degree, samples, plan);
}

double roundoff_floor(const SampleSet& samples) {
    double power = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        power += samples.loss(i) * samples.loss(i);
    }
    return 1e-24 * std::max(power / static_cast<double>(samples.size()), std::numeric_limits<double>::min());
}

FitReport select_degree_and_fit(const SampleSet& samples, int max_degree, int folds, Rng& rng) {
    if (max_degree < 0) {
        throw std::invalid_argument("select_degree_and_fit: negative max_degree");
    }
    const FoldPlan plan(samples.size(), folds, rng);
    const int top = std::min(max_degree, static_cast<int>(plan.smallest_training_size()) - 1);

    const double floor = roundoff_floor(samples);
    FitReport report;
    double last_error = std::numeric_limits<double>::infinity();
    int best = top;
    for (int degree = 0; degree <= top; ++degree) {
        const double error = cross_validation_error(degree, samples, plan);
        report.cv_test_errors.push_back(error);
        if (last_error < error || (last_error <= floor && error <= floor)) {
            best = degree - 1;
            break;
        }
        last_error = error;
    }
    report.chosen_degree = best;
    report.polynomial = fit_polynomial(best, samples);
    // An exactly-zero leading coefficient shrinks the stored degree.
    report.chosen_degree = static_cast<int>(report.polynomial.degree());
    return report;
}

}  // namespace elf

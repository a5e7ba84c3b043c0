#include "elf/line_search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "elf/stats.hpp"

namespace elf {

void LineSearchConfig::validate() const {
    if (adaptations < 1) {
        throw std::invalid_argument("LineSearchConfig: adaptations must be >= 1");
    }
    if (folds < 2) {
        throw std::invalid_argument("LineSearchConfig: folds must be >= 2");
    }
    if (samples_per_adaptation < folds) {
        throw std::invalid_argument("LineSearchConfig: samples_per_adaptation must be >= folds");
    }
    if (!(initial_interval_width > 0.0) || !std::isfinite(initial_interval_width)) {
        throw std::invalid_argument("LineSearchConfig: initial_interval_width must be positive");
    }
    if (min_window_size < 1) {
        throw std::invalid_argument("LineSearchConfig: min_window_size must be >= 1");
    }
    if (max_degree < 0) {
        throw std::invalid_argument("LineSearchConfig: max_degree must be >= 0");
    }
    if (scan.cells == 0 || !(scan.tolerance > 0.0)) {
        throw std::invalid_argument("LineSearchConfig: invalid scan resolution");
    }
}

std::vector<std::size_t> nearest_samples(const SampleSet& samples, double position, std::size_t count) {
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(samples.position(a) - position) < std::abs(samples.position(b) - position);
    });
    order.resize(std::min(count, order.size()));
    return order;
}

double choose_sample_interval(double minimum_position, const SampleSet& samples, const Polynomial& fit,
                              int min_window_size, double previous_width, const ScanOptions& scan) {
    if (samples.empty()) {
        throw std::invalid_argument("choose_sample_interval: no samples");
    }
    std::vector<std::size_t> window;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double m = samples.position(i);
        if (0.0 <= m && m <= 2.0 * minimum_position) {
            window.push_back(i);
        }
    }
    if (window.size() < static_cast<std::size_t>(min_window_size)) {
        window = nearest_samples(samples, minimum_position, static_cast<std::size_t>(min_window_size));
    }
    std::vector<double> window_losses;
    window_losses.reserve(window.size());
    for (const std::size_t i : window) {
        window_losses.push_back(samples.loss(i));
    }
    const double target = quantile(window_losses, 0.75);

    const Interval bracket{minimum_position, std::max(4.0 * minimum_position, previous_width)};
    if (const auto width = solve_for_value_nearest(fit, target, minimum_position, bracket, scan)) {
        return *width;
    }
    double smallest_positive = minimum_position;
    for (const double m : samples.positions()) {
        if (m > 0.0 && (smallest_positive <= 0.0 || m < smallest_positive)) {
            smallest_positive = m;
        }
    }
    return 2.0 * std::max(minimum_position, smallest_positive);
}

LineSearchResult elf_line_search(const LineOracle& oracle, const LineSearchConfig& config, Rng& rng) {
    config.validate();
    LineSearchResult result;
    Rng cv_rng = split(rng);

    double width = config.initial_interval_width;
    std::optional<Extremum> minimum;
    const auto n = static_cast<std::size_t>(config.samples_per_adaptation);

    for (int round = 0; round < config.adaptations; ++round) {
        if (round != 0) {
            if (minimum && minimum->position > 0.0) {
                width = choose_sample_interval(minimum->position, result.samples, result.fit.polynomial,
                                               config.min_window_size, width, config.scan);
            } else if (result.fit.polynomial.derivative()(0.0) < 0.0) {
                // Still descending at the end of the search bracket.
                width *= 2.0;
            } else {
                width *= 0.5;
            }
        }
        if (round == 0) {
            result.samples.add(0.0, oracle(0.0));
            result.rounds.push_back(0);
            ++result.batches_consumed;
        }
        std::uniform_real_distribution<double> uniform(0.0, width);
        std::vector<double> positions(n);
        for (auto& s : positions) {
            s = uniform(rng);
        }
        std::sort(positions.begin(), positions.end());
        for (const double s : positions) {
            result.samples.add(s, oracle(s));
            result.rounds.push_back(round);
            ++result.batches_consumed;
        }

        result.fit = select_degree_and_fit(result.samples, config.max_degree, config.folds, cv_rng);
        minimum = closest_minimum_to_zero(result.fit.polynomial, Interval{0.0, 2.0 * width}, config.scan);
    }

    result.final_interval_width = width;
    if (minimum) {
        result.minimum_position = minimum->position;
        result.expected_improvement = result.fit.polynomial(0.0) - minimum->value;
        result.valid = minimum->position > 0.0 && result.expected_improvement > 0.0;
    }
    return result;
}

}  // namespace elf

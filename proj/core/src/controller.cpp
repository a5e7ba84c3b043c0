#include "elf/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "elf/stats.hpp"

namespace elf {

void ElfConfig::validate() const {
    if (window_size < 1) {
        throw std::invalid_argument("ElfConfig: window_size must be >= 1");
    }
    if (!(loss_improvement_factor >= 0.0)) {
        throw std::invalid_argument("ElfConfig: loss_improvement_factor must be >= 0");
    }
    if (!(momentum_beta >= 0.0 && momentum_beta < 1.0)) {
        throw std::invalid_argument("ElfConfig: momentum_beta must lie in [0, 1)");
    }
    if (!(decrease_factor_delta >= 0.0 && decrease_factor_delta < 1.0)) {
        throw std::invalid_argument("ElfConfig: decrease_factor_delta must lie in [0, 1)");
    }
    if (lines_to_average < 1) {
        throw std::invalid_argument("ElfConfig: lines_to_average must be >= 1");
    }
    if (grid_search_probe_steps < 1) {
        throw std::invalid_argument("ElfConfig: grid_search_probe_steps must be >= 1");
    }
    for (const double c : grid_search_candidates) {
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw std::invalid_argument("ElfConfig: grid search candidates must be positive");
        }
    }
    line_search.validate();
}

double real_improvement(const TriggerInputs& in) { return in.last_mean_loss - in.window_mean_loss; }

double expected_improvement(const TriggerInputs& in) {
    return in.last_mean_loss - in.expected_per_step_improvement * static_cast<double>(in.t - in.t_of_last_update);
}

bool line_search_due(const TriggerInputs& in) {
    const long elapsed = in.t - in.t_of_last_update + 1;
    if (elapsed % (static_cast<long>(in.window_size) + 1) != 0) {
        return false;
    }
    return real_improvement(in) <= expected_improvement(in) * in.loss_improvement_factor;
}

double apply_decrease_factor(const Polynomial& fit, double s_min, double delta, double bracket_end,
                             const ScanOptions& scan) {
    if (delta == 0.0 || !(bracket_end > s_min)) {
        return s_min;
    }
    const double floor = fit(s_min);
    const double level = floor + delta * (fit(0.0) - floor);
    const auto roots = scan_roots([&](double s) { return fit(s) - level; }, Interval{s_min, bracket_end},
                                  Crossing::any, scan);
    for (const double s : roots) {
        if (s > s_min) {
            return s;
        }
    }
    return s_min;
}

ElfOptimizer::ElfOptimizer(const StochasticProblem& problem, ElfConfig config, ElfStreams streams,
                           Vector initial_theta)
    : problem_(problem),
      config_(std::move(config)),
      train_stream_(problem.batch_count(Split::train), std::move(streams.train_order)),
      validation_stream_(problem.batch_count(config_.sample_from_validation ? Split::validation : Split::train),
                         std::move(streams.validation_order)),
      line_search_rng_(std::move(streams.line_search)),
      line_search_(elf_line_search) {
    config_.validate();
    if (static_cast<std::size_t>(initial_theta.size()) != problem.dim()) {
        throw std::invalid_argument("ElfOptimizer: initial parameters do not match the problem dimension");
    }
    state_.theta = std::move(initial_theta);
    state_.momentum_buffer = Vector::Zero(state_.theta.size());
    state_.interval_width = config_.line_search.initial_interval_width;
}

double ElfOptimizer::load_training_batch(const Vector& theta, Vector& gradient) {
    const BatchRef batch{Split::train, train_stream_.next()};
    ++state_.t;
    const double loss = problem_.batch_loss_and_gradient(theta, batch, gradient);
    if (!std::isfinite(loss)) {
        throw DivergenceError("non-finite training loss at step " + std::to_string(state_.t));
    }
    return loss;
}

Vector ElfOptimizer::momentum_direction(const Vector& gradient) {
    state_.momentum_buffer = config_.momentum_beta * state_.momentum_buffer + gradient;
    const double norm = state_.momentum_buffer.norm();
    if (!(norm > 0.0)) {
        return Vector::Zero(gradient.size());
    }
    return -state_.momentum_buffer / norm;
}

double ElfOptimizer::sgd_step() {
    TriggerInputs in{state_.t,
                     state_.t_of_last_update,
                     config_.window_size,
                     state_.last_mean_loss,
                     mean(state_.losses),
                     state_.expected_per_step_improvement,
                     config_.loss_improvement_factor};
    Vector gradient;
    const double loss = load_training_batch(state_.theta, gradient);
    state_.theta += state_.update_step * momentum_direction(gradient);
    state_.losses.push_back(loss);
    log_.add(LogEntry{.step = state_.t,
                      .event = Event::sgd,
                      .train_loss = loss,
                      .update_step = state_.update_step,
                      .expected_improvement = expected_improvement(in),
                      .real_improvement = real_improvement(in),
                      .batches = 1});
    return loss;
}

double ElfOptimizer::initial_grid_search() {
    if (config_.grid_search_candidates.empty()) {
        return state_.update_step;
    }
    std::vector<double> candidates = config_.grid_search_candidates;
    std::sort(candidates.begin(), candidates.end(), std::greater<>());
    const int probe = config_.grid_search_probe_steps;

    double baseline = 0.0;
    for (int i = 0; i < probe; ++i) {
        baseline += problem_.batch_loss(state_.theta, BatchRef{Split::train, train_stream_.next()});
        ++state_.t;
    }
    baseline /= probe;
    log_.add(LogEntry{.step = state_.t, .event = Event::grid_search, .train_loss = baseline, .update_step = 0.0,
                      .batches = probe});

    double selected = candidates.back();
    Vector gradient;
    for (const double candidate : candidates) {
        Vector theta = state_.theta;
        double total = 0.0;
        for (int i = 0; i < probe; ++i) {
            total += problem_.batch_loss_and_gradient(theta, BatchRef{Split::train, train_stream_.next()}, gradient);
            ++state_.t;
            const double norm = gradient.norm();
            if (norm > 0.0 && std::isfinite(norm)) {
                theta -= (candidate / norm) * gradient;
            }
        }
        const double probe_mean = total / probe;
        log_.add(LogEntry{.step = state_.t, .event = Event::grid_search, .train_loss = probe_mean,
                          .update_step = candidate, .batches = probe});
        if (probe_mean < baseline) {
            selected = candidate;
            break;
        }
    }
    state_.update_step = selected;
    state_.interval_width = selected;
    grid_search_step_ = selected;
    return selected;
}

void ElfOptimizer::trigger_line_searches() {
    const Split line_split = config_.sample_from_validation ? Split::validation : Split::train;
    std::vector<double> steps;
    std::vector<double> improvements;
    std::vector<double> start_levels;

    for (int line = 0; line < config_.lines_to_average; ++line) {
        Vector gradient;
        const double loss = load_training_batch(state_.theta, gradient);
        log_.add(LogEntry{.step = state_.t, .event = Event::gradient, .train_loss = loss,
                          .update_step = state_.update_step, .batches = 1});
        const Vector direction = momentum_direction(gradient);

        const Vector theta0 = state_.theta;
        long calls = 0;
        const LineOracle oracle = [&](double s) {
            ++calls;
            const BatchRef batch{line_split, validation_stream_.next()};
            const double value = problem_.batch_loss(theta0 + s * direction, batch);
            if (!std::isfinite(value)) {
                throw DivergenceError("non-finite line loss at s = " + std::to_string(s));
            }
            return value;
        };
        LineSearchConfig search_config = config_.line_search;
        search_config.initial_interval_width = state_.interval_width;

        LineSearchRecord record;
        if (direction.squaredNorm() > 0.0) {
            record.result = line_search_(oracle, search_config, line_search_rng_);
        }
        state_.t += calls;

        if (record.result.valid) {
            const auto positions = record.result.samples.positions();
            const double sampled_end =
                positions.empty() ? record.result.minimum_position : *std::max_element(positions.begin(), positions.end());
            record.applied_step = apply_decrease_factor(record.result.fit.polynomial, record.result.minimum_position,
                                                        config_.decrease_factor_delta, sampled_end,
                                                        config_.line_search.scan);
            state_.theta += record.applied_step * direction;
            steps.push_back(record.applied_step);
            improvements.push_back(record.result.expected_improvement);
            start_levels.push_back(record.result.fit.polynomial(0.0));
        }
        log_.add(LogEntry{.step = state_.t,
                          .event = Event::line_search,
                          .update_step = record.applied_step,
                          .expected_improvement =
                              record.result.valid ? record.result.expected_improvement : not_available,
                          .batches = calls});
        searches_.push_back(std::move(record));
    }

    if (!steps.empty()) {
        state_.update_step = mean(steps);
        state_.expected_per_step_improvement = mean(improvements) / static_cast<double>(config_.window_size);
    }
    if (!state_.losses.empty()) {
        state_.last_mean_loss = mean(state_.losses);
    } else if (!start_levels.empty()) {
        state_.last_mean_loss = mean(start_levels);
    }
    state_.losses.clear();
    state_.t_of_last_update = state_.t;
}

ElfRun ElfOptimizer::run(long steps_to_train) {
    if (steps_to_train < 1) {
        throw std::invalid_argument("ElfOptimizer::run: steps_to_train must be >= 1");
    }
    grid_search_step_ = initial_grid_search();
    trigger_line_searches();
    while (state_.t < steps_to_train) {
        const TriggerInputs in{state_.t,
                               state_.t_of_last_update,
                               config_.window_size,
                               state_.last_mean_loss,
                               mean(state_.losses),
                               state_.expected_per_step_improvement,
                               config_.loss_improvement_factor};
        if (line_search_due(in)) {
            trigger_line_searches();
            continue;
        }
        if ((in.t - in.t_of_last_update + 1) % (config_.window_size + 1) == 0 && !state_.losses.empty()) {
            // Check point without a search: the next window is compared against this one.
            state_.last_mean_loss = mean(state_.losses);
            state_.losses.clear();
            state_.t_of_last_update = state_.t;
        }
        sgd_step();
    }
    return ElfRun{log_, searches_, state_, grid_search_step_};
}

}  // namespace elf

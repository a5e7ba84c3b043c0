#include "elf/baselines.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace elf {

double StepDecaySchedule::rate(long t) const {
    if (total_steps <= 0) {
        return initial_rate;
    }
    if (4 * t >= 3 * total_steps) {
        return initial_rate / (factor * factor);
    }
    if (2 * t >= total_steps) {
        return initial_rate / factor;
    }
    return initial_rate;
}

void BaselineConfig::validate() const {
    if (!(learning_rate > 0.0)) {
        throw std::invalid_argument("BaselineConfig: learning_rate must be positive");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw std::invalid_argument("BaselineConfig: momentum must lie in [0, 1)");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
        throw std::invalid_argument("BaselineConfig: Adam betas must lie in [0, 1) and (0, 1)");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("BaselineConfig: epsilon must be positive");
    }
}

BaselineState::BaselineState(Vector initial)
    : theta(std::move(initial)),
      velocity(Vector::Zero(theta.size())),
      first_moment(Vector::Zero(theta.size())),
      second_moment(Vector::Zero(theta.size())) {}

void sgd_step(BaselineState& state, const Vector& gradient, const BaselineConfig& config) {
    if (gradient.size() != state.theta.size()) {
        throw std::invalid_argument("sgd_step: gradient shape mismatch");
    }
    const double lr = config.schedule().rate(state.t);
    state.velocity = config.momentum * state.velocity + gradient;
    state.theta -= lr * state.velocity;
    ++state.t;
}

void adam_step(BaselineState& state, const Vector& gradient, const BaselineConfig& config) {
    if (gradient.size() != state.theta.size()) {
        throw std::invalid_argument("adam_step: gradient shape mismatch");
    }
    const double lr = config.schedule().rate(state.t);
    ++state.t;
    state.first_moment = config.beta1 * state.first_moment + (1.0 - config.beta1) * gradient;
    state.second_moment =
        config.beta2 * state.second_moment + (1.0 - config.beta2) * gradient.cwiseProduct(gradient);
    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
    state.theta.array() -=
        lr * (state.first_moment.array() / c1) / ((state.second_moment.array() / c2).sqrt() + config.epsilon);
}

BaselineRun run_baseline(const StochasticProblem& problem, BaselineKind kind, const BaselineConfig& config, long steps,
                         BatchStream& stream, Vector initial_theta) {
    config.validate();
    BaselineState state(std::move(initial_theta));
    TrainingLog log;
    Vector gradient;
    for (long step = 0; step < steps; ++step) {
        const double lr = config.schedule().rate(state.t);
        const double loss =
            problem.batch_loss_and_gradient(state.theta, BatchRef{Split::train, stream.next()}, gradient);
        if (!std::isfinite(loss)) {
            throw DivergenceError("baseline diverged at step " + std::to_string(step));
        }
        if (kind == BaselineKind::sgd) {
            sgd_step(state, gradient, config);
        } else {
            adam_step(state, gradient, config);
        }
        log.add(LogEntry{.step = step + 1, .event = Event::sgd, .train_loss = loss, .update_step = lr, .batches = 1});
    }
    return BaselineRun{std::move(log), std::move(state.theta)};
}

}  // namespace elf

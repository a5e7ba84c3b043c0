#pragma once

#include "elf/problems.hpp"
#include "elf/training_log.hpp"

namespace elf {

enum class BaselineKind { sgd, adam };

/// Learning rate divided by `factor` at half and again at three quarters of
/// `total_steps`.
struct StepDecaySchedule {
    double initial_rate = 0.01;
    long total_steps = 0;  // 0 disables the decay
    double factor = 10.0;

    [[nodiscard]] double rate(long t) const;
};

struct BaselineConfig {
    double learning_rate = 0.01;
    double momentum = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long total_steps = 0;  // schedule horizon; 0 keeps the rate constant

    void validate() const;
    [[nodiscard]] StepDecaySchedule schedule() const { return {learning_rate, total_steps, 10.0}; }
};

struct BaselineState {
    Vector theta;
    Vector velocity;       // SGD momentum
    Vector first_moment;   // Adam
    Vector second_moment;  // Adam
    long t = 0;            // updates applied so far

    explicit BaselineState(Vector initial);
};

/// v <- momentum v + g; theta <- theta - lr(t) v.
void sgd_step(BaselineState& state, const Vector& gradient, const BaselineConfig& config);

/// Bias-corrected Adam update at rate lr(t).
void adam_step(BaselineState& state, const Vector& gradient, const BaselineConfig& config);

struct BaselineRun {
    TrainingLog log;
    Vector theta;
};

/// `steps` updates on training batches drawn from `stream`. Throws
/// DivergenceError on a non-finite loss.
[[nodiscard]] BaselineRun run_baseline(const StochasticProblem& problem, BaselineKind kind,
                                       const BaselineConfig& config, long steps, BatchStream& stream,
                                       Vector initial_theta);

}  // namespace elf

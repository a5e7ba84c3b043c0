#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace elf {

enum class Event {
    sgd,          // one training step
    gradient,     // batch loaded to define a search direction
    line_search,  // one complete line search
    grid_search,  // one probe of the initial step-size grid search
};

[[nodiscard]] std::string_view to_string(Event event);

/// Thrown when a training loss stops being finite.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double not_available = std::numeric_limits<double>::quiet_NaN();

/// One row per event. `step` is the batch-load counter after the event, so
/// consecutive rows differ by `batches`.
struct LogEntry {
    long step = 0;
    Event event = Event::sgd;
    double train_loss = not_available;
    double update_step = not_available;
    double expected_improvement = not_available;
    double real_improvement = not_available;
    long batches = 0;
};

struct TrainingLog {
    std::vector<LogEntry> entries;

    void add(const LogEntry& entry) { entries.push_back(entry); }
    [[nodiscard]] long total_batches() const;
    [[nodiscard]] long batches_for(Event event) const;
    [[nodiscard]] std::size_t count(Event event) const;
};

}  // namespace elf

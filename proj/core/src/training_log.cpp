#include "elf/training_log.hpp"

namespace elf {

std::string_view to_string(Event event) {
    switch (event) {
        case Event::sgd:
            return "sgd";
        case Event::gradient:
            return "gradient";
        case Event::line_search:
            return "line_search";
        case Event::grid_search:
            return "grid_search";
    }
    return "unknown";
}

long TrainingLog::total_batches() const {
    long total = 0;
    for (const auto& e : entries) {
        total += e.batches;
    }
    return total;
}

long TrainingLog::batches_for(Event event) const {
    long total = 0;
    for (const auto& e : entries) {
        if (e.event == event) {
            total += e.batches;
        }
    }
    return total;
}

std::size_t TrainingLog::count(Event event) const {
    std::size_t n = 0;
    for (const auto& e : entries) {
        n += e.event == event ? 1 : 0;
    }
    return n;
}

}  // namespace elf

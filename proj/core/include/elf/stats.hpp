#pragma once

#include <span>

namespace elf {

/// Arithmetic mean; NaN for an empty range.
[[nodiscard]] double mean(std::span<const double> values);

/// Quantile with linear interpolation between order statistics
/// (position h = (n - 1) * q, the "type 7" convention).
/// Throws std::invalid_argument for an empty range or q outside [0, 1].
[[nodiscard]] double quantile(std::span<const double> values, double q);

struct Quartiles {
    double lower;
    double median;
    double upper;
};

[[nodiscard]] Quartiles quartiles(std::span<const double> values);

}  // namespace elf

#include "elf/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace elf {

Polynomial::Polynomial(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
    if (coefficients_.empty()) {
        throw std::invalid_argument("Polynomial needs at least one coefficient");
    }
    while (coefficients_.size() > 1 && coefficients_.back() == 0.0) {
        coefficients_.pop_back();
    }
}

double Polynomial::evaluate(double s) const noexcept {
    double acc = 0.0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coefficients_.size() == 1) {
        return Polynomial{};
    }
    std::vector<double> d(coefficients_.size() - 1);
    for (std::size_t i = 1; i < coefficients_.size(); ++i) {
        d[i - 1] = static_cast<double>(i) * coefficients_[i];
    }
    return Polynomial{std::move(d)};
}

std::optional<Extremum> closest_minimum_to_zero(const Polynomial& p, Interval bracket, const ScanOptions& options) {
    if (p.degree() < 2) {
        return std::nullopt;
    }
    const Polynomial slope = p.derivative();
    const auto minima = scan_roots(slope, bracket, Crossing::rising, options);
    std::optional<Extremum> best;
    for (const double s : minima) {
        if (!best || std::abs(s) < std::abs(best->position)) {
            best = Extremum{s, p(s)};
        }
    }
    return best;
}

std::optional<double> solve_for_value_nearest(const Polynomial& p, double target, double anchor, Interval bracket,
                                              const ScanOptions& options) {
    const auto crossings = scan_roots([&](double s) { return std::abs(p(s)) - target; }, bracket, Crossing::any,
                                      options);
    // Bisection leaves each root within `tolerance`; distances closer than
    // that are the same distance.
    const double tie = 4.0 * options.tolerance;
    std::optional<double> best;
    for (const double s : crossings) {
        if (!best) {
            best = s;
            continue;
        }
        const double d = std::abs(s - anchor);
        const double d_best = std::abs(*best - anchor);
        if (d < d_best - tie || (std::abs(d - d_best) <= tie && s > *best)) {
            best = s;
        }
    }
    return best;
}

}  // namespace elf

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace elf {

/// Closed interval [lower, upper].
struct Interval {
    double lower;
    double upper;

    [[nodiscard]] double width() const noexcept { return upper - lower; }
    [[nodiscard]] bool contains(double s) const noexcept { return lower <= s && s <= upper; }
};

/// Resolution of the grid-scan + bisection root finder.
struct ScanOptions {
    std::size_t cells = 10000;
    double tolerance = 1e-10;
};

/// Real polynomial c0 + c1 s + c2 s^2 + ... with coefficients in ascending
/// degree order. Trailing zero coefficients are dropped on construction, so
/// the zero polynomial is the single coefficient {0}.
class Polynomial {
public:
    Polynomial() : coefficients_{0.0} {}

    /// Throws std::invalid_argument if `coefficients` is empty.
    explicit Polynomial(std::vector<double> coefficients);

    [[nodiscard]] std::size_t degree() const noexcept { return coefficients_.size() - 1; }
    [[nodiscard]] std::span<const double> coefficients() const noexcept { return coefficients_; }
    [[nodiscard]] double coefficient(std::size_t i) const noexcept {
        return i < coefficients_.size() ? coefficients_[i] : 0.0;
    }

    /// Horner evaluation.
    [[nodiscard]] double evaluate(double s) const noexcept;
    [[nodiscard]] double operator()(double s) const noexcept { return evaluate(s); }

    [[nodiscard]] Polynomial derivative() const;

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::vector<double> coefficients_;
};

struct Extremum {
    double position;
    double value;
};

/// Which sign changes a scan reports.
enum class Crossing { any, rising };

/// Roots of `f` on `bracket` found by scanning `options.cells` uniform cells
/// for sign changes and bisecting each to `options.tolerance`. Results are in
/// ascending order. A cell [a, b] holds a crossing when f(a) and f(b) fall on
/// different sides of the split {f < 0} / {f >= 0}; `Crossing::rising` keeps
/// only the negative-to-nonnegative ones.
template <typename F>
[[nodiscard]] std::vector<double> scan_roots(F&& f, Interval bracket, Crossing kind,
                                             const ScanOptions& options = {}) {
    std::vector<double> roots;
    if (!(bracket.width() > 0.0) || options.cells == 0) {
        return roots;
    }
    const auto cells = static_cast<double>(options.cells);
    const auto grid = [&](std::size_t i) {
        return i == options.cells
                   ? bracket.upper
                   : bracket.lower + bracket.width() * (static_cast<double>(i) / cells);
    };
    double a = grid(0);
    double fa = f(a);
    for (std::size_t i = 1; i <= options.cells; ++i) {
        const double b = grid(i);
        const double fb = f(b);
        const bool rising = fa < 0.0 && fb >= 0.0;
        const bool falling = fa >= 0.0 && fb < 0.0;
        if (rising || (kind == Crossing::any && falling)) {
            double lo = a;
            double hi = b;
            const bool lo_negative = fa < 0.0;
            while (hi - lo > options.tolerance) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) {
                    break;
                }
                if ((f(mid) < 0.0) == lo_negative) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    return roots;
}

/// Local minimum of `p` inside `bracket` with the smallest |s|, located as a
/// negative-to-positive sign change of p'. Absent when p has no local minimum
/// in the bracket (degree <= 1, monotone, ...).
[[nodiscard]] std::optional<Extremum> closest_minimum_to_zero(const Polynomial& p, Interval bracket,
                                                              const ScanOptions& options = {});

/// Position in `bracket` closest to `anchor` where |p(s)| equals `target`.
/// Two crossings at the same distance from the anchor resolve to the larger s.
[[nodiscard]] std::optional<double> solve_for_value_nearest(const Polynomial& p, double target,
                                                            double anchor, Interval bracket,
                                                            const ScanOptions& options = {});

}  // namespace elf

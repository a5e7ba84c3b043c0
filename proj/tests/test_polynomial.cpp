#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "elf/polynomial.hpp"
#include "elf/random.hpp"
#include "elf/stats.hpp"
#include "oracles.hpp"

using elf::Crossing;
using elf::Interval;
using elf::Polynomial;

TEST(Polynomial, EvaluatesAscendingCoefficients) {
    const Polynomial p({1.0, -3.0, 2.0});
    EXPECT_DOUBLE_EQ(p(0.0), 1.0);
    EXPECT_DOUBLE_EQ(p(1.0), 0.0);
    EXPECT_DOUBLE_EQ(p(2.0), 3.0);
    EXPECT_EQ(p.degree(), 2u);
}

TEST(Polynomial, TrimsTrailingZerosAndRejectsEmpty) {
    EXPECT_EQ(Polynomial({1.0, 2.0, 0.0, 0.0}).degree(), 1u);
    EXPECT_EQ(Polynomial({0.0, 0.0}).degree(), 0u);
    EXPECT_THROW(Polynomial(std::vector<double>{}), std::invalid_argument);
}

TEST(Polynomial, Derivative) {
    EXPECT_EQ(Polynomial({5.0, 0.0, 3.0, 1.0}).derivative(), Polynomial({0.0, 6.0, 3.0}));
    EXPECT_EQ(Polynomial({7.0}).derivative(), Polynomial({0.0}));
}

TEST(PolynomialProperty, HornerMatchesPowerSum) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coeff(-10.0, 10.0);
    std::uniform_real_distribution<double> pos(-10.0, 10.0);
    std::uniform_int_distribution<int> degree(0, 10);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> c(static_cast<std::size_t>(degree(rng)) + 1);
        for (auto& x : c) x = coeff(rng);
        const Polynomial p(c);
        const double s = pos(rng);
        // Cancellation can make the value itself tiny; scale by the term magnitudes.
        double magnitude = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) magnitude += std::abs(c[i]) * std::pow(std::abs(s), double(i));
        EXPECT_NEAR(p(s), oracle::power_sum(c, s), 1e-10 * std::max(1.0, magnitude));
    }
}

TEST(PolynomialProperty, DerivativeMatchesFiniteDifferences) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> c(6);
        for (auto& x : c) x = coeff(rng);
        const Polynomial p(c);
        const double s = pos(rng);
        const double h = 1e-5;
        EXPECT_NEAR(p.derivative()(s), (p(s + h) - p(s - h)) / (2 * h), 1e-6);
    }
}

TEST(ScanRoots, FindsEachSignChangeToTolerance) {
    const Polynomial p({-6.0, 11.0, -6.0, 1.0});  // roots 1, 2, 3
    const auto roots = elf::scan_roots(p, Interval{0.0, 4.0}, Crossing::any);
    ASSERT_EQ(roots.size(), 3u);
    EXPECT_NEAR(roots[0], 1.0, 1e-9);
    EXPECT_NEAR(roots[1], 2.0, 1e-9);
    EXPECT_NEAR(roots[2], 3.0, 1e-9);
    const auto rising = elf::scan_roots(p, Interval{0.0, 4.0}, Crossing::rising);
    ASSERT_EQ(rising.size(), 2u);
    EXPECT_NEAR(rising[0], 1.0, 1e-9);
    EXPECT_NEAR(rising[1], 3.0, 1e-9);
}

TEST(ClosestMinimum, ParabolaVertex) {
    const auto m = elf::closest_minimum_to_zero(Polynomial({1.0, -2.0, 1.0}), Interval{0.0, 4.0});
    ASSERT_TRUE(m.has_value());
    EXPECT_NEAR(m->position, 1.0, 1e-9);
    EXPECT_NEAR(m->value, 0.0, 1e-12);
}

TEST(ClosestMinimum, AbsentForLinearAndConcave) {
    EXPECT_FALSE(elf::closest_minimum_to_zero(Polynomial({1.0, 2.0}), Interval{0.0, 4.0}));
    EXPECT_FALSE(elf::closest_minimum_to_zero(Polynomial({1.0, 0.0, -1.0}), Interval{-4.0, 4.0}));
    EXPECT_FALSE(elf::closest_minimum_to_zero(Polynomial({3.0}), Interval{-4.0, 4.0}));
}

TEST(ClosestMinimum, PicksMinimumNearestZeroOfQuartic) {
    // (s - 0.5)^2 (s - 3)^2: minima at 0.5 and 3.
    const Polynomial p({2.25, -10.5, 15.25, -7.0, 1.0});
    const auto m = elf::closest_minimum_to_zero(p, Interval{0.0, 5.0});
    ASSERT_TRUE(m.has_value());
    EXPECT_NEAR(m->position, 0.5, 1e-8);
}

TEST(ClosestMinimum, MatchesDenseGridOracleOnQuartics) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> root(0.2, 3.0);
    std::uniform_real_distribution<double> scale(0.5, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        // Quartic with a positive leading coefficient and two local minima inside [0, 4].
        const double a = root(rng);
        const double b = a + 0.5 + root(rng);
        const double k = scale(rng);
        // k (s - a)^2 (s - b)^2 + 0.1 s
        std::vector<double> c{k * a * a * b * b, -2 * k * a * b * (a + b) + 0.1,
                              k * (a * a + 4 * a * b + b * b), -2 * k * (a + b), k};
        const Polynomial p(c);
        const auto m = elf::closest_minimum_to_zero(p, Interval{0.0, b + 1.0});
        ASSERT_TRUE(m.has_value());
        const double grid = oracle::first_local_min_on_grid(p, 0.0, b + 1.0, 1e-5);
        EXPECT_NEAR(m->position, grid, 2e-5);
        EXPECT_LT(p.derivative()(m->position - 1e-6), 0.0);
        EXPECT_GT(p.derivative()(m->position + 1e-6), 0.0);
    }
}

TEST(SolveForValueNearest, ParabolaTieResolvesToLargerPosition) {
    const Polynomial p({1.0, -2.0, 1.0});  // (s - 1)^2
    const auto s = elf::solve_for_value_nearest(p, 0.25, 1.0, Interval{0.0, 4.0});
    ASSERT_TRUE(s.has_value());
    EXPECT_NEAR(*s, 1.5, 1e-9);
}

TEST(SolveForValueNearest, UsesAbsoluteValue) {
    const Polynomial p({-1.0, 0.0, 1.0});  // s^2 - 1, |p| = 0.5 at s = sqrt(0.5) and sqrt(1.5)
    const auto s = elf::solve_for_value_nearest(p, 0.5, 0.0, Interval{0.0, 2.0});
    ASSERT_TRUE(s.has_value());
    EXPECT_NEAR(*s, std::sqrt(0.5), 1e-9);
}

TEST(SolveForValueNearest, AbsentWhenTargetNotReached) {
    const Polynomial p({1.0, -2.0, 1.0});
    EXPECT_FALSE(elf::solve_for_value_nearest(p, 100.0, 1.0, Interval{0.0, 4.0}));
}

TEST(Stats, QuantileConvention) {
    const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
    EXPECT_DOUBLE_EQ(elf::quantile(v, 0.75), 3.25);
    EXPECT_DOUBLE_EQ(elf::quantile(v, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(elf::quantile(v, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(elf::quantile(v, 1.0), 4.0);
    EXPECT_THROW((void)elf::quantile(std::vector<double>{}, 0.5), std::invalid_argument);
    EXPECT_TRUE(std::isnan(elf::mean(std::vector<double>{})));
}

TEST(Random, NamedStreamsAreStableAndIndependent) {
    EXPECT_EQ(elf::stream_seed(7, "data"), elf::stream_seed(7, "data"));
    EXPECT_NE(elf::stream_seed(7, "data"), elf::stream_seed(7, "line_search"));
    EXPECT_NE(elf::stream_seed(7, "data"), elf::stream_seed(8, "data"));
    auto a = elf::make_stream(3, "x");
    auto b = elf::make_stream(3, "x");
    EXPECT_EQ(a(), b());
}

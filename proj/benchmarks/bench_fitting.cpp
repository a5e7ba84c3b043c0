#include <random>

#include <benchmark/benchmark.h>

#include "elf/polynomial.hpp"
#include "elf/regression.hpp"

namespace {

elf::SampleSet noisy_line(std::size_t n) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> pos(0.0, 2.0);
    std::normal_distribution<double> noise(0.0, 0.05);
    elf::SampleSet samples;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = pos(gen);
        samples.add(s, (s - 0.7) * (s - 0.7) + 0.1 * s * s * s + noise(gen));
    }
    return samples;
}

}  // namespace

static void BM_FitPolynomial(benchmark::State& state) {
    const auto samples = noisy_line(501);
    const int degree = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(elf::fit_polynomial(degree, samples));
    }
}
BENCHMARK(BM_FitPolynomial)->DenseRange(2, 10, 4);

static void BM_SelectDegree(benchmark::State& state) {
    const auto samples = noisy_line(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        elf::Rng rng(3);
        benchmark::DoNotOptimize(elf::select_degree_and_fit(samples, 10, 5, rng));
    }
}
BENCHMARK(BM_SelectDegree)->Arg(101)->Arg(501);

static void BM_ClosestMinimum(benchmark::State& state) {
    const elf::Polynomial p({2.25, -10.5, 15.25, -7.0, 1.0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(elf::closest_minimum_to_zero(p, elf::Interval{0.0, 5.0}));
    }
}
BENCHMARK(BM_ClosestMinimum);

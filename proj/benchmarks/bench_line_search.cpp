#include <random>

#include <benchmark/benchmark.h>

#include "elf/line_search.hpp"

static void BM_ElfLineSearch(benchmark::State& state) {
    std::mt19937_64 noise_gen(2);
    std::normal_distribution<double> noise(0.0, 0.1);
    const auto oracle = [&](double s) { return 1.5 * (s - 0.8) * (s - 0.8) + noise(noise_gen); };
    for (auto _ : state) {
        elf::Rng rng(7);
        benchmark::DoNotOptimize(elf::elf_line_search(oracle, elf::LineSearchConfig{}, rng));
    }
}
BENCHMARK(BM_ElfLineSearch)->Unit(benchmark::kMillisecond);

#include <memory>

#include <benchmark/benchmark.h>

#include "elf/problems.hpp"

namespace {

std::shared_ptr<const elf::BlobDataset> blobs() {
    elf::Rng rng(5);
    return std::make_shared<const elf::BlobDataset>(elf::BlobDatasetConfig{}, rng);
}

void gradient_loop(benchmark::State& state, const elf::StochasticProblem& problem) {
    elf::Rng rng(6);
    const elf::Vector theta = problem.initial_theta(rng);
    elf::Vector gradient;
    std::size_t b = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(problem.batch_loss_and_gradient(
            theta, {elf::Split::train, b++ % problem.batch_count(elf::Split::train)}, gradient));
    }
}

}  // namespace

static void BM_QuadraticGradient(benchmark::State& state) {
    elf::Rng rng(4);
    const elf::NoisyQuadraticEnsemble problem(elf::QuadraticEnsembleConfig{}, rng);
    gradient_loop(state, problem);
}
BENCHMARK(BM_QuadraticGradient);

static void BM_LogisticGradient(benchmark::State& state) {
    const elf::LogisticRegression problem(blobs());
    gradient_loop(state, problem);
}
BENCHMARK(BM_LogisticGradient);

static void BM_MlpGradient(benchmark::State& state) {
    const elf::MultilayerPerceptron problem(blobs(), static_cast<std::size_t>(state.range(0)));
    gradient_loop(state, problem);
}
BENCHMARK(BM_MlpGradient)->Arg(16)->Arg(64);
BENCHMARK_MAIN();

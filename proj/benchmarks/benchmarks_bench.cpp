#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qhub/benchmarks.hpp"

namespace {

void BM_EmpiricalQuantiles(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> sample(static_cast<std::size_t>(state.range(0)));
    for (auto& v : sample) v = n(rng);
    for (auto _ : state) benchmark::DoNotOptimize(qhub::empirical_quantiles(sample));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EmpiricalQuantiles)->Arg(40)->Arg(1000)->Arg(10000)->Complexity();

void BM_EmosFit(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> m(8.0, 4.0), e(0.0, 1.0);
    std::uniform_real_distribution<double> v(0.5, 2.5);
    std::vector<qhub::EmosTrainingPair> pairs;
    for (int i = 0; i < state.range(0); ++i) {
        const double mean = m(rng);
        pairs.push_back({mean, v(rng), 0.5 + 0.9 * mean + 1.2 * e(rng)});
    }
    const auto family = state.range(1) ? qhub::EmosFamily::truncated_normal : qhub::EmosFamily::normal;
    for (auto _ : state) benchmark::DoNotOptimize(qhub::emos_fit(pairs, family));
}
BENCHMARK(BM_EmosFit)->Args({365, 0})->Args({365, 1})->Args({5000, 0})->Unit(benchmark::kMillisecond);

} // namespace

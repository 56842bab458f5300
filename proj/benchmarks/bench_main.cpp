#include <benchmark/benchmark.h>

#include "polytree/cumulants.hpp"
#include "polytree/orient.hpp"
#include "polytree/simulate.hpp"
#include "polytree/skeleton.hpp"

using namespace polytree;

namespace {

Dataset make_data(std::size_t p, std::size_t n, std::uint64_t seed) {
    const auto structure = random_polytree(random_tree(p, seed), seed + 1);
    const auto errors = draw_node_errors(p, ErrorSpec{}, seed + 2);
    return sample_dataset(structure, errors, n, seed + 3);
}

void BM_Correlation(benchmark::State& state) {
    const auto p = static_cast<std::size_t>(state.range(0));
    const auto data = make_data(p, 1000, 11);
    for (auto _ : state) benchmark::DoNotOptimize(sample_correlation_matrix(data));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Correlation)->RangeMultiplier(2)->Range(32, 512)->Complexity(benchmark::oNSquared);

void BM_ChowLiu(benchmark::State& state) {
    const auto p = static_cast<std::size_t>(state.range(0));
    const auto corr = sample_correlation_matrix(make_data(p, 200, 13));
    for (auto _ : state) benchmark::DoNotOptimize(chow_liu(corr));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ChowLiu)->RangeMultiplier(2)->Range(32, 1024)->Complexity();

void BM_PairTable(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const auto data = make_data(2, static_cast<std::size_t>(state.range(1)), 17);
    for (auto _ : state) benchmark::DoNotOptimize(pair_cumulant_table(data, 0, 1, k));
}
BENCHMARK(BM_PairTable)->ArgsProduct({{3, 4}, {1000, 10000, 100000}});

void BM_Orient(benchmark::State& state) {
    const auto algorithm = static_cast<Algorithm>(state.range(0));
    const auto data = make_data(200, 2000, 19);
    const auto corr = sample_correlation_matrix(data);
    const auto skeleton = chow_liu(corr);
    const SampleProvider provider(data, &corr);
    OrientOptions options;
    options.threshold = default_threshold(skeleton);
    for (auto _ : state) benchmark::DoNotOptimize(orient(algorithm, skeleton, provider, options));
}
BENCHMARK(BM_Orient)
    ->Arg(static_cast<int>(Algorithm::Pairwise))
    ->Arg(static_cast<int>(Algorithm::Pto))
    ->Arg(static_cast<int>(Algorithm::Tpo));

} // namespace
BENCHMARK_MAIN();

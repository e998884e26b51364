// Micro benchmarks for the hot kernels: the dense solves behind training,
// the windowed NDV queries, clustering, and the full training pipeline on a
// synthetic network sized like a medium study dataset.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ndp/distribution.hpp"
#include "ndp/efm.hpp"
#include "ndp/graph.hpp"
#include "ndp/kmeans.hpp"
#include "ndp/linalg.hpp"
#include "ndp/rng.hpp"
#include "ndp/synth.hpp"

namespace {

ndp::Matrix random_matrix(std::size_t rows, std::size_t cols,
                          std::uint64_t seed) {
    ndp::Rng rng(seed);
    ndp::Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

ndp::SynthResult medium_network() {
    ndp::SynthSpec spec;
    spec.n = 8;
    spec.num_targets = 500;
    spec.num_clusters = 4;
    for (int j = 0; j < 4; ++j)
        spec.planted.push_back(ndp::mixing_matrix(8, 0.6, j + 1));
    spec.events_per_target_per_window = 200;
    spec.cluster_separation = 4.0;
    spec.base_concentration = 3.0;
    spec.windows = {{0, 40}, {40, 50}, {50, 60}};
    spec.seed = 1;
    return ndp::generate(spec);
}

void bm_gauss_jordan_invert(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    // Diagonally dominated, so every instance is comfortably invertible.
    auto m = random_matrix(n, n, 42);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) += static_cast<double>(n);
    for (auto _ : state)
        benchmark::DoNotOptimize(ndp::gauss_jordan_invert(m));
}
BENCHMARK(bm_gauss_jordan_invert)->Arg(6)->Arg(28)->Arg(64);

void bm_normal_equations_solve(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const std::size_t n = 8;
    const auto x = random_matrix(rows, n, 7);
    const auto y = random_matrix(rows, n, 8);
    for (auto _ : state)
        benchmark::DoNotOptimize(ndp::normal_equations_solve(x, y, 0.0));
}
BENCHMARK(bm_normal_equations_solve)->Arg(100)->Arg(1000)->Arg(10000);

void bm_ndv_query(benchmark::State& state) {
    static const auto data = medium_network();
    const auto& g = data.graph;
    const auto& targets = g.target_ids();
    const ndp::TimeWindow window{0, 50};
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            ndp::ndv_for(g, targets[i % targets.size()], window));
        ++i;
    }
}
BENCHMARK(bm_ndv_query);

void bm_kmeans(benchmark::State& state) {
    const auto k = static_cast<int>(state.range(0));
    ndp::Rng rng(3);
    std::map<std::string, std::vector<double>> points;
    for (int t = 0; t < 500; ++t) {
        std::vector<double> p(8);
        for (auto& v : p)
            v = rng.uniform01();
        points["t" + std::to_string(t)] = std::move(p);
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(ndp::kmeans(points, k, 12345));
}
BENCHMARK(bm_kmeans)->Arg(2)->Arg(8)->Arg(32);

void bm_train(benchmark::State& state) {
    static const auto data = medium_network();
    for (auto _ : state)
        benchmark::DoNotOptimize(ndp::train(data.graph, {0, 40}, {40, 50},
                                            static_cast<int>(state.range(0)),
                                            99, 1e-8));
}
BENCHMARK(bm_train)->Arg(1)->Arg(4)->Arg(16);

} // namespace

BENCHMARK_MAIN();

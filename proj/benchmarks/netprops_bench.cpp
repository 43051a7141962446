#include <benchmark/benchmark.h>

#include "placemotif/netprops.hpp"
#include "random_network.hpp"

namespace pm = placemotif;

static void BM_Communities(benchmark::State& state) {
  const auto nodes = static_cast<std::size_t>(state.range(0));
  const auto net = bench::random_network(nodes, nodes * 5);
  for (auto _ : state) benchmark::DoNotOptimize(pm::detect_communities(net, 42));
}
BENCHMARK(BM_Communities)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Diameter(benchmark::State& state) {
  const auto nodes = static_cast<std::size_t>(state.range(0));
  const auto net = bench::random_network(nodes, nodes * 5);
  for (auto _ : state) benchmark::DoNotOptimize(pm::largest_component_diameter(net));
}
BENCHMARK(BM_Diameter)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_Clustering(benchmark::State& state) {
  const auto net = bench::random_network(10000, 50000);
  for (auto _ : state) benchmark::DoNotOptimize(pm::average_clustering(net));
}
BENCHMARK(BM_Clustering)->Unit(benchmark::kMillisecond);

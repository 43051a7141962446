#include <benchmark/benchmark.h>

#include "placemotif/census.hpp"
#include "random_network.hpp"

namespace pm = placemotif;

static void BM_Census(benchmark::State& state) {
  const auto nodes = static_cast<std::size_t>(state.range(0));
  const auto net = bench::random_network(nodes, nodes * 5);
  std::uint64_t instances = 0;
  for (auto _ : state) {
    const auto census = pm::enumerate_census(net);
    instances = census.total_instances();
    benchmark::DoNotOptimize(instances);
  }
  state.counters["instances"] = static_cast<double>(instances);
  state.counters["rate"] =
      benchmark::Counter(static_cast<double>(instances), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Census)->Arg(500)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_CensusJobs(benchmark::State& state) {
  const auto net = bench::random_network(4000, 20000);
  const pm::CensusOptions options{std::nullopt, static_cast<unsigned>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(pm::enumerate_census(net, options).total_instances());
}
BENCHMARK(BM_CensusJobs)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

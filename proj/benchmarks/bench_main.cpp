#include <benchmark/benchmark.h>

#include <vector>

#include "collabnet/descriptives.hpp"
#include "collabnet/rng.hpp"
#include "collabnet/sampler.hpp"
#include "collabnet/terms.hpp"

using namespace collabnet;

namespace {

BinaryNetwork random_graph(std::size_t n, double p, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  BinaryNetwork net(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform01(rng) < p) net.set_edge(i, j, true);
  return net;
}

ModelSpec curved_spec() {
  ModelSpec spec;
  spec.terms = {make_term(TermKind::edges), make_term(TermKind::gwdegree, "", 0.5),
                make_term(TermKind::gwesp, "", 0.25)};
  return spec;
}

void BM_ChangeStatistics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const BinaryNetwork net = random_graph(n, 0.4, 1);
  const Model model(curved_spec(), ModelData{});
  std::vector<double> out(model.dimension());
  Rng rng = make_rng(2, 0);
  for (auto _ : state) {
    const std::size_t i = uniform_index(rng, n);
    std::size_t j = uniform_index(rng, n - 1);
    if (j >= i) ++j;
    model.change_binary(net, i, j, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ChangeStatistics)->Arg(40)->Arg(170);

void BM_SamplerSteps(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Model model(curved_spec(), ModelData{});
  const std::vector<double> theta{-1.0, -0.5, 0.3};
  BinaryChain chain(model, theta, random_graph(n, 0.3, 3), Proposal::tie_no_tie, 4);
  for (auto _ : state) benchmark::DoNotOptimize(chain.run(1000));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 1000);
}
BENCHMARK(BM_SamplerSteps)->Arg(40)->Arg(170);

void BM_ClosedTriads(benchmark::State& state) {
  const BinaryNetwork net = random_graph(static_cast<std::size_t>(state.range(0)), 0.5, 5);
  for (auto _ : state) benchmark::DoNotOptimize(closed_triads(net));
}
BENCHMARK(BM_ClosedTriads)->Arg(170);

}  // namespace
BENCHMARK_MAIN();

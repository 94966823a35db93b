#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mgrid/agents.hpp"
#include "mgrid/consensus.hpp"
#include "mgrid/finite_time.hpp"
#include "mgrid/graph.hpp"
#include "mgrid/spectral.hpp"

using namespace mgrid;

namespace {

// The six-generator network used throughout the test suite.
CommGraph six_dg() {
  return CommGraph(6, {{1, 2, 6.0},
                       {1, 4, 6.0},
                       {1, 5, 6.0},
                       {2, 4, 6.0},
                       {3, 4, 6.0},
                       {3, 5, 6.0},
                       {4, 5, 6.0},
                       {4, 6, 6.0},
                       {5, 6, 6.0}});
}

CommGraph random_graph(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> wd(0.5, 3.0);
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (rng() % 2) edges.push_back({i, j, wd(rng)});
  CommGraph g(n, edges);
  return g.is_connected() ? g : random_graph(n, rng);
}

void consensus_step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1234);
  CommGraph g = n == 6 ? six_dg() : random_graph(n, rng);
  ConsensusState st = init_consensus(2400.0, n, 1, 300.0, 10.0, 1e-3);
  for (auto _ : state) {
    step(st, g);
    benchmark::DoNotOptimize(st.s.data());
  }
}
BENCHMARK(consensus_step)->Arg(6)->Arg(12)->Arg(24);

void finite_time_protocol(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1234);
  CommGraph g = n == 6 ? six_dg() : random_graph(n, rng);
  FtWeights w = build_ft_weights(g);
  std::uniform_real_distribution<double> vd(0.1, 1.0);
  std::vector<double> gbar0(n);
  for (double& v : gbar0) v = vd(rng);
  for (auto _ : state) {
    FiniteTimeRun run = run_finite_time(w, gbar0);
    benchmark::DoNotOptimize(run.c_a.data());
  }
}
BENCHMARK(finite_time_protocol)->Arg(6)->Arg(12);

void perturbed_spectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1234);
  CommGraph g = n == 6 ? six_dg() : random_graph(n, rng);
  for (auto _ : state) {
    auto [ok, rep] = verify_hurwitz(g, 1, 10.0);
    benchmark::DoNotOptimize(ok);
    benchmark::DoNotOptimize(rep.dominant);
  }
}
BENCHMARK(perturbed_spectrum)->Arg(6)->Arg(12)->Arg(24);

void agent_network_round(benchmark::State& state) {
  CommGraph g = six_dg();
  Eigen::VectorXd caps(6);
  caps << 600, 450, 300, 150, 750, 150;
  AgentNetwork net(g, caps, 10.0, 1e-3, 1e-4);
  net.inject_capacity_event(1, 300.0, 2700.0);
  for (auto _ : state) {
    net.run_consensus_round();
    benchmark::DoNotOptimize(net.round());
  }
}
BENCHMARK(agent_network_round);

}  // namespace

BENCHMARK_MAIN();

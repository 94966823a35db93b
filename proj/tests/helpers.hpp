#pragma once

#include <random>
#include <vector>

#include "mgrid/graph.hpp"

namespace helpers {

// Random connected weighted graph with n in [nmin, nmax]. Each pair becomes
// an edge with probability 1/2; resample until the graph is connected.
inline mgrid::CommGraph random_connected_graph(std::mt19937_64& rng, int nmin,
                                               int nmax, double wlo = 0.5,
                                               double whi = 3.0) {
  std::uniform_int_distribution<int> nd(nmin, nmax);
  const int n = nd(rng);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> wd(wlo, whi);
  for (;;) {
    std::vector<mgrid::Edge> edges;
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (coin(rng) < 0.5) edges.push_back({i, j, wd(rng)});
    if (edges.empty()) continue;
    mgrid::CommGraph g(n, edges);
    if (g.is_connected()) return g;
  }
}

}  // namespace helpers

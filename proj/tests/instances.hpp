#pragma once

// Random instances for property tests. Graphs are built here directly
// (random spanning tree plus extra edges) rather than through the library's
// generators, so a generator bug cannot hide a kernel bug.

#include "heatdecon/bounds.hpp"
#include "heatdecon/graph.hpp"
#include "heatdecon/heat.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace testing_support {

using heatdecon::Vertex;

inline heatdecon::WeightedGraph random_connected_graph(std::mt19937_64& rng, Vertex n,
                                                       double extra_p, double w_lo = 0.5,
                                                       double w_hi = 2.0) {
  std::uniform_real_distribution<double> weight(w_lo, w_hi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vertex> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::set<std::pair<Vertex, Vertex>> seen;
  std::vector<heatdecon::Edge> edges;
  auto add = [&](Vertex a, Vertex b) {
    if (a > b) std::swap(a, b);
    if (seen.insert({a, b}).second) edges.push_back({a, b, weight(rng)});
  };
  for (Vertex i = 1; i < n; ++i) {
    std::uniform_int_distribution<Vertex> parent(0, i - 1);
    add(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(parent(rng))]);
  }
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = a + 1; b < n; ++b)
      if (unit(rng) < extra_p) add(a, b);
  return heatdecon::WeightedGraph(n, std::move(edges));
}

inline std::vector<Vertex> random_subset(std::mt19937_64& rng, Vertex n, Vertex j) {
  std::vector<Vertex> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(j));
  return all;
}

// A graph together with everything derived from it.
struct Instance {
  heatdecon::WeightedGraph graph;
  heatdecon::CompatibleMetric metric;
  std::shared_ptr<const heatdecon::SpectralData> spectrum;
  heatdecon::GraphConstants constants;
};

inline Instance make_instance(heatdecon::WeightedGraph g) {
  auto m = heatdecon::compatible_metric(g);
  auto s = std::make_shared<const heatdecon::SpectralData>(heatdecon::decompose(heatdecon::laplacian(g)));
  auto c = heatdecon::graph_constants(*s, m);
  return Instance{std::move(g), std::move(m), std::move(s), c};
}

inline heatdecon::WeightedGraph k2(double b = 1.0) { return heatdecon::build_graph(2, {{0, 1, b}}); }
inline heatdecon::WeightedGraph p3() { return heatdecon::build_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}}); }

// Closed-form heat kernel of K2 with unit weight.
inline Eigen::Matrix2d k2_kernel(double t) {
  const double e = std::exp(-2.0 * t);
  Eigen::Matrix2d k;
  k << 1 + e, 1 - e, 1 - e, 1 + e;
  return 0.5 * k;
}

}  // namespace testing_support

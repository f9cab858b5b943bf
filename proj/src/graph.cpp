#include "heatdecon/graph.hpp"

#include "heatdecon/error.hpp"
#include "heatdecon/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace heatdecon {

namespace {

std::string pair_name(Vertex u, Vertex v) {
  std::ostringstream os;
  os << "{" << u << ", " << v << "}";
  return os.str();
}

kernels::WeightedAdjacency adjacency(const WeightedGraph& g,
                                     const std::vector<double>& lengths) {
  kernels::WeightedAdjacency adj;
  adj.arcs.resize(static_cast<std::size_t>(g.size()));
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto& edge = g.edges()[e];
    adj.arcs[static_cast<std::size_t>(edge.u)].push_back({edge.v, lengths[e]});
    adj.arcs[static_cast<std::size_t>(edge.v)].push_back({edge.u, lengths[e]});
  }
  return adj;
}

double vertex_load(const WeightedGraph& g, const Eigen::MatrixXd& dist, Vertex x) {
  double sum = 0.0;
  for (auto e : g.incident(x)) {
    const auto& edge = g.edges()[e];
    const double d = dist(edge.u, edge.v);
    sum += edge.weight * d * d;
  }
  return sum;
}

}  // namespace

WeightedGraph::WeightedGraph(Vertex n_vertices, std::vector<Edge> edges)
    : n_(n_vertices), edges_(std::move(edges)) {
  if (n_ < 1) throw Error(ErrorCode::kInvalidVertexCount, "graph needs at least one vertex");

  std::set<std::pair<Vertex, Vertex>> seen;
  for (auto& e : edges_) {
    if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_)
      throw Error(ErrorCode::kIndexOutOfRange,
                  "edge " + pair_name(e.u, e.v) + " outside [0, " + std::to_string(n_) + ")");
    if (e.u == e.v) throw Error(ErrorCode::kSelfLoop, "edge " + pair_name(e.u, e.v));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw Error(ErrorCode::kNonPositiveWeight,
                  "edge " + pair_name(e.u, e.v) + " has weight " + std::to_string(e.weight));
    if (e.u > e.v) std::swap(e.u, e.v);
    if (!seen.emplace(e.u, e.v).second)
      throw Error(ErrorCode::kDuplicateEdge, "edge " + pair_name(e.u, e.v));
  }

  incident_.resize(static_cast<std::size_t>(n_));
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    incident_[static_cast<std::size_t>(edges_[i].u)].push_back(i);
    incident_[static_cast<std::size_t>(edges_[i].v)].push_back(i);
  }

  // Connectivity by breadth-first traversal from vertex 0.
  std::vector<char> reached(static_cast<std::size_t>(n_), 0);
  std::vector<Vertex> frontier{0};
  reached[0] = 1;
  std::size_t count = 1;
  while (!frontier.empty()) {
    const Vertex x = frontier.back();
    frontier.pop_back();
    for (auto e : incident(x)) {
      const Vertex y = edges_[e].u == x ? edges_[e].v : edges_[e].u;
      if (!reached[static_cast<std::size_t>(y)]) {
        reached[static_cast<std::size_t>(y)] = 1;
        ++count;
        frontier.push_back(y);
      }
    }
  }
  if (count != static_cast<std::size_t>(n_)) {
    const auto it = std::find(reached.begin(), reached.end(), 0);
    throw Error(ErrorCode::kDisconnectedGraph,
                "vertex " + std::to_string(it - reached.begin()) +
                    " is unreachable from vertex 0");
  }
}

double WeightedGraph::weight(Vertex x, Vertex y) const {
  for (auto e : incident(x)) {
    const auto& edge = edges_[e];
    if (edge.u == y || edge.v == y) return x == y ? 0.0 : edge.weight;
  }
  return 0.0;
}

WeightedGraph build_graph(Vertex n_vertices, std::vector<Edge> edges) {
  return WeightedGraph(n_vertices, std::move(edges));
}

CompatibleMetric compatible_metric(const WeightedGraph& g) {
  std::vector<double> lengths;
  lengths.reserve(g.edges().size());
  for (const auto& e : g.edges()) {
    const auto deg = static_cast<double>(std::max(g.degree(e.u), g.degree(e.v)));
    lengths.push_back(1.0 / std::sqrt(e.weight * deg));
  }
  Eigen::MatrixXd dist = kernels::parallel::all_pairs_shortest_paths(adjacency(g, lengths));
  // Dijkstra from opposite ends can differ in the last bit.
  dist = dist.cwiseMin(dist.transpose()).eval();
  return CompatibleMetric(std::move(dist), std::move(lengths));
}

double CompatibleMetric::max_vertex_load(const WeightedGraph& g) const {
  double worst = 0.0;
  for (Vertex x = 0; x < g.size(); ++x) worst = std::max(worst, vertex_load(g, dist_, x));
  return worst;
}

CompatibleMetric CompatibleMetric::from_matrix(const WeightedGraph& g,
                                               Eigen::MatrixXd dist) {
  const Vertex n = g.size();
  if (dist.rows() != n || dist.cols() != n)
    throw Error(ErrorCode::kInvalidMetric, "metric must be " + std::to_string(n) + "x" +
                                               std::to_string(n));
  const double scale = std::max(1.0, dist.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;

  for (Vertex x = 0; x < n; ++x) {
    if (dist(x, x) != 0.0)
      throw Error(ErrorCode::kInvalidMetric, "d(" + std::to_string(x) + "," +
                                                 std::to_string(x) + ") is not zero");
    for (Vertex y = 0; y < n; ++y) {
      if (!std::isfinite(dist(x, y)))
        throw Error(ErrorCode::kInvalidMetric, "non-finite distance");
      if (x != y && !(dist(x, y) > 0.0))
        throw Error(ErrorCode::kInvalidMetric,
                    "d" + pair_name(x, y) + " must be positive for distinct vertices");
      if (dist(x, y) != dist(y, x))
        throw Error(ErrorCode::kInvalidMetric, "d is not symmetric at " + pair_name(x, y));
    }
  }
  for (Vertex z = 0; z < n; ++z)
    for (Vertex x = 0; x < n; ++x)
      for (Vertex y = 0; y < n; ++y)
        if (dist(x, y) > dist(x, z) + dist(z, y) + tol)
          throw Error(ErrorCode::kInvalidMetric,
                      "triangle inequality fails for " + pair_name(x, y) + " via " +
                          std::to_string(z));

  // Geodesic: every distance is realized by a path through a neighbor.
  for (Vertex x = 0; x < n; ++x)
    for (Vertex y = 0; y < n; ++y) {
      if (x == y) continue;
      double best = std::numeric_limits<double>::infinity();
      for (auto e : g.incident(x)) {
        const auto& edge = g.edges()[e];
        const Vertex z = edge.u == x ? edge.v : edge.u;
        best = std::min(best, dist(x, z) + dist(z, y));
      }
      if (std::abs(best - dist(x, y)) > 1e-9 * scale)
        throw Error(ErrorCode::kInvalidMetric,
                    "d" + pair_name(x, y) + " is not a shortest-path distance");
    }

  for (Vertex x = 0; x < n; ++x) {
    const double load = vertex_load(g, dist, x);
    if (load > 1.0 + 1e-12)
      throw Error(ErrorCode::kInvalidMetric,
                  "sum of b d^2 at vertex " + std::to_string(x) + " is " +
                      std::to_string(load) + " > 1");
  }

  std::vector<double> lengths;
  lengths.reserve(g.edges().size());
  for (const auto& e : g.edges()) lengths.push_back(dist(e.u, e.v));
  return CompatibleMetric(std::move(dist), std::move(lengths));
}

Eigen::MatrixXd laplacian(const WeightedGraph& g) {
  const Vertex n = g.size();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    l(e.u, e.v) = e.weight;
    l(e.v, e.u) = e.weight;
    l(e.u, e.u) -= e.weight;
    l(e.v, e.v) -= e.weight;
  }
  return l;
}

double dirichlet_form(const WeightedGraph& g, const Eigen::VectorXd& f) {
  double sum = 0.0;
  for (const auto& e : g.edges()) {
    const double diff = f[e.u] - f[e.v];
    sum += 2.0 * e.weight * diff * diff;  // (x,y) and (y,x)
  }
  return -0.5 * sum;
}

double min_separation(const CompatibleMetric& m, std::span<const Vertex> support) {
  double best = kInfiniteSeparation;
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t k = i + 1; k < support.size(); ++k)
      best = std::min(best, m(support[i], support[k]));
  return best;
}

double min_vertex_distance(const CompatibleMetric& m) {
  const auto n = m.dist().rows();
  if (n < 2) throw Error(ErrorCode::kSingletonGraph, "no pair of distinct vertices");
  double best = kInfiniteSeparation;
  for (Vertex x = 0; x < n; ++x)
    for (Vertex y = x + 1; y < n; ++y) best = std::min(best, m(x, y));
  return best;
}

}  // namespace heatdecon

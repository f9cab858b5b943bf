#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace heatdecon {

using Vertex = Eigen::Index;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  double weight = 1.0;
};

// Finite, connected, undirected graph with strictly positive symmetric edge
// weights b(u,v). Edges are stored on unordered pairs with u < v.
class WeightedGraph {
 public:
  WeightedGraph(Vertex n_vertices, std::vector<Edge> edges);

  Vertex size() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  // Incident edge indices of each vertex, into edges().
  const std::vector<std::size_t>& incident(Vertex x) const {
    return incident_[static_cast<std::size_t>(x)];
  }
  std::size_t degree(Vertex x) const { return incident(x).size(); }

  // b(x,y), zero when {x,y} is not an edge.
  double weight(Vertex x, Vertex y) const;

 private:
  Vertex n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
};

WeightedGraph build_graph(Vertex n_vertices, std::vector<Edge> edges);

// All-pairs distance that is a geodesic metric on the graph and satisfies
// sum_{y ~ x} b(x,y) d(x,y)^2 <= 1 at every vertex x.
class CompatibleMetric {
 public:
  const Eigen::MatrixXd& dist() const noexcept { return dist_; }
  double operator()(Vertex x, Vertex y) const { return dist_(x, y); }
  // Aligned with WeightedGraph::edges().
  const std::vector<double>& edge_lengths() const noexcept {
    return edge_lengths_;
  }

  // Largest per-vertex sum of b(x,y) d(x,y)^2 over incident edges.
  double max_vertex_load(const WeightedGraph& g) const;

  // Validates a caller-supplied matrix against the metric, geodesic and
  // per-vertex load conditions; throws InvalidMetric naming the first failure.
  static CompatibleMetric from_matrix(const WeightedGraph& g,
                                      Eigen::MatrixXd dist);

 private:
  friend CompatibleMetric compatible_metric(const WeightedGraph& g);
  CompatibleMetric(Eigen::MatrixXd dist, std::vector<double> edge_lengths)
      : dist_(std::move(dist)), edge_lengths_(std::move(edge_lengths)) {}

  Eigen::MatrixXd dist_;
  std::vector<double> edge_lengths_;
};

// Edge length (b(u,v) * max(deg u, deg v))^{-1/2}, closed under shortest paths.
CompatibleMetric compatible_metric(const WeightedGraph& g);

// Dense N x N Laplacian: b(x,y) off the diagonal, -sum_y b(x,y) on it.
Eigen::MatrixXd laplacian(const WeightedGraph& g);

// <Delta f, f> evaluated from the edge sum -1/2 sum_{x,y} b |f(x)-f(y)|^2,
// where the sum runs over ordered pairs (each edge counted twice).
double dirichlet_form(const WeightedGraph& g, const Eigen::VectorXd& f);

inline constexpr double kInfiniteSeparation =
    std::numeric_limits<double>::infinity();

// Minimum pairwise distance within `support`; +inf for fewer than two vertices.
double min_separation(const CompatibleMetric& m, std::span<const Vertex> support);

// Smallest distance between two distinct vertices (zeta).
double min_vertex_distance(const CompatibleMetric& m);

}  // namespace heatdecon

#include "heatdecon/graph.hpp"
#include "heatdecon/heat.hpp"
#include "heatdecon/kernels.hpp"

#include "instances.hpp"

#include <gtest/gtest.h>

#include <omp.h>

using namespace heatdecon;

namespace {

kernels::WeightedAdjacency adjacency(const WeightedGraph& g) {
  kernels::WeightedAdjacency adj;
  adj.arcs.resize(static_cast<std::size_t>(g.size()));
  std::mt19937_64 rng(static_cast<std::uint64_t>(g.size()));
  std::uniform_real_distribution<double> len(0.1, 3.0);
  for (const auto& e : g.edges()) {
    const double l = len(rng);
    adj.arcs[static_cast<std::size_t>(e.u)].push_back({e.v, l});
    adj.arcs[static_cast<std::size_t>(e.v)].push_back({e.u, l});
  }
  return adj;
}

}  // namespace

TEST(Kernels, SpectralExponentialSerialMatchesParallelBitwise) {
  std::mt19937_64 rng(1);
  for (const int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    for (Vertex n : {1, 2, 7, 33, 80}) {
      const auto g = n == 1 ? build_graph(1, {}) : testing_support::random_connected_graph(rng, n, 0.2);
      const auto s = decompose(laplacian(g));
      for (double t : {0.0, 0.01, 1.0, 50.0}) {
        const Eigen::MatrixXd a = kernels::serial::spectral_exponential(s.eigenvectors, s.eigenvalues, t);
        const Eigen::MatrixXd b = kernels::parallel::spectral_exponential(s.eigenvectors, s.eigenvalues, t);
        EXPECT_EQ(a, b) << "n=" << n << " t=" << t << " threads=" << threads;
      }
    }
  }
  omp_set_num_threads(kernels::max_threads());
}

TEST(Kernels, SpectralExponentialMatchesDenseProduct) {
  std::mt19937_64 rng(2);
  const auto g = testing_support::random_connected_graph(rng, 25, 0.3);
  const auto s = decompose(laplacian(g));
  const double t = 0.3;
  const Eigen::MatrixXd dense =
      s.eigenvectors * (t * s.eigenvalues).array().exp().matrix().asDiagonal() * s.eigenvectors.transpose();
  const Eigen::MatrixXd k = kernels::serial::spectral_exponential(s.eigenvectors, s.eigenvalues, t);
  EXPECT_LT((k - dense).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Kernels, ShortestPathsSerialMatchesParallel) {
  std::mt19937_64 rng(3);
  for (int threads : {1, 3}) {
    omp_set_num_threads(threads);
    for (Vertex n : {2, 9, 40, 75}) {
      const auto g = testing_support::random_connected_graph(rng, n, 0.1);
      const auto adj = adjacency(g);
      const Eigen::MatrixXd fw = kernels::serial::all_pairs_shortest_paths(adj);
      const Eigen::MatrixXd dj = kernels::parallel::all_pairs_shortest_paths(adj);
      EXPECT_LT((fw - dj).cwiseAbs().maxCoeff(), 1e-12 * fw.maxCoeff());
      EXPECT_EQ(fw.diagonal().cwiseAbs().maxCoeff(), 0.0);
    }
  }
  omp_set_num_threads(kernels::max_threads());
}

TEST(Kernels, ShortestPathsUnreachableStaysInfinite) {
  kernels::WeightedAdjacency adj;
  adj.arcs.resize(3);
  adj.arcs[0].push_back({1, 2.0});
  adj.arcs[1].push_back({0, 2.0});
  const Eigen::MatrixXd fw = kernels::serial::all_pairs_shortest_paths(adj);
  const Eigen::MatrixXd dj = kernels::parallel::all_pairs_shortest_paths(adj);
  EXPECT_TRUE(std::isinf(fw(0, 2)));
  EXPECT_TRUE(std::isinf(dj(2, 1)));
  EXPECT_EQ(fw(0, 1), 2.0);
  EXPECT_EQ(dj(1, 0), 2.0);
}

TEST(Kernels, MetricUsesShortestPaths) {
  // compatible_metric closes edge lengths under shortest paths; check
  // against Floyd-Warshall on the same edge lengths.
  std::mt19937_64 rng(4);
  const auto g = testing_support::random_connected_graph(rng, 30, 0.15);
  const auto m = compatible_metric(g);
  kernels::WeightedAdjacency adj;
  adj.arcs.resize(30);
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const auto& e = g.edges()[i];
    adj.arcs[static_cast<std::size_t>(e.u)].push_back({e.v, m.edge_lengths()[i]});
    adj.arcs[static_cast<std::size_t>(e.v)].push_back({e.u, m.edge_lengths()[i]});
  }
  EXPECT_LT((kernels::serial::all_pairs_shortest_paths(adj) - m.dist()).cwiseAbs().maxCoeff(), 1e-12);
}

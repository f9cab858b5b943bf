#pragma once

// Dense inner loops used by the graph and heat-semigroup modules. Each kernel
// has a serial reference and an OpenMP version; the library calls the OpenMP
// version and the tests hold the two against each other.

#include <Eigen/Core>

#include <vector>

namespace heatdecon::kernels {

// Adjacency as (neighbor, length) lists.
struct WeightedAdjacency {
  struct Arc {
    Eigen::Index to;
    double length;
  };
  std::vector<std::vector<Arc>> arcs;
};

namespace serial {

// K = V diag(exp(t * lambda)) V^T, plain triple loop over the upper triangle.
Eigen::MatrixXd spectral_exponential(const Eigen::MatrixXd& eigenvectors,
                                     const Eigen::VectorXd& eigenvalues,
                                     double t);

// Floyd-Warshall. Unreachable pairs stay +inf.
Eigen::MatrixXd all_pairs_shortest_paths(const WeightedAdjacency& adj);

}  // namespace serial

namespace parallel {

// Same contraction as serial::spectral_exponential with rows split across
// threads. Each entry is summed in the same order, so the two agree bitwise.
Eigen::MatrixXd spectral_exponential(const Eigen::MatrixXd& eigenvectors,
                                     const Eigen::VectorXd& eigenvalues,
                                     double t);

// One Dijkstra per source, sources split across threads.
Eigen::MatrixXd all_pairs_shortest_paths(const WeightedAdjacency& adj);

}  // namespace parallel

int max_threads();

}  // namespace heatdecon::kernels

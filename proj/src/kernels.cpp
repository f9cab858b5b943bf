#include "heatdecon/kernels.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace heatdecon::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd exponentiate(const Eigen::VectorXd& eigenvalues, double t) {
  Eigen::VectorXd e(eigenvalues.size());
  for (Eigen::Index k = 0; k < e.size(); ++k) e[k] = std::exp(t * eigenvalues[k]);
  return e;
}

// Row i of the upper triangle of V diag(e) V^T. Shared by both variants so the
// summation order is identical.
void fill_row(const Eigen::MatrixXd& vecs, const Eigen::VectorXd& e,
              Eigen::Index i, Eigen::MatrixXd& out) {
  const Eigen::Index n = vecs.rows();
  const Eigen::Index m = vecs.cols();
  for (Eigen::Index j = i; j < n; ++j) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) s += vecs(i, k) * e[k] * vecs(j, k);
    out(i, j) = s;
    out(j, i) = s;
  }
}

void dijkstra(const WeightedAdjacency& adj, Eigen::Index source,
              Eigen::MatrixXd& out) {
  using Item = std::pair<double, Eigen::Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const auto n = static_cast<Eigen::Index>(adj.arcs.size());
  std::vector<double> d(static_cast<std::size_t>(n), kInf);
  d[static_cast<std::size_t>(source)] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [dx, x] = heap.top();
    heap.pop();
    if (dx > d[static_cast<std::size_t>(x)]) continue;
    for (const auto& arc : adj.arcs[static_cast<std::size_t>(x)]) {
      const double cand = dx + arc.length;
      auto& dy = d[static_cast<std::size_t>(arc.to)];
      if (cand < dy) {
        dy = cand;
        heap.emplace(cand, arc.to);
      }
    }
  }
  for (Eigen::Index y = 0; y < n; ++y) out(source, y) = d[static_cast<std::size_t>(y)];
}

}  // namespace

namespace serial {

Eigen::MatrixXd spectral_exponential(const Eigen::MatrixXd& eigenvectors,
                                     const Eigen::VectorXd& eigenvalues,
                                     double t) {
  const Eigen::VectorXd e = exponentiate(eigenvalues, t);
  Eigen::MatrixXd out(eigenvectors.rows(), eigenvectors.rows());
  for (Eigen::Index i = 0; i < eigenvectors.rows(); ++i)
    fill_row(eigenvectors, e, i, out);
  return out;
}

Eigen::MatrixXd all_pairs_shortest_paths(const WeightedAdjacency& adj) {
  const auto n = static_cast<Eigen::Index>(adj.arcs.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, kInf);
  for (Eigen::Index x = 0; x < n; ++x) {
    d(x, x) = 0.0;
    for (const auto& arc : adj.arcs[static_cast<std::size_t>(x)])
      d(x, arc.to) = std::min(d(x, arc.to), arc.length);
  }
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dik = d(i, k);
      if (dik == kInf) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double cand = dik + d(k, j);
        if (cand < d(i, j)) d(i, j) = cand;
      }
    }
  return d;
}

}  // namespace serial

namespace parallel {

Eigen::MatrixXd spectral_exponential(const Eigen::MatrixXd& eigenvectors,
                                     const Eigen::VectorXd& eigenvalues,
                                     double t) {
  const Eigen::VectorXd e = exponentiate(eigenvalues, t);
  const Eigen::Index n = eigenvectors.rows();
  Eigen::MatrixXd out(n, n);
  // Row i touches n - i entries; dynamic scheduling evens that out.
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index i = 0; i < n; ++i) fill_row(eigenvectors, e, i, out);
  return out;
}

Eigen::MatrixXd all_pairs_shortest_paths(const WeightedAdjacency& adj) {
  const auto n = static_cast<Eigen::Index>(adj.arcs.size());
  Eigen::MatrixXd d(n, n);
#pragma omp parallel for schedule(dynamic, 1)
  for (Eigen::Index s = 0; s < n; ++s) dijkstra(adj, s, d);
  return d;
}

}  // namespace parallel

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace heatdecon::kernels

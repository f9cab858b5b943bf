#include "heatdecon/heat.hpp"

#include "heatdecon/error.hpp"
#include "heatdecon/kernels.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <set>

namespace heatdecon {

SpectralData decompose(const Eigen::MatrixXd& laplacian) {
  if (laplacian.rows() != laplacian.cols())
    throw Error(ErrorCode::kDimensionMismatch, "Laplacian must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::kEigensolverFailure, "symmetric eigensolver did not converge");

  SpectralData s{solver.eigenvalues(), solver.eigenvectors()};
  const double norm = s.eigenvalues.cwiseAbs().maxCoeff();
  const double zero_band = 1e-10 * norm;
  for (auto& lambda : s.eigenvalues)
    if (std::abs(lambda) <= zero_band) lambda = 0.0;
  return s;
}

double operator_norm(const SpectralData& s) {
  return s.eigenvalues.size() == 0 ? 0.0 : s.eigenvalues.cwiseAbs().maxCoeff();
}

double spectral_gap(const SpectralData& s) {
  if (s.size() < 2) throw Error(ErrorCode::kSingletonGraph, "spectral gap needs N >= 2");
  // Ascending order puts the nonzero eigenvalue closest to zero just below
  // the zero block.
  for (Eigen::Index i = s.size() - 1; i >= 0; --i)
    if (s.eigenvalues[i] < 0.0) return -s.eigenvalues[i];
  return 0.0;
}

HeatOperator::HeatOperator(std::shared_ptr<const SpectralData> spectrum, double t)
    : spectrum_(std::move(spectrum)), t_(t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::kNegativeTime, "t = " + std::to_string(t));
  multipliers_ = (t_ * spectrum_->eigenvalues.array()).exp().matrix();
  if (t_ == 0.0) {
    kernel_ = Eigen::MatrixXd::Identity(spectrum_->size(), spectrum_->size());
    return;
  }
  kernel_ = kernels::parallel::spectral_exponential(spectrum_->eigenvectors,
                                                    spectrum_->eigenvalues, t_);
}

HeatOperator heat_operator(std::shared_ptr<const SpectralData> s, double t) {
  return HeatOperator(std::move(s), t);
}

Eigen::VectorXd apply(const HeatOperator& h, const Eigen::VectorXd& f) {
  if (f.size() != h.size())
    throw Error(ErrorCode::kDimensionMismatch, "vector of length " + std::to_string(f.size()) +
                                                   " for an operator on " +
                                                   std::to_string(h.size()) + " vertices");
  return h.kernel() * f;
}

Eigen::VectorXd apply_inverse(const HeatOperator& h, const Eigen::VectorXd& f) {
  if (f.size() != h.size())
    throw Error(ErrorCode::kDimensionMismatch, "vector length differs from operator size");
  const auto& v = h.spectrum().eigenvectors;
  const Eigen::VectorXd coeffs = (v.transpose() * f).cwiseQuotient(h.multipliers());
  return v * coeffs;
}

void validate_support(std::span<const Vertex> support, Eigen::Index n) {
  if (support.empty()) throw Error(ErrorCode::kEmptySupport, "support must be nonempty");
  std::set<Vertex> seen;
  for (auto v : support) {
    if (v < 0 || v >= n)
      throw Error(ErrorCode::kIndexOutOfRange,
                  "vertex " + std::to_string(v) + " outside [0, " + std::to_string(n) + ")");
    if (!seen.insert(v).second)
      throw Error(ErrorCode::kDuplicateVertex, "vertex " + std::to_string(v) + " repeated");
  }
}

RestrictedOperator restrict(const HeatOperator& h, std::span<const Vertex> support) {
  validate_support(support, h.size());
  const auto j = static_cast<Eigen::Index>(support.size());
  RestrictedOperator m{{support.begin(), support.end()}, Eigen::MatrixXd(j, j)};
  for (Eigen::Index a = 0; a < j; ++a)
    for (Eigen::Index b = 0; b < j; ++b)
      m.matrix(a, b) = h(support[static_cast<std::size_t>(a)], support[static_cast<std::size_t>(b)]);
  return m;
}

RestrictedInverse invert_restricted(const RestrictedOperator& m) {
  const Eigen::Index j = m.matrix.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(m.matrix);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::kNumericallySingular, "Cholesky factorization of M^t failed");

  RestrictedInverse inv;
  inv.matrix = llt.solve(Eigen::MatrixXd::Identity(j, j));
  const double residual =
      (m.matrix * inv.matrix - Eigen::MatrixXd::Identity(j, j)).cwiseAbs().maxCoeff();
  if (!(residual < 1e-8))
    throw Error(ErrorCode::kNumericallySingular,
                "inverse residual " + std::to_string(residual) + " exceeds 1e-8");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.matrix, Eigen::EigenvaluesOnly);
  inv.norm_l2 = 1.0 / eig.eigenvalues().minCoeff();
  inv.norm_linf = inv.matrix.cwiseAbs().rowwise().sum().maxCoeff();
  return inv;
}

}  // namespace heatdecon

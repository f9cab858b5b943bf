#pragma once

#include "heatdecon/graph.hpp"

#include <Eigen/Core>

#include <memory>
#include <span>
#include <vector>

namespace heatdecon {

// Eigenpairs of the Laplacian. Eigenvalues ascending (all <= 0), eigenvectors
// as orthonormal columns.
struct SpectralData {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  Eigen::Index size() const noexcept { return eigenvalues.size(); }
};

// Symmetric eigendecomposition of `laplacian`. Eigenvalues within
// 1e-10 * ||Delta|| of zero are snapped to exactly zero.
SpectralData decompose(const Eigen::MatrixXd& laplacian);

// ||Delta|| = max |lambda_i|.
double operator_norm(const SpectralData& s);

// Smallest nonzero eigenvalue of -Delta.
double spectral_gap(const SpectralData& s);

// e^{t Delta} as a dense kernel K(t,x,y). Keeps the spectral data it was
// built from so inverses and projections can be taken in the eigenbasis.
class HeatOperator {
 public:
  HeatOperator(std::shared_ptr<const SpectralData> spectrum, double t);

  double time() const noexcept { return t_; }
  Eigen::Index size() const noexcept { return kernel_.rows(); }
  const Eigen::MatrixXd& kernel() const noexcept { return kernel_; }
  double operator()(Vertex x, Vertex y) const { return kernel_(x, y); }
  const SpectralData& spectrum() const noexcept { return *spectrum_; }
  const std::shared_ptr<const SpectralData>& shared_spectrum() const noexcept {
    return spectrum_;
  }

  // exp(t * lambda_i), the eigenvalues of K(t).
  const Eigen::VectorXd& multipliers() const noexcept { return multipliers_; }

 private:
  std::shared_ptr<const SpectralData> spectrum_;
  double t_;
  Eigen::VectorXd multipliers_;
  Eigen::MatrixXd kernel_;
};

HeatOperator heat_operator(std::shared_ptr<const SpectralData> s, double t);

// K(t) f.
Eigen::VectorXd apply(const HeatOperator& h, const Eigen::VectorXd& f);

// e^{-t Delta} f through the eigenbasis.
Eigen::VectorXd apply_inverse(const HeatOperator& h, const Eigen::VectorXd& f);

// Principal J x J block of K(t) on an ordered support, i.e. M^t.
struct RestrictedOperator {
  std::vector<Vertex> support;
  Eigen::MatrixXd matrix;
};

RestrictedOperator restrict(const HeatOperator& h, std::span<const Vertex> support);

struct RestrictedInverse {
  Eigen::MatrixXd matrix;
  double norm_l2 = 0.0;    // ||M^{-t}||_{2->2}
  double norm_linf = 0.0;  // ||M^{-t}||_{inf->inf}, max absolute row sum
};

// Cholesky-based inverse of M^t. Throws NumericallySingular if the
// factorization fails or the residual ||M M^{-1} - I||_max exceeds 1e-8.
RestrictedInverse invert_restricted(const RestrictedOperator& m);

// Checks that `support` is nonempty, in range and free of repeats.
void validate_support(std::span<const Vertex> support, Eigen::Index n);

}  // namespace heatdecon

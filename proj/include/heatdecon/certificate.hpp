#pragma once

#include "heatdecon/heat.hpp"

#include <span>
#include <vector>

namespace heatdecon {

// Signs epsilon_j in {+1, -1}, aligned with a support ordering.
class SignPattern {
 public:
  SignPattern() = default;
  explicit SignPattern(std::vector<int> signs);

  // Signs of the nonzero entries of g on `support`.
  static SignPattern of(const Eigen::VectorXd& g, std::span<const Vertex> support);

  std::size_t size() const noexcept { return signs_.size(); }
  int operator[](std::size_t i) const { return signs_[i]; }
  const std::vector<int>& values() const noexcept { return signs_; }
  Eigen::VectorXd as_vector() const;

  bool operator==(const SignPattern&) const = default;

 private:
  std::vector<int> signs_;
};

// h = K(t) a with a supported on S and M^t a_S = epsilon.
struct Certificate {
  std::vector<Vertex> support;
  SignPattern signs;
  double t = 0.0;
  Eigen::VectorXd coeffs;  // a_j, one per support vertex
  Eigen::VectorXd values;  // h on all of V
  double sup_norm = 0.0;
  double off_support_max = 0.0;  // 0 when S = V
};

struct CertificateVerdict {
  bool unit_sup = false;           // ||h||_inf = 1
  bool interpolates = false;       // h(v_j) = epsilon_j
  bool strictly_interior = false;  // |h| < 1 off the support
  double interpolation_error = 0.0;
  double margin = 0.0;  // 1 - off_support_max
  double worst_violation = 0.0;

  bool all() const noexcept { return unit_sup && interpolates && strictly_interior; }
};

inline constexpr double kDefaultCertificateTol = 1e-9;

Certificate construct(const HeatOperator& h_op, std::span<const Vertex> support,
                      const SignPattern& eps);

CertificateVerdict verify(const Certificate& cert, const SignPattern& eps,
                          double tol = kDefaultCertificateTol);

// True iff the certificate's support and signs match g's and it interpolates
// and stays strictly inside the unit ball off the support.
bool certify_uniqueness(const Certificate& cert,
                        std::span<const Vertex> g_support,
                        const SignPattern& g_signs,
                        double tol = kDefaultCertificateTol);

}  // namespace heatdecon

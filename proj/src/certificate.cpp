#include "heatdecon/certificate.hpp"

#include "heatdecon/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <map>

namespace heatdecon {

SignPattern::SignPattern(std::vector<int> signs) : signs_(std::move(signs)) {
  for (int s : signs_)
    if (s != 1 && s != -1)
      throw Error(ErrorCode::kInvalidSignPattern, "sign " + std::to_string(s) + " is not +1 or -1");
}

SignPattern SignPattern::of(const Eigen::VectorXd& g, std::span<const Vertex> support) {
  std::vector<int> signs;
  signs.reserve(support.size());
  for (auto v : support) {
    if (g[v] == 0.0)
      throw Error(ErrorCode::kInvalidSignPattern, "g vanishes at support vertex " + std::to_string(v));
    signs.push_back(g[v] > 0.0 ? 1 : -1);
  }
  return SignPattern(std::move(signs));
}

Eigen::VectorXd SignPattern::as_vector() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(signs_.size()));
  for (std::size_t i = 0; i < signs_.size(); ++i) v[static_cast<Eigen::Index>(i)] = signs_[i];
  return v;
}

Certificate construct(const HeatOperator& h_op, std::span<const Vertex> support,
                      const SignPattern& eps) {
  const RestrictedOperator m = restrict(h_op, support);
  if (eps.size() != support.size())
    throw Error(ErrorCode::kDimensionMismatch, "sign pattern length differs from support size");

  Eigen::LLT<Eigen::MatrixXd> llt(m.matrix);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::kNumericallySingular, "Cholesky factorization of M^t failed");
  const Eigen::VectorXd target = eps.as_vector();
  Eigen::VectorXd a = llt.solve(target);
  a += llt.solve(target - m.matrix * a);  // one refinement step
  const double residual = (m.matrix * a - target).cwiseAbs().maxCoeff();
  if (!(residual < 1e-8))
    throw Error(ErrorCode::kNumericallySingular,
                "certificate solve residual " + std::to_string(residual));

  Certificate cert;
  cert.support = m.support;
  cert.signs = eps;
  cert.t = h_op.time();
  cert.coeffs = a;
  Eigen::VectorXd extended = Eigen::VectorXd::Zero(h_op.size());
  for (std::size_t i = 0; i < support.size(); ++i)
    extended[support[i]] = a[static_cast<Eigen::Index>(i)];
  cert.values = apply(h_op, extended);
  cert.sup_norm = cert.values.cwiseAbs().maxCoeff();

  std::vector<char> on_support(static_cast<std::size_t>(h_op.size()), 0);
  for (auto v : support) on_support[static_cast<std::size_t>(v)] = 1;
  cert.off_support_max = 0.0;
  for (Eigen::Index x = 0; x < h_op.size(); ++x)
    if (!on_support[static_cast<std::size_t>(x)])
      cert.off_support_max = std::max(cert.off_support_max, std::abs(cert.values[x]));
  return cert;
}

CertificateVerdict verify(const Certificate& cert, const SignPattern& eps, double tol) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be nonnegative");
  if (eps.size() != cert.support.size())
    throw Error(ErrorCode::kDimensionMismatch, "sign pattern length differs from support size");

  CertificateVerdict v;
  for (std::size_t i = 0; i < cert.support.size(); ++i)
    v.interpolation_error =
        std::max(v.interpolation_error, std::abs(cert.values[cert.support[i]] - eps[i]));
  v.interpolates = v.interpolation_error <= tol;
  v.margin = 1.0 - cert.off_support_max;
  v.strictly_interior = cert.off_support_max < 1.0 - tol;
  const double sup_error = std::abs(cert.sup_norm - 1.0);
  v.unit_sup = v.interpolates && v.strictly_interior && sup_error <= tol;
  v.worst_violation = std::max({v.interpolation_error, std::max(0.0, -v.margin), sup_error});
  return v;
}

bool certify_uniqueness(const Certificate& cert, std::span<const Vertex> g_support,
                        const SignPattern& g_signs, double tol) {
  if (g_support.size() != g_signs.size() || g_support.size() != cert.support.size())
    return false;
  std::map<Vertex, int> expected;
  for (std::size_t i = 0; i < g_support.size(); ++i) expected[g_support[i]] = g_signs[i];
  std::vector<int> aligned;
  aligned.reserve(cert.support.size());
  for (std::size_t i = 0; i < cert.support.size(); ++i) {
    const auto it = expected.find(cert.support[i]);
    if (it == expected.end() || it->second != cert.signs[i]) return false;
    aligned.push_back(it->second);
  }
  const auto verdict = verify(cert, SignPattern(std::move(aligned)), tol);
  return verdict.interpolates && verdict.strictly_interior;
}

}  // namespace heatdecon

#include "heatdecon/bounds.hpp"

#include "heatdecon/error.hpp"

#include <cmath>
#include <numbers>

namespace heatdecon {

namespace {

using std::numbers::e;

void require_time(double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::kNegativeTime, "t = " + std::to_string(t));
}

// (2 e t / d)^{d/2}, with the conventions 0 at t = 0 and 0 at d = +inf.
double decay(double d, double t) {
  if (t == 0.0 || std::isinf(d)) return 0.0;
  return std::exp(-0.5 * d * std::log(d / (2.0 * e * t)));
}

double diag_lower(const GraphConstants& c, double t) {
  const double n = static_cast<double>(c.n);
  return 1.0 / n + std::exp(-t * c.op_norm) * (n - 1.0) / n;
}

// (J-1)(2eT/D)^{D/2}; the (J-1) factor wins over an infinite D.
double support_coupling(const SupportProfile& p, double t) {
  if (p.j <= 1) return 0.0;
  return static_cast<double>(p.j - 1) * decay(p.d_min, t);
}

// (J-1)(4eT/D)^{D/4}, i.e. the decay at distance D/2.
double far_coupling(const SupportProfile& p, double t) {
  if (p.j <= 1) return 0.0;
  return static_cast<double>(p.j - 1) * decay(0.5 * p.d_min, t);
}

}  // namespace

GraphConstants graph_constants(const SpectralData& s, const CompatibleMetric& m) {
  GraphConstants c;
  c.n = s.size();
  c.op_norm = operator_norm(s);
  c.gap = spectral_gap(s);
  c.zeta = min_vertex_distance(m);
  return c;
}

SupportProfile support_profile(const CompatibleMetric& m, std::span<const Vertex> support) {
  validate_support(support, m.dist().rows());
  return {static_cast<Eigen::Index>(support.size()), min_separation(m, support)};
}

DiagonalBounds diagonal_bounds(const GraphConstants& c, double t) {
  require_time(t);
  const double n = static_cast<double>(c.n);
  return {diag_lower(c, t), 1.0 / n + std::exp(-t * c.gap) * (n - 1.0) / n};
}

FolzValue folz_bound(double dist, double t) {
  if (!(dist > 0.0)) throw Error(ErrorCode::kNonPositiveDistance, "dist = " + std::to_string(dist));
  if (!(t > 0.0)) throw Error(ErrorCode::kNonPositiveTime, "t = " + std::to_string(t));
  const double v = decay(dist, t);
  return {v, v >= 1.0};
}

InvertibilityCheck check_invertibility(const GraphConstants& c, const SupportProfile& p,
                                       double t) {
  require_time(t);
  const double lhs = support_coupling(p, t);
  const double rhs = diag_lower(c, t);
  return {lhs < rhs, rhs - lhs};
}

double inverse_norm_bound(const GraphConstants& c, const SupportProfile& p, double t) {
  const auto check = check_invertibility(c, p, t);
  if (!check.ok)
    throw Error(ErrorCode::kConditionViolated,
                "invertibility condition fails at t = " + std::to_string(t));
  return 1.0 / check.margin;
}

FeasibilityReport check_certificate_condition(const GraphConstants& c,
                                              const SupportProfile& p, double t) {
  require_time(t);
  FeasibilityReport r;
  r.t = t;
  r.cond1_lhs = support_coupling(p, t);
  r.cond1_rhs = diag_lower(c, t);
  r.cond1_ok = r.cond1_lhs < r.cond1_rhs;
  r.cond2_lhs = decay(c.zeta, t) + far_coupling(p, t);
  r.cond2_rhs = r.cond1_rhs - r.cond1_lhs;
  r.cond2_ok = r.cond2_lhs < r.cond2_rhs;
  if (r.cond1_ok) r.inverse_norm_bound = 1.0 / (r.cond1_rhs - r.cond1_lhs);
  return r;
}

double max_admissible_time(const GraphConstants& c, const SupportProfile& p) {
  const auto feasible = [&](double t) {
    const auto r = check_certificate_condition(c, p, t);
    return r.cond1_ok && r.cond2_ok;
  };
  // Condition 1 forces D > 2eT. With a single support vertex D is infinite and
  // condition 2 forces zeta > 2eT instead.
  const double cap = (std::isinf(p.d_min) ? c.zeta : p.d_min) / (2.0 * e);
  double lo = 1e-15;
  if (!(cap > lo) || !feasible(lo)) return 0.0;
  double hi = cap;
  if (feasible(hi)) return hi;
  while (hi / lo > 1.0 + 1e-9) {
    const double mid = std::sqrt(lo * hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

double gershgorin_lower_bound(const RestrictedOperator& m) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < m.matrix.rows(); ++k) {
    const double off = m.matrix.row(k).cwiseAbs().sum() - std::abs(m.matrix(k, k));
    best = std::min(best, m.matrix(k, k) - off);
  }
  return best;
}

}  // namespace heatdecon

#pragma once

#include "heatdecon/graph.hpp"
#include "heatdecon/heat.hpp"

#include <optional>
#include <span>
#include <utility>

namespace heatdecon {

// Graph-level quantities the sufficient conditions are written in.
struct GraphConstants {
  Eigen::Index n = 0;
  double op_norm = 0.0;  // ||Delta||
  double gap = 0.0;      // smallest nonzero eigenvalue of -Delta
  double zeta = 0.0;     // smallest distance between distinct vertices
};

GraphConstants graph_constants(const SpectralData& s, const CompatibleMetric& m);

struct SupportProfile {
  Eigen::Index j = 1;
  double d_min = kInfiniteSeparation;  // +inf when j == 1
};

SupportProfile support_profile(const CompatibleMetric& m,
                               std::span<const Vertex> support);

struct DiagonalBounds {
  double lower = 1.0;
  double upper = 1.0;
};

// 1/N + e^{-t ||Delta||}(N-1)/N <= K(t,x,x) <= 1/N + e^{-t lambda}(N-1)/N.
DiagonalBounds diagonal_bounds(const GraphConstants& c, double t);

struct FolzValue {
  double value = 0.0;
  bool vacuous = false;  // value >= 1, no information about the kernel
};

// (2 e t / dist)^{dist / 2}.
FolzValue folz_bound(double dist, double t);

struct InvertibilityCheck {
  bool ok = false;
  double margin = 0.0;  // rhs - lhs
};

// (J-1)(2eT/D)^{D/2} < 1/N + e^{-T||Delta||}(N-1)/N, strictly.
InvertibilityCheck check_invertibility(const GraphConstants& c,
                                       const SupportProfile& p, double t);

// Reciprocal of the invertibility margin. Bounds both ||M^{-t}||_2 and
// ||M^{-t}||_inf. Throws ConditionViolated when check_invertibility fails.
double inverse_norm_bound(const GraphConstants& c, const SupportProfile& p,
                          double t);

struct FeasibilityReport {
  double t = 0.0;
  double cond1_lhs = 0.0;
  double cond1_rhs = 0.0;
  double cond2_lhs = 0.0;
  double cond2_rhs = 0.0;
  bool cond1_ok = false;
  bool cond2_ok = false;
  std::optional<double> inverse_norm_bound;  // present iff cond1_ok
};

// Evaluates both certificate-existence conditions at T = t.
FeasibilityReport check_certificate_condition(const GraphConstants& c,
                                              const SupportProfile& p, double t);

// Largest T in (0, D/(2e)] at which both conditions hold, by bisection to a
// relative width of 1e-9. Returns 0 when nothing above 1e-15 is feasible.
double max_admissible_time(const GraphConstants& c, const SupportProfile& p);

// min_k (M_kk - sum_{j != k} |M_kj|) on the actual restricted operator. A
// diagnostic only: feasibility decisions use the closed-form bound.
double gershgorin_lower_bound(const RestrictedOperator& m);

}  // namespace heatdecon

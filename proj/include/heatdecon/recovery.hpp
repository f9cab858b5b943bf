#pragma once

#include "heatdecon/certificate.hpp"
#include "heatdecon/heat.hpp"

#include <optional>
#include <string_view>

namespace heatdecon {

// f observed at time t, with ||f - K(t) g|| <= eps.
struct Observation {
  Eigen::VectorXd f;
  double t = 0.0;
  double eps = 0.0;
};

enum class SolveStatus { kOptimal, kMaxIter, kInfeasible };

std::string_view to_string(SolveStatus s);

struct SolverOptions {
  double gap_tol = 1e-8;
  int max_iter = 50000;
  double rho = 1.0;          // augmented Lagrangian weight
  double relaxation = 1.8;   // over-relaxation factor
  int check_every = 10;      // iterations between duality-gap evaluations
};

struct RecoveryResult {
  Eigen::VectorXd g_hat;
  double l1_norm = 0.0;
  double residual = 0.0;  // ||K(t) g_hat - f||_2
  double duality_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::kMaxIter;
};

// min ||g||_1 subject to ||K(t) g - f||_2 <= eps, by over-relaxed ADMM on the
// splitting g = z with the constraint handled by exact projection in the
// eigenbasis of K(t). The returned g_hat is always the projected iterate, so
// it is feasible regardless of convergence.
RecoveryResult solve(const HeatOperator& h_op, const Observation& obs,
                     const SolverOptions& opts = {});

// Exhaustive search over all supports of size <= max_support and every sign
// pattern on them; each orthant subproblem is a linear objective over an
// ellipsoid and is solved in closed form. `converged` reports whether the best
// candidate passed a global KKT check, which fails when the true minimizer
// needs more than max_support entries. Limited to N <= 14 and at most
// kBruteForceBudget orthants.
inline constexpr double kBruteForceBudget = 1e6;

RecoveryResult brute_force(const HeatOperator& h_op, const Observation& obs,
                           int max_support = 3);

// delta = max(||M^{-t}||_2, ||M^{-t}||_inf) - 1.
double delta_from_inverse(const RestrictedInverse& inv);

struct ErrorBudget {
  Eigen::Index j = 1;
  double delta = 0.0;
  double eps = 0.0;
  double bound_l1 = 0.0;  // 4 (1 + delta) sqrt(J) eps
};

ErrorBudget error_budget(Eigen::Index j, double delta, double eps);

struct RecoveryAudit {
  double err_l1 = 0.0;
  double err_l2 = 0.0;
  double off_support_l1 = 0.0;  // ||g_hat restricted to V \ S||_1
  double split_rhs = 0.0;     // 2 sqrt(J)(1+delta) eps + off_support_l1
  bool split_ok = false;
  // Present only when a certificate is supplied.
  std::optional<double> eta_dot_h;  // <eta_S, h_S>, eta = g - g_hat
  std::optional<bool> descent_ok;   // ||g_hat||_1 >= ||g||_1 - <eta_S,h_S> + off
  std::optional<bool> off_support_ok;   // off_support_l1 <= |<eta_S, h_S>|
  bool l2_le_l1 = false;
  bool bound_held = false;  // err_l1 <= bound_l1 + slack
};

inline constexpr double kAuditSlack = 1e-6;

RecoveryAudit audit_recovery(const Eigen::VectorXd& g_true,
                             const RecoveryResult& result,
                             const ErrorBudget& budget,
                             const Certificate* cert = nullptr,
                             double slack = kAuditSlack);

}  // namespace heatdecon

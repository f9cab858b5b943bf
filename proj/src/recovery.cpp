#include "heatdecon/recovery.hpp"

#include "heatdecon/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace heatdecon {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kMaxIter: return "max_iter";
    case SolveStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

// Euclidean projection onto {z : ||K z - f||_2 <= eps}. In the eigenbasis of
// K = V diag(sigma) V^T the minimizer is
//   z_hat_i = (y_hat_i + mu sigma_i f_hat_i) / (1 + mu sigma_i^2)
// with mu >= 0 the root of ||r(mu)|| = eps, r_i = (sigma_i y_hat_i - f_hat_i) / (1 + mu sigma_i^2).
class ConstraintProjector {
 public:
  ConstraintProjector(const HeatOperator& h_op, const Eigen::VectorXd& f, double eps)
      : v_(h_op.spectrum().eigenvectors),
        sigma_(h_op.multipliers()),
        f_hat_(v_.transpose() * f),
        eps_(eps) {}

  Eigen::VectorXd operator()(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd y_hat = v_.transpose() * y;
    if (eps_ == 0.0) return v_ * f_hat_.cwiseQuotient(sigma_);
    const Eigen::VectorXd c = sigma_.cwiseProduct(y_hat) - f_hat_;
    if (c.norm() <= eps_) return y;
    const double mu = multiplier(c);
    const Eigen::ArrayXd denom = 1.0 + mu * sigma_.array().square();
    const Eigen::VectorXd z_hat =
        ((y_hat.array() + mu * sigma_.array() * f_hat_.array()) / denom).matrix();
    return v_ * z_hat;
  }

 private:
  double residual_norm(const Eigen::VectorXd& c, double mu) const {
    return (c.array() / (1.0 + mu * sigma_.array().square())).matrix().norm();
  }

  // Newton on psi(mu) = 1/||r(mu)|| - 1/eps, which is increasing, safeguarded
  // by a bracket [lo, hi] with psi(lo) < 0 <= psi(hi).
  double multiplier(const Eigen::VectorXd& c) const {
    const double c_norm = c.norm();
    double lo = 0.0;
    double hi = (c_norm / eps_ - 1.0) / sigma_.array().square().minCoeff();
    double mu = 0.0;
    for (int it = 0; it < 200; ++it) {
      const Eigen::ArrayXd denom = 1.0 + mu * sigma_.array().square();
      const Eigen::ArrayXd r = c.array() / denom;
      const double r_norm = r.matrix().norm();
      const double psi = 1.0 / r_norm - 1.0 / eps_;
      if (psi < 0.0) lo = mu; else hi = mu;
      if (std::abs(r_norm - eps_) <= 1e-15 * eps_ || hi - lo <= 1e-15 * hi) break;
      const double dpsi =
          (r.square() * sigma_.array().square() / denom).sum() / (r_norm * r_norm * r_norm);
      double next = mu - psi / dpsi;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      mu = next;
    }
    // Land on the feasible side.
    if (residual_norm(c, mu) > eps_) mu = hi;
    return mu;
  }

  const Eigen::MatrixXd& v_;
  const Eigen::VectorXd& sigma_;
  Eigen::VectorXd f_hat_;
  double eps_;
};

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& x, double tau) {
  return x.unaryExpr([tau](double v) {
    return v > tau ? v - tau : (v < -tau ? v + tau : 0.0);
  });
}

// Dual of min ||g||_1 s.t. ||K g - f|| <= eps is
//   max <f, y> - eps ||y||  s.t.  ||K y||_inf <= 1.
double dual_value(const Eigen::VectorXd& f, double eps, const Eigen::VectorXd& y) {
  return f.dot(y) - eps * y.norm();
}

// Best dual lower bound from two candidates: y = K^{-1} w from the ADMM
// multiplier w, and y along the residual f - K z of the feasible iterate.
double dual_lower_bound(const HeatOperator& h_op, const Eigen::VectorXd& f, double eps,
                        const Eigen::VectorXd& z, const Eigen::VectorXd& w) {
  double best = 0.0;
  const double w_max = w.cwiseAbs().maxCoeff();
  if (w_max > 0.0) {
    const Eigen::VectorXd y = apply_inverse(h_op, w / std::max(1.0, w_max));
    best = std::max(best, dual_value(f, eps, y));
  }
  if (eps > 0.0) {
    const Eigen::VectorXd r = f - h_op.kernel() * z;
    const double scale = (h_op.kernel() * r).cwiseAbs().maxCoeff();
    if (scale > 0.0) best = std::max(best, dual_value(f, eps, r / scale));
  }
  return best;
}

// Exact minimizer of s^T x over {x supported on P : ||K_P x - f|| <= eps}, the
// l1 problem restricted to one orthant of one support. Uses a QR factorization
// of K_P. Returns nothing when the restricted problem is infeasible or the
// minimizer leaves the orthant.
std::optional<Eigen::VectorXd> polish(const HeatOperator& h_op, const Eigen::VectorXd& f,
                                      double eps, const std::vector<Eigen::Index>& support,
                                      const Eigen::VectorXd& signs) {
  const Eigen::Index n = h_op.size();
  const auto p = static_cast<Eigen::Index>(support.size());
  if (p == 0 || p > n) return std::nullopt;
  Eigen::MatrixXd a(n, p);
  for (Eigen::Index i = 0; i < p; ++i) a.col(i) = h_op.kernel().col(support[static_cast<std::size_t>(i)]);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  if ((r.diagonal().cwiseAbs().array() < 1e-14).any()) return std::nullopt;
  const auto upper = r.triangularView<Eigen::Upper>();

  const Eigen::VectorXd qtf = qr.householderQ().transpose() * f;
  const Eigen::VectorXd x_ls = upper.solve(qtf.head(p));
  const double r_ls = qtf.tail(n - p).norm();
  if (r_ls > eps * (1.0 + 1e-12) + 1e-14 * f.norm()) return std::nullopt;

  // (A^T A)^{-1} s = R^{-1} R^{-T} s
  const Eigen::VectorXd gs = upper.solve(upper.transpose().solve(signs));
  const double slack = std::sqrt(std::max(0.0, eps * eps - r_ls * r_ls));
  const Eigen::VectorXd x_p = x_ls - slack * gs / std::sqrt(signs.dot(gs));
  for (Eigen::Index i = 0; i < p; ++i)
    if (signs[i] * x_p[i] < 0.0) return std::nullopt;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < p; ++i) x[support[static_cast<std::size_t>(i)]] = x_p[i];
  return x;
}

void check_observation(const HeatOperator& h_op, const Observation& obs) {
  if (obs.f.size() != h_op.size())
    throw Error(ErrorCode::kDimensionMismatch, "observation length " + std::to_string(obs.f.size()) +
                                                   " vs " + std::to_string(h_op.size()) + " vertices");
  if (!(obs.eps >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be nonnegative");
  if (!obs.f.allFinite()) throw Error(ErrorCode::kInvalidArgument, "observation is not finite");
}

}  // namespace

RecoveryResult solve(const HeatOperator& h_op, const Observation& obs,
                     const SolverOptions& opts) {
  check_observation(h_op, obs);
  if (!(opts.rho > 0.0) || opts.max_iter < 0 || opts.check_every < 1)
    throw Error(ErrorCode::kInvalidArgument, "invalid solver options");

  const Eigen::Index n = h_op.size();
  const ConstraintProjector project(h_op, obs.f, obs.eps);
  const double alpha = opts.relaxation;
  const double tau = 1.0 / opts.rho;

  Eigen::VectorXd z = project(Eigen::VectorXd::Zero(n));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);

  RecoveryResult result;
  Eigen::VectorXd best = z;
  const auto gap_of = [&](const Eigen::VectorXd& candidate) {
    const double dual = dual_lower_bound(h_op, obs.f, obs.eps, candidate, -opts.rho * u);
    return std::max(0.0, candidate.lpNorm<1>() - dual);
  };
  // Gap of the feasible iterate, then of the exact minimizer on the support
  // and signs of the sparse iterate x. Either one certified by the dual bound
  // ends the run.
  const auto evaluate = [&](int iteration, const Eigen::VectorXd* x) {
    result.iterations = iteration;
    result.duality_gap = gap_of(z);
    best = z;
    if (result.duality_gap <= opts.gap_tol || x == nullptr || obs.eps == 0.0) {
      return result.duality_gap <= opts.gap_tol;
    }
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < n; ++i)
      if ((*x)[i] != 0.0) support.push_back(i);
    Eigen::VectorXd signs(static_cast<Eigen::Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i)
      signs[static_cast<Eigen::Index>(i)] = (*x)[support[i]] > 0.0 ? 1.0 : -1.0;
    if (auto polished = polish(h_op, obs.f, obs.eps, support, signs)) {
      const double gap = gap_of(*polished);
      if (gap <= opts.gap_tol) {
        result.duality_gap = gap;
        best = *polished;
        return true;
      }
    }
    return false;
  };

  bool done = evaluate(0, nullptr);
  for (int k = 1; !done && k <= opts.max_iter; ++k) {
    const Eigen::VectorXd x = soft_threshold(z - u, tau);
    const Eigen::VectorXd x_relaxed = alpha * x + (1.0 - alpha) * z;
    z = project(x_relaxed + u);
    u += x_relaxed - z;
    if (k % opts.check_every == 0 || k == opts.max_iter) done = evaluate(k, &x);
  }

  const Eigen::VectorXd& z_final = best;
  result.g_hat = z_final;
  result.l1_norm = z_final.lpNorm<1>();
  result.residual = (h_op.kernel() * z_final - obs.f).norm();
  result.converged = done;
  result.status = done ? SolveStatus::kOptimal : SolveStatus::kMaxIter;
  return result;
}

RecoveryResult brute_force(const HeatOperator& h_op, const Observation& obs, int max_support) {
  check_observation(h_op, obs);
  const Eigen::Index n = h_op.size();
  if (n > 14 || max_support < 0 || max_support > n)
    throw Error(ErrorCode::kTooLarge, "brute force needs N <= 14 and 0 <= max_support <= N");
  // sum_k C(n,k) 2^k orthant subproblems
  double work = 0.0;
  double choose = 1.0;
  for (int k = 0; k <= max_support; ++k) {
    work += choose * std::ldexp(1.0, k);
    choose = choose * static_cast<double>(n - k) / (k + 1);
  }
  if (work > kBruteForceBudget)
    throw Error(ErrorCode::kTooLarge, "brute force would visit " + std::to_string(work) + " orthants");

  const Eigen::MatrixXd& k = h_op.kernel();
  const Eigen::VectorXd& f = obs.f;
  const double eps = obs.eps;
  const double feas_tol = 1e-10 * std::max(1.0, f.norm());

  RecoveryResult best;
  best.g_hat = Eigen::VectorXd::Zero(n);
  best.status = SolveStatus::kInfeasible;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> best_support;
  std::vector<int> best_signs;
  int evaluated = 1;

  if (f.norm() <= eps) {
    best_value = 0.0;
    best.status = SolveStatus::kOptimal;
  }

  std::vector<Eigen::Index> support;
  // Visit every subset of size p in lexicographic order.
  const auto visit = [&](auto&& self, Eigen::Index start, int remaining) -> void {
    if (remaining == 0) {
      const auto p = static_cast<Eigen::Index>(support.size());
      Eigen::MatrixXd a(n, p);
      for (Eigen::Index i = 0; i < p; ++i) a.col(i) = k.col(support[static_cast<std::size_t>(i)]);
      const Eigen::MatrixXd gram = a.transpose() * a;
      Eigen::LLT<Eigen::MatrixXd> llt(gram);
      if (llt.info() != Eigen::Success) return;
      const Eigen::VectorXd x_ls = llt.solve(a.transpose() * f);
      const double r_ls = (a * x_ls - f).norm();
      if (r_ls > eps + feas_tol) return;
      // Minimizing s^T x over {||A x - f|| <= eps} moves from the least-squares
      // point along -G^{-1}s until the residual reaches eps.
      const double slack = std::sqrt(std::max(0.0, eps * eps - r_ls * r_ls));
      for (int mask = 0; mask < (1 << p); ++mask) {
        ++evaluated;
        Eigen::VectorXd s(p);
        for (Eigen::Index i = 0; i < p; ++i) s[i] = (mask >> i) & 1 ? -1.0 : 1.0;
        const Eigen::VectorXd gs = llt.solve(s);
        const Eigen::VectorXd x = x_ls - slack * gs / std::sqrt(s.dot(gs));
        bool consistent = true;
        for (Eigen::Index i = 0; i < p; ++i) consistent &= s[i] * x[i] >= -1e-12;
        if (!consistent) continue;
        const double value = x.lpNorm<1>();
        if (value < best_value) {
          best_value = value;
          best.status = SolveStatus::kOptimal;
          best.g_hat.setZero();
          best_support = support;
          best_signs.assign(static_cast<std::size_t>(p), 0);
          for (Eigen::Index i = 0; i < p; ++i) {
            best.g_hat[support[static_cast<std::size_t>(i)]] = x[i];
            best_signs[static_cast<std::size_t>(i)] = static_cast<int>(s[i]);
          }
        }
      }
      return;
    }
    for (Eigen::Index v = start; v <= n - remaining; ++v) {
      support.push_back(v);
      self(self, v + 1, remaining - 1);
      support.pop_back();
    }
  };
  if (best_value > 0.0)
    for (int p = 1; p <= max_support && p <= n; ++p) visit(visit, 0, p);

  best.iterations = evaluated;
  if (best.status == SolveStatus::kInfeasible) {
    best.residual = f.norm();
    return best;
  }
  best.l1_norm = best.g_hat.lpNorm<1>();
  const Eigen::VectorXd r = f - k * best.g_hat;
  best.residual = r.norm();

  // Global KKT check: some w = mu K r with mu >= 0 must equal the signs on the
  // support and stay within [-1, 1] everywhere.
  if (best_value == 0.0 || eps == 0.0) {
    best.converged = true;
  } else {
    const Eigen::VectorXd q = k * r;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < best_support.size(); ++i) {
      num += best_signs[i] * q[best_support[i]];
      den += q[best_support[i]] * q[best_support[i]];
    }
    const double mu = den > 0.0 ? num / den : 0.0;
    bool ok = mu > 0.0 && (mu * q).cwiseAbs().maxCoeff() <= 1.0 + 1e-9;
    for (std::size_t i = 0; i < best_support.size(); ++i)
      ok &= std::abs(mu * q[best_support[i]] - best_signs[i]) <= 1e-6;
    best.converged = ok;
    const double scale = q.cwiseAbs().maxCoeff();
    if (scale > 0.0) best.duality_gap = std::max(0.0, best.l1_norm - dual_value(f, eps, r / scale));
  }
  return best;
}

double delta_from_inverse(const RestrictedInverse& inv) {
  return std::max(inv.norm_l2, inv.norm_linf) - 1.0;
}

ErrorBudget error_budget(Eigen::Index j, double delta, double eps) {
  if (j < 1) throw Error(ErrorCode::kInvalidArgument, "support size must be at least 1");
  if (!(eps >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be nonnegative");
  return {j, delta, eps, 4.0 * (1.0 + delta) * std::sqrt(static_cast<double>(j)) * eps};
}

RecoveryAudit audit_recovery(const Eigen::VectorXd& g_true, const RecoveryResult& result,
                             const ErrorBudget& budget, const Certificate* cert, double slack) {
  if (g_true.size() != result.g_hat.size())
    throw Error(ErrorCode::kDimensionMismatch, "true and recovered signals differ in length");

  RecoveryAudit a;
  const Eigen::VectorXd eta = g_true - result.g_hat;
  a.err_l1 = eta.lpNorm<1>();
  a.err_l2 = eta.norm();
  for (Eigen::Index x = 0; x < g_true.size(); ++x)
    if (g_true[x] == 0.0) a.off_support_l1 += std::abs(result.g_hat[x]);

  const double sqrt_j = std::sqrt(static_cast<double>(budget.j));
  a.split_rhs = 2.0 * sqrt_j * (1.0 + budget.delta) * budget.eps + a.off_support_l1;
  a.split_ok = a.err_l1 <= a.split_rhs + slack;

  if (cert != nullptr) {
    double inner = 0.0;
    for (auto v : cert->support) inner += eta[v] * cert->values[v];
    a.eta_dot_h = inner;
    a.descent_ok = result.g_hat.lpNorm<1>() >=
                   g_true.lpNorm<1>() - inner + a.off_support_l1 - slack;
    a.off_support_ok = a.off_support_l1 <= std::abs(inner) + slack;
  }

  a.l2_le_l1 = a.err_l2 <= a.err_l1 + slack;
  a.bound_held = a.err_l1 <= budget.bound_l1 + slack;
  return a;
}

}  // namespace heatdecon

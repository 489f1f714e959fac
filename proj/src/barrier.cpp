// SPDX-License-Identifier: Apache-2.0
#include "risfp/barrier.hpp"

#include <cmath>
#include <limits>

namespace risfp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Evaluation {
  double value = -kInf;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

// phi_t(z) = t f(z) + sum log c_i(z) + sum log(b - A z). Returns false
// outside the domain.
bool evaluate(const BarrierProblem& p, double t, const Eigen::VectorXd& z, bool derivatives,
              Evaluation& out, double* objective = nullptr) {
  const int n = p.dim;
  double fval = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  if (derivatives) {
    g = Eigen::VectorXd::Zero(n);
    h = Eigen::MatrixXd::Zero(n, n);
  }
  if (!p.objective(z, fval, derivatives ? &g : nullptr, derivatives ? &h : nullptr)) return false;
  if (!std::isfinite(fval)) return false;
  if (objective) *objective = fval;
  double phi = t * fval;
  if (derivatives) {
    out.grad = t * g;
    out.hess = t * h;
  }
  Eigen::VectorXd cg;
  Eigen::MatrixXd ch;
  for (const auto& c : p.constraints) {
    double cv = 0.0;
    if (derivatives) {
      cg = Eigen::VectorXd::Zero(n);
      ch = Eigen::MatrixXd::Zero(n, n);
    }
    if (!c(z, cv, derivatives ? &cg : nullptr, derivatives ? &ch : nullptr)) return false;
    if (!(cv > 0.0)) return false;
    phi += std::log(cv);
    if (derivatives) {
      out.grad += cg / cv;
      out.hess += ch / cv;
      out.hess.noalias() -= (cg * cg.transpose()) / (cv * cv);
    }
  }
  if (p.lin_b.size() > 0) {
    const Eigen::VectorXd slack = p.lin_b - p.lin_a * z;
    if ((slack.array() <= 0.0).any()) return false;
    phi += slack.array().log().sum();
    if (derivatives) {
      const Eigen::VectorXd inv = slack.cwiseInverse();
      out.grad -= p.lin_a.transpose() * inv;
      out.hess.noalias() -= p.lin_a.transpose() * inv.cwiseAbs2().asDiagonal() * p.lin_a;
    }
  }
  out.value = phi;
  return true;
}

}  // namespace

double min_slack(const BarrierProblem& problem, const Eigen::VectorXd& z) {
  double lo = kInf;
  for (const auto& c : problem.constraints) {
    double v = 0.0;
    if (!c(z, v, nullptr, nullptr) || !std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
    lo = std::min(lo, v);
  }
  if (problem.lin_b.size() > 0) lo = std::min(lo, (problem.lin_b - problem.lin_a * z).minCoeff());
  return lo;
}

bool strictly_feasible(const BarrierProblem& problem, const Eigen::VectorXd& z) {
  const double s = min_slack(problem, z);
  if (std::isnan(s) || !(s > 0.0)) return false;
  double f = 0.0;
  return problem.objective(z, f, nullptr, nullptr) && std::isfinite(f);
}

BarrierResult barrier_maximize(const BarrierProblem& problem, const Eigen::VectorXd& start,
                               const BarrierOptions& options) {
  BarrierResult result;
  result.z = start;
  const int m = problem.constraint_count();
  double t = options.t0;
  Evaluation cur;
  Evaluation trial;
  double fval = 0.0;
  if (!evaluate(problem, t, result.z, false, cur, &fval))
    throw std::invalid_argument("barrier_maximize: start point is not strictly feasible");
  result.objective = fval;

  while (true) {
    // Centering by damped Newton.
    for (int inner = 0; inner < 200 && result.newton_steps < options.max_newton; ++inner) {
      evaluate(problem, t, result.z, true, cur, &fval);
      Eigen::MatrixXd neg_h = -cur.hess;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_h);
      Eigen::VectorXd step = ldlt.solve(cur.grad);
      double decrement = cur.grad.dot(step);
      if (ldlt.info() != Eigen::Success || !step.allFinite() || !(decrement >= 0.0)) {
        const double shift = 1e-10 * std::max(1.0, neg_h.diagonal().cwiseAbs().maxCoeff());
        neg_h.diagonal().array() += shift;
        step = neg_h.llt().solve(cur.grad);
        decrement = cur.grad.dot(step);
        if (!step.allFinite() || !(decrement >= 0.0)) {
          step = cur.grad;
          decrement = cur.grad.squaredNorm();
        }
      }
      ++result.newton_steps;
      if (decrement / 2.0 <= 1e-11) break;
      double s = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, s *= 0.5) {
        const Eigen::VectorXd cand = result.z + s * step;
        if (evaluate(problem, t, cand, false, trial) && trial.value >= cur.value + 0.25 * s * decrement) {
          result.z = cand;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    evaluate(problem, t, result.z, false, cur, &fval);
    result.objective = fval;
    result.gap = m / t;
    if (options.stop_early && options.stop_early(result.z, result.objective)) {
      result.converged = true;
      break;
    }
    if (result.gap <= options.gap_tol) {
      result.converged = true;
      break;
    }
    if (result.newton_steps >= options.max_newton) break;
    t *= options.mu;
  }
  return result;
}

std::optional<Eigen::VectorXd> barrier_find_interior(const BarrierProblem& problem,
                                                     const Eigen::VectorXd& start,
                                                     const BarrierOptions& options) {
  if (strictly_feasible(problem, start)) return start;
  const int n = problem.dim;

  BarrierProblem phase;
  phase.dim = n + 1;
  phase.objective = [](const Eigen::VectorXd& zs, double& v, Eigen::VectorXd* g, Eigen::MatrixXd*) {
    v = zs(zs.size() - 1);
    if (g) (*g)(zs.size() - 1) = 1.0;
    return true;
  };

  double worst = kInf;
  for (const auto& c : problem.constraints) {
    double v = 0.0;
    if (!c(start, v, nullptr, nullptr) || !std::isfinite(v))
      throw std::invalid_argument("barrier_find_interior: constraint undefined at start");
    const bool hard = v > 0.0;
    if (!hard) worst = std::min(worst, v);
    phase.constraints.push_back([c, hard, n](const Eigen::VectorXd& zs, double& val,
                                             Eigen::VectorXd* g, Eigen::MatrixXd* h) {
      const Eigen::VectorXd z = zs.head(n);
      Eigen::VectorXd cg;
      Eigen::MatrixXd ch;
      if (g) cg = Eigen::VectorXd::Zero(n);
      if (h) ch = Eigen::MatrixXd::Zero(n, n);
      if (!c(z, val, g ? &cg : nullptr, h ? &ch : nullptr)) return false;
      if (!hard) val -= zs(n);
      if (g) {
        g->head(n) = cg;
        (*g)(n) = hard ? 0.0 : -1.0;
      }
      if (h) h->topLeftCorner(n, n) = ch;
      return true;
    });
  }
  // The objective's own domain is an implicit constraint of the target
  // problem; a separate domain constraint should be supplied when needed.
  const Eigen::Index lin = problem.lin_b.size();
  if (lin > 0) {
    const Eigen::VectorXd slack = problem.lin_b - problem.lin_a * start;
    phase.lin_a = Eigen::MatrixXd::Zero(lin, n + 1);
    phase.lin_a.leftCols(n) = problem.lin_a;
    phase.lin_b = problem.lin_b;
    for (Eigen::Index i = 0; i < lin; ++i) {
      if (!(slack(i) > 0.0)) {
        phase.lin_a(i, n) = 1.0;  // a^T z + s <= b
        worst = std::min(worst, slack(i));
      }
    }
  }
  if (!std::isfinite(worst)) worst = 0.0;
  // Cap s so the phase-I problem stays bounded.
  Eigen::VectorXd zs(n + 1);
  zs << start, worst - 1.0;
  const double cap = 1.0;
  phase.lin_a.conservativeResize(lin + 1, n + 1);
  phase.lin_b.conservativeResize(lin + 1);
  phase.lin_a.row(lin).setZero();
  phase.lin_a(lin, n) = 1.0;
  phase.lin_b(lin) = cap;

  BarrierOptions opts = options;
  opts.stop_early = [n](const Eigen::VectorXd& z, double) { return z(n) > 0.0; };
  const BarrierResult res = barrier_maximize(phase, zs, opts);
  Eigen::VectorXd z = res.z.head(n);
  if (res.z(n) > 0.0 && strictly_feasible(problem, z)) return z;
  return std::nullopt;
}

}  // namespace risfp

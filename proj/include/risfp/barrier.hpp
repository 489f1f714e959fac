// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dense log-barrier interior-point method for small smooth concave programs:
//   maximize f(z)  s.t.  c_i(z) >= 0 (concave),  A z <= b.
// Used by the beamformer and power-allocation solvers (dimension <= 2M).

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace risfp {

/// Evaluates a concave function at z. Fills grad / hess when non-null.
/// Returns false when z lies outside the function's domain.
using SmoothFn =
    std::function<bool(const Eigen::VectorXd& z, double& value, Eigen::VectorXd* grad, Eigen::MatrixXd* hess)>;

struct BarrierProblem {
  int dim = 0;
  SmoothFn objective;
  std::vector<SmoothFn> constraints;
  Eigen::MatrixXd lin_a;
  Eigen::VectorXd lin_b;

  int constraint_count() const { return static_cast<int>(constraints.size() + lin_b.size()); }
};

struct BarrierOptions {
  double gap_tol = 1e-8;   // stop when (#constraints)/t <= gap_tol
  int max_newton = 5000;
  double t0 = 1.0;
  double mu = 10.0;
  /// Checked after every completed centering step.
  std::function<bool(const Eigen::VectorXd& z, double objective)> stop_early;
};

struct BarrierResult {
  Eigen::VectorXd z;
  double objective = 0.0;
  double gap = 0.0;
  int newton_steps = 0;
  bool converged = false;
};

/// Smallest constraint slack at z (+inf without constraints); NaN if a
/// constraint is undefined there.
double min_slack(const BarrierProblem& problem, const Eigen::VectorXd& z);

bool strictly_feasible(const BarrierProblem& problem, const Eigen::VectorXd& z);

/// Requires strictly_feasible(problem, start) and the objective defined there.
BarrierResult barrier_maximize(const BarrierProblem& problem, const Eigen::VectorXd& start,
                               const BarrierOptions& options);

/// Phase I. Constraints that hold strictly at `start` stay hard; the others
/// are relaxed to c_i(z) >= s and s is driven above zero. Returns a centred
/// strictly feasible point or nullopt when max s <= 0.
std::optional<Eigen::VectorXd> barrier_find_interior(const BarrierProblem& problem,
                                                     const Eigen::VectorXd& start,
                                                     const BarrierOptions& options);

}  // namespace risfp

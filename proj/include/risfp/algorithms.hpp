// SPDX-License-Identifier: Apache-2.0
#pragma once

// Alternating-optimisation drivers for sum-rate and energy-efficiency
// maximisation, with initialisation, rank-1 recovery and the DPS split.

#include "risfp/convex_solver.hpp"
#include "risfp/fp_subproblems.hpp"
#include "risfp/types.hpp"

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace risfp {

struct AoSettings {
  double outer_tol = 1e-5;  // relative objective change
  int max_outer = 100;
  double inner_tol = 1e-6;
  int max_inner = 50;
  int warmup_iters = 5;     // outer iterations without min-rate cuts
  int randomizations = 100;
  SolverSettings solver;
  PowerAuxForm aux_form = PowerAuxForm::consistent;

  void validate() const;
};

struct AoTrace {
  std::vector<double> objective;  // true objective of the iterate after each outer pass
  std::vector<double> best;       // best feasible objective so far (NaN before the first)
  std::vector<bool> accepted;     // pass produced a new best feasible design
  std::vector<std::string> statuses;  // "ris/beam/pa" solver statuses per pass
  int iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
  double wall_ms = 0.0;

  /// Objective values of the accepted passes, in order.
  std::vector<double> accepted_objectives() const;
};

/// f: dominant right singular vector of H. psi: co-phases the cascade of the
/// user with the largest aligned gain. p: P_s / K each. order: decode_order.
Design initialize_design(const ChannelSet& chs, const SystemConfig& cfg, std::mt19937_64& rng);

struct Rank1Result {
  Eigen::VectorXcd phases;
  double sum_rate = 0.0;
  bool feasible = false;  // min-rate constraints met
};

/// Principal eigenvector plus `samples` draws v ~ CN(0, Psi); each becomes
/// psi_i = exp(j arg(v_i / v_{N+1})) and is scored by the true sum rate at
/// (f, p, order). Feasible candidates win over infeasible ones.
Rank1Result rank1_extract(const Eigen::MatrixXcd& lifted, const ChannelSet& chs, const Design& at,
                          const SystemConfig& cfg, int samples, std::mt19937_64& rng);

std::pair<Design, AoTrace> algorithm1_sum_rate(const ChannelSet& chs, const SystemConfig& cfg,
                                               const AoSettings& settings, std::mt19937_64& rng);

std::pair<Design, AoTrace> algorithm2_ee(const ChannelSet& chs, const SystemConfig& cfg,
                                         const AoSettings& settings, std::mt19937_64& rng);

/// f_i = exp(j theta1_i) + exp(j theta2_i). DomainError if |f_i| > 2.
std::pair<Eigen::VectorXd, Eigen::VectorXd> dps_decompose(const Eigen::VectorXcd& beam);

}  // namespace risfp

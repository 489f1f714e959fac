// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "risfp/types.hpp"

#include <string>
#include <vector>

namespace risfp {

enum class Architecture { analog_ris, fully_digital };

struct Violation {
  std::string constraint;  // "unit modulus", "beam norm", "dps bound", "power budget",
                           // "nonnegative power", "min rate"
  int index = -1;          // element / user index, -1 for global constraints
  double magnitude = 0.0;  // amount by which the constraint is breached
};

struct RateReport {
  Eigen::VectorXd gamma;
  Eigen::VectorXd rate;
  double sum_rate = 0.0;
  double ee = 0.0;
  double total_power = 0.0;
  bool feasible = false;
  std::vector<Violation> violations;
};

/// Core SINR evaluation from squared effective gains |g_k f|^2 and residual
/// coefficients r_k, so callers that already hold the gains (brute-force
/// search, rank-1 candidate scoring) share one formula with sinr().
Eigen::VectorXd sinr_from_gains(const Eigen::VectorXd& gain2, const Eigen::VectorXd& residual,
                                const Eigen::VectorXd& power, const std::vector<int>& order,
                                double noise_power);

Eigen::VectorXd sinr(const Design& design, const ChannelSet& chs, const SystemConfig& cfg);

double sum_rate(const Eigen::VectorXd& gamma);
double sum_rate(const Design& design, const ChannelSet& chs, const SystemConfig& cfg);

/// P'_BS + P_RF + N P_RIS (analog) or P'_BS + M P_RF (fully digital).
double circuit_power(const SystemConfig& cfg, Architecture arch);

double energy_efficiency(const Design& design, const ChannelSet& chs, const SystemConfig& cfg);

/// Users sorted by |g_k f| ascending; ties keep index order.
std::vector<int> decode_order(const ChannelSet& chs, const Eigen::VectorXcd& psi,
                              const Eigen::VectorXcd& beam);

std::vector<Violation> check_feasibility(const Design& design, const ChannelSet& chs,
                                         const SystemConfig& cfg, double tol = 1e-6);

/// Sum of min-rate shortfalls max(0, eta_k - gamma_k).
double min_rate_shortfall(const Eigen::VectorXd& gamma, const SystemConfig& cfg);

RateReport rate_report(const Design& design, const ChannelSet& chs, const SystemConfig& cfg,
                       double tol = 1e-6);

}  // namespace risfp

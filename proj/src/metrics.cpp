// SPDX-License-Identifier: Apache-2.0
#include "risfp/metrics.hpp"

#include "risfp/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace risfp {

Eigen::VectorXd sinr_from_gains(const Eigen::VectorXd& gain2, const Eigen::VectorXd& residual,
                                const Eigen::VectorXd& power, const std::vector<int>& order,
                                double noise_power) {
  const Eigen::VectorXd after = power_after(power, order);
  const double total = power.sum();
  Eigen::VectorXd gamma(power.size());
  for (Eigen::Index k = 0; k < power.size(); ++k) {
    const double signal = gain2(k) * power(k);
    const double den = noise_power + gain2(k) * after(k) + residual(k) * total;
    gamma(k) = signal == 0.0 ? 0.0 : signal / den;
  }
  return gamma;
}

Eigen::VectorXd sinr(const Design& design, const ChannelSet& chs, const SystemConfig& cfg) {
  const int users = chs.users();
  Eigen::VectorXd gain2(users);
  for (int k = 0; k < users; ++k)
    gain2(k) = std::norm(effective_gain(chs, design.phases, design.beam, k));
  return sinr_from_gains(gain2, residual_coeff(chs, design.beam, cfg), design.power, design.order,
                         cfg.noise_power);
}

double sum_rate(const Eigen::VectorXd& gamma) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < gamma.size(); ++k) total += std::log2(1.0 + gamma(k));
  return total;
}

double sum_rate(const Design& design, const ChannelSet& chs, const SystemConfig& cfg) {
  return sum_rate(sinr(design, chs, cfg));
}

double circuit_power(const SystemConfig& cfg, Architecture arch) {
  switch (arch) {
    case Architecture::analog_ris:
      return cfg.bs_residual_power + cfg.rf_chain_power +
             static_cast<double>(cfg.ris_elements()) * cfg.ris_element_power;
    case Architecture::fully_digital:
      return cfg.bs_residual_power + static_cast<double>(cfg.bs_antennas) * cfg.rf_chain_power;
  }
  return 0.0;
}

double energy_efficiency(const Design& design, const ChannelSet& chs, const SystemConfig& cfg) {
  return sum_rate(design, chs, cfg) /
         (design.power.sum() + circuit_power(cfg, Architecture::analog_ris));
}

std::vector<int> decode_order(const ChannelSet& chs, const Eigen::VectorXcd& psi,
                              const Eigen::VectorXcd& beam) {
  const int users = chs.users();
  std::vector<double> gain(static_cast<std::size_t>(users));
  for (int k = 0; k < users; ++k)
    gain[static_cast<std::size_t>(k)] = std::abs(effective_gain(chs, psi, beam, k));
  std::vector<int> order(static_cast<std::size_t>(users));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return gain[static_cast<std::size_t>(a)] < gain[static_cast<std::size_t>(b)];
  });
  return order;
}

double min_rate_shortfall(const Eigen::VectorXd& gamma, const SystemConfig& cfg) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < gamma.size(); ++k)
    total += std::max(0.0, cfg.min_sinr(static_cast<int>(k)) - gamma(k));
  return total;
}

namespace {

void check_structure(const Design& design, const SystemConfig& cfg, double tol,
                     std::vector<Violation>& out) {
  for (Eigen::Index i = 0; i < design.phases.size(); ++i) {
    const double gap = std::abs(std::abs(design.phases(i)) - 1.0);
    if (gap > tol) out.push_back({"unit modulus", static_cast<int>(i), gap});
  }
  const double norm_gap = std::abs(design.beam.squaredNorm() - 1.0);
  if (norm_gap > tol) out.push_back({"beam norm", -1, norm_gap});
  for (Eigen::Index i = 0; i < design.beam.size(); ++i) {
    const double excess = std::abs(design.beam(i)) - 2.0;
    if (excess > tol) out.push_back({"dps bound", static_cast<int>(i), excess});
  }
  const double over = design.power.sum() - cfg.power_budget;
  if (over > tol) out.push_back({"power budget", -1, over});
  for (Eigen::Index k = 0; k < design.power.size(); ++k)
    if (design.power(k) < -tol) out.push_back({"nonnegative power", static_cast<int>(k), -design.power(k)});
}

void check_min_rate(const Eigen::VectorXd& gamma, const SystemConfig& cfg, double tol,
                    std::vector<Violation>& out) {
  for (Eigen::Index k = 0; k < gamma.size(); ++k) {
    const double gap = cfg.min_sinr(static_cast<int>(k)) - gamma(k);
    if (gap > tol || !std::isfinite(gamma(k)))
      out.push_back({"min rate", static_cast<int>(k), std::isfinite(gap) ? gap : INFINITY});
  }
}

}  // namespace

std::vector<Violation> check_feasibility(const Design& design, const ChannelSet& chs,
                                         const SystemConfig& cfg, double tol) {
  std::vector<Violation> out;
  check_structure(design, cfg, tol, out);
  check_min_rate(sinr(design, chs, cfg), cfg, tol, out);
  return out;
}

RateReport rate_report(const Design& design, const ChannelSet& chs, const SystemConfig& cfg,
                       double tol) {
  RateReport report;
  report.gamma = sinr(design, chs, cfg);
  report.rate = report.gamma.unaryExpr([](double g) { return std::log2(1.0 + g); });
  report.sum_rate = report.rate.sum();
  report.total_power = design.power.sum() + circuit_power(cfg, Architecture::analog_ris);
  report.ee = report.sum_rate / report.total_power;
  check_structure(design, cfg, tol, report.violations);
  check_min_rate(report.gamma, cfg, tol, report.violations);
  report.feasible = report.violations.empty();
  return report;
}

}  // namespace risfp

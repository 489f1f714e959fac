// SPDX-License-Identifier: Apache-2.0
#include "risfp/types.hpp"

#include <cmath>

namespace risfp {

double SystemConfig::min_sinr(int k) const {
  return std::exp2(min_rate.at(static_cast<std::size_t>(k))) - 1.0;
}

Eigen::VectorXd SystemConfig::min_sinr() const {
  Eigen::VectorXd eta(users);
  for (int k = 0; k < users; ++k) eta(k) = min_sinr(k);
  return eta;
}

void SystemConfig::validate() const {
  if (bs_antennas < 1) throw std::invalid_argument("bs_antennas must be >= 1");
  if (ris_horizontal < 1 || ris_vertical < 1)
    throw std::invalid_argument("RIS grid dimensions must be >= 1");
  if (users < 1) throw std::invalid_argument("users must be >= 1");
  if (bs_ris_paths < 1 || ris_user_paths < 1) throw std::invalid_argument("path counts must be >= 1");
  if (!(noise_power > 0.0)) throw std::invalid_argument("noise_power must be > 0");
  if (!(error_variance >= 0.0)) throw std::invalid_argument("error_variance must be >= 0");
  if (!(power_budget > 0.0)) throw std::invalid_argument("power_budget must be > 0");
  if (static_cast<int>(min_rate.size()) != users)
    throw std::invalid_argument("min_rate must have one entry per user");
  for (double r : min_rate)
    if (!(r >= 0.0)) throw std::invalid_argument("min_rate entries must be >= 0");
  if (bs_residual_power < 0.0 || rf_chain_power < 0.0 || ris_element_power < 0.0)
    throw std::invalid_argument("circuit power constants must be >= 0");
}

Eigen::VectorXd power_after(const Eigen::VectorXd& power, const std::vector<int>& order) {
  Eigen::VectorXd after = Eigen::VectorXd::Zero(power.size());
  double tail = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    after(*it) = tail;
    tail += power(*it);
  }
  return after;
}

}  // namespace risfp

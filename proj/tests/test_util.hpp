// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "risfp/channel.hpp"
#include "risfp/metrics.hpp"
#include "risfp/types.hpp"

#include <random>

namespace risfp::fixture {

inline SystemConfig small_config(int m, int nh, int nv, int k, double err = 0.0, double rth = 0.3) {
  SystemConfig c;
  c.bs_antennas = m;
  c.ris_horizontal = nh;
  c.ris_vertical = nv;
  c.users = k;
  c.error_variance = err;
  c.min_rate.assign(static_cast<std::size_t>(k), rth);
  c.power_budget = 10.0;
  return c;
}

inline Eigen::VectorXcd random_phases(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.14159265358979, 3.14159265358979);
  Eigen::VectorXcd p(n);
  for (int i = 0; i < n; ++i) p(i) = std::polar(1.0, u(rng));
  return p;
}

inline Eigen::VectorXcd random_unit(int m, std::mt19937_64& rng) {
  Eigen::VectorXcd f(m);
  for (int i = 0; i < m; ++i) f(i) = complex_normal(rng);
  return f / f.norm();
}

/// Random structurally feasible design: unit beam, unit-modulus phases and a
/// random split of the budget, decoded in ascending gain order.
inline Design random_design(const ChannelSet& chs, const SystemConfig& cfg, std::mt19937_64& rng) {
  Design d;
  d.beam = random_unit(chs.antennas(), rng);
  d.phases = random_phases(chs.elements(), rng);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  d.power.resize(chs.users());
  for (int k = 0; k < chs.users(); ++k) d.power(k) = u(rng);
  d.power *= cfg.power_budget / d.power.sum();
  d.order = decode_order(chs, d.phases, d.beam);
  return d;
}

}  // namespace risfp::fixture

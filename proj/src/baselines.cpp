// SPDX-License-Identifier: Apache-2.0
#include "risfp/baselines.hpp"

#include "risfp/channel.hpp"
#include "risfp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace risfp {

double wmse_error(cplx u, const Design& design, const ChannelSet& chs, const SystemConfig& cfg, int user) {
  const Eigen::VectorXd after = power_after(design.power, design.order);
  const Eigen::VectorXd r = residual_coeff(chs, design.beam, cfg);
  const cplx gain = effective_gain(chs, design.phases, design.beam, user);
  const double pk = design.power(user);
  const double u2 = std::norm(u);
  return 1.0 + cfg.noise_power * u2 - 2.0 * std::real(u * gain * std::sqrt(pk)) +
         std::norm(u * gain) * (pk + after(user)) + u2 * r(user) * design.power.sum();
}

WmseState wmse_oracle(const Design& design, const ChannelSet& chs, const SystemConfig& cfg) {
  const int users = chs.users();
  const Eigen::VectorXd after = power_after(design.power, design.order);
  const Eigen::VectorXd r = residual_coeff(chs, design.beam, cfg);
  WmseState s;
  s.u.resize(users);
  s.w.resize(users);
  s.e.resize(users);
  s.e_mmse.resize(users);
  for (int k = 0; k < users; ++k) {
    const cplx gain = effective_gain(chs, design.phases, design.beam, k);
    const double pk = design.power(k);
    const double total = cfg.noise_power + std::norm(gain) * (pk + after(k)) + r(k) * design.power.sum();
    s.u(k) = std::sqrt(pk) * std::conj(gain) / total;
    s.e(k) = wmse_error(s.u(k), design, chs, cfg, k);
    s.e_mmse(k) = 1.0 - std::norm(gain) * pk / total;
    s.w(k) = 1.0 / s.e_mmse(k);
  }
  return s;
}

Eigen::VectorXd waterfill(const Eigen::VectorXd& gains, double budget, double noise_power) {
  if (!(budget > 0.0)) throw std::invalid_argument("waterfill: budget must be positive");
  if ((gains.array() < 0.0).any()) throw std::invalid_argument("waterfill: negative gain");
  if (!(gains.array() > 0.0).any()) throw std::invalid_argument("waterfill: all gains are zero");
  const Eigen::Index n = gains.size();
  Eigen::VectorXd floor = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i)
    if (gains(i) > 0.0) floor(i) = noise_power / gains(i);

  // Bisection brackets the level; the active set then fixes it exactly.
  double lo = floor.minCoeff();
  double hi = lo + budget;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double used = (mid - floor.array()).max(0.0).sum();
    (used > budget ? hi : lo) = mid;
  }
  double mu = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    const auto active = (floor.array() < mu);
    const double count = static_cast<double>(active.count());
    double base = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (active(i)) base += floor(i);
    mu = (budget + base) / count;
  }
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = floor(i) < mu ? mu - floor(i) : 0.0;
  return q;
}

double water_level(const Eigen::VectorXd& gains, const Eigen::VectorXd& powers, double noise_power) {
  for (Eigen::Index i = 0; i < gains.size(); ++i)
    if (powers(i) > 0.0) return powers(i) + noise_power / gains(i);
  return std::numeric_limits<double>::quiet_NaN();
}

Eigen::VectorXcd align_phases(const ChannelSet& chs, const Eigen::VectorXcd& beam, int user) {
  const Eigen::MatrixXcd e = cascade_matrix(chs, user);
  const Eigen::VectorXcd c = e * beam;
  Eigen::VectorXcd psi(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) psi(i) = std::polar(1.0, -std::arg(c(i)));
  return psi;
}

BaselineResult svd_wf_baseline(const ChannelSet& chs, const SystemConfig& cfg) {
  const int users = chs.users();
  const int n = chs.elements();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < users; ++k) {
    const Eigen::MatrixXcd e = cascade_matrix(chs, k);
    acc += (e * e.adjoint()).conjugate();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (acc + acc.adjoint()));
  const Eigen::VectorXcd lead = eig.eigenvectors().col(n - 1);
  BaselineResult out;
  out.phases.resize(n);
  for (int i = 0; i < n; ++i) out.phases(i) = std::polar(1.0, std::arg(lead(i)));

  Eigen::MatrixXcd g(users, chs.antennas());
  for (int k = 0; k < users; ++k) g.row(k) = effective_channel(chs, out.phases, k);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g);
  const Eigen::VectorXd gains = svd.singularValues().cwiseAbs2();
  const Eigen::VectorXd q = waterfill(gains, cfg.power_budget, cfg.noise_power);
  out.rates = (1.0 + gains.array() * q.array() / cfg.noise_power).log2().matrix();
  out.sum_rate = out.rates.sum();
  out.total_tx_power = q.sum();
  out.ee = out.sum_rate / (q.sum() + circuit_power(cfg, Architecture::fully_digital));
  return out;
}

BaselineResult oma_tdma_baseline(const ChannelSet& chs, const SystemConfig& cfg) {
  const int users = chs.users();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(chs.bs_ris, Eigen::ComputeThinV);
  const Eigen::VectorXcd f0 = svd.matrixV().col(0);
  BaselineResult out;
  out.rates.resize(users);
  for (int k = 0; k < users; ++k) {
    Design slot;
    slot.phases = align_phases(chs, f0, k);
    const Eigen::RowVectorXcd g = effective_channel(chs, slot.phases, k);
    slot.beam = g.adjoint() / g.norm();
    // Single-user view of slot k: only user k is served.
    ChannelSet single = chs;
    single.ris_user = {chs.ris_user[static_cast<std::size_t>(k)]};
    single.ris_user_true = {chs.ris_user_true[static_cast<std::size_t>(k)]};
    SystemConfig one = cfg;
    one.users = 1;
    one.min_rate = {cfg.min_rate[static_cast<std::size_t>(k)]};
    slot.power = Eigen::VectorXd::Constant(1, cfg.power_budget);
    slot.order = {0};
    out.rates(k) = sum_rate(slot, single, one) / users;
    if (k == 0) out.phases = slot.phases;
  }
  out.sum_rate = out.rates.sum();
  out.total_tx_power = cfg.power_budget;
  out.ee = out.sum_rate / (cfg.power_budget + circuit_power(cfg, Architecture::analog_ris));
  return out;
}

}  // namespace risfp

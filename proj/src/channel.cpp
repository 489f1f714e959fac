// SPDX-License-Identifier: Apache-2.0
#include "risfp/channel.hpp"

#include <algorithm>

namespace risfp {

cplx complex_normal(std::mt19937_64& rng, double variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

Eigen::MatrixXcd bs_ris_channel(std::span<const BsRisPath> paths, int antennas, int horizontal,
                                int vertical) {
  const int n = horizontal * vertical;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, antennas);
  if (paths.empty()) return h;
  for (const auto& path : paths) {
    const Eigen::VectorXcd rx = steering_upa(path.arrival_az, path.arrival_el, horizontal, vertical);
    const Eigen::VectorXcd tx = steering_ula(path.departure, antennas);
    h.noalias() += path.gain * rx * tx.adjoint();
  }
  h *= std::sqrt(static_cast<double>(n) / static_cast<double>(paths.size()));
  return h;
}

Eigen::VectorXcd ris_user_channel(std::span<const RisUserPath> paths, int horizontal, int vertical) {
  const int n = horizontal * vertical;
  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(n);
  if (paths.empty()) return h;
  for (const auto& path : paths)
    h += path.gain * steering_upa(path.departure_az, path.departure_el, horizontal, vertical);
  h *= std::sqrt(static_cast<double>(n) / static_cast<double>(paths.size()));
  return h;
}

ChannelSet sample_channels(const SystemConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  const double half_pi = std::numbers::pi / 2.0;
  std::uniform_real_distribution<double> angle(-half_pi, half_pi);

  std::vector<BsRisPath> bs_paths(static_cast<std::size_t>(cfg.bs_ris_paths));
  for (auto& path : bs_paths) {
    path.gain = complex_normal(rng);
    path.departure = angle(rng);
    path.arrival_az = angle(rng);
    path.arrival_el = angle(rng);
  }
  ChannelSet chs;
  chs.error_variance = cfg.error_variance;
  chs.bs_ris_true = bs_ris_channel(bs_paths, cfg.bs_antennas, cfg.ris_horizontal, cfg.ris_vertical);

  std::vector<RisUserPath> user_paths(static_cast<std::size_t>(cfg.ris_user_paths));
  for (int k = 0; k < cfg.users; ++k) {
    for (auto& path : user_paths) {
      path.gain = complex_normal(rng);
      path.departure_az = angle(rng);
      path.departure_el = angle(rng);
    }
    chs.ris_user_true.push_back(ris_user_channel(user_paths, cfg.ris_horizontal, cfg.ris_vertical));
  }

  chs.bs_ris = chs.bs_ris_true;
  chs.ris_user = chs.ris_user_true;
  if (cfg.error_variance > 0.0) {
    // Unit-variance draws scaled afterwards keep the error pattern common
    // across error variances.
    const double scale = std::sqrt(cfg.error_variance);
    for (Eigen::Index j = 0; j < chs.bs_ris.cols(); ++j)
      for (Eigen::Index i = 0; i < chs.bs_ris.rows(); ++i)
        chs.bs_ris(i, j) -= scale * complex_normal(rng);
    for (auto& h : chs.ris_user)
      for (Eigen::Index i = 0; i < h.size(); ++i) h(i) -= scale * complex_normal(rng);
  }
  return chs;
}

Eigen::RowVectorXcd effective_channel(const ChannelSet& chs, const Eigen::VectorXcd& psi, int user) {
  if (user < 0 || user >= chs.users()) throw std::out_of_range("effective_channel: user index");
  const Eigen::VectorXcd w = chs.ris_user[static_cast<std::size_t>(user)].conjugate().cwiseProduct(psi);
  return w.transpose() * chs.bs_ris;
}

cplx effective_gain(const ChannelSet& chs, const Eigen::VectorXcd& psi, const Eigen::VectorXcd& beam,
                    int user) {
  return (effective_channel(chs, psi, user) * beam).value();
}

Eigen::MatrixXcd cascade_matrix(const ChannelSet& chs, int user) {
  if (user < 0 || user >= chs.users()) throw std::out_of_range("cascade_matrix: user index");
  return chs.ris_user[static_cast<std::size_t>(user)].conjugate().asDiagonal() * chs.bs_ris;
}

Eigen::VectorXd residual_coeff(const ChannelSet& chs, const Eigen::VectorXcd& beam,
                               const SystemConfig& cfg) {
  const double s2 = cfg.error_variance;
  const double f2 = beam.squaredNorm();
  const double hf2 = (chs.bs_ris * beam).squaredNorm();
  const double n = static_cast<double>(chs.elements());
  Eigen::VectorXd r(chs.users());
  for (int k = 0; k < chs.users(); ++k)
    r(k) = s2 * (chs.ris_user[static_cast<std::size_t>(k)].squaredNorm() * f2 + hf2) + n * s2 * s2 * f2;
  return r;
}

}  // namespace risfp

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "risfp/types.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <span>

namespace risfp {

/// ULA steering vector: element i is exp(-j*pi*i*cos(theta)) / sqrt(M).
template <typename Real = double>
CVector<Real> steering_ula(Real theta, int antennas) {
  if (antennas < 1) throw std::invalid_argument("steering_ula: antennas must be >= 1");
  const Real pi = std::numbers::pi_v<Real>;
  const Real step = -pi * std::cos(theta);
  const Real scale = Real(1) / std::sqrt(static_cast<Real>(antennas));
  CVector<Real> a(antennas);
  for (int i = 0; i < antennas; ++i) a(i) = std::polar(scale, step * static_cast<Real>(i));
  return a;
}

/// UPA steering vector (a_H(theta) kron a_V(theta, phi)) / sqrt(N_H N_V). The
/// horizontal factor has phase step -pi*cos(theta), the vertical factor
/// -pi*cos(phi)*sin(theta). Element index is h * N_V + v.
template <typename Real = double>
CVector<Real> steering_upa(Real theta, Real phi, int horizontal, int vertical) {
  if (horizontal < 1 || vertical < 1)
    throw std::invalid_argument("steering_upa: grid dimensions must be >= 1");
  const Real pi = std::numbers::pi_v<Real>;
  const Real h_step = -pi * std::cos(theta);
  const Real v_step = -pi * std::cos(phi) * std::sin(theta);
  const Real scale = Real(1) / std::sqrt(static_cast<Real>(horizontal * vertical));
  CVector<Real> a(horizontal * vertical);
  for (int h = 0; h < horizontal; ++h)
    for (int v = 0; v < vertical; ++v)
      a(h * vertical + v) =
          std::polar(scale, h_step * static_cast<Real>(h) + v_step * static_cast<Real>(v));
  return a;
}

/// One BS->RIS propagation path.
struct BsRisPath {
  cplx gain;
  double departure;      // azimuth AoD at the BS
  double arrival_az;     // azimuth AoA at the RIS
  double arrival_el;     // elevation AoA at the RIS
};

/// One RIS->user propagation path.
struct RisUserPath {
  cplx gain;
  double departure_az;
  double departure_el;
};

/// sqrt(N/S) * sum_j gain_j * a_N(arr) * a_M(dep)^H
Eigen::MatrixXcd bs_ris_channel(std::span<const BsRisPath> paths, int antennas, int horizontal,
                                int vertical);
/// sqrt(N/S) * sum_j gain_j * a_N(dep)
Eigen::VectorXcd ris_user_channel(std::span<const RisUserPath> paths, int horizontal, int vertical);

/// Draws a Saleh-Valenzuela realisation with CN(0,1) path gains and angles
/// uniform on [-pi/2, pi/2], then subtracts iid CN(0, sigma_eps^2) errors to
/// form the estimates. The true channels are drawn first, so realisations
/// with different error variances share them for a given generator state.
ChannelSet sample_channels(const SystemConfig& cfg, std::mt19937_64& rng);

/// g_k = h_k^H diag(psi) H on the estimated channels (1 x M).
Eigen::RowVectorXcd effective_channel(const ChannelSet& chs, const Eigen::VectorXcd& psi, int user);

/// g_k f as a scalar.
cplx effective_gain(const ChannelSet& chs, const Eigen::VectorXcd& psi, const Eigen::VectorXcd& beam,
                    int user);

/// E_k = diag(conj(h_k)) H, so that g_k f = psi^T (E_k f).
Eigen::MatrixXcd cascade_matrix(const ChannelSet& chs, int user);

/// Per-unit-total-power residual CSI-error coefficient
/// r_k = s2 (|h_k|^2 |f|^2 + |H f|^2) + N s2^2 |f|^2, with s2 = sigma_eps^2.
/// The error power seen by user k is r_k * sum(p).
Eigen::VectorXd residual_coeff(const ChannelSet& chs, const Eigen::VectorXcd& beam,
                               const SystemConfig& cfg);

/// Circularly-symmetric complex normal sample with the given variance.
cplx complex_normal(std::mt19937_64& rng, double variance = 1.0);

}  // namespace risfp

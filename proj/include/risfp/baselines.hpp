// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reference schemes (fully digital SVD precoding with water-filling, TDMA)
// and the WMSE identity used to cross-check the SINR machinery.

#include "risfp/types.hpp"

namespace risfp {

/// MSE receiver state at the optimal receiver u_k = sqrt(p_k) conj(g_k f) / T_k,
/// T_k = sigma^2 + |g_k f|^2 (p_k + after_k) + r_k sum(p).
struct WmseState {
  Eigen::VectorXcd u;
  Eigen::VectorXd w;       // 1 / e_mmse
  Eigen::VectorXd e;       // closed-form MSE evaluated at u
  Eigen::VectorXd e_mmse;  // 1 - |g_k f|^2 p_k / T_k
};

/// e_k(u) = 1 + sigma^2|u|^2 - 2 Re{u g_k f sqrt(p_k)} + sum_{i decoded at or
/// after k} |u g_k f|^2 p_i + |u|^2 r_k sum(p)
double wmse_error(cplx u, const Design& design, const ChannelSet& chs, const SystemConfig& cfg, int user);

WmseState wmse_oracle(const Design& design, const ChannelSet& chs, const SystemConfig& cfg);

/// q_i = max(0, mu - sigma^2 / lambda_i) with sum(q) = budget. `gains` are the
/// squared singular values. Zero-gain streams get no power.
Eigen::VectorXd waterfill(const Eigen::VectorXd& gains, double budget, double noise_power);

/// Water level mu of a water-filling allocation (NaN if no stream is active).
double water_level(const Eigen::VectorXd& gains, const Eigen::VectorXd& powers, double noise_power);

struct BaselineResult {
  double sum_rate = 0.0;
  double ee = 0.0;
  double total_tx_power = 0.0;
  Eigen::VectorXd rates;   // per stream (SVD-WF) or per user (OMA)
  Eigen::VectorXcd phases; // RIS configuration used
};

/// Fully digital SVD precoding over G = [g_1; ...; g_K] with water-filling.
/// psi co-phases the principal eigenvector of sum_k conj(E_k E_k^H), which
/// maximises sum_k |g_k|^2 over the lifted relaxation. The capacity is
/// evaluated on the estimated channels.
BaselineResult svd_wf_baseline(const ChannelSet& chs, const SystemConfig& cfg);

/// TDMA with equal slots: in slot k psi aligns user k's cascade, f = g_k^H/|g_k|
/// and the full budget is spent.
BaselineResult oma_tdma_baseline(const ChannelSet& chs, const SystemConfig& cfg);

/// Phases that co-phase the cascade E_k f of one user.
Eigen::VectorXcd align_phases(const ChannelSet& chs, const Eigen::VectorXcd& beam, int user);

}  // namespace risfp

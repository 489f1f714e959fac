// SPDX-License-Identifier: Apache-2.0
#pragma once

// Coefficient builders and closed-form auxiliary updates for the
// quadratic-transform (QT) reformulations of the beamformer, RIS-phase and
// power-allocation subproblems.

#include "risfp/types.hpp"

#include <vector>

namespace risfp {

/// Optimal QT auxiliary num / den; 2 Re{conj(aux) num} - |aux|^2 den then
/// equals |num|^2 / den.
cplx qt_opt_aux(cplx numerator, double denominator);

/// 2 Re{conj(aux) num} - |aux|^2 den
double qt_value(cplx aux, cplx numerator, double denominator);

/// Per-user terms of Gamma_k(f) = |a_k f|^2 / (sigma^2 + f^H A_k f).
struct BeamformerCoeffs {
  std::vector<Eigen::RowVectorXcd> signal;     // a_k = g_k sqrt(p_k)
  std::vector<Eigen::MatrixXcd> interference;  // A_k = g_k^H g_k after_k + Z_k sum(p)
  std::vector<Eigen::MatrixXcd> error_cov;     // Z_k
  std::vector<Eigen::MatrixXcd> min_rate;      // B_k = a_k^H a_k - eta_k A_k
  Eigen::VectorXd eta;
  double noise_power = 1.0;

  int users() const { return static_cast<int>(signal.size()); }
};

BeamformerCoeffs build_beamformer_coeffs(const ChannelSet& chs, const Eigen::VectorXcd& psi,
                                         const Eigen::VectorXd& power, const std::vector<int>& order,
                                         const SystemConfig& cfg);

/// Gamma_k(f) evaluated from the coefficients.
Eigen::VectorXd beamformer_sinr(const BeamformerCoeffs& coeffs, const Eigen::VectorXcd& beam);

/// y_k = a_k f / (sigma^2 + f^H A_k f)
Eigen::VectorXcd aux_update_f(const BeamformerCoeffs& coeffs, const Eigen::VectorXcd& beam);

/// 2 Re{conj(y_k) a_k f} - |y_k|^2 (sigma^2 + f^H A_k f)
Eigen::VectorXd beamformer_qt_sinr(const BeamformerCoeffs& coeffs, const Eigen::VectorXcd& aux,
                                   const Eigen::VectorXcd& beam);

/// Half-space Re{normal^H f} >= rhs.
struct LinearCut {
  Eigen::VectorXcd normal;
  double rhs = 0.0;
};

/// First-order surrogate of f^H B_k f >= eta_k sigma^2 around the expansion
/// point: 2 Re{f_o^H B_k f} - f_o^H B_k f_o >= eta_k sigma^2.
std::vector<LinearCut> sca_linearize_minrate(const BeamformerCoeffs& coeffs,
                                             const Eigen::VectorXcd& expansion);

/// Lifted RIS subproblem. With psi~ = [psi; 1]:
///   psi~^H C_k psi~ - c_k = QT-SINR of user k,   psi~^H D_k psi~ = |g_k f|^2.
/// C_k = quad_weight_k * [u_k;0][u_k;0]^H + cross block (cross_weight_k u_k in
/// the last column, mirrored), D_k = [u_k;0][u_k;0]^H, u_k = conj(E_k f).
struct RisCoeffs {
  std::vector<Eigen::VectorXcd> cascade;   // u_k
  std::vector<double> quad_weight;         // -|nu_k|^2 after_k
  std::vector<cplx> cross_weight;          // nu_k sqrt(p_k)
  std::vector<Eigen::MatrixXcd> objective; // C_k
  Eigen::VectorXd offset;                  // c_k
  std::vector<Eigen::MatrixXcd> min_rate;  // D_k
  Eigen::VectorXd threshold;               // d_k
  std::vector<bool> cut_active;

  Eigen::VectorXcd nu;
  Eigen::VectorXd signal_amp;              // sqrt(p_k)
  Eigen::VectorXd after;
  Eigen::VectorXd noise_plus_error;        // sigma^2 + r_k sum(p)

  int users() const { return static_cast<int>(cascade.size()); }
  int elements() const { return cascade.empty() ? 0 : static_cast<int>(cascade.front().size()); }
};

/// Throws MinRateDegenerate when a cut is requested for user k with eta_k > 0
/// and p_k - eta_k after_k <= 0. With min_rate_cuts = false every cut is
/// inactive (D_k still assembled, d_k = 0).
RisCoeffs build_ris_coeffs(const ChannelSet& chs, const Eigen::VectorXcd& beam,
                           const Eigen::VectorXd& power, const std::vector<int>& order,
                           const Eigen::VectorXcd& nu, const SystemConfig& cfg,
                           bool min_rate_cuts = true);

/// Unlifted QT-SINR of the RIS subproblem at psi.
Eigen::VectorXd ris_qt_sinr(const RisCoeffs& coeffs, const Eigen::VectorXcd& psi);

/// Lifted form psi~^H C_k psi~ - c_k.
Eigen::VectorXd ris_lifted_qt_sinr(const RisCoeffs& coeffs, const Eigen::VectorXcd& psi);

/// nu_k = (g_k f) sqrt(p_k) / (sigma^2 + |g_k f|^2 after_k + r_k sum(p)).
/// Same value as aux_update_f on the same design.
Eigen::VectorXcd aux_update_psi(const ChannelSet& chs, const Eigen::VectorXcd& beam,
                                const Eigen::VectorXcd& psi, const Eigen::VectorXd& power,
                                const std::vector<int>& order, const SystemConfig& cfg);

/// Gamma_k(p) = p_k / (a_k + after_k + b_k sum(p)).
struct PaCoeffs {
  Eigen::VectorXd noise;  // a_k = sigma^2 / |g_k f|^2
  Eigen::VectorXd error;  // b_k = r_k / |g_k f|^2
  Eigen::VectorXd eta;
  double power_budget = 0.0;
  double circuit_power = 0.0;
  std::vector<int> order;

  int users() const { return static_cast<int>(noise.size()); }
};

PaCoeffs build_pa_coeffs(const ChannelSet& chs, const Eigen::VectorXcd& beam,
                         const Eigen::VectorXcd& psi, const std::vector<int>& order,
                         const SystemConfig& cfg);

Eigen::VectorXd pa_sinr(const PaCoeffs& coeffs, const Eigen::VectorXd& power);

/// consistent: x_k = sqrt(p_k) / (a_k + after_k + b_k sum(p)), the exact
/// maximiser of the QT-SINR. printed: drops the sum(p) factor on b_k.
enum class PowerAuxForm { consistent, printed };

Eigen::VectorXd aux_update_p(const PaCoeffs& coeffs, const Eigen::VectorXd& power,
                             PowerAuxForm form = PowerAuxForm::consistent);

/// 2 x_k sqrt(p_k) - x_k^2 (a_k + after_k + b_k sum(p))
Eigen::VectorXd pa_qt_sinr(const PaCoeffs& coeffs, const Eigen::VectorXd& power,
                           const Eigen::VectorXd& aux);

/// sum_k log2(max(1 + QT-SINR_k, 1e-12))
double pa_qt_rate_sum(const PaCoeffs& coeffs, const Eigen::VectorXd& power, const Eigen::VectorXd& aux);

/// z = sqrt(S) / (sum(p) + P_c) with S = pa_qt_rate_sum. DomainError if S < 0.
double aux_update_z(const PaCoeffs& coeffs, const Eigen::VectorXd& power, const Eigen::VectorXd& aux);

/// 2 z sqrt(S) - z^2 (sum(p) + P_c)
double ee_qt_objective(const PaCoeffs& coeffs, const Eigen::VectorXd& power,
                       const Eigen::VectorXd& aux, double z);

/// (X + X^H) / 2
Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& x);

}  // namespace risfp

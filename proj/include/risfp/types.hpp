// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace risfp {

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CRowVector = Eigen::Matrix<std::complex<Real>, 1, Eigen::Dynamic>;
template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using cplx = std::complex<double>;

/// Raised when a closed-form update would divide by a non-positive quantity
/// or leave the domain of a log / square root.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// p_k - eta_k * (power decoded after k) <= 0: no RIS configuration can meet
/// the minimum rate of user k at this power allocation.
class MinRateDegenerate : public std::runtime_error {
 public:
  explicit MinRateDegenerate(int user)
      : std::runtime_error("minimum-rate cut degenerate for user " + std::to_string(user)),
        user_(user) {}
  int user() const { return user_; }

 private:
  int user_;
};

class ZeroGainChannel : public std::runtime_error {
 public:
  explicit ZeroGainChannel(int user)
      : std::runtime_error("zero effective gain for user " + std::to_string(user)), user_(user) {}
  int user() const { return user_; }

 private:
  int user_;
};

class InfeasibleProblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario constants. All powers are linear and share the unit of
/// noise_power (normalised to 1 by default, so power_budget is the SNR).
struct SystemConfig {
  int bs_antennas = 16;        // M
  int ris_horizontal = 8;      // N_H
  int ris_vertical = 8;        // N_V
  int users = 4;               // K
  int bs_ris_paths = 3;        // S1
  int ris_user_paths = 3;      // S2
  double noise_power = 1.0;    // sigma^2
  double error_variance = 0.0; // sigma_eps^2
  double power_budget = 1e4;   // P_s
  std::vector<double> min_rate = {0.3, 0.3, 0.3, 0.3};  // R_th per user, bits/s/Hz
  double bs_residual_power = 1.0;   // P'_BS
  double rf_chain_power = 1.0;      // P_RF
  double ris_element_power = 0.01;  // P_RIS
  std::uint64_t seed = 1;

  int ris_elements() const { return ris_horizontal * ris_vertical; }
  /// Minimum SINR eta_k = 2^{R_th,k} - 1.
  double min_sinr(int k) const;
  Eigen::VectorXd min_sinr() const;
  /// Throws std::invalid_argument describing the first broken invariant.
  void validate() const;
};

/// One channel realisation: true and estimated BS-RIS (N x M) and RIS-user
/// (N) channels. Estimated = true - error.
struct ChannelSet {
  Eigen::MatrixXcd bs_ris_true;
  std::vector<Eigen::VectorXcd> ris_user_true;
  Eigen::MatrixXcd bs_ris;
  std::vector<Eigen::VectorXcd> ris_user;
  double error_variance = 0.0;

  int antennas() const { return static_cast<int>(bs_ris.cols()); }
  int elements() const { return static_cast<int>(bs_ris.rows()); }
  int users() const { return static_cast<int>(ris_user.size()); }
};

/// Decision variables. order[pos] is the user decoded at SIC position pos
/// (ascending effective gain), so the user order.back() sees no interference.
struct Design {
  Eigen::VectorXcd beam;    // f, length M
  Eigen::VectorXcd phases;  // psi, length N
  Eigen::VectorXd power;    // p, length K
  std::vector<int> order;
};

/// For each user k, the total power of users decoded after k.
Eigen::VectorXd power_after(const Eigen::VectorXd& power, const std::vector<int>& order);

}  // namespace risfp

// SPDX-License-Identifier: Apache-2.0
#pragma once

// Solvers for the three convex subproblem shapes: the beamformer step, the
// lifted RIS-phase SDP and the power allocation (sum rate / energy efficiency).

#include "risfp/fp_subproblems.hpp"

#include <optional>
#include <vector>

namespace risfp {

struct SolverSettings {
  double abs_tol = 1e-6;
  double rel_tol = 1e-6;
  int max_iters = 5000;
  double feasibility_tol = 1e-7;
};

enum class SolveStatus { Optimal, Inaccurate, Infeasible, IterLimit };

const char* to_string(SolveStatus status);

/// Only the field matching the solver is populated (beam, lifted or power).
struct SolveOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  double residual = 0.0;  // largest constraint violation at the returned point
  int iterations = 0;
  Eigen::VectorXcd beam;
  Eigen::MatrixXcd lifted;
  Eigen::MatrixXcd factor;  // lifted = factor * factor^H
  Eigen::VectorXd power;
  bool rescaled = false;    // beamformer: moved to the unit sphere

  bool ok() const { return status == SolveStatus::Optimal || status == SolveStatus::Inaccurate; }
};

/// sum_k log2(1 + 2 Re{conj(y_k) a_k f} - |y_k|^2 (sigma^2 + f^H A_k f))
double beamformer_objective(const BeamformerCoeffs& coeffs, const Eigen::VectorXcd& aux,
                            const Eigen::VectorXcd& beam);

/// Maximises the beamformer objective over |f| <= 1, |f_i| <= 2 and the cuts.
/// The expansion point f_o seeds the search. The relaxed optimum is moved to
/// the unit sphere when every cut still holds there.
SolveOutcome solve_beamformer(const BeamformerCoeffs& coeffs, const Eigen::VectorXcd& aux,
                              const std::vector<LinearCut>& cuts, const Eigen::VectorXcd& expansion,
                              const SolverSettings& settings = {});

/// sum_k log2(1 - c_k + Re tr(Psi C_k))
double ris_sdp_objective(const RisCoeffs& coeffs, const Eigen::MatrixXcd& lifted);

/// Maximises the lifted objective over Psi >= 0, diag(Psi) = 1 and the active
/// cuts tr(Psi D_k) >= d_k. Psi is kept factored as V V^H with unit-norm rows;
/// the warm start (length N, unit modulus) seeds the first column.
SolveOutcome solve_ris_sdp(const RisCoeffs& coeffs, const SolverSettings& settings = {},
                           const std::optional<Eigen::VectorXcd>& warm_start = std::nullopt);

/// Point of the min-rate polytope with the smallest total power:
/// p_k = eta_k (a_k + after_k + b_k sum(p)). nullopt when the thresholds are
/// unattainable within the budget.
std::optional<Eigen::VectorXd> pa_min_power(const PaCoeffs& coeffs);

/// Residual of the PA feasible set {p >= 0, sum(p) <= P_s, Gamma_k(p) >= eta_k}.
double pa_residual(const PaCoeffs& coeffs, const Eigen::VectorXd& power);

SolveOutcome solve_pa_sr(const PaCoeffs& coeffs, const Eigen::VectorXd& aux,
                         const SolverSettings& settings = {});

SolveOutcome solve_pa_ee(const PaCoeffs& coeffs, const Eigen::VectorXd& aux, double z,
                         const SolverSettings& settings = {});

}  // namespace risfp

// SPDX-License-Identifier: Apache-2.0
#include "risfp/algorithms.hpp"

#include "risfp/channel.hpp"
#include "risfp/metrics.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace risfp {

void AoSettings::validate() const {
  if (!(outer_tol > 0.0) || !(inner_tol > 0.0)) throw std::invalid_argument("AoSettings: tolerances must be positive");
  if (max_outer < 1 || max_inner < 1) throw std::invalid_argument("AoSettings: iteration caps must be >= 1");
  if (warmup_iters < 0 || warmup_iters > max_outer)
    throw std::invalid_argument("AoSettings: warmup_iters must lie in [0, max_outer]");
  if (randomizations < 0) throw std::invalid_argument("AoSettings: randomizations must be >= 0");
}

std::vector<double> AoTrace::accepted_objectives() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < objective.size(); ++i)
    if (accepted[i]) out.push_back(objective[i]);
  return out;
}

Design initialize_design(const ChannelSet& chs, const SystemConfig& cfg, std::mt19937_64& /*rng*/) {
  Design d;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(chs.bs_ris, Eigen::ComputeThinV);
  d.beam = svd.matrixV().col(0);
  d.beam /= d.beam.norm();

  const Eigen::VectorXcd hf = chs.bs_ris * d.beam;
  int strongest = 0;
  double best = -1.0;
  for (int k = 0; k < chs.users(); ++k) {
    const double aligned = chs.ris_user[static_cast<std::size_t>(k)].cwiseProduct(hf).cwiseAbs().sum();
    if (aligned > best) {
      best = aligned;
      strongest = k;
    }
  }
  const Eigen::VectorXcd cascade = chs.ris_user[static_cast<std::size_t>(strongest)].conjugate().cwiseProduct(hf);
  d.phases.resize(chs.elements());
  for (int i = 0; i < chs.elements(); ++i) d.phases(i) = std::polar(1.0, -std::arg(cascade(i)));
  d.power = Eigen::VectorXd::Constant(chs.users(), cfg.power_budget / chs.users());
  d.order = decode_order(chs, d.phases, d.beam);
  return d;
}

Rank1Result rank1_extract(const Eigen::MatrixXcd& lifted, const ChannelSet& chs, const Design& at,
                          const SystemConfig& cfg, int samples, std::mt19937_64& rng) {
  const int n = chs.elements();
  if (lifted.rows() != n + 1 || lifted.cols() != n + 1)
    throw std::invalid_argument("rank1_extract: lifted matrix has wrong size");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (lifted + lifted.adjoint()));
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXcd root = eig.eigenvectors() * lam.cwiseSqrt().asDiagonal();

  const Eigen::VectorXcd hf = chs.bs_ris * at.beam;
  std::vector<Eigen::VectorXcd> cascade;  // E_k f
  for (int k = 0; k < chs.users(); ++k)
    cascade.push_back(chs.ris_user[static_cast<std::size_t>(k)].conjugate().cwiseProduct(hf));
  const Eigen::VectorXd residual = residual_coeff(chs, at.beam, cfg);
  const Eigen::VectorXd eta = cfg.min_sinr();

  Rank1Result best;
  best.sum_rate = -std::numeric_limits<double>::infinity();
  bool have = false;
  Eigen::VectorXd gain2(chs.users());
  auto consider = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd psi(n);
    const cplx ref = v(n);
    for (int i = 0; i < n; ++i) {
      const cplx ratio = std::abs(ref) > 0.0 ? v(i) / ref : v(i);
      psi(i) = std::polar(1.0, std::arg(ratio));
    }
    for (int k = 0; k < chs.users(); ++k) gain2(k) = std::norm((psi.transpose() * cascade[static_cast<std::size_t>(k)]).value());
    const Eigen::VectorXd gamma = sinr_from_gains(gain2, residual, at.power, at.order, cfg.noise_power);
    const bool feasible = ((gamma - eta).array() >= -1e-7).all();
    const double rate = sum_rate(gamma);
    if (!have || (feasible && !best.feasible) || (feasible == best.feasible && rate > best.sum_rate)) {
      best.phases = psi;
      best.sum_rate = rate;
      best.feasible = feasible;
      have = true;
    }
  };

  consider(eig.eigenvectors().col(n));
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Eigen::VectorXcd xi(n + 1);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i <= n; ++i) xi(i) = cplx(normal(rng), normal(rng));
    consider(root * xi);
  }
  return best;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> dps_decompose(const Eigen::VectorXcd& beam) {
  Eigen::VectorXd t1(beam.size());
  Eigen::VectorXd t2(beam.size());
  for (Eigen::Index i = 0; i < beam.size(); ++i) {
    const double mag = std::abs(beam(i));
    if (mag > 2.0) throw DomainError("dps_decompose: |f_i| exceeds 2");
    const double spread = std::acos(mag / 2.0);
    const double phase = std::arg(beam(i));
    t1(i) = phase + spread;
    t2(i) = phase - spread;
  }
  return {t1, t2};
}

namespace {

enum class Goal { sum_rate, energy_efficiency };

struct Merit {
  double shortfall = 0.0;
  double objective = 0.0;
  bool feasible = false;
};

Merit evaluate(const Design& d, const ChannelSet& chs, const SystemConfig& cfg, Goal goal) {
  const RateReport r = rate_report(d, chs, cfg);
  Merit m;
  m.shortfall = min_rate_shortfall(r.gamma, cfg);
  m.objective = goal == Goal::sum_rate ? r.sum_rate : r.ee;
  m.feasible = r.feasible;
  if (!std::isfinite(m.objective)) m.objective = -std::numeric_limits<double>::infinity();
  return m;
}

// Lexicographic: smaller min-rate shortfall first, then larger objective.
bool no_worse(const Merit& a, const Merit& b) {
  if (a.shortfall < b.shortfall - 1e-12) return true;
  if (a.shortfall > b.shortfall + 1e-12) return false;
  return a.objective >= b.objective;
}

std::vector<LinearCut> rated_cuts(const BeamformerCoeffs& coeffs, const Eigen::VectorXcd& expansion) {
  std::vector<LinearCut> all = sca_linearize_minrate(coeffs, expansion);
  std::vector<LinearCut> out;
  for (int k = 0; k < coeffs.users(); ++k)
    if (coeffs.eta(k) > 0.0) out.push_back(all[static_cast<std::size_t>(k)]);
  return out;
}

std::pair<Design, AoTrace> run_ao(const ChannelSet& chs, const SystemConfig& cfg, const AoSettings& settings,
                                  std::mt19937_64& rng, Goal goal) {
  settings.validate();
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  AoTrace trace;
  const bool any_rate = (cfg.min_sinr().array() > 0.0).any();

  Design cur = initialize_design(chs, cfg, rng);
  Merit cur_m = evaluate(cur, chs, cfg, goal);
  Design best = cur;
  Merit best_m = cur_m;
  bool have_best = cur_m.feasible;
  double prev_obj = cur_m.objective;

  auto try_accept = [&](Design cand) {
    const Merit m = evaluate(cand, chs, cfg, goal);
    if (no_worse(m, cur_m)) {
      cur = std::move(cand);
      cur_m = m;
      return true;
    }
    return false;
  };

  for (int it = 0; it < settings.max_outer; ++it) {
    const bool cuts_on = any_rate && it >= settings.warmup_iters;
    std::string status;

    // (1) shared auxiliary
    const Eigen::VectorXcd nu = aux_update_psi(chs, cur.beam, cur.phases, cur.power, cur.order, cfg);

    // (2) RIS phases
    {
      RisCoeffs rc;
      try {
        rc = build_ris_coeffs(chs, cur.beam, cur.power, cur.order, nu, cfg, cuts_on);
      } catch (const MinRateDegenerate&) {
        rc = build_ris_coeffs(chs, cur.beam, cur.power, cur.order, nu, cfg, false);
      }
      try {
        const SolveOutcome sdp = solve_ris_sdp(rc, settings.solver, cur.phases);
        status += to_string(sdp.status);
        if (sdp.status != SolveStatus::Infeasible) {
          const Rank1Result r1 = rank1_extract(sdp.lifted, chs, cur, cfg, settings.randomizations, rng);
          Design cand = cur;
          cand.phases = r1.phases;
          try_accept(std::move(cand));
        }
      } catch (const DomainError&) {
        status += "domain";
      }
    }

    // (3) beamformer, SCA around the current f
    {
      const BeamformerCoeffs bc = build_beamformer_coeffs(chs, cur.phases, cur.power, cur.order, cfg);
      std::vector<LinearCut> cuts;
      if (cuts_on) cuts = rated_cuts(bc, cur.beam);
      SolveOutcome bf = solve_beamformer(bc, nu, cuts, cur.beam, settings.solver);
      if (bf.status == SolveStatus::Infeasible && !cuts.empty())
        bf = solve_beamformer(bc, nu, {}, cur.beam, settings.solver);
      status += std::string("/") + to_string(bf.status);
      const double norm = bf.beam.norm();
      if (bf.status != SolveStatus::Infeasible && norm > 0.0) {
        Design cand = cur;
        // The true SINR grows with the scale of f, so the sphere is never worse.
        cand.beam = bf.beam / norm;
        try_accept(std::move(cand));
      }
    }

    // (4) power allocation, iterated to inner convergence
    try {
      PaCoeffs pc = build_pa_coeffs(chs, cur.beam, cur.phases, cur.order, cfg);
      if (!cuts_on) pc.eta.setZero();
      Eigen::VectorXd p = cur.power;
      double prev_inner = std::numeric_limits<double>::quiet_NaN();
      SolveStatus last = SolveStatus::Optimal;
      for (int inner = 0; inner < settings.max_inner; ++inner) {
        ++trace.inner_iterations;
        const Eigen::VectorXd x = aux_update_p(pc, p, settings.aux_form);
        SolveOutcome pa;
        if (goal == Goal::sum_rate) {
          pa = solve_pa_sr(pc, x, settings.solver);
        } else {
          pa = solve_pa_ee(pc, x, aux_update_z(pc, p, x), settings.solver);
        }
        if (pa.status == SolveStatus::Infeasible && (pc.eta.array() > 0.0).any()) {
          pc.eta.setZero();
          --inner;
          continue;
        }
        last = pa.status;
        if (pa.status == SolveStatus::Infeasible) break;
        p = pa.power.cwiseMax(0.0);
        const Eigen::VectorXd gamma = pa_sinr(pc, p);
        const double value = goal == Goal::sum_rate ? sum_rate(gamma) : sum_rate(gamma) / (p.sum() + pc.circuit_power);
        if (std::abs(value - prev_inner) <= settings.inner_tol * std::max(1.0, std::abs(value))) break;
        prev_inner = value;
      }
      status += std::string("/") + to_string(last);
      Design cand = cur;
      cand.power = p;
      try_accept(std::move(cand));
    } catch (const ZeroGainChannel&) {
      status += "/zero-gain";
    } catch (const DomainError&) {
      status += "/domain";
    }

    ++trace.iterations;
    trace.statuses.push_back(status);
    trace.objective.push_back(cur_m.objective);
    const bool improved = cur_m.feasible && (!have_best || cur_m.objective > best_m.objective);
    if (improved) {
      best = cur;
      best_m = cur_m;
      have_best = true;
    }
    trace.accepted.push_back(improved);
    trace.best.push_back(have_best ? best_m.objective : std::numeric_limits<double>::quiet_NaN());

    const bool enforcing = !any_rate || it >= settings.warmup_iters;
    if (enforcing && it > 0 &&
        std::abs(cur_m.objective - prev_obj) <= settings.outer_tol * std::max(std::abs(prev_obj), 1e-12)) {
      trace.converged = true;
      break;
    }
    prev_obj = cur_m.objective;
  }

  trace.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (!have_best) throw InfeasibleProblem("no design met the minimum-rate constraints");
  return {best, trace};
}

}  // namespace

std::pair<Design, AoTrace> algorithm1_sum_rate(const ChannelSet& chs, const SystemConfig& cfg,
                                               const AoSettings& settings, std::mt19937_64& rng) {
  return run_ao(chs, cfg, settings, rng, Goal::sum_rate);
}

std::pair<Design, AoTrace> algorithm2_ee(const ChannelSet& chs, const SystemConfig& cfg,
                                         const AoSettings& settings, std::mt19937_64& rng) {
  return run_ao(chs, cfg, settings, rng, Goal::energy_efficiency);
}

}  // namespace risfp

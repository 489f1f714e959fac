// SPDX-License-Identifier: Apache-2.0
#include "risfp/barrier.hpp"
#include "risfp/convex_solver.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace risfp;

namespace {

struct Instance {
  SystemConfig cfg;
  ChannelSet chs;
  Design d;
};

Instance make(std::uint64_t seed, double err, int m, int nh, int nv, int k, double rth = 0.3) {
  Instance in;
  in.cfg = fixture::small_config(m, nh, nv, k, err, rth);
  std::mt19937_64 rng(seed);
  in.chs = sample_channels(in.cfg, rng);
  in.d = fixture::random_design(in.chs, in.cfg, rng);
  return in;
}

double pa_sr_value(const PaCoeffs& c, const Eigen::VectorXd& x, const Eigen::VectorXd& p) {
  return pa_qt_rate_sum(c, p, x);
}

// Uniform draw from {p >= 0, sum(p) <= P}.
Eigen::VectorXd random_simplex(int k, double budget, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd w(k + 1);
  for (int i = 0; i <= k; ++i) w(i) = e(rng);
  return budget * w.head(k) / w.sum();
}

}  // namespace

TEST(Barrier, BoxConstrainedQuadratic) {
  BarrierProblem p;
  p.dim = 1;
  p.objective = [](const Eigen::VectorXd& z, double& v, Eigen::VectorXd* g, Eigen::MatrixXd* h) {
    v = -(z(0) - 2.0) * (z(0) - 2.0);
    if (g) (*g)(0) = -2.0 * (z(0) - 2.0);
    if (h) (*h)(0, 0) = -2.0;
    return true;
  };
  p.lin_a = Eigen::MatrixXd::Ones(1, 1);
  p.lin_b = Eigen::VectorXd::Ones(1);
  const auto r = barrier_maximize(p, Eigen::VectorXd::Zero(1), {});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.z(0), 1.0, 1e-7);
}

TEST(Barrier, PhaseOneFindsAndRejects) {
  BarrierProblem p;
  p.dim = 2;
  p.objective = [](const Eigen::VectorXd&, double& v, Eigen::VectorXd*, Eigen::MatrixXd*) {
    v = 0.0;
    return true;
  };
  // disc of radius 1 around (3, 0), start at the origin
  p.constraints.push_back([](const Eigen::VectorXd& z, double& v, Eigen::VectorXd* g, Eigen::MatrixXd* h) {
    v = 1.0 - (z(0) - 3.0) * (z(0) - 3.0) - z(1) * z(1);
    if (g) *g << -2.0 * (z(0) - 3.0), -2.0 * z(1);
    if (h) h->diagonal().setConstant(-2.0);
    return true;
  });
  const auto found = barrier_find_interior(p, Eigen::Vector2d::Zero(), {});
  ASSERT_TRUE(found.has_value());
  EXPECT_TRUE(strictly_feasible(p, *found));
  // add x <= 1: empty intersection
  p.lin_a = Eigen::RowVector2d(1.0, 0.0);
  p.lin_b = Eigen::VectorXd::Ones(1);
  EXPECT_FALSE(barrier_find_interior(p, Eigen::Vector2d::Zero(), {}).has_value());
}

TEST(BeamformerSolver, SingleUserMatchedFilter) {
  Instance in = make(1, 0.0, 4, 2, 2, 1, 0.0);
  const auto c = build_beamformer_coeffs(in.chs, in.d.phases, in.d.power, in.d.order, in.cfg);
  const auto y = aux_update_f(c, in.d.beam);
  const auto out = solve_beamformer(c, y, {}, in.d.beam);
  ASSERT_EQ(out.status, SolveStatus::Optimal);
  const Eigen::RowVectorXcd a = c.signal[0];
  // closed form: f = (conj(y) a)^H / |a|, value log2(1 + 2|y||a| - |y|^2 sigma^2)
  const double best = std::log2(1.0 + 2.0 * std::abs(y(0)) * a.norm() - std::norm(y(0)) * c.noise_power);
  EXPECT_NEAR(out.objective, best, 1e-6);
  const Eigen::VectorXcd mf = (std::conj(y(0)) * a).adjoint().normalized();
  EXPECT_LT((out.beam - mf).norm(), 1e-3);
}

TEST(BeamformerSolver, ScalarBoundary) {
  BeamformerCoeffs c;
  c.signal = {Eigen::RowVectorXcd::Constant(1, cplx(2.0, 0.0))};
  c.interference = {Eigen::MatrixXcd::Zero(1, 1)};
  c.error_cov = {Eigen::MatrixXcd::Zero(1, 1)};
  c.min_rate = {Eigen::MatrixXcd::Constant(1, 1, cplx(4.0, 0.0))};
  c.eta = Eigen::VectorXd::Zero(1);
  const auto out = solve_beamformer(c, Eigen::VectorXcd::Constant(1, cplx(0.5, 0.0)), {},
                                    Eigen::VectorXcd::Constant(1, cplx(0.3, 0.0)));
  ASSERT_EQ(out.status, SolveStatus::Optimal);
  EXPECT_NEAR(std::abs(out.beam(0) - cplx(1.0, 0.0)), 0.0, 1e-6);
}

TEST(BeamformerSolver, BeatsRandomFeasibleSamples) {
  const Instance in = make(3, 0.05, 4, 2, 2, 2);
  const auto c = build_beamformer_coeffs(in.chs, in.d.phases, in.d.power, in.d.order, in.cfg);
  const auto y = aux_update_f(c, in.d.beam);
  const auto start = beamformer_objective(c, y, in.d.beam);
  const auto out = solve_beamformer(c, y, {}, in.d.beam);
  ASSERT_TRUE(out.ok());
  EXPECT_GE(out.objective, start - 1e-6);
  EXPECT_NEAR(out.objective, beamformer_objective(c, y, out.beam), 1e-8);
  std::mt19937_64 rng(4);
  double sampled = -1e300;
  for (int t = 0; t < 10000; ++t) {
    const auto f = fixture::random_unit(4, rng);
    const double v = beamformer_objective(c, y, f);
    if (std::isfinite(v)) sampled = std::max(sampled, v);
  }
  EXPECT_GE(out.objective, sampled - 1e-9);
}

TEST(BeamformerSolver, CutsRespectedAndAscent) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Instance in = make(100 + s, 0.05, 4, 2, 2, 2, 0.1);
    const auto c = build_beamformer_coeffs(in.chs, in.d.phases, in.d.power, in.d.order, in.cfg);
    const auto gamma = beamformer_sinr(c, in.d.beam);
    if ((gamma.array() < c.eta.array()).any()) continue;  // expansion point must be feasible
    const auto y = aux_update_f(c, in.d.beam);
    const auto cuts = sca_linearize_minrate(c, in.d.beam);
    const auto out = solve_beamformer(c, y, cuts, in.d.beam);
    ASSERT_TRUE(out.ok());
    EXPECT_GE(out.objective, beamformer_objective(c, y, in.d.beam) - 1e-6);
    for (const auto& cut : cuts) EXPECT_GE(std::real(cut.normal.dot(out.beam)) - cut.rhs, -1e-7);
  }
}

TEST(BeamformerSolver, InfeasibleCuts) {
  const Instance in = make(5, 0.0, 4, 2, 2, 1, 0.0);
  const auto c = build_beamformer_coeffs(in.chs, in.d.phases, in.d.power, in.d.order, in.cfg);
  LinearCut impossible{Eigen::VectorXcd::Unit(4, 0), 5.0};  // Re f_0 >= 5 with |f| <= 1
  const auto out = solve_beamformer(c, aux_update_f(c, in.d.beam), {impossible}, in.d.beam);
  EXPECT_EQ(out.status, SolveStatus::Infeasible);
}

TEST(RisSdp, ConstantObjectiveReturnsFeasiblePsi) {
  const Instance in = make(6, 0.0, 4, 2, 2, 1, 0.0);
  const auto rc = build_ris_coeffs(in.chs, in.d.beam, in.d.power, in.d.order, Eigen::VectorXcd::Zero(1), in.cfg);
  const auto out = solve_ris_sdp(rc);
  ASSERT_TRUE(out.ok());
  EXPECT_NEAR(out.objective, 0.0, 1e-12);
  EXPECT_LT((out.lifted.diagonal().real().array() - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(RisSdp, SingleElementPhaseGrid) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Instance in = make(30 + s, 0.05, 3, 1, 1, 2, 0.0);
    const auto nu = aux_update_psi(in.chs, in.d.beam, in.d.phases, in.d.power, in.d.order, in.cfg);
    const auto rc = build_ris_coeffs(in.chs, in.d.beam, in.d.power, in.d.order, nu, in.cfg);
    const auto out = solve_ris_sdp(rc, {}, in.d.phases);
    ASSERT_TRUE(out.ok());
    double grid = -1e300;
    for (int q = 0; q < 3600; ++q) {
      const auto psi = Eigen::VectorXcd::Constant(1, std::polar(1.0, 2.0 * std::numbers::pi * q / 3600));
      double v = 0.0;
      for (double g : ris_lifted_qt_sinr(rc, psi)) v += std::log2(1.0 + g);
      grid = std::max(grid, v);
    }
    EXPECT_GE(out.objective, grid - 1e-7);
    EXPECT_NEAR(out.objective, ris_sdp_objective(rc, out.lifted), 1e-8);
  }
}

TEST(RisSdp, UnitDiagonalAndPsd) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Instance in = make(200 + s, s % 2 ? 0.05 : 0.0, 4, 4, 4, 3, 0.1);
    const auto nu = aux_update_psi(in.chs, in.d.beam, in.d.phases, in.d.power, in.d.order, in.cfg);
    RisCoeffs rc;
    try {
      rc = build_ris_coeffs(in.chs, in.d.beam, in.d.power, in.d.order, nu, in.cfg);
    } catch (const MinRateDegenerate&) {
      rc = build_ris_coeffs(in.chs, in.d.beam, in.d.power, in.d.order, nu, in.cfg, false);
    }
    const auto out = solve_ris_sdp(rc, {}, in.d.phases);
    if (out.status == SolveStatus::Infeasible) continue;
    EXPECT_LT((out.lifted.diagonal().array() - 1.0).abs().maxCoeff(), 1e-7);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(out.lifted);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-7);
    for (int k = 0; k < 3; ++k) {
      if (!rc.cut_active[k]) continue;
      const double tr = std::real(out.lifted.transpose().cwiseProduct(rc.min_rate[k]).sum());
      EXPECT_GE(tr, rc.threshold(k) - 1e-7);
    }
    // the warm start is feasible for the relaxation, so the optimum is no worse
    Eigen::VectorXcd lifted(17);
    lifted << in.d.phases, 1.0;
    double start = 0.0;
    for (double g : ris_lifted_qt_sinr(rc, in.d.phases)) start += std::log2(1.0 + g);
    EXPECT_GE(out.objective, start - 1e-6);
  }
}

TEST(RisSdp, Deterministic) {
  const Instance in = make(9, 0.05, 4, 2, 4, 2);
  const auto nu = aux_update_psi(in.chs, in.d.beam, in.d.phases, in.d.power, in.d.order, in.cfg);
  const auto rc = build_ris_coeffs(in.chs, in.d.beam, in.d.power, in.d.order, nu, in.cfg, false);
  EXPECT_EQ(solve_ris_sdp(rc, {}, in.d.phases).lifted, solve_ris_sdp(rc, {}, in.d.phases).lifted);
}

TEST(PaSolver, SingleUserUsesFullBudget) {
  PaCoeffs c;
  c.noise = Eigen::VectorXd::Constant(1, 0.5);
  c.error = Eigen::VectorXd::Zero(1);
  c.eta = Eigen::VectorXd::Zero(1);
  c.power_budget = 7.0;
  c.circuit_power = 1.0;
  c.order = {0};
  const auto out = solve_pa_sr(c, Eigen::VectorXd::Constant(1, 0.4));
  ASSERT_EQ(out.status, SolveStatus::Optimal);
  EXPECT_NEAR(out.power(0), 7.0, 1e-6);
}

TEST(PaSolver, ZeroAuxReturnsMinimumPower) {
  const Instance in = make(10, 0.05, 4, 2, 2, 3);
  const auto c = build_pa_coeffs(in.chs, in.d.beam, in.d.phases, in.d.order, in.cfg);
  const auto pmin = pa_min_power(c);
  ASSERT_TRUE(pmin.has_value());
  const auto out = solve_pa_sr(c, Eigen::VectorXd::Zero(3));
  ASSERT_EQ(out.status, SolveStatus::Optimal);
  EXPECT_LT((out.power - *pmin).norm(), 1e-12);
  // every min-rate constraint is tight at the minimum-power point
  EXPECT_LT((pa_sinr(c, *pmin) - c.eta).cwiseAbs().maxCoeff(), 1e-9);
  const auto ee = solve_pa_ee(c, aux_update_p(c, in.d.power), 0.0);
  EXPECT_LT((ee.power - *pmin).norm(), 1e-12);
}

TEST(PaSolver, SumRateBeatsSamples) {
  int tested = 0;
  for (std::uint64_t s = 0; s < 6; ++s) {
    const Instance in = make(50 + s, 0.05, 4, 2, 2, 2, 0.2);
    const auto c = build_pa_coeffs(in.chs, in.d.beam, in.d.phases, in.d.order, in.cfg);
    if (!pa_min_power(c)) {
      EXPECT_EQ(solve_pa_sr(c, aux_update_p(c, in.d.power)).status, SolveStatus::Infeasible);
      continue;
    }
    ++tested;
    const auto x = aux_update_p(c, in.d.power);
    const auto out = solve_pa_sr(c, x);
    ASSERT_TRUE(out.ok());
    EXPECT_LE(pa_residual(c, out.power), 1e-7);
    EXPECT_NEAR(out.objective, pa_sr_value(c, x, out.power), 1e-8);
    std::mt19937_64 rng(s);
    double sampled = -1e300;
    for (int t = 0; t < 100000; ++t) {
      const auto p = random_simplex(2, c.power_budget, rng);
      if (pa_residual(c, p) > 0.0) continue;
      sampled = std::max(sampled, pa_sr_value(c, x, p));
    }
    EXPECT_GE(out.objective, sampled - 1e-7);
  }
  EXPECT_GE(tested, 2);
}

TEST(PaSolver, InfeasibleThresholds) {
  Instance in = make(11, 0.0, 4, 2, 2, 3, 6.0);
  const auto c = build_pa_coeffs(in.chs, in.d.beam, in.d.phases, in.d.order, in.cfg);
  EXPECT_FALSE(pa_min_power(c).has_value());
  EXPECT_EQ(solve_pa_sr(c, aux_update_p(c, in.d.power)).status, SolveStatus::Infeasible);
}

TEST(PaSolver, EnergyEfficiencyGoldenSection) {
  PaCoeffs c;
  c.noise = Eigen::VectorXd::Constant(1, 0.2);
  c.error = Eigen::VectorXd::Constant(1, 0.01);
  c.eta = Eigen::VectorXd::Zero(1);
  c.power_budget = 100.0;
  c.circuit_power = 50.0;
  c.order = {0};
  const Eigen::VectorXd p0 = Eigen::VectorXd::Constant(1, 10.0);
  const auto x = aux_update_p(c, p0);
  const double z = aux_update_z(c, p0, x);
  const auto out = solve_pa_ee(c, x, z);
  ASSERT_EQ(out.status, SolveStatus::Optimal);
  auto f = [&](double p) { return ee_qt_objective(c, Eigen::VectorXd::Constant(1, p), x, z); };
  double lo = 1e-9, hi = 100.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    (f(a) < f(b) ? lo : hi) = (f(a) < f(b) ? a : b);
  }
  EXPECT_LT(out.power(0), 100.0 - 1e-3);
  EXPECT_NEAR(out.power(0), 0.5 * (lo + hi), 1e-4);
  EXPECT_NEAR(out.objective, f(out.power(0)), 1e-12);
}

TEST(PaSolver, EnergyEfficiencyBeatsSamples) {
  const Instance in = make(60, 0.05, 4, 2, 2, 2, 0.2);
  const auto c = build_pa_coeffs(in.chs, in.d.beam, in.d.phases, in.d.order, in.cfg);
  const auto x = aux_update_p(c, in.d.power);
  const double z = aux_update_z(c, in.d.power, x);
  const auto out = solve_pa_ee(c, x, z);
  ASSERT_TRUE(out.ok());
  std::mt19937_64 rng(6);
  double sampled = -1e300;
  for (int t = 0; t < 100000; ++t) {
    const auto p = random_simplex(2, c.power_budget, rng);
    if (pa_residual(c, p) > 0.0) continue;
    sampled = std::max(sampled, ee_qt_objective(c, p, x, z));
  }
  EXPECT_GE(out.objective, sampled - 1e-7);
}

// SPDX-License-Identifier: Apache-2.0
#include "risfp/baselines.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace risfp;

namespace {

ChannelSet channels(const SystemConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_channels(cfg, rng);
}

double capacity(const Eigen::VectorXd& gains, const Eigen::VectorXd& q, double noise) {
  return (1.0 + gains.array() * q.array() / noise).log().sum() / std::log(2.0);
}

}  // namespace

TEST(Wmse, ZeroPowerGivesUnitError) {
  const auto cfg = fixture::small_config(4, 2, 2, 2);
  const auto chs = channels(cfg, 1);
  std::mt19937_64 rng(1);
  Design d = fixture::random_design(chs, cfg, rng);
  d.power.setZero();
  const auto st = wmse_oracle(d, chs, cfg);
  EXPECT_LT((st.e_mmse.array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_LT(st.u.norm(), 1e-12);
}

TEST(Wmse, SingleUserClosedForm) {
  const auto cfg = fixture::small_config(4, 2, 2, 1, 0.05);
  const auto chs = channels(cfg, 2);
  std::mt19937_64 rng(2);
  const Design d = fixture::random_design(chs, cfg, rng);
  const double g2 = std::norm(effective_gain(chs, d.phases, d.beam, 0));
  const double r = residual_coeff(chs, d.beam, cfg)(0);
  const double p = d.power(0);
  const auto st = wmse_oracle(d, chs, cfg);
  EXPECT_NEAR(st.e_mmse(0), (1.0 + r * p) / (1.0 + r * p + g2 * p), 1e-12);
}

TEST(Wmse, RateIdentityOnRandomDesigns) {
  const auto cfg = fixture::small_config(4, 2, 3, 3, 0.05);
  const auto chs = channels(cfg, 3);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Design d = fixture::random_design(chs, cfg, rng);
    const auto st = wmse_oracle(d, chs, cfg);
    const auto gamma = sinr(d, chs, cfg);
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(st.w(k) * st.e(k), 1.0, 1e-9);
      EXPECT_NEAR(std::log2(st.w(k)), std::log2(1.0 + gamma(k)), 1e-9);
      EXPECT_NEAR(wmse_error(st.u(k), d, chs, cfg, k), st.e_mmse(k), 1e-9);
      // the receiver minimises the error
      const cplx other = st.u(k) * cplx(1.05, 0.02);
      EXPECT_GE(wmse_error(other, d, chs, cfg, k), st.e_mmse(k) - 1e-12);
    }
  }
}

TEST(Waterfill, EqualGainsSplitEvenly) {
  const auto q = waterfill(Eigen::Vector3d::Constant(2.0), 9.0, 1.0);
  EXPECT_LT((q.array() - 3.0).abs().maxCoeff(), 1e-10);
}

TEST(Waterfill, WeakStreamBelowThreshold) {
  // level with one stream: mu = 1 + 1/4 = 1.25 < 1/0.5; the weak stream stays off
  const auto q = waterfill(Eigen::Vector2d(4.0, 0.5), 1.0, 1.0);
  EXPECT_NEAR(q(0), 1.0, 1e-10);
  EXPECT_EQ(q(1), 0.0);
  // with more budget both are active: mu = (5 + 0.25 + 2) / 2
  const auto q2 = waterfill(Eigen::Vector2d(4.0, 0.5), 5.0, 1.0);
  EXPECT_NEAR(q2(0), 3.625 - 0.25, 1e-10);
  EXPECT_NEAR(q2(1), 3.625 - 2.0, 1e-10);
}

TEST(Waterfill, KktAndSamples) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int inst = 0; inst < 5; ++inst) {
    Eigen::VectorXd g(4);
    for (int i = 0; i < 4; ++i) g(i) = u(rng);
    const double budget = 2.0 * u(rng), noise = 0.5;
    const auto q = waterfill(g, budget, noise);
    EXPECT_NEAR(q.sum(), budget, 1e-10);
    EXPECT_GE(q.minCoeff(), 0.0);
    const double mu = water_level(g, q, noise);
    for (int i = 0; i < 4; ++i) {
      if (q(i) > 0.0) EXPECT_NEAR(q(i) + noise / g(i), mu, 1e-9);
      else EXPECT_GE(noise / g(i), mu - 1e-9);
    }
    const double best = capacity(g, q, noise);
    std::exponential_distribution<double> e(1.0);
    for (int t = 0; t < 100000 / 5; ++t) {
      Eigen::VectorXd w(4);
      for (int i = 0; i < 4; ++i) w(i) = e(rng);
      EXPECT_LE(capacity(g, budget * w / w.sum(), noise), best + 1e-12);
    }
  }
}

TEST(Waterfill, ZeroGainStreamAndErrors) {
  const auto q = waterfill(Eigen::Vector2d(1.0, 0.0), 2.0, 1.0);
  EXPECT_NEAR(q(0), 2.0, 1e-12);
  EXPECT_EQ(q(1), 0.0);
  EXPECT_THROW(waterfill(Eigen::Vector2d::Zero(), 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(waterfill(Eigen::Vector2d(1.0, -1.0), 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(waterfill(Eigen::Vector2d(1.0, 1.0), 0.0, 1.0), std::invalid_argument);
}

TEST(SvdWf, SingleUserIsMatchedFilter) {
  const auto cfg = fixture::small_config(4, 2, 2, 1);
  const auto chs = channels(cfg, 5);
  const auto res = svd_wf_baseline(chs, cfg);
  const double g2 = effective_channel(chs, res.phases, 0).squaredNorm();
  EXPECT_NEAR(res.sum_rate, std::log2(1.0 + cfg.power_budget * g2 / cfg.noise_power), 1e-9);
  EXPECT_NEAR(res.total_tx_power, cfg.power_budget, 1e-9);
  EXPECT_NEAR(res.ee, res.sum_rate / (cfg.power_budget + circuit_power(cfg, Architecture::fully_digital)), 1e-12);
}

TEST(SvdWf, AtLeastSingleStream) {
  const auto cfg = fixture::small_config(4, 2, 2, 3);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto chs = channels(cfg, 10 + s);
    const auto res = svd_wf_baseline(chs, cfg);
    Eigen::MatrixXcd g(3, 4);
    for (int k = 0; k < 3; ++k) g.row(k) = effective_channel(chs, res.phases, k);
    const double s1 = Eigen::JacobiSVD<Eigen::MatrixXcd>(g).singularValues()(0);
    EXPECT_GE(res.sum_rate, std::log2(1.0 + cfg.power_budget * s1 * s1 / cfg.noise_power) - 1e-9);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(res.phases(i)), 1.0, 1e-12);
  }
}

TEST(Oma, SingleUserEqualsNoma) {
  const auto cfg = fixture::small_config(4, 2, 2, 1, 0.05);
  const auto chs = channels(cfg, 6);
  const auto res = oma_tdma_baseline(chs, cfg);
  Design d;
  d.phases = res.phases;
  const Eigen::RowVectorXcd g = effective_channel(chs, d.phases, 0);
  d.beam = g.adjoint() / g.norm();
  d.power = Eigen::VectorXd::Constant(1, cfg.power_budget);
  d.order = {0};
  EXPECT_NEAR(res.sum_rate, sum_rate(d, chs, cfg), 1e-12);
}

TEST(Oma, SymmetricUsersShareEqually) {
  auto cfg = fixture::small_config(4, 2, 2, 2);
  auto chs = channels(cfg, 7);
  chs.ris_user[1] = chs.ris_user[0];
  chs.ris_user_true[1] = chs.ris_user_true[0];
  const auto res = oma_tdma_baseline(chs, cfg);
  EXPECT_NEAR(res.rates(0), res.rates(1), 1e-12);
}

TEST(Oma, TwoSlotsByHand) {
  const auto cfg = fixture::small_config(4, 2, 2, 2, 0.05);
  const auto chs = channels(cfg, 8);
  const auto res = oma_tdma_baseline(chs, cfg);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(chs.bs_ris, Eigen::ComputeThinV);
  double total = 0.0;
  for (int k = 0; k < 2; ++k) {
    const auto psi = align_phases(chs, svd.matrixV().col(0), k);
    const Eigen::RowVectorXcd g = effective_channel(chs, psi, k);
    const Eigen::VectorXcd f = g.adjoint() / g.norm();
    const double r = residual_coeff(chs, f, cfg)(k);
    const double gamma = g.squaredNorm() * cfg.power_budget / (cfg.noise_power + r * cfg.power_budget);
    EXPECT_NEAR(res.rates(k), 0.5 * std::log2(1.0 + gamma), 1e-9);
    total += 0.5 * std::log2(1.0 + gamma);
  }
  EXPECT_NEAR(res.sum_rate, total, 1e-9);
  EXPECT_NEAR(res.ee, total / (cfg.power_budget + circuit_power(cfg, Architecture::analog_ris)), 1e-12);
}

TEST(Oma, AlignedPhasesCoPhaseTheCascade) {
  const auto cfg = fixture::small_config(4, 2, 2, 2);
  const auto chs = channels(cfg, 9);
  std::mt19937_64 rng(9);
  const auto f = fixture::random_unit(4, rng);
  const auto psi = align_phases(chs, f, 1);
  const Eigen::VectorXcd c = cascade_matrix(chs, 1) * f;
  EXPECT_NEAR(std::abs(effective_gain(chs, psi, f, 1)), c.cwiseAbs().sum(), 1e-9);
}

// SPDX-License-Identifier: Apache-2.0
#include "risfp/channel.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace risfp;

TEST(Steering, UlaPhaseProgression) {
  const double theta = 0.7;
  const auto a = steering_ula(theta, 6);
  EXPECT_NEAR(a.norm(), 1.0, 1e-14);
  for (int i = 0; i < 6; ++i) {
    const cplx expected = std::exp(cplx(0.0, -std::numbers::pi * i * std::cos(theta))) / std::sqrt(6.0);
    EXPECT_NEAR(std::abs(a(i) - expected), 0.0, 1e-14);
  }
}

TEST(Steering, UlaFloatScalar) {
  const CVector<float> a = steering_ula<float>(0.3f, 8);
  EXPECT_NEAR(a.norm(), 1.0f, 1e-6f);
}

TEST(Steering, UpaIsScaledKronecker) {
  const double theta = 0.4, phi = -0.9;
  const int nh = 3, nv = 5;
  Eigen::VectorXcd ah(nh), av(nv);
  for (int h = 0; h < nh; ++h) ah(h) = std::exp(cplx(0.0, -std::numbers::pi * h * std::cos(theta)));
  for (int v = 0; v < nv; ++v) av(v) = std::exp(cplx(0.0, -std::numbers::pi * v * std::cos(phi) * std::sin(theta)));
  const auto a = steering_upa(theta, phi, nh, nv);
  for (int h = 0; h < nh; ++h)
    for (int v = 0; v < nv; ++v)
      EXPECT_NEAR(std::abs(a(h * nv + v) - ah(h) * av(v) / std::sqrt(15.0)), 0.0, 1e-14);
}

TEST(Steering, RejectsEmptyArrays) {
  EXPECT_THROW(steering_ula(0.1, 0), std::invalid_argument);
  EXPECT_THROW(steering_upa(0.1, 0.2, 0, 3), std::invalid_argument);
}

TEST(ChannelModel, SinglePathIsRankOne) {
  const BsRisPath path{cplx(0.6, -0.8), 0.2, -0.5, 0.3};
  const auto h = bs_ris_channel(std::span<const BsRisPath>(&path, 1), 4, 2, 3);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
  EXPECT_NEAR(svd.singularValues()(1), 0.0, 1e-12);
  // sqrt(N / S) |alpha| with unit-norm steering vectors
  EXPECT_NEAR(svd.singularValues()(0), std::sqrt(6.0), 1e-12);
}

TEST(ChannelModel, SampleShapesAndPerfectCsi) {
  const SystemConfig cfg = fixture::small_config(4, 2, 3, 2);
  std::mt19937_64 rng(3);
  const ChannelSet chs = sample_channels(cfg, rng);
  EXPECT_EQ(chs.antennas(), 4);
  EXPECT_EQ(chs.elements(), 6);
  EXPECT_EQ(chs.users(), 2);
  EXPECT_EQ(chs.bs_ris, chs.bs_ris_true);
  EXPECT_EQ(chs.ris_user[1], chs.ris_user_true[1]);
}

TEST(ChannelModel, ErrorVarianceMatchesConfiguration) {
  SystemConfig cfg = fixture::small_config(8, 4, 4, 2, 0.05);
  std::mt19937_64 rng(11);
  double acc = 0.0;
  int count = 0;
  for (int t = 0; t < 200; ++t) {
    const ChannelSet chs = sample_channels(cfg, rng);
    acc += (chs.bs_ris_true - chs.bs_ris).squaredNorm();
    count += static_cast<int>(chs.bs_ris.size());
  }
  EXPECT_NEAR(acc / count, 0.05, 0.05 * 0.03);
}

TEST(ChannelModel, TrueChannelsSharedAcrossErrorVariances) {
  SystemConfig a = fixture::small_config(4, 2, 2, 2, 0.0);
  SystemConfig b = a;
  b.error_variance = 0.1;
  std::mt19937_64 ra(5), rb(5);
  const ChannelSet ca = sample_channels(a, ra);
  const ChannelSet cb = sample_channels(b, rb);
  EXPECT_EQ(ca.bs_ris_true, cb.bs_ris_true);
  EXPECT_NE(ca.bs_ris, cb.bs_ris);
}

TEST(ChannelModel, EffectiveGainMatchesDirectProduct) {
  const SystemConfig cfg = fixture::small_config(4, 2, 3, 3);
  std::mt19937_64 rng(9);
  const ChannelSet chs = sample_channels(cfg, rng);
  const auto psi = fixture::random_phases(6, rng);
  const auto f = fixture::random_unit(4, rng);
  for (int k = 0; k < 3; ++k) {
    const cplx direct = (chs.ris_user[k].adjoint() * psi.asDiagonal() * chs.bs_ris * f).value();
    EXPECT_NEAR(std::abs(effective_gain(chs, psi, f, k) - direct), 0.0, 1e-12);
    const cplx cascaded = (psi.transpose() * (cascade_matrix(chs, k) * f)).value();
    EXPECT_NEAR(std::abs(cascaded - direct), 0.0, 1e-12);
  }
  EXPECT_THROW(effective_channel(chs, psi, 3), std::out_of_range);
}

// Monte Carlo estimate of E|v_k|^2 / sum(p) for the residual error term
// (L_k^H Phi H f + h_k^H Phi L f + L_k^H Phi L f).
TEST(ChannelModel, ResidualCoefficientMatchesMonteCarlo) {
  SystemConfig cfg = fixture::small_config(3, 2, 2, 1, 0.2);
  std::mt19937_64 rng(21);
  const ChannelSet chs = sample_channels(cfg, rng);
  const auto psi = fixture::random_phases(4, rng);
  const Eigen::VectorXcd f = 0.8 * fixture::random_unit(3, rng);
  const Eigen::VectorXcd hf = chs.bs_ris * f;
  const double s = std::sqrt(cfg.error_variance);
  const int draws = 200000;
  double acc = 0.0;
  for (int t = 0; t < draws; ++t) {
    Eigen::MatrixXcd big(4, 3);
    Eigen::VectorXcd small(4);
    for (Eigen::Index i = 0; i < big.size(); ++i) big.data()[i] = s * complex_normal(rng);
    for (int i = 0; i < 4; ++i) small(i) = s * complex_normal(rng);
    const cplx v = (small.adjoint() * psi.asDiagonal() * hf).value() +
                   (chs.ris_user[0].adjoint() * psi.asDiagonal() * big * f).value() +
                   (small.adjoint() * psi.asDiagonal() * big * f).value();
    acc += std::norm(v);
  }
  const double r = residual_coeff(chs, f, cfg)(0);
  EXPECT_NEAR(acc / draws, r, 0.01 * r);
}

TEST(ChannelModel, SameSeedSameRealisation) {
  const SystemConfig cfg = fixture::small_config(4, 2, 2, 2, 0.05);
  std::mt19937_64 a(77), b(77);
  const ChannelSet x = sample_channels(cfg, a);
  const ChannelSet y = sample_channels(cfg, b);
  EXPECT_EQ(x.bs_ris, y.bs_ris);
  EXPECT_EQ(x.ris_user[0], y.ris_user[0]);
}

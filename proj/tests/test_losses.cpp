#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "diskcover/adam.hpp"
#include "diskcover/gradcheck.hpp"
#include "diskcover/losses.hpp"
#include "diskcover/projection.hpp"
#include "oracles.hpp"

using namespace diskcover;

TEST(Bce, HalfEverywhereIsLn2) {
  const ScalarField p(4, 3, std::vector<double>(12, 0.5));
  BinaryMask gt(4, 3);
  gt.set(1, 1, true);
  gt.set(3, 0, true);
  EXPECT_NEAR(bce_loss(p, gt), std::log(2.0), 1e-12);
}

TEST(Bce, PerfectPredictionIsNearZero) {
  const BinaryMask gt(3, 1, {1, 0, 1});
  const ScalarField p(3, 1, {1.0, 0.0, 1.0});
  EXPECT_LE(bce_loss(p, gt), 2e-7 * std::abs(std::log(kProbClamp)));
}

TEST(Bce, HandEvaluatedPair) {
  const BinaryMask gt(2, 1, {1, 0});
  const ScalarField p(2, 1, {0.8, 0.4});
  EXPECT_NEAR(bce_loss(p, gt), 0.366985, 1e-6);
  EXPECT_NEAR(bce_loss(p, gt), (-std::log(0.8) - std::log(0.6)) / 2.0, 1e-15);
}

TEST(Bce, DimensionMismatch) {
  EXPECT_THROW(bce_loss(ScalarField(2, 2), BinaryMask(2, 3)), Error);
}

TEST(Dice, PredictionEqualsTruth) {
  const BinaryMask gt(5, 1, {1, 1, 0, 1, 0});
  const ScalarField p(5, 1, {1, 1, 0, 1, 0});
  EXPECT_NEAR(dice_loss(p, gt, 1.0), 1.0 - 6.0 / 7.0, 1e-15);
}

TEST(Dice, ZeroPredictionIsOne) {
  const BinaryMask gt(3, 1, {1, 1, 0});
  EXPECT_EQ(dice_loss(ScalarField(3, 1), gt, 1.0), 1.0);
  EXPECT_EQ(dice_loss(ScalarField(3, 1), BinaryMask(3, 1), 1.0), 1.0);
}

TEST(Dice, DimensionMismatch) {
  EXPECT_THROW(dice_loss(ScalarField(2, 2), BinaryMask(3, 2), 1.0), Error);
}

TEST(Gradient, SymmetricTargetHasZeroCenterGradient) {
  const BinaryMask gt = oracle::disk_mask(64, 64, 32.0, 32.0, 12.0);
  const DiskSet d({{32.0, 32.0}}, {8.0}, {0});
  for (auto kind : {LossKind::dice, LossKind::bce}) {
    const auto g = loss_gradient(d, gt, kind, 1.0, 64, 64);
    EXPECT_NEAR(g.d_centers[0].x, 0.0, 1e-8);
    EXPECT_NEAR(g.d_centers[0].y, 0.0, 1e-8);
  }
}

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.25, 0.75);
  std::uniform_real_distribution<double> us(2.0, 7.0);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + trial % 4;
    const int m = trial % 2 ? n : 1;
    std::vector<Point> c;
    for (int i = 0; i < n; ++i) c.push_back({u(rng) * 40, u(rng) * 36});
    std::vector<double> s;
    for (int j = 0; j < m; ++j) s.push_back(us(rng));
    const DiskSet d(c, s, make_assoc(n, m, assoc_kind_for(n, m)));
    const BinaryMask gt = oracle::disk_mask(40, 36, 19.0, 17.0, 9.0);
    for (auto kind : {LossKind::dice, LossKind::bce}) {
      const auto a = loss_gradient(d, gt, kind, 1.0, 40, 36).flatten();
      const auto f = finite_difference_gradient(d, gt, kind, 1.0, 1e-4).flatten();
      ASSERT_EQ(a.size(), f.size());
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_LT(relative_error(a[k], f[k], kGradRelFloor), 1e-4) << k;
    }
  }
}

TEST(Gradient, SharedSigmaSumsIndividualGradients) {
  const BinaryMask gt = oracle::disk_mask(48, 48, 22.0, 25.0, 11.0);
  const DiskSet shared({{18.3, 21.7}, {27.9, 26.2}}, {4.5}, {0, 0});
  const DiskSet split({{18.3, 21.7}, {27.9, 26.2}}, {4.5, 4.5}, {0, 1});
  for (auto kind : {LossKind::dice, LossKind::bce}) {
    const auto gs = loss_gradient(shared, gt, kind, 1.0, 48, 48);
    const auto gi = loss_gradient(split, gt, kind, 1.0, 48, 48);
    EXPECT_NEAR(gs.d_log_sigmas[0], gi.d_log_sigmas[0] + gi.d_log_sigmas[1], 1e-12);
    EXPECT_EQ(gs.d_centers, gi.d_centers);
  }
}

TEST(Gradient, NegativeGradientStepReducesLoss) {
  const BinaryMask gt = oracle::rect_mask(48, 40, 10, 12, 26, 14);
  const DiskSet d({{20.0, 17.0}, {30.0, 21.0}}, {3.0, 4.0}, {0, 1});
  for (auto kind : {LossKind::dice, LossKind::bce}) {
    const auto lg = loss_and_gradient(d, gt, kind, 1.0);
    auto p = pack_params(d);
    const auto g = lg.gradient.flatten();
    for (std::size_t k = 0; k < p.size(); ++k) p[k] -= 1e-3 * g[k];
    EXPECT_LT(loss_value(unpack_params(p, d.assoc()), gt, kind, 1.0), lg.loss);
  }
}

TEST(Gradient, LossAgreesWithComposedPieces) {
  const BinaryMask gt = oracle::disk_mask(30, 30, 15.0, 15.0, 7.0);
  const DiskSet d({{14.0, 16.0}}, {5.0}, {0});
  const ScalarField p = normalize_tanh(gaussian_field(d, 30, 30));
  EXPECT_NEAR(loss_and_gradient(d, gt, LossKind::dice, 1.0).loss, dice_loss(p, gt, 1.0), 1e-14);
  EXPECT_NEAR(loss_and_gradient(d, gt, LossKind::bce, 1.0).loss, bce_loss(p, gt), 1e-14);
}

TEST(Gradient, DimensionMismatchIsRejected) {
  const DiskSet d({{4.0, 4.0}}, {2.0}, {0});
  EXPECT_THROW(loss_gradient(d, BinaryMask(8, 8), LossKind::dice, 1.0, 9, 8), Error);
}

TEST(FiniteDifference, QuadraticStub) {
  const std::vector<double> theta = {0.3, -1.2, 2.5, 0.0};
  const auto g = finite_difference_gradient(
      [](std::span<const double> t) {
        double s = 0.0;
        for (double v : t) s += v * v;
        return s;
      },
      theta, 1e-3);
  for (std::size_t k = 0; k < theta.size(); ++k) EXPECT_NEAR(g[k], 2.0 * theta[k], 1e-9);
}

TEST(FiniteDifference, ZeroStepIsRejected) {
  const DiskSet d({{4.0, 4.0}}, {2.0}, {0});
  try {
    finite_difference_gradient(d, BinaryMask(8, 8), LossKind::dice, 1.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Params, PackUnpackRoundTrip) {
  const DiskSet d({{1.5, 2.5}, {3.25, -4.0}, {7.0, 8.0}}, {0.75, 3.0}, {1, 0, 1});
  const auto p = pack_params(d);
  EXPECT_EQ(p.size(), 8u);
  const DiskSet back = unpack_params(p, d.assoc());
  EXPECT_EQ(back.centers()[1], d.centers()[1]);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(back.sigmas()[j], d.sigmas()[j], 1e-15);
}

TEST(GradCheck, SmallSeededRunPasses) {
  const auto report = run_grad_check(3, 16, 1e-4, 48);
  EXPECT_EQ(report.cases.size(), 16u);
  EXPECT_LT(report.max_rel_error, 1e-4);
}

TEST(AdamOptimizer, ConvergesOnQuadratic) {
  Adam adam(2, 0.05, 0.9, 0.999, 1e-8);
  std::vector<double> x = {3.0, -2.0};
  for (int k = 0; k < 2000; ++k) adam.step(x, std::vector<double>{2.0 * x[0], 2.0 * x[1]});
  EXPECT_NEAR(x[0], 0.0, 1e-2);
  EXPECT_NEAR(x[1], 0.0, 1e-2);
  EXPECT_EQ(adam.steps(), 2000);
}

TEST(AdamOptimizer, FirstStepHasStepSizeMagnitude) {
  Adam adam(1, 0.05, 0.9, 0.999, 1e-8);
  std::vector<double> x = {1.0};
  adam.step(x, std::vector<double>{123.0});
  EXPECT_NEAR(x[0], 0.95, 1e-9);
}

#include "nnstat/effects.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nnstat/error.hpp"
#include "nnstat/fit.hpp"
#include "test_util.hpp"

namespace nnstat {
namespace {

using testing_util::fd_gradient;
using testing_util::oracle_forward;
using testing_util::random_data;
using testing_util::random_theta;

Architecture Arch(int p, int q,
                  OutputActivation out = OutputActivation::kIdentity) {
  Architecture a;
  a.p = p;
  a.q = q;
  a.output = out;
  return a;
}

CovarianceEstimate IdentityCov(int r) {
  return sandwich_covariance(Eigen::MatrixXd::Identity(r, r), 0.0);
}

TEST(PartialDependenceTest, SingleRowEqualsForward) {
  std::mt19937_64 rng(1);
  const Architecture arch = Arch(3, 2);
  const ParamVector t = random_theta(arch, rng);
  const Dataset d = random_data(arch, t, 1, rng);
  double row[3] = {d.x(0, 0), 0.7, d.x(0, 2)};
  EXPECT_NEAR(partial_dependence(arch, t, d, 2, 0.7), forward(arch, t, row),
              1e-15);
}

TEST(PartialDependenceTest, LoopOracle) {
  std::mt19937_64 rng(2);
  const Architecture arch = Arch(3, 3, OutputActivation::kLogistic);
  const ParamVector t = random_theta(arch, rng);
  const Dataset d = random_data(arch, t, 5, rng);
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    double row[3] = {d.x(i, 0), d.x(i, 1), -0.3};
    sum += oracle_forward(arch, t, row);
  }
  EXPECT_NEAR(partial_dependence(arch, t, d, 3, -0.3), sum / 5.0, 1e-12);
  // Not mutated.
  EXPECT_NE(d.x(0, 2), -0.3);
}

TEST(PceTest, DisconnectedCovariateIsZero) {
  std::mt19937_64 rng(3);
  const Architecture arch = Arch(3, 2);
  ParamVector t = random_theta(arch, rng);
  for (int k = 1; k <= 2; ++k) t.set_omega(2, k, 0.0);
  const Dataset d = random_data(arch, t, 30, rng);
  PceConfig cfg;
  cfg.j = 2;
  const PceCurve c = pce_curve(arch, t, IdentityCov(t.size()), d, cfg);
  EXPECT_EQ(c.points.size(), 101u);
  // The band stays open: beta still depends on omega_2 away from zero.
  for (const auto& pt : c.points) EXPECT_EQ(pt.beta_hat, 0.0);
  EXPECT_NEAR(partial_dependence(arch, t, d, 2, -5.0),
              partial_dependence(arch, t, d, 2, 5.0), 0.0);
}

TEST(PceTest, ZeroStepIsZero) {
  std::mt19937_64 rng(4);
  const Architecture arch = Arch(2, 2);
  const ParamVector t = random_theta(arch, rng);
  const Dataset d = random_data(arch, t, 30, rng);
  PceConfig cfg;
  cfg.j = 1;
  cfg.d = 0.0;
  const PceCurve c = pce_curve(arch, t, IdentityCov(t.size()), d, cfg);
  for (const auto& pt : c.points) {
    EXPECT_EQ(pt.beta_hat, 0.0);
    EXPECT_EQ(pt.se, 0.0);
  }
}

TEST(PceTest, DeltaGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  for (int inst = 0; inst < 10; ++inst) {
    const Architecture arch =
        Arch(1 + inst % 4, 1 + inst % 3,
             inst % 2 ? OutputActivation::kLogistic : OutputActivation::kIdentity);
    const ParamVector t = random_theta(arch, rng);
    const Dataset d = random_data(arch, t, 20, rng);
    const int j = 1 + inst % arch.p;
    const Eigen::VectorXd g = pce_gradient(arch, t, d, j, 0.2, 0.9);
    const Eigen::VectorXd fd = fd_gradient(
        [&](const Eigen::VectorXd& v) {
          return pce_value(arch, ParamVector(arch, v), d, j, 0.2, 0.9);
        },
        t.values(), 1e-6);
    for (int i = 0; i < g.size(); ++i) {
      EXPECT_LE(std::abs(g[i] - fd[i]), 1e-5 * std::max(1e-3, std::abs(fd[i])))
          << "instance " << inst << " coordinate " << i;
    }
  }
}

TEST(PceTest, BandsSymmetricAndOrdered) {
  std::mt19937_64 rng(6);
  const Architecture arch = Arch(2, 2);
  const ParamVector t = random_theta(arch, rng);
  const Dataset d = random_data(arch, t, 40, rng);
  PceConfig cfg;
  cfg.j = 1;
  cfg.grid = {-1.0, 0.0, 1.0};
  const PceCurve c = pce_curve(arch, t, IdentityCov(t.size()), d, cfg);
  for (const auto& pt : c.points) {
    EXPECT_LE(pt.lo, pt.beta_hat);
    EXPECT_LE(pt.beta_hat, pt.hi);
    EXPECT_NEAR(pt.hi - pt.beta_hat, pt.beta_hat - pt.lo, 1e-12);
    EXPECT_NEAR(pt.hi - pt.beta_hat, 1.959964 * pt.se, 1e-12);
  }
}

TEST(PceTest, ConfigValidation) {
  std::mt19937_64 rng(7);
  const Architecture arch = Arch(2, 1);
  const ParamVector t = random_theta(arch, rng);
  const Dataset d = random_data(arch, t, 10, rng);
  const auto cov = IdentityCov(t.size());
  PceConfig cfg;
  cfg.j = 1;
  cfg.grid = {1.0, 0.5};
  EXPECT_THROW(pce_curve(arch, t, cov, d, cfg), InputError);
  cfg.grid = {};
  cfg.j = 3;
  EXPECT_THROW(pce_curve(arch, t, cov, d, cfg), InputError);
  cfg.j = 1;
  cfg.d = INFINITY;
  EXPECT_THROW(pce_curve(arch, t, cov, d, cfg), InputError);
  cfg.d.reset();
  auto bad = cov;
  bad.positive_definite = false;
  EXPECT_THROW(pce_curve(arch, t, bad, d, cfg), NumericalError);
}

TEST(PceTest, DefaultGridSpansObservedRange) {
  std::mt19937_64 rng(8);
  const Architecture arch = Arch(2, 1);
  const Dataset d = random_data(arch, ParamVector(arch), 50, rng);
  const double step = default_step(d, 2);
  const auto grid = default_grid(d, 2, step);
  ASSERT_EQ(grid.size(), 101u);
  EXPECT_EQ(grid.front(), d.x.col(1).minCoeff());
  EXPECT_EQ(grid.back(), d.x.col(1).maxCoeff() - step);
}

TEST(PceBinaryTest, MatchesSingletonCurve) {
  std::mt19937_64 rng(9);
  const Architecture arch = Arch(2, 2);
  const ParamVector t = random_theta(arch, rng);
  Dataset d = random_data(arch, t, 30, rng);
  for (int i = 0; i < d.n(); ++i) d.x(i, 1) = i % 2;
  d.columns[1].kind = ColumnKind::kDummy;
  const auto cov = IdentityCov(t.size());
  const PceEstimate b = pce_binary(arch, t, cov, d, 2);
  PceConfig cfg;
  cfg.j = 2;
  cfg.grid = {0.0};
  cfg.d = 1.0;
  const PcePoint pt = pce_curve(arch, t, cov, d, cfg).points.front();
  EXPECT_EQ(b.beta_hat, pt.beta_hat);
  EXPECT_EQ(b.se, pt.se);
  EXPECT_THROW(pce_binary(arch, t, cov, d, 1), InputError);
  ParamVector z = t;
  for (int k = 1; k <= 2; ++k) z.set_omega(2, k, 0.0);
  EXPECT_EQ(pce_binary(arch, z, cov, d, 2).beta_hat, 0.0);
}

TEST(InteractionTest, DisconnectedConditionerGivesIdenticalCurves) {
  std::mt19937_64 rng(10);
  const Architecture arch = Arch(3, 3);
  ParamVector t = random_theta(arch, rng);
  for (int k = 1; k <= 3; ++k) t.set_omega(3, k, 0.0);
  const Dataset d = random_data(arch, t, 40, rng);
  const auto [a, b] = interaction_screen(arch, t, IdentityCov(t.size()), d, 1, 3);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_NEAR(a.points[i].beta_hat, b.points[i].beta_hat, 1e-12);
  }
}

TEST(InteractionTest, MatchesPinnedDatasetRecomputation) {
  std::mt19937_64 rng(11);
  const Architecture arch = Arch(3, 2);
  const ParamVector t = random_theta(arch, rng);
  const Dataset d = random_data(arch, t, 25, rng);
  PceConfig base;
  base.grid = {-0.5, 0.5};
  base.d = 0.4;
  const auto [lo, hi] = interaction_screen(arch, t, IdentityCov(t.size()), d, 1, 2, base);
  const double mean = d.x.col(1).mean();
  const double sd = default_step(d, 2);
  for (const auto& [curve, v] : {std::pair{lo, mean - sd}, std::pair{hi, mean + sd}}) {
    Dataset pinned = d;
    pinned.x.col(1).setConstant(v);
    for (size_t i = 0; i < 2; ++i) {
      EXPECT_NEAR(curve.points[i].beta_hat,
                  pce_value(arch, t, pinned, 1, base.grid[i], 0.4), 1e-14);
    }
  }
}

TEST(InteractionTest, DummyConditionerUsesZeroAndOne) {
  std::mt19937_64 rng(12);
  const Architecture arch = Arch(2, 2);
  const ParamVector t = random_theta(arch, rng);
  Dataset d = random_data(arch, t, 20, rng);
  for (int i = 0; i < d.n(); ++i) d.x(i, 1) = i % 2;
  d.columns[1].kind = ColumnKind::kDummy;
  const auto [a, b] = interaction_screen(arch, t, IdentityCov(t.size()), d, 1, 2);
  EXPECT_EQ(a.points.front().label, "x2=0");
  EXPECT_EQ(b.points.front().label, "x2=1");
}

TEST(OriginalScaleTest, IdentityAndDoubling) {
  std::mt19937_64 rng(13);
  const Architecture arch = Arch(2, 2);
  const ParamVector t = random_theta(arch, rng);
  const Dataset d = random_data(arch, t, 20, rng);
  PceConfig cfg;
  cfg.j = 1;
  cfg.grid = {0.0, 1.0};
  const PceCurve c = pce_curve(arch, t, IdentityCov(t.size()), d, cfg);
  ResponseMeta resp;
  const PceCurve same = to_original_scale(c, d.columns, resp);
  for (size_t i = 0; i < c.points.size(); ++i) {
    EXPECT_EQ(same.points[i].x, c.points[i].x);
    EXPECT_EQ(same.points[i].beta_hat, c.points[i].beta_hat);
  }
  resp.sd = 2.0;
  std::vector<ColumnMeta> cols = d.columns;
  cols[0].mean = 10.0;
  cols[0].sd = 3.0;
  const PceCurve dbl = to_original_scale(c, cols, resp);
  EXPECT_EQ(dbl.scale, EffectScale::kOriginal);
  EXPECT_EQ(dbl.d, c.d * 3.0);
  for (size_t i = 0; i < c.points.size(); ++i) {
    EXPECT_EQ(dbl.points[i].x, c.points[i].x * 3.0 + 10.0);
    EXPECT_EQ(dbl.points[i].beta_hat, 2.0 * c.points[i].beta_hat);
    EXPECT_EQ(dbl.points[i].se, 2.0 * c.points[i].se);
    EXPECT_EQ(dbl.points[i].lo, 2.0 * c.points[i].lo);
    EXPECT_EQ(dbl.points[i].hi, 2.0 * c.points[i].hi);
  }
  EXPECT_THROW(to_original_scale(c, {}, resp), InputError);
}

TEST(PceTest, NearLinearRegimeIsFlat) {
  // Hidden weights scaled by eps with gamma scaled by 1/eps keep the slope
  // while pushing every sigmoid into its linear region.
  const Architecture arch = Arch(2, 2);
  std::mt19937_64 rng(14);
  const ParamVector base = random_theta(arch, rng);
  const Dataset d = random_data(arch, base, 50, rng);
  const double eps = 1e-4;
  ParamVector t = base;
  for (int k = 1; k <= 2; ++k) {
    for (int j = 0; j <= 2; ++j) t.set_omega(j, k, eps * base.omega(j, k));
    t.set_gamma(k, base.gamma(k) / eps);
  }
  PceConfig cfg;
  cfg.j = 1;
  cfg.d = 1.0;
  const PceCurve c = pce_curve(arch, t, IdentityCov(t.size()), d, cfg);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& pt : c.points) {
    lo = std::min(lo, pt.beta_hat);
    hi = std::max(hi, pt.beta_hat);
  }
  EXPECT_LT(hi - lo, 1e-3);
}

TEST(PceTest, BandCoverageOnSimulatedData) {
  const Architecture arch = Arch(2, 1);
  ParamVector truth(arch);
  truth.set_omega(0, 1, 0.3);
  truth.set_omega(1, 1, 1.5);
  truth.set_omega(2, 1, -0.8);
  truth.set_gamma(0, 0.5);
  truth.set_gamma(1, 3.0);
  const LikelihoodSpec spec{Family::kGaussian, 0.0};
  const std::vector<double> grid = {-1.0, 0.0, 1.0};
  int covered = 0, total = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::mt19937_64 rng(1000 + rep);
    const Dataset d = random_data(arch, truth, 400, rng, 1.0);
    FitConfig cfg;
    cfg.n_restarts = 2;
    cfg.seed = rep;
    const FitResult f = fit(arch, d, spec, cfg);
    const auto cov = estimate_covariance(arch, f.theta_hat, d, spec);
    if (!cov.positive_definite) continue;
    PceConfig pc;
    pc.j = 1;
    pc.d = 1.0;
    pc.grid = grid;
    const PceCurve c = pce_curve(arch, f.theta_hat, cov, d, pc);
    for (const auto& pt : c.points) {
      const double target = pce_value(arch, truth, d, 1, pt.x, 1.0);
      covered += (pt.lo <= target && target <= pt.hi);
      ++total;
    }
  }
  ASSERT_GT(total, 200);
  const double rate = static_cast<double>(covered) / total;
  EXPECT_GE(rate, 0.90);
  EXPECT_LE(rate, 0.99);
}

}  // namespace
}  // namespace nnstat

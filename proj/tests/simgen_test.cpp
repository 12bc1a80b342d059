#include "nnstat/simgen.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "nnstat/error.hpp"

namespace nnstat {
namespace {

SimScenario Small() {
  SimScenario sc;
  sc.n = 300;
  sc.replicates = 6;
  sc.restarts = 2;
  sc.seed = 11;
  return sc;
}

TEST(SimgenPatternTest, ParseAndZeroSets) {
  EXPECT_EQ(parse_nz_pattern("5-1"), NzPattern::k5_1);
  EXPECT_EQ(parse_nz_pattern("3-3"), NzPattern::k3_3);
  EXPECT_THROW(parse_nz_pattern("4-2"), InputError);
  EXPECT_EQ(to_string(NzPattern::k3_3), "3-3");
  EXPECT_EQ(zero_covariates(NzPattern::k5_1), std::vector<int>({1}));
  EXPECT_EQ(zero_covariates(NzPattern::k3_3), std::vector<int>({1, 3, 4}));
}

TEST(SimgenPatternTest, DefaultTruthHonoursPattern) {
  for (int q : {2, 4, 6}) {
    for (NzPattern pat : {NzPattern::k5_1, NzPattern::k3_3}) {
      const ParamVector t = default_true_theta(q, pat);
      EXPECT_EQ(t.size(), 8 * q + 1);
      const auto zeros = zero_covariates(pat);
      for (int j = 1; j <= 6; ++j) {
        const bool zero =
            std::find(zeros.begin(), zeros.end(), j) != zeros.end();
        EXPECT_EQ(t.omega_block(j).isZero(0.0), zero) << "q=" << q << " j=" << j;
      }
      for (int k = 1; k <= q; ++k) EXPECT_NE(t.gamma(k), 0.0);
    }
  }
}

TEST(SimgenPatternTest, PublishedOmegaTwo) {
  const ParamVector t = default_true_theta(6, NzPattern::k5_1);
  const double expected[] = {-0.14, -0.27, -0.20, -0.29, 0.27, 0.20};
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(t.omega(2, k), expected[k - 1]);
}

TEST(SimgenScenarioTest, ValidateRejectsConnectedZeroCovariate) {
  SimScenario sc = Small();
  ParamVector t = sc.truth();
  t.set_omega(1, 2, 0.5);
  sc.true_theta = t;
  EXPECT_THROW(sc.validate(), InputError);
  sc = Small();
  sc.n = 1;
  EXPECT_THROW(sc.validate(), InputError);
  sc = Small();
  sc.replicates = 0;
  EXPECT_THROW(sc.validate(), InputError);
  sc = Small();
  sc.lambda = -1.0;
  EXPECT_THROW(sc.validate(), InputError);
  EXPECT_NO_THROW(Small().validate());
}

TEST(SimgenGenerateTest, NoiselessMatchesForward) {
  SimScenario sc = Small();
  sc.noise_sd = 0.0;
  const Dataset d = generate(sc, 3);
  const Eigen::VectorXd mu = forward_batch(sc.arch(), sc.truth(), d);
  EXPECT_EQ(d.y, mu);
}

TEST(SimgenGenerateTest, DeterministicPerReplicate) {
  const SimScenario sc = Small();
  const Dataset a = generate(sc, 4);
  const Dataset b = generate(sc, 4);
  const Dataset c = generate(sc, 5);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_NE(a.x, c.x);
}

TEST(SimgenGenerateTest, CovariateMoments) {
  SimScenario sc = Small();
  sc.n = 100000;
  const Dataset d = generate(sc, 0);
  const double tol = 4.0 / std::sqrt(static_cast<double>(sc.n));
  for (int j = 0; j < sc.p; ++j) {
    const auto col = d.x.col(j).array();
    const double mean = col.mean();
    const double var = (col - mean).square().sum() / (sc.n - 1);
    EXPECT_NEAR(mean, 0.0, tol);
    EXPECT_NEAR(var, 1.0, tol);
  }
}

TEST(SimgenRunTest, RatesAreCountsOverReplicates) {
  const SimReport r = run_scenario(Small());
  EXPECT_EQ(r.replicates, 6);
  ASSERT_EQ(r.rates.size(), 12u);
  for (const auto& rate : r.rates) {
    EXPECT_EQ(rate.replicates, 6);
    EXPECT_EQ(rate.rate, static_cast<double>(rate.rejections) / 6);
    EXPECT_GE(rate.rate, 0.0);
    EXPECT_LE(rate.rate, 1.0);
    EXPECT_LE(rate.rejections, rate.computable);
  }
  EXPECT_EQ(r.rates[0].target, "omega[1,1]");
  EXPECT_EQ(r.rates[0].kind, "type_I");
  EXPECT_EQ(r.rates[1].target, "omega[1]");
  EXPECT_EQ(r.rates[1].test, "MP");
  EXPECT_EQ(r.rates[3].kind, "power");
  EXPECT_EQ(r.pd_rate, static_cast<double>(r.pd_count) / 6);
  ASSERT_EQ(r.params.size(), 17u);
  for (const auto& p : r.params) {
    EXPECT_EQ(p.pd, r.pd_count);
    EXPECT_GE(p.cp, 0.0);
    EXPECT_LE(p.cp, 1.0);
    EXPECT_GE(p.se, 0.0);
  }
}

TEST(SimgenRunTest, ReproducibleAcrossThreadCounts) {
  SimScenario a = Small();
  SimScenario b = Small();
  b.threads = 3;
  const SimReport ra = run_scenario(a);
  const SimReport rb = run_scenario(b);
  EXPECT_EQ(ra.pd_count, rb.pd_count);
  EXPECT_EQ(ra.failures, rb.failures);
  ASSERT_EQ(ra.rates.size(), rb.rates.size());
  for (size_t i = 0; i < ra.rates.size(); ++i) {
    EXPECT_EQ(ra.rates[i].rejections, rb.rates[i].rejections);
    EXPECT_EQ(ra.rates[i].computable, rb.rates[i].computable);
  }
  ASSERT_EQ(ra.params.size(), rb.params.size());
  for (size_t i = 0; i < ra.params.size(); ++i) {
    EXPECT_EQ(ra.params[i].mean, rb.params[i].mean);
    EXPECT_EQ(ra.params[i].se, rb.params[i].se);
    EXPECT_EQ(ra.params[i].see, rb.params[i].see);
    EXPECT_EQ(ra.params[i].cp, rb.params[i].cp);
  }
}

// The ridge keeps I_o + 2*lambda*I invertible, but the fit collapses to
// gamma_k = 0 where I_o is indefinite, so PD is not guaranteed.
TEST(SimgenRunTest, HugeRidgeNeverSingular) {
  SimScenario sc = Small();
  sc.lambda = 1e6;
  sc.pd_only = true;
  const SimReport r = run_scenario(sc);
  EXPECT_EQ(r.failures, 0);
  EXPECT_TRUE(r.rates.empty());
  EXPECT_TRUE(r.params.empty());
}

TEST(SimgenRunTest, ModerateRidgeSmallNetIsPositiveDefinite) {
  SimScenario sc = Small();
  sc.n = 250;
  sc.replicates = 10;
  sc.pd_only = true;
  EXPECT_EQ(run_scenario(sc).pd_rate, 1.0);
}

TEST(SimgenRunTest, NearNoiselessPowerIsOne) {
  SimScenario sc = Small();
  sc.n = 1000;
  sc.noise_sd = 0.05;
  sc.replicates = 3;
  const SimReport r = run_scenario(sc);
  for (const auto& rate : r.rates) {
    if (rate.kind == "power") EXPECT_EQ(rate.rate, 1.0) << rate.target;
  }
}

TEST(SimgenRunTest, CoverageUsesOnlyPdReplicates) {
  SimScenario sc = Small();
  sc.lambda = 0.0;
  sc.q = 6;
  sc.pattern = NzPattern::k3_3;
  sc.n = 150;
  sc.replicates = 3;
  sc.restarts = 1;
  const SimReport r = run_scenario(sc);
  for (const auto& p : r.params) {
    EXPECT_EQ(p.pd, r.pd_count);
    if (p.pd == 0) {
      EXPECT_EQ(p.cp, 0.0);
      EXPECT_EQ(p.see, 0.0);
    }
  }
}

TEST(SimgenPowerTest, SweepSetsEffectAndTrends) {
  SimScenario sc = Small();
  sc.n = 500;
  sc.replicates = 20;
  const auto rows = power_sweep(sc, {0.0, 0.5, 1.0});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].mp.kind, "type_I");
  EXPECT_EQ(rows[0].sp.target, "omega[2,1]");
  EXPECT_EQ(rows[2].mp.target, "omega[2]");
  EXPECT_EQ(rows[2].mp.kind, "power");
  EXPECT_LE(rows[0].mp.rate, 0.25);
  EXPECT_GE(rows[2].mp.rate, rows[0].mp.rate);
  EXPECT_GE(rows[2].sp.rate, rows[0].sp.rate);
  EXPECT_EQ(rows[2].mp.rate, 1.0);
  EXPECT_THROW(power_sweep(sc, {-0.1}), InputError);
}

TEST(SimgenPdStudyTest, GridShape) {
  SimScenario sc = Small();
  sc.replicates = 2;
  const auto cells =
      pd_study(sc, {0.01, 1e6}, {2}, {NzPattern::k5_1, NzPattern::k3_3}, {200});
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[0].lambda, 0.01);
  EXPECT_EQ(cells[1].pattern, NzPattern::k3_3);
  for (const auto& c : cells) {
    EXPECT_EQ(c.replicates, 2);
    EXPECT_EQ(c.pd_rate, c.pd_count / 2.0);
  }
  EXPECT_EQ(cells[2].lambda, 1e6);
  EXPECT_EQ(cells[3].n, 200);
}

}  // namespace
}  // namespace nnstat

#include "nnstat/inference.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "nnstat/distributions.hpp"
#include "nnstat/error.hpp"
#include "test_util.hpp"

namespace nnstat {
namespace {

using testing_util::fd_hessian;
using testing_util::random_data;
using testing_util::random_theta;

Architecture Arch(int p, int q) {
  Architecture a;
  a.p = p;
  a.q = q;
  return a;
}

Eigen::MatrixXd RandomPd(int r, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd b(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) b(i, j) = nd(rng);
  return b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(r, r);
}

TEST(SandwichTest, CollapsesAtZeroLambda) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd info = RandomPd(9, rng);
  const CovarianceEstimate c = sandwich_covariance(info, 0.0);
  EXPECT_LE((c.sigma_hat * info - Eigen::MatrixXd::Identity(9, 9))
                .cwiseAbs()
                .maxCoeff(),
            1e-8);
  EXPECT_TRUE(c.a_matrix.isIdentity(0.0));
  EXPECT_TRUE(c.positive_definite);
}

TEST(SandwichTest, ScalarIdentityCase) {
  const CovarianceEstimate c =
      sandwich_covariance(2.0 * Eigen::MatrixXd::Identity(5, 5), 0.01);
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(c.sigma_hat(i, i), 2.0 / (2.02 * 2.02), 1e-15);
    EXPECT_NEAR(c.sigma_hat(i, i), 0.4901480, 5e-8);
  }
  EXPECT_NEAR(c.sigma_hat(0, 1), 0.0, 0.0);
}

TEST(SandwichTest, SymmetricOutput) {
  std::mt19937_64 rng(2);
  const CovarianceEstimate c = sandwich_covariance(RandomPd(12, rng), 0.01);
  EXPECT_LE((c.sigma_hat - c.sigma_hat.transpose()).cwiseAbs().maxCoeff(),
            1e-10);
}

TEST(SandwichTest, SingularRaisesWithHint) {
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(3, 3);
  info(0, 0) = 1.0;
  try {
    sandwich_covariance(info, 0.0);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("lambda"), std::string::npos);
  }
  // The ridge fixes it.
  EXPECT_NO_THROW(sandwich_covariance(info, 0.01));
}

TEST(SandwichTest, RejectsAsymmetric) {
  Eigen::MatrixXd info = Eigen::MatrixXd::Identity(2, 2);
  info(0, 1) = 0.5;
  EXPECT_THROW(sandwich_covariance(info, 0.0), InputError);
}

TEST(SandwichTest, PdFlagMatchesIndependentEigensolver) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 50; ++rep) {
    const int r = 4 + rep % 5;
    Eigen::MatrixXd b(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) b(i, j) = nd(rng);
    // Symmetric, sometimes indefinite.
    Eigen::MatrixXd info = 0.5 * (b + b.transpose());
    info.diagonal().array() += (rep % 3) * 1.5;
    CovarianceEstimate c;
    try {
      c = sandwich_covariance(info, 0.01 * (rep % 2));
    } catch (const NumericalError&) {
      continue;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(c.sigma_hat);
    const Eigen::VectorXd ev = es.eigenvalues().real();
    const bool pd = ev.minCoeff() > 1e-10 * std::max(1.0, ev.maxCoeff());
    EXPECT_EQ(c.positive_definite, pd) << "rep " << rep;
  }
}

TEST(SandwichTest, MatchesFiniteDifferenceInformation) {
  std::mt19937_64 rng(4);
  const Architecture arch = Arch(2, 2);
  const ParamVector t = random_theta(arch, rng);
  const Dataset d = random_data(arch, t, 80, rng);
  const LikelihoodSpec spec{Family::kGaussian, 0.01};
  const SigmaSq s2(0.25);
  const Eigen::MatrixXd info = observed_information(arch, t, d, spec, s2);
  const Eigen::MatrixXd fd = -fd_hessian(
      [&](const Eigen::VectorXd& v) {
        return log_likelihood(arch, ParamVector(arch, v), d,
                              {Family::kGaussian, 0.0}, s2);
      },
      t.values());
  const Eigen::MatrixXd fd_sym = 0.5 * (fd + fd.transpose());
  const auto a = sandwich_covariance(info, 0.01);
  const auto b = sandwich_covariance(fd_sym, 0.01);
  EXPECT_LE((a.sigma_hat - b.sigma_hat).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(EffectiveDfTest, ClosedForms) {
  const Architecture arch = Arch(3, 4);
  const int r = arch.num_params();
  const Eigen::MatrixXd s = selection_matrix(arch, 2);
  std::mt19937_64 rng(5);
  EXPECT_EQ(effective_df(sandwich_covariance(RandomPd(r, rng), 0.0), s), 4.0);
  const double c = 3.0, lambda = 0.01;
  const auto cov =
      sandwich_covariance(c * Eigen::MatrixXd::Identity(r, r), lambda);
  EXPECT_NEAR(effective_df(cov, s), 4.0 * c / (c + 2.0 * lambda), 1e-14);
}

TEST(EffectiveDfTest, MatchesEigenRecomputation) {
  const Architecture arch = Arch(2, 3);
  const int r = arch.num_params();
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd info = RandomPd(r, rng);
  const auto cov = sandwich_covariance(info, 0.01);
  // A = V diag(l / (l + 2 lambda)) V^T.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
  const Eigen::VectorXd l = es.eigenvalues();
  const Eigen::MatrixXd a =
      es.eigenvectors() *
      (l.array() / (l.array() + 0.02)).matrix().asDiagonal() *
      es.eigenvectors().transpose();
  for (int j = 1; j <= arch.p; ++j) {
    const Eigen::MatrixXd s = selection_matrix(arch, j);
    EXPECT_NEAR(effective_df(cov, s), (s * a * s.transpose()).trace(), 1e-10);
    EXPECT_LE(effective_df(cov, s), 3.0);
  }
}

CovarianceEstimate DiagonalCov(int r, double v) {
  CovarianceEstimate c;
  c.sigma_hat = v * Eigen::MatrixXd::Identity(r, r);
  c.a_matrix = Eigen::MatrixXd::Identity(r, r);
  c.positive_definite = true;
  c.min_eigenvalue = c.max_eigenvalue = v;
  return c;
}

TEST(WaldSingleTest, Examples) {
  const Architecture arch = Arch(1, 1);
  ParamVector t(arch);
  const auto cov = DiagonalCov(arch.num_params(), 1.0);
  WaldResult w = wald_single(t, cov, 1);
  EXPECT_EQ(w.statistic, 0.0);
  EXPECT_EQ(w.p_value, 1.0);
  t[1] = 2.0;
  w = wald_single(t, cov, 1);
  EXPECT_EQ(w.statistic, 4.0);
  EXPECT_EQ(w.df, 1.0);
  EXPECT_NEAR(w.p_value, std::erfc(std::sqrt(2.0)), 1e-13);
  EXPECT_NEAR(w.p_value, 0.0455003, 1e-7);
  auto cov2 = DiagonalCov(arch.num_params(), 0.3);
  t[1] = 1.959964 * std::sqrt(0.3);
  EXPECT_NEAR(wald_single(t, cov2, 1).p_value, 0.05, 1e-6);
}

TEST(WaldSingleTest, NonPositiveVarianceFails) {
  const Architecture arch = Arch(1, 1);
  auto cov = DiagonalCov(arch.num_params(), 1.0);
  cov.sigma_hat(2, 2) = -0.1;
  EXPECT_THROW(wald_single(ParamVector(arch), cov, 2), NumericalError);
  EXPECT_THROW(wald_single(ParamVector(arch), cov, 99), InputError);
}

TEST(WaldMultiTest, Examples) {
  const Architecture arch = Arch(1, 2);
  ParamVector t(arch);
  const auto cov = DiagonalCov(arch.num_params(), 1.0);
  WaldResult w = wald_multi(t, cov, arch, 1);
  EXPECT_EQ(w.statistic, 0.0);
  EXPECT_EQ(w.p_value, 1.0);
  t.set_omega(1, 1, 2.0);
  w = wald_multi(t, cov, arch, 1);
  EXPECT_NEAR(w.statistic, 4.0, 1e-14);
  EXPECT_EQ(w.df, 2.0);
  EXPECT_NEAR(w.p_value, std::exp(-2.0), 1e-12);
}

TEST(WaldMultiTest, SingleNodeCoincidesWithSingle) {
  std::mt19937_64 rng(7);
  const Architecture arch = Arch(3, 1);
  const ParamVector t = random_theta(arch, rng);
  const auto cov = sandwich_covariance(RandomPd(arch.num_params(), rng), 0.0);
  for (int j = 1; j <= 3; ++j) {
    EXPECT_EQ(wald_multi(t, cov, arch, j).statistic,
              wald_single(t, cov, t.omega_index(j, 1)).statistic);
  }
}

TEST(WaldMultiTest, ScaleAndMonotonicity) {
  std::mt19937_64 rng(8);
  const Architecture arch = Arch(3, 3);
  const ParamVector t = random_theta(arch, rng);
  const auto cov = sandwich_covariance(RandomPd(arch.num_params(), rng), 0.01);
  auto scaled = cov;
  scaled.sigma_hat *= 4.0;
  for (int j = 1; j <= 3; ++j) {
    EXPECT_NEAR(wald_multi(t, scaled, arch, j).statistic,
                wald_multi(t, cov, arch, j).statistic / 4.0, 1e-10);
  }
  for (int i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(wald_single(t, scaled, i).statistic,
                wald_single(t, cov, i).statistic / 4.0, 1e-12);
  }
  const double df = wald_multi(t, cov, arch, 1).df;
  double prev = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double p = chi_square_survival(0.1 * i, df);
    EXPECT_LE(p, prev);
    prev = p;
  }
}

class WaldSymmetryTest : public testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(9);
    const ParamVector truth = random_theta(arch_, rng);
    data_ = random_data(arch_, truth, 150, rng);
    FitConfig cfg;
    cfg.n_restarts = 3;
    est_ = fit(arch_, data_, {Family::kGaussian, 0.01}, cfg).theta_hat;
  }

  // Largest p-value deviation over covariates between est_ and its image
  // under op, each with its own re-differentiated covariance.
  double MaxDeviation(const SymmetryOp& op, double lambda, RidgeScope scope) {
    const LikelihoodSpec spec{Family::kGaussian, lambda};
    const auto base = estimate_covariance(arch_, est_, data_, spec, scope);
    const ParamVector s = apply_symmetry(est_, op);
    const auto cov = estimate_covariance(arch_, s, data_, spec, scope);
    double dev = 0.0;
    for (int j = 1; j <= arch_.p; ++j) {
      dev = std::max(dev, std::abs(wald_multi(s, cov, arch_, j).p_value -
                                   wald_multi(est_, base, arch_, j).p_value));
    }
    return dev;
  }

  Architecture arch_ = Arch(3, 2);
  Dataset data_;
  ParamVector est_;
};

TEST_F(WaldSymmetryTest, InvariantWithoutRidge) {
  for (const auto& op : enumerate_symmetries(2)) {
    EXPECT_LE(MaxDeviation(op, 0.0, RidgeScope::kAll), 1e-6);
  }
}

TEST_F(WaldSymmetryTest, InvariantWithPenalizedRidge) {
  for (const auto& op : enumerate_symmetries(2)) {
    EXPECT_LE(MaxDeviation(op, 0.01, RidgeScope::kPenalized), 1e-6);
  }
}

TEST_F(WaldSymmetryTest, PermutationsInvariantWithFullRidge) {
  for (const auto& op : enumerate_symmetries(2)) {
    bool flipped = false;
    for (bool f : op.flips) flipped |= f;
    if (flipped) continue;
    EXPECT_LE(MaxDeviation(op, 0.01, RidgeScope::kAll), 1e-6);
  }
}

// The full-identity ridge also shrinks the unpenalized output intercept,
// which a sign flip shears; the discrepancy is real but small.
TEST_F(WaldSymmetryTest, FlipsNearlyInvariantWithFullRidge) {
  for (const auto& op : enumerate_symmetries(2)) {
    EXPECT_LE(MaxDeviation(op, 0.01, RidgeScope::kAll), 1e-3);
  }
}

TEST(SignificanceTest, Codes) {
  EXPECT_EQ(significance_code(0.0005), "***");
  EXPECT_EQ(significance_code(0.001), "**");
  EXPECT_EQ(significance_code(0.009), "**");
  EXPECT_EQ(significance_code(0.01), "*");
  EXPECT_EQ(significance_code(0.049), "*");
  EXPECT_EQ(significance_code(0.05), "");
}

TEST(SummarizeTest, DiagonalCovarianceMatchesDirectCalls) {
  std::mt19937_64 rng(10);
  const Architecture arch = Arch(2, 2);
  FitResult f;
  f.theta_hat = random_theta(arch, rng);
  f.converged = true;
  const Dataset d = random_data(arch, f.theta_hat, 20, rng);
  const auto cov = DiagonalCov(arch.num_params(), 1.0);
  const InferenceReport rep = summarize(f, cov, arch, d);
  ASSERT_EQ(static_cast<int>(rep.weights.size()), arch.num_params());
  for (int i = 0; i < arch.num_params(); ++i) {
    EXPECT_EQ(rep.weights[i].wald->p_value,
              wald_single(f.theta_hat, cov, i).p_value);
  }
  ASSERT_EQ(rep.covariates.size(), 2u);
  EXPECT_EQ(rep.covariates[1].name, "x2");
  EXPECT_EQ(rep.omega_test(2, 1).label, "omega[2,1]");
  EXPECT_EQ(rep.gamma_test(0).label, "gamma[0]");
}

TEST(SummarizeTest, FailedCellsAreMarked) {
  std::mt19937_64 rng(11);
  const Architecture arch = Arch(2, 2);
  FitResult f;
  f.theta_hat = random_theta(arch, rng);
  const Dataset d = random_data(arch, f.theta_hat, 20, rng);
  auto cov = DiagonalCov(arch.num_params(), 1.0);
  cov.sigma_hat(f.theta_hat.omega_index(1, 1), f.theta_hat.omega_index(1, 1)) =
      -1.0;
  cov.positive_definite = false;
  const InferenceReport rep = summarize(f, cov, arch, d);
  EXPECT_FALSE(rep.omega_test(1, 1).wald.has_value());
  EXPECT_FALSE(rep.omega_test(1, 1).error.empty());
  EXPECT_FALSE(rep.covariates[0].wald.has_value());
  EXPECT_TRUE(rep.covariates[1].wald.has_value());
  EXPECT_FALSE(rep.warnings().empty());
}

TEST(SummarizeTest, MatchesRecomputationOnFit) {
  std::mt19937_64 rng(12);
  const Architecture arch = Arch(3, 2);
  const ParamVector truth = random_theta(arch, rng);
  const Dataset d = random_data(arch, truth, 300, rng);
  const LikelihoodSpec spec{Family::kGaussian, 0.01};
  FitConfig cfg;
  cfg.n_restarts = 3;
  const FitResult f = fit(arch, d, spec, cfg);
  const auto cov = estimate_covariance(arch, f.theta_hat, d, spec);
  const InferenceReport rep = summarize(f, cov, arch, d);
  for (int i = 0; i < arch.num_params(); ++i) {
    const double z2 = f.theta_hat[i] * f.theta_hat[i] / cov.sigma_hat(i, i);
    EXPECT_NEAR(rep.weights[i].wald->statistic, z2, 1e-12 * (1 + z2));
  }
  for (int j = 1; j <= 3; ++j) {
    const Eigen::MatrixXd s = selection_matrix(arch, j);
    const Eigen::VectorXd w = s * f.theta_hat.values();
    const Eigen::MatrixXd sub = s * cov.sigma_hat * s.transpose();
    const double stat = w.dot(sub.inverse() * w);
    EXPECT_NEAR(rep.covariates[j - 1].wald->statistic, stat, 1e-8 * (1 + stat));
  }
}

}  // namespace
}  // namespace nnstat

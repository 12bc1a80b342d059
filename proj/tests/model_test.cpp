#include "nnstat/model.hpp"

#include <random>

#include <gtest/gtest.h>

#include "nnstat/error.hpp"
#include "test_util.hpp"

namespace nnstat {
namespace {

Architecture Arch(int p, int q,
                  OutputActivation out = OutputActivation::kIdentity) {
  Architecture a;
  a.p = p;
  a.q = q;
  a.output = out;
  return a;
}

TEST(ArchitectureTest, ParameterCount) {
  EXPECT_EQ(Arch(1, 1).num_params(), 4);
  EXPECT_EQ(Arch(6, 2).num_params(), 17);
  EXPECT_EQ(Arch(8, 2).num_params(), 21);
  EXPECT_THROW(Arch(0, 1).validate(), InputError);
  EXPECT_THROW(Arch(1, 0).validate(), InputError);
}

TEST(ParamVectorTest, RoundTripAccessors) {
  const Architecture arch = Arch(3, 4);
  ParamVector t(arch);
  double v = 1.0;
  for (int j = 0; j <= arch.p; ++j) {
    for (int k = 1; k <= arch.q; ++k) t.set_omega(j, k, v++);
  }
  for (int k = 0; k <= arch.q; ++k) t.set_gamma(k, v++);
  v = 1.0;
  for (int j = 0; j <= arch.p; ++j) {
    for (int k = 1; k <= arch.q; ++k) EXPECT_EQ(t.omega(j, k), v++);
  }
  for (int k = 0; k <= arch.q; ++k) EXPECT_EQ(t.gamma(k), v++);
  // Flat layout is exactly the write order.
  for (int i = 0; i < t.size(); ++i) EXPECT_EQ(t[i], i + 1.0);
  EXPECT_EQ(ParamVector(arch, t.values()), t);
}

TEST(ParamVectorTest, PenalizedViewExcludesIntercepts) {
  const Architecture arch = Arch(2, 3);
  ParamVector t(arch);
  for (int i = 0; i < t.size(); ++i) t[i] = i;
  const Eigen::VectorXd v = t.penalized_view();
  EXPECT_EQ(v.size(), arch.num_params() - arch.q - 1);
  for (int k = 1; k <= arch.q; ++k) {
    EXPECT_FALSE(t.is_penalized(t.omega_index(0, k)));
  }
  EXPECT_FALSE(t.is_penalized(t.gamma_index(0)));
  EXPECT_TRUE(t.is_penalized(t.gamma_index(1)));
  EXPECT_TRUE(t.is_penalized(t.omega_index(1, 1)));
}

TEST(ParamVectorTest, LengthMismatchThrows) {
  EXPECT_THROW(ParamVector(Arch(2, 2), Eigen::VectorXd::Zero(3)), InputError);
}

TEST(ForwardTest, ZeroParameters) {
  const Architecture arch = Arch(1, 1);
  const ParamVector t(arch);
  const double x = 5.0;
  EXPECT_EQ(forward(arch, t, {&x, 1}), 0.0);
}

TEST(ForwardTest, DisconnectedHiddenLayer) {
  const Architecture arch = Arch(1, 1);
  ParamVector t(arch);
  t.set_gamma(0, 1.0);
  t.set_omega(1, 1, 3.0);
  for (double x : {-2.0, 0.0, 7.0}) {
    EXPECT_EQ(forward(arch, t, {&x, 1}), 1.0);
  }
}

TEST(ForwardTest, ScalarEvaluation) {
  const Architecture arch = Arch(1, 1);
  ParamVector t(arch);
  t.set_omega(1, 1, 1.0);
  t.set_gamma(1, 2.0);
  const double x = 1.0;
  // 2 / (1 + e^-1)
  EXPECT_NEAR(forward(arch, t, {&x, 1}), 1.4621171572600098, 1e-15);
}

TEST(ForwardTest, DimensionMismatchNamesLengths) {
  const Architecture arch = Arch(2, 1);
  const ParamVector t(arch);
  const double x = 1.0;
  try {
    forward(arch, t, {&x, 1});
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

TEST(ForwardTest, LargeNetInputsStayFinite) {
  const Architecture arch = Arch(1, 2, OutputActivation::kLogistic);
  ParamVector t(arch);
  t.set_omega(1, 1, 1e3);
  t.set_omega(1, 2, -1e3);
  t.set_gamma(1, 50.0);
  for (double x : {-10.0, 10.0}) {
    const double v = forward(arch, t, {&x, 1});
    EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(ForwardTest, BatchMatchesLoop) {
  std::mt19937_64 rng(7);
  const Architecture arch = Arch(3, 2);
  const ParamVector t = testing_util::random_theta(arch, rng);
  const Dataset d = testing_util::random_data(arch, t, 4, rng);
  const Eigen::VectorXd out = forward_batch(arch, t, d);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(out[i], testing_util::oracle_forward(arch, t, d.x.row(i).data()),
                1e-14);
    EXPECT_EQ(out[i], forward(arch, t, {d.x.row(i).data(), 3}));
  }
}

TEST(ForwardTest, BatchOfCopiesAndZeros) {
  const Architecture arch = Arch(2, 2);
  std::mt19937_64 rng(3);
  const ParamVector t = testing_util::random_theta(arch, rng);
  RowMatrix x(3, 2);
  x << 0.3, -1.0, 0.3, -1.0, 0.3, -1.0;
  const Eigen::VectorXd out = forward_batch(arch, t, x);
  EXPECT_EQ(out[0], out[1]);
  EXPECT_EQ(out[1], out[2]);
  EXPECT_TRUE(forward_batch(arch, ParamVector(arch), x).isZero(0.0));
}

TEST(ForwardTest, LogisticOutputInUnitInterval) {
  std::mt19937_64 rng(11);
  const Architecture arch = Arch(3, 3, OutputActivation::kLogistic);
  for (int rep = 0; rep < 50; ++rep) {
    const ParamVector t = testing_util::random_theta(arch, rng, 3.0);
    const Dataset d = testing_util::random_data(arch, t, 20, rng);
    const Eigen::VectorXd out = forward_batch(arch, t, d);
    EXPECT_TRUE((out.array() > 0.0).all() && (out.array() < 1.0).all());
  }
}

TEST(ForwardTest, OutputInterceptShiftsIdentityOutput) {
  std::mt19937_64 rng(5);
  const Architecture arch = Arch(2, 3);
  ParamVector t = testing_util::random_theta(arch, rng);
  const double x[] = {0.4, -0.2};
  const double before = forward(arch, t, x);
  t.set_gamma(0, t.gamma(0) + 0.75);
  EXPECT_NEAR(forward(arch, t, x) - before, 0.75, 1e-14);
}

TEST(SelectionMatrixTest, PicksOmegaBlock) {
  const Architecture arch = Arch(1, 2);
  ParamVector t(arch);
  t.set_omega(1, 1, 4.0);
  t.set_omega(1, 2, -3.0);
  const Eigen::MatrixXd s = selection_matrix(arch, 1);
  const Eigen::VectorXd w = s * t.values();
  EXPECT_EQ(w[0], 4.0);
  EXPECT_EQ(w[1], -3.0);
  EXPECT_TRUE((s * s.transpose()).isIdentity(0.0));
}

TEST(SelectionMatrixTest, MatchesLoopExtraction) {
  std::mt19937_64 rng(2);
  const Architecture arch = Arch(6, 4);
  const ParamVector t = testing_util::random_theta(arch, rng);
  const Eigen::MatrixXd s = selection_matrix(arch, 2);
  const Eigen::VectorXd w = s * t.values();
  for (int k = 1; k <= 4; ++k) EXPECT_EQ(w[k - 1], t.omega(2, k));
  for (int row = 0; row < s.rows(); ++row) EXPECT_EQ(s.row(row).sum(), 1.0);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_EQ(s.col(t.omega_index(0, k)).sum(), 0.0);
  }
}

TEST(SelectionMatrixTest, RejectsIntercept) {
  const Architecture arch = Arch(3, 2);
  EXPECT_THROW(selection_matrix(arch, 0), InputError);
  EXPECT_THROW(selection_matrix(arch, 4), InputError);
}

TEST(DatasetTest, ValidateRejectsBadDummies) {
  Dataset d;
  d.x.resize(2, 1);
  d.x << 0.0, 0.5;
  d.y = Eigen::VectorXd::Zero(2);
  d.columns = default_columns(1);
  d.columns[0].kind = ColumnKind::kDummy;
  EXPECT_THROW(d.validate(), InputError);
  d.x(1, 0) = 1.0;
  EXPECT_NO_THROW(d.validate());
  d.y[0] = std::nan("");
  EXPECT_THROW(d.validate(), InputError);
}

}  // namespace
}  // namespace nnstat

#pragma once

// Sandwich covariance of the penalized MLE and Wald tests on single weights
// and on whole covariates.
//
//   Sigma = (I_o + 2 lambda I)^-1 I_o (I_o + 2 lambda I)^-1
//   A     = (I_o + 2 lambda I)^-1 I_o
//
// The multiple-parameter test of covariate j uses the effective degrees of
// freedom tr(S A S^T) with S the selection matrix of omega_j.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nnstat/canonical.hpp"
#include "nnstat/fit.hpp"
#include "nnstat/model.hpp"

namespace nnstat {

struct CovarianceEstimate {
  Eigen::MatrixXd sigma_hat;
  Eigen::MatrixXd a_matrix;
  bool positive_definite = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double lambda = 0.0;
};

// Relative floor used for the positive-definiteness flag.
inline constexpr double kPdRelativeThreshold = 1e-10;

// True when min_eig > kPdRelativeThreshold * max(1, max_eig).
bool passes_pd_threshold(double min_eig, double max_eig);

// Which coordinates receive the 2 lambda ridge inside the sandwich. kAll is
// the formula as written (full identity). kPenalized restricts it to the
// penalized coordinates, matching the Hessian of the penalized objective;
// only then is Sigma exactly equivariant under sign flips when lambda > 0.
enum class RidgeScope { kAll, kPenalized };

// Throws InputError for non-square, non-symmetric or non-finite `info` and
// NumericalError (with the ridge hint) when I_o + 2 lambda I is singular.
// With lambda == 0, A is exactly the identity.
CovarianceEstimate sandwich_covariance(const Eigen::MatrixXd& info,
                                       double lambda);
// Ridge 2 lambda * diag(mask) instead of 2 lambda I.
CovarianceEstimate sandwich_covariance(const Eigen::MatrixXd& info,
                                       double lambda,
                                       const Eigen::VectorXd& ridge_mask);

// Observed information at theta (Gaussian: at the profiled RSS / n) fed
// through sandwich_covariance with spec.lambda.
CovarianceEstimate estimate_covariance(const Architecture& arch,
                                       const ParamVector& theta,
                                       const Dataset& data,
                                       const LikelihoodSpec& spec,
                                       RidgeScope scope = RidgeScope::kAll);

// tr(S A S^T).
double effective_df(const CovarianceEstimate& cov,
                    const Eigen::MatrixXd& s_matrix);

struct WaldResult {
  double statistic = 0.0;
  double df = 1.0;
  double p_value = 1.0;
  int target = 0;  // parameter index (single) or covariate index (multi)
};

// theta_j^2 / Sigma_jj against chi^2_1. Throws NumericalError if
// Sigma_jj <= 0.
WaldResult wald_single(const ParamVector& theta_hat,
                       const CovarianceEstimate& cov, int param_index);

// omega_j^T (S Sigma S^T)^-1 omega_j against chi^2 with effective df.
// Throws NumericalError if the sub-covariance is not positive definite.
WaldResult wald_multi(const ParamVector& theta_hat,
                      const CovarianceEstimate& cov, const Architecture& arch,
                      int covariate_index);

// "***" below 0.001, "**" below 0.01, "*" below 0.05, otherwise "".
std::string significance_code(double p_value);

inline constexpr const char* kSignificanceLegend =
    "Significance codes: 0 *** 0.001 ** 0.01 * 0.05";

struct WeightTest {
  int index = 0;   // flat parameter index
  std::string label;  // e.g. "omega[2,1]" or "gamma[1]"
  double estimate = 0.0;
  std::optional<WaldResult> wald;
  std::string error;  // set when the test could not be computed
};

struct CovariateTest {
  int j = 0;  // 1-based covariate index
  std::string name;
  std::optional<WaldResult> wald;
  std::string error;
};

struct InferenceReport {
  Architecture arch;
  ParamVector theta_hat;
  std::vector<std::string> column_names;
  double lambda = 0.0;
  double loglik = 0.0;
  std::optional<double> sigma_sq_hat;
  bool converged = false;
  bool positive_definite = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  // One entry per parameter in layout order.
  std::vector<WeightTest> weights;
  // One entry per covariate, j = 1..p.
  std::vector<CovariateTest> covariates;
  ReducibilityReport reducibility;

  const WeightTest& omega_test(int j, int k) const;
  const WeightTest& gamma_test(int k) const;
  // Warnings worth printing next to the table (non-convergence, non-PD,
  // reducibility).
  std::vector<std::string> warnings() const;
};

std::string parameter_label(const Architecture& arch, int index);

// Assembles every single- and multiple-parameter test. Cells whose test
// cannot be computed carry an error string instead of aborting the report.
InferenceReport summarize(const FitResult& fit, const CovarianceEstimate& cov,
                          const Architecture& arch, const Dataset& data);

}  // namespace nnstat

#include "nnstat/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "nnstat/distributions.hpp"
#include "nnstat/error.hpp"

namespace nnstat {

bool passes_pd_threshold(double min_eig, double max_eig) {
  return min_eig > kPdRelativeThreshold * std::max(1.0, max_eig);
}

CovarianceEstimate sandwich_covariance(const Eigen::MatrixXd& info,
                                       double lambda) {
  return sandwich_covariance(info, lambda,
                             Eigen::VectorXd::Ones(info.rows()));
}

CovarianceEstimate sandwich_covariance(const Eigen::MatrixXd& info,
                                       double lambda,
                                       const Eigen::VectorXd& ridge_mask) {
  if (info.rows() != info.cols() || info.rows() == 0) {
    throw InputError("information matrix must be square and nonempty");
  }
  if (!info.allFinite()) {
    throw InputError("information matrix has non-finite entries");
  }
  if (!(lambda >= 0.0)) throw InputError("lambda must be nonnegative");
  if (ridge_mask.size() != info.rows()) {
    throw InputError("ridge mask length does not match the information");
  }
  const double scale = std::max(1.0, info.cwiseAbs().maxCoeff());
  if (((info - info.transpose()).cwiseAbs().maxCoeff()) > 1e-10 * scale) {
    throw InputError("information matrix is not symmetric");
  }

  const int r = static_cast<int>(info.rows());
  Eigen::MatrixXd m = info;
  m.diagonal() += 2.0 * lambda * ridge_mask;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  // LDLT zeroes out null pivots instead of failing, so check them directly.
  const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
  const double eps = std::numeric_limits<double>::epsilon();
  if (ldlt.info() != Eigen::Success ||
      !(pivots.minCoeff() > eps * r * pivots.maxCoeff()) ||
      !(ldlt.rcond() > eps)) {
    throw NumericalError(std::string("I_o + 2*lambda*I is singular: ") +
                         kRidgeHint);
  }

  CovarianceEstimate out;
  out.lambda = lambda;
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(r, r);
  if (lambda == 0.0) {
    out.a_matrix = identity;
    out.sigma_hat = ldlt.solve(identity);
  } else {
    out.a_matrix = ldlt.solve(info);
    // M^-1 I_o M^-1 = (M^-1 A^T)^T.
    out.sigma_hat = ldlt.solve(out.a_matrix.transpose()).transpose();
  }
  out.sigma_hat = 0.5 * (out.sigma_hat + out.sigma_hat.transpose()).eval();

  if (!out.sigma_hat.allFinite()) {
    throw NumericalError(std::string("covariance has non-finite entries: ") +
                         kRidgeHint);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.sigma_hat,
                                                     Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("eigen-decomposition of the covariance failed");
  }
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  out.max_eigenvalue = eig.eigenvalues().maxCoeff();
  out.positive_definite =
      passes_pd_threshold(out.min_eigenvalue, out.max_eigenvalue);
  return out;
}

CovarianceEstimate estimate_covariance(const Architecture& arch,
                                       const ParamVector& theta,
                                       const Dataset& data,
                                       const LikelihoodSpec& spec,
                                       RidgeScope scope) {
  std::optional<SigmaSq> sigma_sq;
  if (spec.family == Family::kGaussian) {
    sigma_sq = profile_sigma_sq(arch, theta, data);
  }
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(theta.size());
  if (scope == RidgeScope::kPenalized) {
    for (int i = 0; i < theta.size(); ++i) {
      mask[i] = theta.is_penalized(i) ? 1.0 : 0.0;
    }
  }
  return sandwich_covariance(
      observed_information(arch, theta, data, spec, sigma_sq), spec.lambda,
      mask);
}

double effective_df(const CovarianceEstimate& cov,
                    const Eigen::MatrixXd& s_matrix) {
  if (s_matrix.cols() != cov.a_matrix.rows()) {
    throw InputError("selection matrix has " +
                     std::to_string(s_matrix.cols()) + " columns, expected " +
                     std::to_string(cov.a_matrix.rows()));
  }
  return (s_matrix * cov.a_matrix * s_matrix.transpose()).trace();
}

WaldResult wald_single(const ParamVector& theta_hat,
                       const CovarianceEstimate& cov, int param_index) {
  if (param_index < 0 || param_index >= theta_hat.size()) {
    throw InputError("parameter index " + std::to_string(param_index) +
                     " outside [0, " + std::to_string(theta_hat.size()) + ")");
  }
  if (cov.sigma_hat.rows() != theta_hat.size()) {
    throw InputError("covariance dimension does not match theta");
  }
  const double var = cov.sigma_hat(param_index, param_index);
  if (!(var > 0.0)) {
    throw NumericalError("nonpositive variance for parameter " +
                         std::to_string(param_index) + "; " + kRidgeHint);
  }
  const double t = theta_hat[param_index];
  WaldResult w;
  w.statistic = t * t / var;
  w.df = 1.0;
  w.p_value = chi_square_survival(w.statistic, 1.0);
  w.target = param_index;
  return w;
}

WaldResult wald_multi(const ParamVector& theta_hat,
                      const CovarianceEstimate& cov, const Architecture& arch,
                      int covariate_index) {
  check_compatible(arch, theta_hat);
  if (cov.sigma_hat.rows() != theta_hat.size()) {
    throw InputError("covariance dimension does not match theta");
  }
  const Eigen::MatrixXd s = selection_matrix(arch, covariate_index);
  const Eigen::VectorXd w = s * theta_hat.values();
  const Eigen::MatrixXd sub = s * cov.sigma_hat * s.transpose();

  double stat;
  if (arch.q == 1) {
    if (!(sub(0, 0) > 0.0)) {
      throw NumericalError("nonpositive variance for covariate " +
                           std::to_string(covariate_index) + "; " + kRidgeHint);
    }
    stat = w[0] * w[0] / sub(0, 0);
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("sub-covariance of covariate " +
                           std::to_string(covariate_index) +
                           " is not positive definite; " + kRidgeHint);
    }
    stat = w.dot(llt.solve(w));
  }
  const double df = effective_df(cov, s);
  if (!(df > 0.0)) {
    throw NumericalError("nonpositive effective degrees of freedom for "
                         "covariate " +
                         std::to_string(covariate_index));
  }
  WaldResult out;
  out.statistic = std::max(0.0, stat);
  out.df = df;
  out.p_value = chi_square_survival(out.statistic, df);
  out.target = covariate_index;
  return out;
}

std::string significance_code(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  return "";
}

std::string parameter_label(const Architecture& arch, int index) {
  const int q = arch.q;
  if (index < 0 || index >= arch.num_params()) {
    throw InputError("parameter index out of range");
  }
  if (index < (arch.p + 1) * q) {
    const int j = index / q;
    const int k = index % q + 1;
    return "omega[" + std::to_string(j) + "," + std::to_string(k) + "]";
  }
  return "gamma[" + std::to_string(index - (arch.p + 1) * q) + "]";
}

const WeightTest& InferenceReport::omega_test(int j, int k) const {
  return weights.at(static_cast<size_t>(j * arch.q + (k - 1)));
}

const WeightTest& InferenceReport::gamma_test(int k) const {
  return weights.at(static_cast<size_t>((arch.p + 1) * arch.q + k));
}

std::vector<std::string> InferenceReport::warnings() const {
  std::vector<std::string> out;
  if (!converged) {
    out.push_back("optimizer did not reach the gradient tolerance");
  }
  if (!positive_definite) out.push_back(kRidgeHint);
  for (const auto& r : reducibility.reasons) {
    std::string nodes;
    for (int k : r.nodes) {
      if (!nodes.empty()) nodes += ",";
      nodes += std::to_string(k);
    }
    out.push_back("network may be reducible: " + to_string(r.kind) +
                  " (hidden nodes " + nodes + ")");
  }
  return out;
}

InferenceReport summarize(const FitResult& fit, const CovarianceEstimate& cov,
                          const Architecture& arch, const Dataset& data) {
  check_compatible(arch, fit.theta_hat);
  check_compatible(arch, data);
  InferenceReport rep;
  rep.arch = arch;
  rep.theta_hat = fit.theta_hat;
  rep.lambda = fit.lambda;
  rep.loglik = fit.loglik;
  rep.sigma_sq_hat = fit.sigma_sq_hat;
  rep.converged = fit.converged;
  rep.positive_definite = cov.positive_definite;
  rep.min_eigenvalue = cov.min_eigenvalue;
  rep.max_eigenvalue = cov.max_eigenvalue;
  for (int j = 0; j < data.p(); ++j) {
    rep.column_names.push_back(static_cast<size_t>(j) < data.columns.size()
                                   ? data.columns[j].name
                                   : "x" + std::to_string(j + 1));
  }

  for (int i = 0; i < arch.num_params(); ++i) {
    WeightTest t;
    t.index = i;
    t.label = parameter_label(arch, i);
    t.estimate = fit.theta_hat[i];
    try {
      t.wald = wald_single(fit.theta_hat, cov, i);
    } catch (const Error& e) {
      t.error = e.what();
    }
    rep.weights.push_back(std::move(t));
  }
  for (int j = 1; j <= arch.p; ++j) {
    CovariateTest t;
    t.j = j;
    t.name = rep.column_names[j - 1];
    try {
      t.wald = wald_multi(fit.theta_hat, cov, arch, j);
    } catch (const Error& e) {
      t.error = e.what();
    }
    rep.covariates.push_back(std::move(t));
  }
  rep.reducibility = check_reducible(arch, fit.theta_hat, data);
  return rep;
}

}  // namespace nnstat

#pragma once

// Hidden-layer-size selection by BIC and k-fold cross-validated RMSE, and the
// ordinary least squares baseline. Candidate q = 0 denotes the linear model.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nnstat/fit.hpp"
#include "nnstat/likelihood.hpp"
#include "nnstat/model.hpp"

namespace nnstat {

struct LinearFit {
  std::vector<std::string> names;  // "intercept", then the covariates
  Eigen::VectorXd beta;            // length p + 1
  Eigen::VectorXd se;
  Eigen::VectorXd z;
  Eigen::VectorXd p_values;  // two-sided normal
  double rss = 0.0;
  double sigma_sq = 0.0;  // RSS / (n - p - 1)
  int n = 0;

  Eigen::VectorXd predict(const RowMatrix& x) const;
  // Gaussian log-likelihood at the maximum likelihood variance RSS / n.
  double loglik() const;
};

// OLS with classical standard errors. Throws InputError when n <= p + 1 or
// the design is rank deficient (the message names the collinear columns).
LinearFit fit_linear(const Dataset& data);

// -2 * loglik + k * log(n).
double bic(double loglik, int k, int n);
// r + 1 for Gaussian (sigma^2 counted), r for Bernoulli.
int bic_param_count(const Architecture& arch, Family family);
// BIC of a fitted network. The log-likelihood is unpenalized, at the
// profiled sigma^2 for Gaussian responses, whatever lambda was used to fit.
double bic(const Architecture& arch, const ParamVector& theta,
           const Dataset& data, Family family);
// K = p + 2.
double bic(const LinearFit& fit);

struct CvConfig {
  int folds = 5;
  std::uint64_t seed = 1;  // fold assignment
  int threads = 1;         // folds run in parallel
  FitConfig fit;           // per-fold network fits; fit.threads is ignored
};

struct CvResult {
  double rmse = 0.0;  // mean of the fold RMSEs
  double se = 0.0;    // sample sd of the fold RMSEs / sqrt(folds)
  std::vector<double> fold_rmse;
};

// Fold index of each row: a seeded shuffle dealt round-robin, so fold sizes
// differ by at most one.
std::vector<int> fold_assignment(int n, int folds, std::uint64_t seed);

// Cross-validated RMSE of a q-hidden-node network (q >= 1) or the linear
// model (q = 0). Covariates, and the response when it was standardized, are
// re-standardized from training-fold statistics; RMSE is measured on the
// original response scale. Fold fits use seeds derived from
// (config.fit.seed, q, fold). Throws InputError for bad fold counts and
// NumericalError naming the fold when a fold fit fails.
CvResult cross_validate(int q, const Dataset& data, const LikelihoodSpec& spec,
                        const CvConfig& config);

struct SweepEntry {
  int q = 0;
  std::optional<double> bic;
  std::optional<double> cv_rmse;
  std::optional<double> cv_se;
  std::string error;  // empty when every cell was computed
};

struct SelectionSweep {
  std::vector<SweepEntry> entries;

  const SweepEntry* find(int q) const;
  // Candidate with the smallest BIC / CV RMSE; nullopt if none computed.
  std::optional<int> best_by_bic() const;
  std::optional<int> best_by_cv() const;
};

// Full-data BIC and cross-validated RMSE per candidate. Throws InputError
// for an empty or duplicated q list; per-candidate failures are recorded in
// the entry.
SelectionSweep sweep(const Dataset& data, const std::vector<int>& q_list,
                     const LikelihoodSpec& spec, const CvConfig& config);

}  // namespace nnstat

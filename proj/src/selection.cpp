#include "nnstat/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "nnstat/distributions.hpp"
#include "nnstat/error.hpp"
#include "nnstat/parallel.hpp"
#include "nnstat/preprocess.hpp"

namespace nnstat {

namespace {

constexpr std::uint64_t kFoldStream = 0xF01D;

std::string covariate_name(const Dataset& data, int j) {
  if (j < static_cast<int>(data.columns.size())) return data.columns[j].name;
  return "x" + std::to_string(j + 1);
}

Eigen::MatrixXd design(const RowMatrix& x) {
  Eigen::MatrixXd d(x.rows(), x.cols() + 1);
  d.col(0).setOnes();
  d.rightCols(x.cols()) = x;
  return d;
}

Architecture arch_for(int p, int q, Family family) {
  Architecture a;
  a.p = p;
  a.q = q;
  a.output = output_for(family);
  return a;
}

double rmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  return std::sqrt((pred - truth).squaredNorm() / truth.size());
}

}  // namespace

Eigen::VectorXd LinearFit::predict(const RowMatrix& x) const {
  if (x.cols() + 1 != beta.size()) {
    throw InputError("linear model expects " + std::to_string(beta.size() - 1) +
                     " covariates, got " + std::to_string(x.cols()));
  }
  return design(x) * beta;
}

double LinearFit::loglik() const {
  const double s2 = std::max(rss / n, std::numeric_limits<double>::min());
  return -0.5 * n * (std::log(2.0 * std::numbers::pi * s2) + 1.0);
}

LinearFit fit_linear(const Dataset& data) {
  data.validate();
  const int n = data.n(), p = data.p();
  if (n <= p + 1) {
    throw InputError("linear model needs n > p + 1 (n = " + std::to_string(n) +
                     ", p = " + std::to_string(p) + ")");
  }
  const Eigen::MatrixXd x = design(data.x);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < p + 1) {
    std::string names;
    const auto& perm = qr.colsPermutation().indices();
    for (int i = static_cast<int>(qr.rank()); i < p + 1; ++i) {
      const int c = perm[i];
      if (!names.empty()) names += ", ";
      names += c == 0 ? "intercept" : covariate_name(data, c - 1);
    }
    throw InputError("rank-deficient design; collinear columns: " + names);
  }
  const Eigen::MatrixXd xtx = x.transpose() * x;
  Eigen::LLT<Eigen::MatrixXd> llt(xtx);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("X'X is not positive definite");
  }
  LinearFit f;
  f.n = n;
  f.names.push_back("intercept");
  for (int j = 0; j < p; ++j) f.names.push_back(covariate_name(data, j));
  f.beta = llt.solve(x.transpose() * data.y);
  f.rss = (data.y - x * f.beta).squaredNorm();
  f.sigma_sq = f.rss / (n - p - 1);
  const Eigen::MatrixXd inv =
      llt.solve(Eigen::MatrixXd::Identity(p + 1, p + 1));
  f.se = (f.sigma_sq * inv.diagonal()).cwiseSqrt();
  f.z.resize(p + 1);
  f.p_values.resize(p + 1);
  for (int i = 0; i <= p; ++i) {
    f.z[i] = f.beta[i] / f.se[i];
    f.p_values[i] = normal_two_sided_p(f.z[i]);
  }
  return f;
}

double bic(double loglik, int k, int n) {
  return -2.0 * loglik + k * std::log(static_cast<double>(n));
}

int bic_param_count(const Architecture& arch, Family family) {
  return arch.num_params() + (family == Family::kGaussian ? 1 : 0);
}

double bic(const Architecture& arch, const ParamVector& theta,
           const Dataset& data, Family family) {
  const LikelihoodSpec spec{family, 0.0};
  std::optional<SigmaSq> s2;
  if (family == Family::kGaussian) s2 = profile_sigma_sq(arch, theta, data);
  const double ll = log_likelihood(arch, theta, data, spec, s2);
  return bic(ll, bic_param_count(arch, family), data.n());
}

double bic(const LinearFit& fit) {
  return bic(fit.loglik(), static_cast<int>(fit.beta.size()) + 1, fit.n);
}

std::vector<int> fold_assignment(int n, int folds, std::uint64_t seed) {
  if (folds < 2) throw InputError("cross-validation needs at least 2 folds");
  if (n < folds) {
    throw InputError("cross-validation needs n >= folds (n = " +
                     std::to_string(n) + ", folds = " + std::to_string(folds) +
                     ")");
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  // Fisher-Yates with a raw 64-bit engine, so the permutation does not depend
  // on the standard library's distribution implementations.
  std::mt19937_64 rng(derive_seed(seed, kFoldStream));
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<int> fold(n);
  for (int i = 0; i < n; ++i) fold[order[i]] = i % folds;
  return fold;
}

CvResult cross_validate(int q, const Dataset& data, const LikelihoodSpec& spec,
                        const CvConfig& config) {
  data.validate();
  if (q < 0) throw InputError("hidden-layer size must be nonnegative");
  if (q == 0 && spec.family != Family::kGaussian) {
    throw InputError("the linear baseline needs a gaussian response");
  }
  config.fit.validate();
  const std::vector<int> fold =
      fold_assignment(data.n(), config.folds, config.seed);
  const Dataset raw = destandardize(data);
  const bool scale_y = data.response.standardized;

  CvResult res;
  res.fold_rmse.assign(config.folds, 0.0);
  std::vector<std::string> errors(config.folds);
  parallel_for(config.folds, config.threads, [&](int f) {
    std::vector<int> train, test;
    for (int i = 0; i < data.n(); ++i) (fold[i] == f ? test : train).push_back(i);
    try {
      const Dataset all = standardize(raw, train, scale_y);
      const Dataset tr = all.subset(train);
      const Dataset te = all.subset(test);
      Eigen::VectorXd pred;
      if (q == 0) {
        pred = fit_linear(tr).predict(te.x);
      } else {
        const Architecture arch = arch_for(data.p(), q, spec.family);
        FitConfig fc = config.fit;
        fc.seed = derive_seed(config.fit.seed, static_cast<std::uint64_t>(q),
                              static_cast<std::uint64_t>(f));
        fc.threads = 1;
        pred = forward_batch(arch, fit(arch, tr, spec, fc).theta_hat, te);
      }
      if (scale_y) {
        pred = (pred.array() * all.response.sd + all.response.mean).matrix();
      }
      Eigen::VectorXd truth(test.size());
      for (size_t i = 0; i < test.size(); ++i) truth[i] = raw.y[test[i]];
      res.fold_rmse[f] = rmse(pred, truth);
    } catch (const Error& e) {
      errors[f] = e.what();
    }
  });
  for (int f = 0; f < config.folds; ++f) {
    if (!errors[f].empty()) {
      throw NumericalError("fold " + std::to_string(f + 1) + " failed: " +
                           errors[f]);
    }
  }
  const int k = config.folds;
  double mean = 0.0;
  for (double v : res.fold_rmse) mean += v;
  mean /= k;
  double ss = 0.0;
  for (double v : res.fold_rmse) ss += (v - mean) * (v - mean);
  res.rmse = mean;
  res.se = std::sqrt(ss / (k - 1)) / std::sqrt(static_cast<double>(k));
  return res;
}

const SweepEntry* SelectionSweep::find(int q) const {
  for (const auto& e : entries) {
    if (e.q == q) return &e;
  }
  return nullptr;
}

namespace {

std::optional<int> best_of(const std::vector<SweepEntry>& entries,
                           std::optional<double> SweepEntry::*field) {
  std::optional<int> best;
  double best_v = 0.0;
  for (const auto& e : entries) {
    const auto& v = e.*field;
    if (v && (!best || *v < best_v)) {
      best = e.q;
      best_v = *v;
    }
  }
  return best;
}

}  // namespace

std::optional<int> SelectionSweep::best_by_bic() const {
  return best_of(entries, &SweepEntry::bic);
}

std::optional<int> SelectionSweep::best_by_cv() const {
  return best_of(entries, &SweepEntry::cv_rmse);
}

SelectionSweep sweep(const Dataset& data, const std::vector<int>& q_list,
                     const LikelihoodSpec& spec, const CvConfig& config) {
  if (q_list.empty()) throw InputError("candidate q list is empty");
  std::set<int> seen;
  for (int q : q_list) {
    if (q < 0) throw InputError("hidden-layer size must be nonnegative");
    if (!seen.insert(q).second) {
      throw InputError("duplicate candidate q = " + std::to_string(q));
    }
  }
  SelectionSweep out;
  for (int q : q_list) {
    SweepEntry e;
    e.q = q;
    try {
      if (q == 0) {
        e.bic = bic(fit_linear(data));
      } else {
        const Architecture arch = arch_for(data.p(), q, spec.family);
        FitConfig fc = config.fit;
        fc.threads = config.threads;
        const FitResult f = fit(arch, data, spec, fc);
        e.bic = bic(arch, f.theta_hat, data, spec.family);
      }
    } catch (const Error& err) {
      e.error = std::string("bic: ") + err.what();
    }
    try {
      const CvResult cv = cross_validate(q, data, spec, config);
      e.cv_rmse = cv.rmse;
      e.cv_se = cv.se;
    } catch (const Error& err) {
      if (!e.error.empty()) e.error += "; ";
      e.error += std::string("cv: ") + err.what();
    }
    out.entries.push_back(e);
  }
  return out;
}

}  // namespace nnstat

#include "nnstat/fit.hpp"

#include <cmath>
#include <limits>

#include "nnstat/canonical.hpp"
#include "nnstat/error.hpp"
#include "nnstat/optimizer.hpp"
#include "nnstat/parallel.hpp"

namespace nnstat {

void FitConfig::validate() const {
  if (n_restarts < 1) throw InputError("n_restarts must be at least 1");
  if (!(grad_tol > 0.0)) throw InputError("grad_tol must be positive");
  if (max_iters < 0) throw InputError("max_iters must be nonnegative");
  if (!(init_scale >= 0.0)) throw InputError("init_scale must be nonnegative");
}

ParamVector initialize(const Architecture& arch, double init_scale,
                       std::mt19937_64& rng) {
  ParamVector theta(arch);
  if (init_scale == 0.0) return theta;
  std::uniform_real_distribution<double> unif(-init_scale, init_scale);
  for (int i = 0; i < theta.size(); ++i) theta[i] = unif(rng);
  return theta;
}

std::optional<SigmaSq> fitting_sigma_sq(const LikelihoodSpec& spec) {
  if (spec.family == Family::kGaussian) return SigmaSq(1.0);
  return std::nullopt;
}

double reported_loglik(const Architecture& arch, const ParamVector& theta,
                       const Dataset& data, const LikelihoodSpec& spec) {
  if (spec.family == Family::kGaussian) {
    return log_likelihood(arch, theta, data, spec,
                          profile_sigma_sq(arch, theta, data));
  }
  return log_likelihood(arch, theta, data, spec);
}

LocalFit fit_from(const Architecture& arch, const Dataset& data,
                  const LikelihoodSpec& spec, const ParamVector& start,
                  const FitConfig& config, bool record_trace) {
  spec.validate(arch);
  check_compatible(arch, data);
  const auto sigma_sq = fitting_sigma_sq(spec);

  ObjectiveFn objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
    const ParamVector theta(arch, v);
    const double ll =
        log_likelihood_and_gradient(arch, theta, data, spec, sigma_sq, g);
    g = -g;
    return -ll;
  };
  HessianFn hessian = [&](const Eigen::VectorXd& v) {
    const ParamVector theta(arch, v);
    Eigen::MatrixXd h = observed_information(arch, theta, data, spec, sigma_sq);
    for (int i = 0; i < theta.size(); ++i) {
      if (theta.is_penalized(i)) h(i, i) += 2.0 * spec.lambda;
    }
    return h;
  };

  BfgsOptions options;
  options.max_iters = config.max_iters;
  options.grad_tol = config.grad_tol;
  options.record_trace = record_trace;
  BfgsResult r = minimize_bfgs(objective, start.values(), options, hessian);

  LocalFit out;
  out.theta = ParamVector(arch, r.x);
  out.objective = -r.value;
  out.grad_max = r.grad_max;
  out.iterations = r.iterations;
  out.converged = r.converged;
  out.status = r.status;
  for (double v : r.trace) out.trace.push_back(-v);
  return out;
}

FitResult fit(const Architecture& arch, const Dataset& data,
              const LikelihoodSpec& spec, const FitConfig& config) {
  config.validate();
  spec.validate(arch);
  check_compatible(arch, data);
  data.validate();

  const int restarts = config.n_restarts;
  std::vector<LocalFit> locals(restarts);
  std::vector<double> logliks(restarts,
                              -std::numeric_limits<double>::infinity());
  std::vector<std::string> status(restarts);

  parallel_for(restarts, config.threads, [&](int i) {
    std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(i)));
    const ParamVector start = initialize(arch, config.init_scale, rng);
    try {
      locals[i] = fit_from(arch, data, spec, start, config);
      const double ll = reported_loglik(arch, locals[i].theta, data, spec);
      if (!std::isfinite(ll) || !locals[i].theta.values().allFinite()) {
        status[i] = "non-finite objective";
        return;
      }
      logliks[i] = ll;
      status[i] = locals[i].status;
    } catch (const NumericalError& e) {
      status[i] = e.what();
    }
  });

  int best = -1;
  for (int i = 0; i < restarts; ++i) {
    if (std::isfinite(logliks[i]) && (best < 0 || logliks[i] > logliks[best])) {
      best = i;
    }
  }
  if (best < 0) {
    std::string msg = "all restarts failed:";
    for (int i = 0; i < restarts; ++i) {
      msg += " [" + std::to_string(i) + "] " + status[i] + ";";
    }
    throw NumericalError(msg);
  }

  FitResult result;
  result.theta_hat = canonicalize(locals[best].theta);
  result.loglik = logliks[best];
  if (spec.family == Family::kGaussian) {
    result.sigma_sq_hat = profile_sigma_sq(arch, result.theta_hat, data).value();
  }
  result.restart_logliks = std::move(logliks);
  result.restart_status = std::move(status);
  result.converged = locals[best].converged;
  result.iterations = locals[best].iterations;
  result.grad_max = locals[best].grad_max;
  result.best_restart = best;
  result.lambda = spec.lambda;
  return result;
}

}  // namespace nnstat

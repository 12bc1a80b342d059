#pragma once

// Penalized maximum-likelihood fitting with random restarts.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nnstat/likelihood.hpp"
#include "nnstat/model.hpp"

namespace nnstat {

struct FitConfig {
  int n_restarts = 10;
  int max_iters = 5000;
  double grad_tol = 1e-8;
  double init_scale = 0.5;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

struct FitResult {
  ParamVector theta_hat;
  // Penalized log-likelihood at theta_hat. Gaussian fits evaluate it at the
  // profiled sigma_sq_hat = RSS / n.
  double loglik = 0.0;
  std::optional<double> sigma_sq_hat;
  std::vector<double> restart_logliks;  // -inf for failed restarts
  std::vector<std::string> restart_status;
  bool converged = false;
  int iterations = 0;
  double grad_max = 0.0;  // max-norm of the fitting-objective gradient
  int best_restart = 0;
  double lambda = 0.0;
};

// i.i.d. uniform(-init_scale, init_scale) parameters.
ParamVector initialize(const Architecture& arch, double init_scale,
                       std::mt19937_64& rng);

// The objective actually optimized: for Gaussian responses the penalized
// log-likelihood at sigma^2 = 1 (a monotone rescaling of penalized RSS), for
// Bernoulli responses the penalized log-likelihood itself.
std::optional<SigmaSq> fitting_sigma_sq(const LikelihoodSpec& spec);

// Penalized log-likelihood used to rank restarts and reported in FitResult.
double reported_loglik(const Architecture& arch, const ParamVector& theta,
                       const Dataset& data, const LikelihoodSpec& spec);

// Runs config.n_restarts optimizations from random starts (restart i draws
// from a stream seeded by (seed, i)) and returns the best, canonicalized.
// Throws NumericalError when every restart fails.
FitResult fit(const Architecture& arch, const Dataset& data,
              const LikelihoodSpec& spec, const FitConfig& config);

// Single optimization from a given start; no canonicalization.
struct LocalFit {
  ParamVector theta;
  double objective = 0.0;  // penalized log-likelihood on the fitting scale
  double grad_max = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status;
  std::vector<double> trace;
};

LocalFit fit_from(const Architecture& arch, const Dataset& data,
                  const LikelihoodSpec& spec, const ParamVector& start,
                  const FitConfig& config, bool record_trace = false);

}  // namespace nnstat

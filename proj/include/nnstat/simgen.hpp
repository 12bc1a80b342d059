#pragma once

// Monte Carlo studies of the Wald tests and covariance estimator: type-I
// error, power, SE/SEE/coverage tables and positive-definiteness rates.
//
// Each replicate draws x ~ N(0, 1) i.i.d., y = NN(x, truth) + N(0, sd^2),
// fits with random restarts, aligns the estimate to the truth over all
// 2^q q! symmetries, recomputes the covariance at the aligned estimate and
// records the tests.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nnstat/model.hpp"

namespace nnstat {

// Which covariates are disconnected in the truth: "5-1" zeroes x1, "3-3"
// zeroes x1, x3 and x4.
enum class NzPattern { k5_1, k3_3 };

std::string to_string(NzPattern p);
NzPattern parse_nz_pattern(const std::string& s);
// 1-based indices of the zero covariates (p = 6).
std::vector<int> zero_covariates(NzPattern p);

// Default truth for p = 6 and q in {2, 4, 6}. omega_2 comes from the
// published tables; everything else is a documented default.
ParamVector default_true_theta(int q, NzPattern pattern);

struct SimScenario {
  int p = 6;
  int q = 2;
  NzPattern pattern = NzPattern::k5_1;
  ParamVector true_theta;  // empty means default_true_theta(q, pattern)
  int n = 1000;
  double lambda = 0.01;
  int replicates = 200;
  int restarts = 10;
  std::uint64_t seed = 1;
  double noise_sd = 1.0;
  int threads = 1;
  // Skip Wald tests and per-parameter tables (positive-definiteness only).
  bool pd_only = false;

  Architecture arch() const;
  // The truth in use, with defaults filled in.
  ParamVector truth() const;
  // Throws InputError on bad sizes or a truth that connects a zero
  // covariate.
  void validate() const;
};

Dataset generate(const SimScenario& scenario, int replicate);

struct RateSummary {
  std::string target;  // e.g. "omega[1,1]" or "omega[2]"
  std::string kind;    // "type_I" or "power"
  std::string test;    // "SP" or "MP"
  double rate = 0.0;   // rejections / replicates
  int rejections = 0;
  int computable = 0;  // replicates where the test could be computed
  int replicates = 0;
};

struct ParamSummary {
  int index = 0;
  std::string label;
  double truth = 0.0;
  double mean = 0.0;  // over fitted replicates
  double se = 0.0;    // sd of the estimates over fitted replicates
  double see = 0.0;   // mean estimated standard error over PD replicates
  double cp = 0.0;    // 95% coverage over PD replicates
  int fitted = 0;
  int pd = 0;
};

struct SimReport {
  SimScenario scenario;
  int replicates = 0;
  int failures = 0;  // replicates whose fit or covariance failed
  int pd_count = 0;
  double pd_rate = 0.0;  // pd_count / replicates
  std::vector<RateSummary> rates;
  std::vector<ParamSummary> params;
  std::vector<std::string> failure_reasons;  // "replicate i: reason"
};

SimReport run_scenario(const SimScenario& scenario);

struct PowerRow {
  double effect = 0.0;
  RateSummary sp;  // omega_21
  RateSummary mp;  // omega_2
};

// For each value v, sets omega_2 = (v, ..., v) and reruns the scenario.
std::vector<PowerRow> power_sweep(const SimScenario& base,
                                  const std::vector<double>& effects);

struct PdCell {
  double lambda = 0.0;
  int q = 0;
  NzPattern pattern = NzPattern::k5_1;
  int n = 0;
  int replicates = 0;
  int pd_count = 0;
  double pd_rate = 0.0;
};

// Positive-definiteness rate over a grid of lambda x q x pattern x n.
std::vector<PdCell> pd_study(const SimScenario& base,
                             const std::vector<double>& lambdas,
                             const std::vector<int>& qs,
                             const std::vector<NzPattern>& patterns,
                             const std::vector<int>& ns);

}  // namespace nnstat

#pragma once

// Partial dependence and partial covariate effects (PCE).
//
//   NNbar(x)   = (1/n) sum_i NN(x_i with column j set to x)
//   beta(x, d) = NNbar(x + d) - NNbar(x)
//
// Standard errors come from the delta method, se = sqrt(g^T Sigma g) with
// g the analytic gradient of beta with respect to theta. Bands are
// pointwise.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "nnstat/inference.hpp"
#include "nnstat/model.hpp"

namespace nnstat {

// Column `col` (1-based) pinned to `value` in every row.
struct Pin {
  int col = 1;
  double value = 0.0;
};

struct Conditioning {
  int k = 1;  // 1-based covariate index
  std::vector<double> values;
  // Optional labels, one per value; defaults to "name=value".
  std::vector<std::string> labels;
};

struct PceConfig {
  int j = 1;
  // Step; defaults to the sample sd of column j.
  std::optional<double> d;
  // Grid of x^(j) values; defaults to default_grid().
  std::vector<double> grid;
  double level = 0.95;
  std::optional<Conditioning> conditioning;
};

enum class EffectScale { kStandardized, kOriginal };
std::string to_string(EffectScale s);

struct PcePoint {
  double x = 0.0;
  double beta_hat = 0.0;
  double se = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::string label;  // conditioning label, empty without conditioning
};

struct PceCurve {
  int j = 1;
  double d = 1.0;
  double level = 0.95;
  EffectScale scale = EffectScale::kStandardized;
  // Grouped by label in conditioning order, x increasing within a group.
  std::vector<PcePoint> points;

  std::vector<std::string> labels() const;
  // Points belonging to one label.
  PceCurve select(const std::string& label) const;
};

struct PceEstimate {
  double beta_hat = 0.0;
  double se = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Sample sd (n - 1) of column j (1-based).
double default_step(const Dataset& data, int j);

// `points` equally spaced values over [min, max - d] of column j.
std::vector<double> default_grid(const Dataset& data, int j, double d,
                                 int points = 101);

double partial_dependence(const Architecture& arch, const ParamVector& theta,
                          const Dataset& data, int j, double x_value,
                          std::span<const Pin> extra_pins = {});

// beta(x, d) with the given extra pins, and its gradient in theta.
double pce_value(const Architecture& arch, const ParamVector& theta,
                 const Dataset& data, int j, double x, double d,
                 std::span<const Pin> extra_pins = {});
Eigen::VectorXd pce_gradient(const Architecture& arch,
                             const ParamVector& theta, const Dataset& data,
                             int j, double x, double d,
                             std::span<const Pin> extra_pins = {});

// Throws InputError for a bad config and NumericalError when the
// covariance is not positive definite.
PceCurve pce_curve(const Architecture& arch, const ParamVector& theta,
                   const CovarianceEstimate& cov, const Dataset& data,
                   const PceConfig& config);

// Effect of switching dummy column j from 0 to 1.
PceEstimate pce_binary(const Architecture& arch, const ParamVector& theta,
                       const CovarianceEstimate& cov, const Dataset& data,
                       int j, double level = 0.95);

// Two conditioned curves for covariate j with covariate k pinned at
// mean -/+ sd (continuous) or 0 / 1 (dummy). Grid and step as in `base`.
std::pair<PceCurve, PceCurve> interaction_screen(
    const Architecture& arch, const ParamVector& theta,
    const CovarianceEstimate& cov, const Dataset& data, int j, int k,
    const PceConfig& base = {});

// Grid mapped through column j's mean/sd, effects scaled by the response sd.
PceCurve to_original_scale(const PceCurve& curve,
                           const std::vector<ColumnMeta>& columns,
                           const ResponseMeta& response);
PceEstimate to_original_scale(const PceEstimate& e,
                              const ResponseMeta& response);

}  // namespace nnstat

#include "nnstat/effects.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nnstat/distributions.hpp"
#include "nnstat/error.hpp"

namespace nnstat {

namespace {

void check_column(const Dataset& data, int j, const char* what) {
  if (j < 1 || j > data.p()) {
    throw InputError(std::string(what) + " index " + std::to_string(j) +
                     " outside [1, " + std::to_string(data.p()) + "]");
  }
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string column_name(const Dataset& data, int j) {
  if (static_cast<int>(data.columns.size()) >= j) return data.columns[j - 1].name;
  return "x" + std::to_string(j);
}

// Accumulates NN over the rows with the pins applied; optionally also the
// theta-gradient of NN scaled by `weight`.
double accumulate(const Architecture& arch, const ParamVector& theta,
                  const Dataset& data, std::span<const Pin> pins, double weight,
                  Eigen::VectorXd* grad) {
  const int p = arch.p, q = arch.q;
  std::vector<double> x(p), h(q);
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    for (int c = 0; c < p; ++c) x[c] = data.x(i, c);
    for (const Pin& pin : pins) x[pin.col - 1] = pin.value;
    double eta = theta.gamma(0);
    for (int k = 1; k <= q; ++k) {
      double s = theta.omega(0, k);
      for (int c = 1; c <= p; ++c) s += theta.omega(c, k) * x[c - 1];
      h[k - 1] = sigmoid(s);
      eta += theta.gamma(k) * h[k - 1];
    }
    const double mu = apply_output(arch.output, eta);
    total += mu;
    if (grad == nullptr) continue;
    const double dmu =
        weight * (arch.output == OutputActivation::kLogistic ? mu * (1.0 - mu)
                                                              : 1.0);
    Eigen::VectorXd& g = *grad;
    g[theta.gamma_index(0)] += dmu;
    for (int k = 1; k <= q; ++k) {
      const double hk = h[k - 1];
      g[theta.gamma_index(k)] += dmu * hk;
      const double ds = dmu * theta.gamma(k) * hk * (1.0 - hk);
      g[theta.omega_index(0, k)] += ds;
      for (int c = 1; c <= p; ++c) g[theta.omega_index(c, k)] += ds * x[c - 1];
    }
  }
  return total;
}

std::vector<Pin> with_pin(std::span<const Pin> extra, int j, double v) {
  std::vector<Pin> pins(extra.begin(), extra.end());
  pins.push_back({j, v});
  return pins;
}

void check_inputs(const Architecture& arch, const ParamVector& theta,
                  const Dataset& data, int j, std::span<const Pin> pins) {
  check_compatible(arch, theta);
  check_compatible(arch, data);
  check_column(data, j, "covariate");
  for (const Pin& pin : pins) check_column(data, pin.col, "pinned covariate");
}

PcePoint make_point(const Architecture& arch, const ParamVector& theta,
                    const CovarianceEstimate& cov, const Dataset& data, int j,
                    double x, double d, double z, std::span<const Pin> pins) {
  PcePoint pt;
  pt.x = x;
  pt.beta_hat = pce_value(arch, theta, data, j, x, d, pins);
  const Eigen::VectorXd g = pce_gradient(arch, theta, data, j, x, d, pins);
  pt.se = std::sqrt(std::max(0.0, g.dot(cov.sigma_hat * g)));
  pt.lo = pt.beta_hat - z * pt.se;
  pt.hi = pt.beta_hat + z * pt.se;
  return pt;
}

void require_pd(const CovarianceEstimate& cov, const ParamVector& theta) {
  if (cov.sigma_hat.rows() != theta.size()) {
    throw InputError("covariance dimension does not match theta");
  }
  if (!cov.positive_definite) {
    throw NumericalError(std::string("confidence bands are undefined: ") +
                         kRidgeHint);
  }
}

}  // namespace

std::string to_string(EffectScale s) {
  return s == EffectScale::kOriginal ? "original" : "standardized";
}

std::vector<std::string> PceCurve::labels() const {
  std::vector<std::string> out;
  for (const auto& pt : points) {
    if (std::find(out.begin(), out.end(), pt.label) == out.end()) {
      out.push_back(pt.label);
    }
  }
  return out;
}

PceCurve PceCurve::select(const std::string& label) const {
  PceCurve out = *this;
  out.points.clear();
  for (const auto& pt : points) {
    if (pt.label == label) out.points.push_back(pt);
  }
  return out;
}

double default_step(const Dataset& data, int j) {
  check_column(data, j, "covariate");
  const int n = data.n();
  if (n < 2) throw InputError("default step needs at least two rows");
  const auto col = data.x.col(j - 1);
  const double mean = col.mean();
  return std::sqrt((col.array() - mean).square().sum() / (n - 1));
}

std::vector<double> default_grid(const Dataset& data, int j, double d,
                                 int points) {
  check_column(data, j, "covariate");
  if (points < 1) throw InputError("grid needs at least one point");
  const auto col = data.x.col(j - 1);
  const double lo = col.minCoeff();
  const double hi = col.maxCoeff() - std::max(0.0, d);
  if (!(hi > lo) || points == 1) return {lo};
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    grid[i] = lo + (hi - lo) * i / (points - 1);
  }
  grid.back() = hi;
  return grid;
}

double partial_dependence(const Architecture& arch, const ParamVector& theta,
                          const Dataset& data, int j, double x_value,
                          std::span<const Pin> extra_pins) {
  check_inputs(arch, theta, data, j, extra_pins);
  const auto pins = with_pin(extra_pins, j, x_value);
  return accumulate(arch, theta, data, pins, 0.0, nullptr) / data.n();
}

double pce_value(const Architecture& arch, const ParamVector& theta,
                 const Dataset& data, int j, double x, double d,
                 std::span<const Pin> extra_pins) {
  return partial_dependence(arch, theta, data, j, x + d, extra_pins) -
         partial_dependence(arch, theta, data, j, x, extra_pins);
}

Eigen::VectorXd pce_gradient(const Architecture& arch,
                             const ParamVector& theta, const Dataset& data,
                             int j, double x, double d,
                             std::span<const Pin> extra_pins) {
  check_inputs(arch, theta, data, j, extra_pins);
  Eigen::VectorXd hi = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(theta.size());
  const double w = 1.0 / data.n();
  accumulate(arch, theta, data, with_pin(extra_pins, j, x + d), w, &hi);
  accumulate(arch, theta, data, with_pin(extra_pins, j, x), w, &lo);
  return hi - lo;
}

PceCurve pce_curve(const Architecture& arch, const ParamVector& theta,
                   const CovarianceEstimate& cov, const Dataset& data,
                   const PceConfig& config) {
  check_inputs(arch, theta, data, config.j, {});
  const double d = config.d ? *config.d : default_step(data, config.j);
  if (!std::isfinite(d)) throw InputError("PCE step d must be finite");
  std::vector<double> grid =
      config.grid.empty() ? default_grid(data, config.j, d) : config.grid;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw InputError("PCE grid must be finite");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InputError("PCE grid must be strictly increasing");
    }
  }
  const double z = z_for_level(config.level);
  require_pd(cov, theta);

  PceCurve curve;
  curve.j = config.j;
  curve.d = d;
  curve.level = config.level;

  std::vector<std::pair<std::string, std::vector<Pin>>> groups;
  if (config.conditioning) {
    const Conditioning& c = *config.conditioning;
    check_column(data, c.k, "conditioning covariate");
    if (c.k == config.j) {
      throw InputError("conditioning covariate must differ from j");
    }
    if (c.values.empty()) throw InputError("conditioning needs values");
    if (!c.labels.empty() && c.labels.size() != c.values.size()) {
      throw InputError("conditioning labels and values differ in length");
    }
    for (size_t v = 0; v < c.values.size(); ++v) {
      const std::string label =
          c.labels.empty()
              ? column_name(data, c.k) + "=" + format_value(c.values[v])
              : c.labels[v];
      groups.push_back({label, {Pin{c.k, c.values[v]}}});
    }
  } else {
    groups.push_back({"", {}});
  }

  for (const auto& [label, pins] : groups) {
    for (double x : grid) {
      PcePoint pt = make_point(arch, theta, cov, data, config.j, x, d, z, pins);
      pt.label = label;
      curve.points.push_back(pt);
    }
  }
  return curve;
}

PceEstimate pce_binary(const Architecture& arch, const ParamVector& theta,
                       const CovarianceEstimate& cov, const Dataset& data,
                       int j, double level) {
  check_inputs(arch, theta, data, j, {});
  if (static_cast<int>(data.columns.size()) < j ||
      data.columns[j - 1].kind != ColumnKind::kDummy) {
    throw InputError("column " + column_name(data, j) +
                     " is not a dummy column");
  }
  PceConfig cfg;
  cfg.j = j;
  cfg.d = 1.0;
  cfg.grid = {0.0};
  cfg.level = level;
  const PcePoint pt = pce_curve(arch, theta, cov, data, cfg).points.front();
  return {pt.beta_hat, pt.se, pt.lo, pt.hi};
}

std::pair<PceCurve, PceCurve> interaction_screen(
    const Architecture& arch, const ParamVector& theta,
    const CovarianceEstimate& cov, const Dataset& data, int j, int k,
    const PceConfig& base) {
  check_column(data, k, "conditioning covariate");
  if (j == k) throw InputError("interaction screen needs j != k");
  const bool dummy = static_cast<int>(data.columns.size()) >= k &&
                     data.columns[k - 1].kind == ColumnKind::kDummy;
  Conditioning c;
  c.k = k;
  const std::string name = column_name(data, k);
  if (dummy) {
    c.values = {0.0, 1.0};
    c.labels = {name + "=0", name + "=1"};
  } else {
    const double mean = data.x.col(k - 1).mean();
    const double sd = default_step(data, k);
    c.values = {mean - sd, mean + sd};
    c.labels = {name + "=mean-sd", name + "=mean+sd"};
  }
  PceConfig cfg = base;
  cfg.j = j;
  cfg.conditioning = c;
  const PceCurve both = pce_curve(arch, theta, cov, data, cfg);
  return {both.select(c.labels[0]), both.select(c.labels[1])};
}

PceCurve to_original_scale(const PceCurve& curve,
                           const std::vector<ColumnMeta>& columns,
                           const ResponseMeta& response) {
  if (curve.scale == EffectScale::kOriginal) return curve;
  if (static_cast<int>(columns.size()) < curve.j) {
    throw InputError("no column metadata for covariate " +
                     std::to_string(curve.j));
  }
  const ColumnMeta& m = columns[curve.j - 1];
  if (!(m.sd > 0.0) || !(response.sd > 0.0)) {
    throw InputError("metadata standard deviations must be positive");
  }
  PceCurve out = curve;
  out.scale = EffectScale::kOriginal;
  out.d = curve.d * m.sd;
  for (auto& pt : out.points) {
    pt.x = pt.x * m.sd + m.mean;
    pt.beta_hat *= response.sd;
    pt.se *= response.sd;
    pt.lo *= response.sd;
    pt.hi *= response.sd;
  }
  return out;
}

PceEstimate to_original_scale(const PceEstimate& e,
                              const ResponseMeta& response) {
  if (!(response.sd > 0.0)) {
    throw InputError("response standard deviation must be positive");
  }
  return {e.beta_hat * response.sd, e.se * response.sd, e.lo * response.sd,
          e.hi * response.sd};
}

}  // namespace nnstat

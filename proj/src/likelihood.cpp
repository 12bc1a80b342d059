#include "nnstat/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "nnstat/error.hpp"

namespace nnstat {

std::string to_string(Family f) {
  return f == Family::kGaussian ? "gaussian" : "bernoulli";
}

Family parse_family(const std::string& s) {
  if (s == "gaussian") return Family::kGaussian;
  if (s == "bernoulli") return Family::kBernoulli;
  throw InputError("unknown family '" + s + "' (gaussian|bernoulli)");
}

OutputActivation output_for(Family f) {
  return f == Family::kGaussian ? OutputActivation::kIdentity
                                : OutputActivation::kLogistic;
}

Family family_for(OutputActivation a) {
  return a == OutputActivation::kIdentity ? Family::kGaussian
                                          : Family::kBernoulli;
}

void LikelihoodSpec::validate(const Architecture& arch) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InputError("lambda must be a finite nonnegative number");
  }
  if (arch.output != output_for(family)) {
    throw InputError(to_string(family) + " family requires " +
                     to_string(output_for(family)) + " output activation");
  }
}

SigmaSq::SigmaSq(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InputError("sigma^2 must be positive and finite");
  }
}

double penalty(const ParamVector& theta, double lambda) {
  if (lambda == 0.0) return 0.0;
  return lambda * theta.penalized_view().squaredNorm();
}

namespace {

struct Prepared {
  double inv_sigma_sq = 1.0;
  double log_norm = 0.0;  // -(1/2) log(2 pi sigma^2) per observation
};

Prepared prepare(const Architecture& arch, const ParamVector& theta,
                 const Dataset& data, const LikelihoodSpec& spec,
                 const std::optional<SigmaSq>& sigma_sq) {
  spec.validate(arch);
  check_compatible(arch, theta);
  check_compatible(arch, data);
  Prepared prep;
  if (spec.family == Family::kGaussian) {
    if (!sigma_sq) throw InputError("gaussian likelihood requires sigma^2");
    prep.inv_sigma_sq = 1.0 / sigma_sq->value();
    prep.log_norm = -0.5 * std::log(2.0 * std::numbers::pi * sigma_sq->value());
  } else {
    for (int i = 0; i < data.n(); ++i) {
      if (data.y[i] != 0.0 && data.y[i] != 1.0) {
        throw InputError("bernoulli response must be 0/1 (row " +
                         std::to_string(i) + " has " +
                         std::to_string(data.y[i]) + ")");
      }
    }
  }
  return prep;
}

// Hidden activations and linear predictor of one row.
inline double hidden_pass(int p, int q, const double* w, const double* gamma,
                          const double* x, double* h) {
  double eta = gamma[0];
  for (int k = 0; k < q; ++k) {
    double s = w[k];
    for (int j = 1; j <= p; ++j) s += w[j * q + k] * x[j - 1];
    h[k] = sigmoid(s);
    eta += gamma[k + 1] * h[k];
  }
  return eta;
}

// Log-density contribution and its first two derivatives in eta.
struct RowTerms {
  double loglik;
  double d1;
  double d2;
};

inline RowTerms row_terms(Family family, const Prepared& prep, double y,
                          double eta) {
  if (family == Family::kGaussian) {
    const double r = y - eta;
    return {prep.log_norm - 0.5 * r * r * prep.inv_sigma_sq,
            r * prep.inv_sigma_sq, -prep.inv_sigma_sq};
  }
  const double mu = sigmoid(eta);
  const double mc = std::clamp(mu, kBernoulliClamp, 1.0 - kBernoulliClamp);
  const double ll = y == 1.0 ? std::log(mc) : std::log(1.0 - mc);
  return {ll, y - mu, -mu * (1.0 - mu)};
}

}  // namespace

double log_likelihood_and_gradient(const Architecture& arch,
                                   const ParamVector& theta,
                                   const Dataset& data,
                                   const LikelihoodSpec& spec,
                                   std::optional<SigmaSq> sigma_sq,
                                   Eigen::VectorXd& grad) {
  const Prepared prep = prepare(arch, theta, data, spec, sigma_sq);
  const int p = arch.p;
  const int q = arch.q;
  const double* w = theta.values().data();
  const double* gamma = w + theta.gamma_index(0);
  grad = Eigen::VectorXd::Zero(theta.size());
  double* g = grad.data();
  double* g_gamma = g + theta.gamma_index(0);
  std::vector<double> h(q);
  std::vector<double> back(q);
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double* x = data.x.row(i).data();
    const double eta = hidden_pass(p, q, w, gamma, x, h.data());
    const RowTerms t = row_terms(spec.family, prep, data.y[i], eta);
    total += t.loglik;
    g_gamma[0] += t.d1;
    for (int k = 0; k < q; ++k) {
      g_gamma[k + 1] += t.d1 * h[k];
      back[k] = t.d1 * gamma[k + 1] * h[k] * (1.0 - h[k]);
      g[k] += back[k];
    }
    for (int j = 1; j <= p; ++j) {
      const double xj = x[j - 1];
      double* gj = g + j * q;
      for (int k = 0; k < q; ++k) gj[k] += back[k] * xj;
    }
  }
  if (spec.lambda != 0.0) {
    for (int idx = 0; idx < theta.size(); ++idx) {
      if (theta.is_penalized(idx)) grad[idx] -= 2.0 * spec.lambda * theta[idx];
    }
    total -= penalty(theta, spec.lambda);
  }
  return total;
}

double log_likelihood(const Architecture& arch, const ParamVector& theta,
                      const Dataset& data, const LikelihoodSpec& spec,
                      std::optional<SigmaSq> sigma_sq) {
  const Prepared prep = prepare(arch, theta, data, spec, sigma_sq);
  const double* w = theta.values().data();
  const double* gamma = w + theta.gamma_index(0);
  std::vector<double> h(arch.q);
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double eta =
        hidden_pass(arch.p, arch.q, w, gamma, data.x.row(i).data(), h.data());
    total += row_terms(spec.family, prep, data.y[i], eta).loglik;
  }
  return total - penalty(theta, spec.lambda);
}

Eigen::VectorXd gradient(const Architecture& arch, const ParamVector& theta,
                         const Dataset& data, const LikelihoodSpec& spec,
                         std::optional<SigmaSq> sigma_sq) {
  Eigen::VectorXd g;
  log_likelihood_and_gradient(arch, theta, data, spec, sigma_sq, g);
  return g;
}

Eigen::MatrixXd observed_information(const Architecture& arch,
                                     const ParamVector& theta,
                                     const Dataset& data,
                                     const LikelihoodSpec& spec,
                                     std::optional<SigmaSq> sigma_sq) {
  const Prepared prep = prepare(arch, theta, data, spec, sigma_sq);
  const int p = arch.p;
  const int q = arch.q;
  const int r = theta.size();
  const double* w = theta.values().data();
  const int g0 = theta.gamma_index(0);
  const double* gamma = w + g0;

  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(r, r);
  Eigen::VectorXd grad_eta(r);
  std::vector<double> h(q);
  std::vector<double> xa(p + 1);
  for (int i = 0; i < data.n(); ++i) {
    const double* x = data.x.row(i).data();
    xa[0] = 1.0;
    for (int j = 1; j <= p; ++j) xa[j] = x[j - 1];
    const double eta = hidden_pass(p, q, w, gamma, x, h.data());
    const RowTerms t = row_terms(spec.family, prep, data.y[i], eta);

    grad_eta[g0] = 1.0;
    for (int k = 0; k < q; ++k) {
      const double dh = h[k] * (1.0 - h[k]);
      grad_eta[g0 + k + 1] = h[k];
      for (int j = 0; j <= p; ++j) {
        grad_eta[j * q + k] = gamma[k + 1] * dh * xa[j];
      }
    }
    hess.selfadjointView<Eigen::Lower>().rankUpdate(grad_eta, t.d2);

    // d1 * second derivatives of eta; only the lower triangle is filled.
    for (int k = 0; k < q; ++k) {
      const double dh = h[k] * (1.0 - h[k]);
      const double d2h = dh * (1.0 - 2.0 * h[k]);
      const int gk = g0 + k + 1;
      for (int j = 0; j <= p; ++j) {
        const int a = j * q + k;
        hess(gk, a) += t.d1 * dh * xa[j];
        const double c = t.d1 * gamma[k + 1] * d2h * xa[j];
        for (int jj = 0; jj <= j; ++jj) {
          hess(a, jj * q + k) += c * xa[jj];
        }
      }
    }
  }
  Eigen::MatrixXd info = -hess.selfadjointView<Eigen::Lower>().toDenseMatrix();
  info = 0.5 * (info + info.transpose()).eval();
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      if (!std::isfinite(info(a, b))) {
        throw NumericalError("non-finite second derivative at (" +
                             std::to_string(a) + ", " + std::to_string(b) +
                             ")");
      }
    }
  }
  return info;
}

double residual_sum_of_squares(const Architecture& arch,
                               const ParamVector& theta, const Dataset& data) {
  return (data.y - forward_batch(arch, theta, data)).squaredNorm();
}

SigmaSq profile_sigma_sq(const Architecture& arch, const ParamVector& theta,
                         const Dataset& data) {
  const double s2 = residual_sum_of_squares(arch, theta, data) / data.n();
  return SigmaSq(std::max(s2, std::numeric_limits<double>::min()));
}

}  // namespace nnstat

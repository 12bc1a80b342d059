#pragma once

// Penalized log-likelihood of the network for Gaussian and Bernoulli
// responses, with its analytic gradient and the observed information.
//
//   l(theta) = sum_i log f(y_i | theta) - lambda * ||theta_tilde||^2
//
// theta_tilde drops the intercepts omega_0k and gamma_0.

#include <optional>
#include <string>

#include <Eigen/Core>

#include "nnstat/model.hpp"

namespace nnstat {

enum class Family { kGaussian, kBernoulli };

std::string to_string(Family f);
Family parse_family(const std::string& s);
OutputActivation output_for(Family f);
Family family_for(OutputActivation a);

struct LikelihoodSpec {
  Family family = Family::kGaussian;
  double lambda = 0.0;

  // Throws InputError for lambda < 0 or a family/output-activation mismatch
  // (gaussian needs identity output, bernoulli needs logistic output).
  void validate(const Architecture& arch) const;
};

// Gaussian noise variance; always strictly positive.
class SigmaSq {
 public:
  explicit SigmaSq(double value);
  double value() const { return value_; }

 private:
  double value_;
};

inline constexpr double kBernoulliClamp = 1e-12;

double penalty(const ParamVector& theta, double lambda);

// Penalized log-likelihood. Gaussian requires sigma_sq; Bernoulli requires
// y in {0, 1}.
double log_likelihood(const Architecture& arch, const ParamVector& theta,
                      const Dataset& data, const LikelihoodSpec& spec,
                      std::optional<SigmaSq> sigma_sq = std::nullopt);

// d l / d theta, penalty term included.
Eigen::VectorXd gradient(const Architecture& arch, const ParamVector& theta,
                         const Dataset& data, const LikelihoodSpec& spec,
                         std::optional<SigmaSq> sigma_sq = std::nullopt);

// Value and gradient in a single pass over the data.
double log_likelihood_and_gradient(const Architecture& arch,
                                   const ParamVector& theta,
                                   const Dataset& data,
                                   const LikelihoodSpec& spec,
                                   std::optional<SigmaSq> sigma_sq,
                                   Eigen::VectorXd& grad);

// Negative Hessian of the unpenalized log-likelihood, symmetrized. The
// lambda in `spec` is ignored. Throws NumericalError on non-finite entries.
Eigen::MatrixXd observed_information(const Architecture& arch,
                                     const ParamVector& theta,
                                     const Dataset& data,
                                     const LikelihoodSpec& spec,
                                     std::optional<SigmaSq> sigma_sq = std::nullopt);

double residual_sum_of_squares(const Architecture& arch,
                               const ParamVector& theta, const Dataset& data);

// RSS / n, floored at the smallest positive double.
SigmaSq profile_sigma_sq(const Architecture& arch, const ParamVector& theta,
                         const Dataset& data);

}  // namespace nnstat

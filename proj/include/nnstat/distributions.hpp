#pragma once

namespace nnstat {

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a) for
// a > 0, x >= 0. Series below x < a + 1, Lentz continued fraction above.
double regularized_gamma_q(double a, double x);
double regularized_gamma_p(double a, double x);

// P(X > x) for X ~ chi^2_df; df need not be an integer.
double chi_square_survival(double x, double df);

double normal_cdf(double z);
double normal_survival(double z);
// Two-sided p-value 2 * P(Z > |z|).
double normal_two_sided_p(double z);
// Inverse standard normal CDF for u in (0, 1).
double normal_quantile(double u);

// z such that a symmetric two-sided interval has the given coverage.
// Exactly 1.959964 for level 0.95.
double z_for_level(double level);

}  // namespace nnstat

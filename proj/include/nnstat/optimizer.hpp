#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace nnstat {

// Objective value; writes the gradient into the second argument.
using ObjectiveFn =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;
// Hessian of the objective (optional, used to polish the final iterate).
using HessianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct BfgsOptions {
  int max_iters = 5000;
  double grad_tol = 1e-8;   // on the max-norm of the gradient
  double armijo_c1 = 1e-4;
  int max_backtracks = 60;
  int max_newton_steps = 25;
  bool record_trace = false;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double grad_max = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status;
  std::vector<double> trace;  // objective after each accepted step
};

// Minimizes `f` with inverse-Hessian BFGS and a backtracking Armijo line
// search. When the line search stalls in rounding noise and `hessian` is
// given, Newton steps on the exact Hessian finish the job.
BfgsResult minimize_bfgs(const ObjectiveFn& f, Eigen::VectorXd x0,
                         const BfgsOptions& options,
                         const HessianFn& hessian = nullptr);

}  // namespace nnstat

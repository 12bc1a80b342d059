#include "nnstat/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace nnstat {

namespace {

double max_abs(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

bool finite(double fx, const Eigen::VectorXd& g) {
  return std::isfinite(fx) && g.allFinite();
}

// Acceptance slack for steps whose objective change is below rounding noise.
double noise_floor(double fx) {
  return 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx));
}

}  // namespace

BfgsResult minimize_bfgs(const ObjectiveFn& f, Eigen::VectorXd x0,
                         const BfgsOptions& options, const HessianFn& hessian) {
  const Eigen::Index n = x0.size();
  BfgsResult res;
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(n);
  double fx = f(x, g);
  if (!finite(fx, g)) {
    res.x = x;
    res.value = fx;
    res.grad_max = std::numeric_limits<double>::infinity();
    res.status = "non-finite objective at the initial point";
    return res;
  }

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool h_is_identity = true;
  Eigen::VectorXd x_new(n);
  Eigen::VectorXd g_new(n);
  Eigen::VectorXd d(n);
  int iter = 0;
  bool stalled = false;
  int flat_steps = 0;
  int failed_polishes = 0;
  constexpr int kMaxFlatSteps = 5;
  constexpr int kMaxFailedPolishes = 3;

  // Newton polish on the exact Hessian. Steps are accepted on a genuine
  // decrease, or on a gradient reduction when the objective change is lost
  // in rounding.
  auto polish = [&]() {
    if (!hessian) return;
    for (int t = 0; t < options.max_newton_steps; ++t) {
      if (max_abs(g) <= options.grad_tol) return;
      const Eigen::MatrixXd hess = hessian(x);
      if (!hess.allFinite()) return;
      Eigen::LLT<Eigen::MatrixXd> llt(hess);
      if (llt.info() != Eigen::Success) return;
      d = -llt.solve(g);
      const double gd = g.dot(d);
      if (!(gd < 0.0)) return;
      const double gmax = max_abs(g);
      double alpha = 1.0;
      bool accepted = false;
      double f_new = fx;
      for (int b = 0; b < 30; ++b) {
        x_new = x + alpha * d;
        f_new = f(x_new, g_new);
        if (finite(f_new, g_new) &&
            (f_new <= fx + options.armijo_c1 * alpha * gd ||
             (f_new <= fx + noise_floor(fx) && max_abs(g_new) < gmax))) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) return;
      x.swap(x_new);
      g.swap(g_new);
      fx = f_new;
      ++res.iterations;
      if (options.record_trace) res.trace.push_back(fx);
    }
  };

  while (iter < options.max_iters) {
    if (max_abs(g) <= options.grad_tol) break;
    d.noalias() = -h_inv * g;
    double gd = g.dot(d);
    if (!(gd < 0.0)) {
      h_inv.setIdentity();
      h_is_identity = true;
      d = -g;
      gd = -g.squaredNorm();
    }
    double alpha = h_is_identity ? std::min(1.0, 1.0 / max_abs(g)) : 1.0;
    bool accepted = false;
    double f_new = fx;
    for (int b = 0; b < options.max_backtracks; ++b) {
      x_new = x + alpha * d;
      f_new = f(x_new, g_new);
      if (finite(f_new, g_new) && f_new <= fx + options.armijo_c1 * alpha * gd) {
        accepted = true;
        break;
      }
      if (std::isfinite(f_new)) {
        const double denom = 2.0 * (f_new - fx - alpha * gd);
        const double trial = denom > 0.0 ? -gd * alpha * alpha / denom : 0.5 * alpha;
        alpha = std::clamp(trial, 0.1 * alpha, 0.5 * alpha);
      } else {
        alpha *= 0.1;
      }
    }
    if (!accepted) {
      if (!h_is_identity) {
        h_inv.setIdentity();
        h_is_identity = true;
        ++iter;
        continue;
      }
      stalled = true;
      break;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    flat_steps = (fx - f_new <= noise_floor(fx)) ? flat_steps + 1 : 0;
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    ++iter;
    if (options.record_trace) res.trace.push_back(fx);
    // Progress lost in rounding: try the Newton polish, and resume from a
    // fresh quasi-Newton state if it does not finish the job.
    if (flat_steps >= kMaxFlatSteps) {
      flat_steps = 0;
      polish();
      if (max_abs(g) <= options.grad_tol) break;
      if (++failed_polishes >= kMaxFailedPolishes) {
        stalled = true;
        break;
      }
      h_inv.setIdentity();
      h_is_identity = true;
      continue;
    }

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      if (h_is_identity) h_inv *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = h_inv * y;
      const double yhy = y.dot(hy);
      h_inv.noalias() += ((1.0 + rho * yhy) * rho) * (s * s.transpose());
      h_inv.noalias() -= rho * (hy * s.transpose() + s * hy.transpose());
      h_is_identity = false;
    }
  }

  res.iterations += iter;
  if (max_abs(g) > options.grad_tol) polish();
  res.x = x;
  res.value = fx;
  res.grad_max = max_abs(g);
  res.converged = res.grad_max <= options.grad_tol;
  if (res.converged) {
    res.status = "converged";
  } else if (stalled) {
    res.status = "line search stalled";
  } else {
    res.status = "iteration limit reached";
  }
  return res;
}

}  // namespace nnstat

#include "nnstat/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nnstat/error.hpp"

namespace nnstat {

SymmetryOp SymmetryOp::identity(int q) {
  SymmetryOp op;
  op.permutation.resize(q);
  std::iota(op.permutation.begin(), op.permutation.end(), 0);
  op.flips.assign(q, false);
  return op;
}

void SymmetryOp::validate() const {
  const int n = q();
  if (static_cast<int>(flips.size()) != n) {
    throw InputError("symmetry op has mismatched flip and permutation sizes");
  }
  std::vector<bool> seen(n, false);
  for (int v : permutation) {
    if (v < 0 || v >= n || seen[v]) {
      throw InputError("symmetry op permutation is not a bijection");
    }
    seen[v] = true;
  }
}

SymmetryOp compose(const SymmetryOp& first, const SymmetryOp& second) {
  first.validate();
  second.validate();
  if (first.q() != second.q()) {
    throw InputError("cannot compose symmetry ops of different sizes");
  }
  // Node m after both ops is node second.perm[m] after `first`, which is
  // original node first.perm[second.perm[m]] flipped by
  // first.flips[orig] xor second.flips[second.perm[m]].
  const int q = first.q();
  SymmetryOp out;
  out.permutation.resize(q);
  out.flips.assign(q, false);
  for (int m = 0; m < q; ++m) {
    const int mid = second.permutation[m];
    const int orig = first.permutation[mid];
    out.permutation[m] = orig;
    out.flips[orig] = first.flips[orig] != second.flips[mid];
  }
  return out;
}

std::vector<SymmetryOp> enumerate_symmetries(int q) {
  if (q < 1 || q > 8) {
    throw InputError("symmetry enumeration supports 1 <= q <= 8");
  }
  std::vector<int> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<SymmetryOp> ops;
  do {
    for (unsigned mask = 0; mask < (1u << q); ++mask) {
      SymmetryOp op;
      op.permutation = perm;
      op.flips.resize(q);
      for (int k = 0; k < q; ++k) op.flips[k] = (mask >> k) & 1u;
      ops.push_back(std::move(op));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return ops;
}

ParamVector apply_symmetry(const ParamVector& theta, const SymmetryOp& op) {
  op.validate();
  const int p = theta.p();
  const int q = theta.q();
  if (op.q() != q) {
    throw InputError("symmetry op size does not match q = " +
                     std::to_string(q));
  }
  ParamVector flipped = theta;
  for (int k = 1; k <= q; ++k) {
    if (!op.flips[k - 1]) continue;
    const double gk = theta.gamma(k);
    for (int j = 0; j <= p; ++j) flipped.set_omega(j, k, -theta.omega(j, k));
    flipped.set_gamma(k, -gk);
    flipped.set_gamma(0, flipped.gamma(0) + gk);
  }
  ParamVector out = flipped;
  for (int m = 1; m <= q; ++m) {
    const int src = op.permutation[m - 1] + 1;
    for (int j = 0; j <= p; ++j) out.set_omega(j, m, flipped.omega(j, src));
    out.set_gamma(m, flipped.gamma(src));
  }
  return out;
}

namespace {

// Node k (1-based) orders before node l in canonical form.
bool canonical_before(const ParamVector& t, int k, int l) {
  if (t.gamma(k) != t.gamma(l)) return t.gamma(k) > t.gamma(l);
  for (int j = 0; j <= t.p(); ++j) {
    if (t.omega(j, k) != t.omega(j, l)) return t.omega(j, k) > t.omega(j, l);
  }
  return false;
}

}  // namespace

ParamVector canonicalize(const ParamVector& theta) {
  const int q = theta.q();
  SymmetryOp flip = SymmetryOp::identity(q);
  for (int k = 1; k <= q; ++k) {
    const double g = theta.gamma(k);
    if (g < 0.0) {
      flip.flips[k - 1] = true;
    } else if (g == 0.0) {
      for (int j = 0; j <= theta.p(); ++j) {
        const double w = theta.omega(j, k);
        if (w != 0.0) {
          flip.flips[k - 1] = w < 0.0;
          break;
        }
      }
    }
  }
  const ParamVector signed_theta = apply_symmetry(theta, flip);
  SymmetryOp order = SymmetryOp::identity(q);
  std::stable_sort(order.permutation.begin(), order.permutation.end(),
                   [&](int a, int b) {
                     return canonical_before(signed_theta, a + 1, b + 1);
                   });
  return apply_symmetry(signed_theta, order);
}

SymmetryOp best_alignment(const ParamVector& theta, const ParamVector& target) {
  if (theta.p() != target.p() || theta.q() != target.q()) {
    throw InputError("cannot align parameter vectors of different shapes");
  }
  const int p = theta.p();
  const int q = theta.q();
  // ||apply(theta, op) - target||^2 decomposes into per-node terms plus the
  // gamma_0 term, which depends on the flipped set only.
  // node_cost[src][dst][s] for source node src placed at dst with flip s.
  std::vector<double> node_cost(static_cast<size_t>(q) * q * 2);
  for (int src = 1; src <= q; ++src) {
    for (int dst = 1; dst <= q; ++dst) {
      for (int s = 0; s < 2; ++s) {
        const double sign = s ? -1.0 : 1.0;
        double c = 0.0;
        for (int j = 0; j <= p; ++j) {
          const double d = sign * theta.omega(j, src) - target.omega(j, dst);
          c += d * d;
        }
        const double dg = sign * theta.gamma(src) - target.gamma(dst);
        c += dg * dg;
        node_cost[((src - 1) * q + (dst - 1)) * 2 + s] = c;
      }
    }
  }
  const std::vector<SymmetryOp> ops = enumerate_symmetries(q);
  double best = std::numeric_limits<double>::infinity();
  size_t best_idx = 0;
  for (size_t i = 0; i < ops.size(); ++i) {
    const SymmetryOp& op = ops[i];
    double g0 = theta.gamma(0);
    for (int k = 0; k < q; ++k) {
      if (op.flips[k]) g0 += theta.gamma(k + 1);
    }
    double c = (g0 - target.gamma(0)) * (g0 - target.gamma(0));
    for (int m = 0; m < q; ++m) {
      const int src = op.permutation[m];
      c += node_cost[(src * q + m) * 2 + (op.flips[src] ? 1 : 0)];
    }
    if (c < best) {
      best = c;
      best_idx = i;
    }
  }
  return ops[best_idx];
}

ParamVector align_to(const ParamVector& theta, const ParamVector& target) {
  return apply_symmetry(theta, best_alignment(theta, target));
}

std::string to_string(ReducibleKind kind) {
  switch (kind) {
    case ReducibleKind::kZeroGamma:
      return "zero_gamma";
    case ReducibleKind::kSignEquivalentPair:
      return "sign_equivalent_pair";
    case ReducibleKind::kConstantNetInput:
      return "constant_net_input";
  }
  return "unknown";
}

ReducibilityReport check_reducible(const Architecture& arch,
                                   const ParamVector& theta,
                                   const Dataset& data, double tol) {
  check_compatible(arch, theta);
  check_compatible(arch, data);
  if (!(tol > 0.0)) throw InputError("reducibility tolerance must be positive");
  const int q = arch.q;
  const int n = data.n();
  ReducibilityReport report;

  for (int k = 1; k <= q; ++k) {
    if (std::abs(theta.gamma(k)) <= tol) {
      report.reasons.push_back({ReducibleKind::kZeroGamma, {k}});
    }
  }

  // Net inputs s_k(x_i), one column per node.
  Eigen::MatrixXd s(n, q);
  for (int i = 0; i < n; ++i) {
    for (int k = 1; k <= q; ++k) {
      double v = theta.omega(0, k);
      for (int j = 1; j <= arch.p; ++j) v += theta.omega(j, k) * data.x(i, j - 1);
      s(i, k - 1) = v;
    }
  }
  for (int a = 0; a < q; ++a) {
    for (int b = a + 1; b < q; ++b) {
      const double dev =
          (s.col(a).cwiseAbs() - s.col(b).cwiseAbs()).cwiseAbs().maxCoeff();
      if (dev <= tol) {
        report.reasons.push_back(
            {ReducibleKind::kSignEquivalentPair, {a + 1, b + 1}});
      }
    }
  }
  for (int k = 0; k < q; ++k) {
    const double mean = s.col(k).mean();
    const double dev = (s.col(k).array() - mean).abs().maxCoeff();
    if (dev <= tol) {
      report.reasons.push_back({ReducibleKind::kConstantNetInput, {k + 1}});
    }
  }
  return report;
}

}  // namespace nnstat

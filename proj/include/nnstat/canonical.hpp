#pragma once

// Weight-space symmetries of logistic-hidden networks and reducibility
// diagnostics.
//
// Flipping hidden node k maps (omega_.k, gamma_k, gamma_0) to
// (-omega_.k, -gamma_k, gamma_0 + gamma_k); since sigmoid(-s) = 1 - sigmoid(s)
// the network output is unchanged. Together with node permutations this
// gives 2^q q! equivalent parameter vectors.

#include <string>
#include <vector>

#include "nnstat/model.hpp"

namespace nnstat {

// Sign flips are applied first (indexed by original node, 0-based), then the
// permutation: output node m takes original node permutation[m].
struct SymmetryOp {
  std::vector<int> permutation;
  std::vector<bool> flips;

  static SymmetryOp identity(int q);
  int q() const { return static_cast<int>(permutation.size()); }
  // Throws InputError unless permutation is a bijection of {0..q-1} and
  // flips has q entries.
  void validate() const;

  bool operator==(const SymmetryOp&) const = default;
};

// `second` applied after `first`.
SymmetryOp compose(const SymmetryOp& first, const SymmetryOp& second);

// All 2^q q! operations, identity first. Throws InputError for q > 8.
std::vector<SymmetryOp> enumerate_symmetries(int q);

ParamVector apply_symmetry(const ParamVector& theta, const SymmetryOp& op);

// Orbit representative: every gamma_k >= 0 (a node with gamma_k == 0 has the
// first nonzero entry of its input column positive), nodes sorted by
// descending gamma_k with ties broken by descending lexicographic input
// column. Idempotent.
ParamVector canonicalize(const ParamVector& theta);

// Symmetry op minimizing ||apply_symmetry(theta, op) - target||_2, found by
// exhaustive search. Ties keep the earliest op in enumeration order.
SymmetryOp best_alignment(const ParamVector& theta, const ParamVector& target);
ParamVector align_to(const ParamVector& theta, const ParamVector& target);

enum class ReducibleKind { kZeroGamma, kSignEquivalentPair, kConstantNetInput };

std::string to_string(ReducibleKind kind);

struct ReducibleReason {
  ReducibleKind kind;
  std::vector<int> nodes;  // 1-based hidden node indices
};

struct ReducibilityReport {
  std::vector<ReducibleReason> reasons;
  bool reducible() const { return !reasons.empty(); }
};

inline constexpr double kReducibilityTol = 1e-6;

ReducibilityReport check_reducible(const Architecture& arch,
                                   const ParamVector& theta,
                                   const Dataset& data,
                                   double tol = kReducibilityTol);

}  // namespace nnstat

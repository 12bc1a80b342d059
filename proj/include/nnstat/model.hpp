#pragma once

// Single-hidden-layer feedforward network: architecture, flat parameter
// layout and the forward map.
//
// Parameter layout (r = (p + 2) q + 1 entries):
//
//   theta = (omega_0^T, omega_1^T, ..., omega_p^T, gamma^T)^T
//
// where omega_j = (omega_j1, ..., omega_jq) holds the weights from input j
// (j = 0 is the hidden-layer intercept) to every hidden node, and
// gamma = (gamma_0, gamma_1, ..., gamma_q) holds the output intercept
// followed by the hidden-to-output weights.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace nnstat {

enum class HiddenActivation { kLogistic };
enum class OutputActivation { kIdentity, kLogistic };

std::string to_string(HiddenActivation a);
std::string to_string(OutputActivation a);
HiddenActivation parse_hidden_activation(const std::string& s);
OutputActivation parse_output_activation(const std::string& s);

struct Architecture {
  int p = 1;  // covariates, intercept excluded
  int q = 1;  // hidden nodes
  HiddenActivation hidden = HiddenActivation::kLogistic;
  OutputActivation output = OutputActivation::kIdentity;

  int num_params() const { return (p + 2) * q + 1; }

  // Throws InputError unless p >= 1 and q >= 1.
  void validate() const;

  bool operator==(const Architecture&) const = default;
};

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class ParamVector {
 public:
  ParamVector() = default;
  // All-zero parameters for `arch`.
  explicit ParamVector(const Architecture& arch);
  // Throws InputError if values.size() != arch.num_params().
  ParamVector(const Architecture& arch, Eigen::VectorXd values);

  int p() const { return p_; }
  int q() const { return q_; }
  int size() const { return static_cast<int>(values_.size()); }

  // Flat indices. j in [0, p], k in [1, q] for omega; k in [0, q] for gamma.
  int omega_index(int j, int k) const { return j * q_ + (k - 1); }
  int gamma_index(int k) const { return (p_ + 1) * q_ + k; }

  double omega(int j, int k) const { return values_[omega_index(j, k)]; }
  double gamma(int k) const { return values_[gamma_index(k)]; }
  void set_omega(int j, int k, double v) { values_[omega_index(j, k)] = v; }
  void set_gamma(int k, double v) { values_[gamma_index(k)] = v; }

  // omega_j as a length-q vector.
  Eigen::VectorXd omega_block(int j) const;
  // Input-weight column of hidden node k: (omega_0k, ..., omega_pk).
  Eigen::VectorXd node_column(int k) const;

  // True for entries that carry the ridge penalty (everything except
  // omega_0k and gamma_0).
  bool is_penalized(int index) const;
  // The penalized sub-vector in layout order.
  Eigen::VectorXd penalized_view() const;

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& mutable_values() { return values_; }
  double operator[](int i) const { return values_[i]; }
  double& operator[](int i) { return values_[i]; }

  bool operator==(const ParamVector& o) const {
    return p_ == o.p_ && q_ == o.q_ && values_ == o.values_;
  }

 private:
  int p_ = 0;
  int q_ = 0;
  Eigen::VectorXd values_;
};

enum class ColumnKind { kContinuous, kDummy };

struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  double mean = 0.0;
  double sd = 1.0;
  // Raw values are multiplied by scale before centring.
  double scale = 1.0;
  // Raw CSV column this model column was derived from, and the factor level
  // it indicates and the factor's reference level (dummy columns only).
  std::string source;
  std::string level;
  std::string reference;
};

struct ResponseMeta {
  std::string name = "y";
  double mean = 0.0;
  double sd = 1.0;
  double scale = 1.0;
  bool standardized = false;
  // For a factor response, the level coded as 1.
  std::string positive_level;
  std::string negative_level;
};

struct Dataset {
  RowMatrix x;  // n x p, intercept column implicit
  Eigen::VectorXd y;
  std::vector<ColumnMeta> columns;
  ResponseMeta response;

  int n() const { return static_cast<int>(x.rows()); }
  int p() const { return static_cast<int>(x.cols()); }

  // Checks n >= 1, matching lengths, finite entries and 0/1 dummy columns.
  void validate() const;

  // Dataset restricted to the given rows, metadata copied.
  Dataset subset(std::span<const int> rows) const;
};

// Default metadata (continuous, mean 0, sd 1, names x1..xp).
std::vector<ColumnMeta> default_columns(int p);

inline double sigmoid(double s) {
  if (s >= 0.0) {
    return 1.0 / (1.0 + std::exp(-s));
  }
  const double e = std::exp(s);
  return e / (1.0 + e);
}

double apply_output(OutputActivation a, double eta);

// NN(x, theta) for one covariate vector of length p.
double forward(const Architecture& arch, const ParamVector& theta,
               std::span<const double> x);

Eigen::VectorXd forward_batch(const Architecture& arch,
                              const ParamVector& theta, const Dataset& data);
Eigen::VectorXd forward_batch(const Architecture& arch,
                              const ParamVector& theta, const RowMatrix& x);

// q x r 0/1 matrix with S * theta = omega_j. Throws InputError for j outside
// [1, p].
Eigen::MatrixXd selection_matrix(const Architecture& arch, int j);

// Throws InputError unless theta was built for arch.
void check_compatible(const Architecture& arch, const ParamVector& theta);
void check_compatible(const Architecture& arch, const Dataset& data);

}  // namespace nnstat

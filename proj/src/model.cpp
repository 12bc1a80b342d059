#include "nnstat/model.hpp"

#include <algorithm>

#include "nnstat/error.hpp"

namespace nnstat {

std::string to_string(HiddenActivation a) {
  switch (a) {
    case HiddenActivation::kLogistic:
      return "logistic";
  }
  return "logistic";
}

std::string to_string(OutputActivation a) {
  return a == OutputActivation::kIdentity ? "identity" : "logistic";
}

HiddenActivation parse_hidden_activation(const std::string& s) {
  if (s == "logistic") return HiddenActivation::kLogistic;
  throw InputError("unknown hidden activation '" + s +
                   "' (only 'logistic' is supported)");
}

OutputActivation parse_output_activation(const std::string& s) {
  if (s == "identity") return OutputActivation::kIdentity;
  if (s == "logistic") return OutputActivation::kLogistic;
  throw InputError("unknown output activation '" + s + "'");
}

void Architecture::validate() const {
  if (p < 1 || q < 1) {
    throw InputError("architecture needs p >= 1 and q >= 1 (got p=" +
                     std::to_string(p) + ", q=" + std::to_string(q) + ")");
  }
}

ParamVector::ParamVector(const Architecture& arch)
    : p_(arch.p), q_(arch.q), values_(Eigen::VectorXd::Zero(arch.num_params())) {
  arch.validate();
}

ParamVector::ParamVector(const Architecture& arch, Eigen::VectorXd values)
    : p_(arch.p), q_(arch.q), values_(std::move(values)) {
  arch.validate();
  if (values_.size() != arch.num_params()) {
    throw InputError("parameter vector has length " +
                     std::to_string(values_.size()) + ", expected r = " +
                     std::to_string(arch.num_params()));
  }
}

Eigen::VectorXd ParamVector::omega_block(int j) const {
  return values_.segment(j * q_, q_);
}

Eigen::VectorXd ParamVector::node_column(int k) const {
  Eigen::VectorXd col(p_ + 1);
  for (int j = 0; j <= p_; ++j) col[j] = omega(j, k);
  return col;
}

bool ParamVector::is_penalized(int index) const {
  if (index < q_) return false;                 // omega_0k
  if (index == gamma_index(0)) return false;    // gamma_0
  return true;
}

Eigen::VectorXd ParamVector::penalized_view() const {
  Eigen::VectorXd out(size() - q_ - 1);
  int m = 0;
  for (int i = 0; i < size(); ++i) {
    if (is_penalized(i)) out[m++] = values_[i];
  }
  return out;
}

void Dataset::validate() const {
  if (x.rows() < 1) throw InputError("dataset has no rows");
  if (y.size() != x.rows()) {
    throw InputError("response length " + std::to_string(y.size()) +
                     " does not match " + std::to_string(x.rows()) + " rows");
  }
  if (!columns.empty() && static_cast<int>(columns.size()) != p()) {
    throw InputError("column metadata has " + std::to_string(columns.size()) +
                     " entries for " + std::to_string(p()) + " columns");
  }
  for (int i = 0; i < n(); ++i) {
    if (!std::isfinite(y[i])) {
      throw InputError("non-finite response at row " + std::to_string(i));
    }
    for (int j = 0; j < p(); ++j) {
      const double v = x(i, j);
      if (!std::isfinite(v)) {
        throw InputError("non-finite value at row " + std::to_string(i) +
                         ", column " + std::to_string(j + 1));
      }
      if (!columns.empty() && columns[j].kind == ColumnKind::kDummy &&
          v != 0.0 && v != 1.0) {
        throw InputError("dummy column '" + columns[j].name +
                         "' has a value outside {0,1} at row " +
                         std::to_string(i));
      }
    }
  }
}

Dataset Dataset::subset(std::span<const int> rows) const {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    out.y[static_cast<Eigen::Index>(i)] = y[rows[i]];
  }
  out.columns = columns;
  out.response = response;
  return out;
}

std::vector<ColumnMeta> default_columns(int p) {
  std::vector<ColumnMeta> cols(p);
  for (int j = 0; j < p; ++j) {
    cols[j].name = "x" + std::to_string(j + 1);
    cols[j].source = cols[j].name;
  }
  return cols;
}

double apply_output(OutputActivation a, double eta) {
  return a == OutputActivation::kIdentity ? eta : sigmoid(eta);
}

void check_compatible(const Architecture& arch, const ParamVector& theta) {
  if (theta.p() != arch.p || theta.q() != arch.q ||
      theta.size() != arch.num_params()) {
    throw InputError("parameter vector of length " +
                     std::to_string(theta.size()) +
                     " does not match architecture (expected r = " +
                     std::to_string(arch.num_params()) + ")");
  }
}

void check_compatible(const Architecture& arch, const Dataset& data) {
  if (data.p() != arch.p) {
    throw InputError("dataset has " + std::to_string(data.p()) +
                     " covariates, architecture expects p = " +
                     std::to_string(arch.p));
  }
}

namespace {

double forward_row(const Architecture& arch, const ParamVector& theta,
                   const double* x) {
  const int p = arch.p;
  const int q = arch.q;
  const double* w = theta.values().data();
  double eta = theta.gamma(0);
  for (int k = 0; k < q; ++k) {
    double s = w[k];
    for (int j = 1; j <= p; ++j) s += w[j * q + k] * x[j - 1];
    eta += theta.gamma(k + 1) * sigmoid(s);
  }
  return apply_output(arch.output, eta);
}

}  // namespace

double forward(const Architecture& arch, const ParamVector& theta,
               std::span<const double> x) {
  check_compatible(arch, theta);
  if (static_cast<int>(x.size()) != arch.p) {
    throw InputError("covariate vector has length " + std::to_string(x.size()) +
                     ", expected p = " + std::to_string(arch.p));
  }
  return forward_row(arch, theta, x.data());
}

Eigen::VectorXd forward_batch(const Architecture& arch,
                              const ParamVector& theta, const RowMatrix& x) {
  check_compatible(arch, theta);
  if (x.cols() != arch.p) {
    throw InputError("design has " + std::to_string(x.cols()) +
                     " columns, expected p = " + std::to_string(arch.p));
  }
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[i] = forward_row(arch, theta, x.row(i).data());
  }
  return out;
}

Eigen::VectorXd forward_batch(const Architecture& arch,
                              const ParamVector& theta, const Dataset& data) {
  return forward_batch(arch, theta, data.x);
}

Eigen::MatrixXd selection_matrix(const Architecture& arch, int j) {
  arch.validate();
  if (j < 1 || j > arch.p) {
    throw InputError("covariate index " + std::to_string(j) +
                     " outside [1, " + std::to_string(arch.p) +
                     "]; intercepts are not testable covariates");
  }
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(arch.q, arch.num_params());
  for (int k = 0; k < arch.q; ++k) s(k, j * arch.q + k) = 1.0;
  return s;
}

}  // namespace nnstat

#include "nnstat/preprocess.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "nnstat/error.hpp"

namespace nnstat {

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

template <typename Get>
Moments sample_moments(std::span<const int> rows, Get get) {
  Moments m;
  const double n = static_cast<double>(rows.size());
  for (int i : rows) m.mean += get(i);
  m.mean /= n;
  double ss = 0.0;
  for (int i : rows) ss += (get(i) - m.mean) * (get(i) - m.mean);
  m.sd = rows.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return m;
}

void require_variance(const Moments& m, const std::string& name) {
  if (!(m.sd > 0.0) || !std::isfinite(m.sd)) {
    throw InputError("zero variance column '" + name +
                     "' cannot be standardized");
  }
}

}  // namespace

Dataset destandardize(const Dataset& data) {
  Dataset out = data;
  for (int j = 0; j < data.p() && j < static_cast<int>(data.columns.size());
       ++j) {
    ColumnMeta& m = out.columns[j];
    if (m.kind == ColumnKind::kContinuous) {
      out.x.col(j) = (data.x.col(j).array() * m.sd + m.mean).matrix();
    }
    m.mean = 0.0;
    m.sd = 1.0;
  }
  if (data.response.standardized) {
    out.y = (data.y.array() * data.response.sd + data.response.mean).matrix();
  }
  out.response.mean = 0.0;
  out.response.sd = 1.0;
  out.response.standardized = false;
  return out;
}

Dataset standardize(const Dataset& raw, std::span<const int> reference_rows,
                    bool standardize_response) {
  if (reference_rows.empty()) {
    throw InputError("standardization needs at least one reference row");
  }
  if (static_cast<int>(raw.columns.size()) != raw.p()) {
    throw InputError("column metadata does not match the covariate count");
  }
  Dataset out = raw;
  for (int j = 0; j < raw.p(); ++j) {
    ColumnMeta& m = out.columns[j];
    if (m.kind != ColumnKind::kContinuous) continue;
    const Moments mo =
        sample_moments(reference_rows, [&](int i) { return raw.x(i, j); });
    require_variance(mo, m.name);
    out.x.col(j) = ((raw.x.col(j).array() - mo.mean) / mo.sd).matrix();
    m.mean = mo.mean;
    m.sd = mo.sd;
  }
  if (standardize_response) {
    const Moments mo =
        sample_moments(reference_rows, [&](int i) { return raw.y[i]; });
    require_variance(mo, raw.response.name);
    out.y = ((raw.y.array() - mo.mean) / mo.sd).matrix();
    out.response.mean = mo.mean;
    out.response.sd = mo.sd;
    out.response.standardized = true;
  }
  return out;
}

Dataset standardize(const Dataset& raw, bool standardize_response) {
  std::vector<int> rows(raw.n());
  std::iota(rows.begin(), rows.end(), 0);
  return standardize(raw, rows, standardize_response);
}

}  // namespace nnstat

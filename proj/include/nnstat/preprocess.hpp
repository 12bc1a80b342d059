#pragma once

// Dataset-level standardization. Continuous columns are centred and scaled
// by the sample sd (n - 1 denominator); dummy columns are left alone.

#include <span>

#include "nnstat/model.hpp"

namespace nnstat {

// Continuous columns become x * sd + mean, the response y * sd + mean when
// it was standardized. The returned metadata has mean 0, sd 1 and
// response.standardized = false.
Dataset destandardize(const Dataset& data);

// Standardizes the continuous columns of a raw (unstandardized) dataset, and
// the response when `standardize_response`, using the mean and sample sd of
// `reference_rows` only. Statistics are recorded in the metadata. Throws
// InputError for a zero-variance column among the reference rows.
Dataset standardize(const Dataset& raw, std::span<const int> reference_rows,
                    bool standardize_response);
Dataset standardize(const Dataset& raw, bool standardize_response);

}  // namespace nnstat

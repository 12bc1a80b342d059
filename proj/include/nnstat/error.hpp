#pragma once

#include <stdexcept>
#include <string>

namespace nnstat {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user input: bad dimensions, bad files, out-of-range indices.
class InputError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown: singular or non-positive-definite matrices,
// non-finite objective values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Remediation hint attached to non-PD covariance failures.
inline constexpr const char* kRidgeHint =
    "the variance-covariance matrix is not positive definite; refit with a "
    "larger ridge penalty (e.g. --lambda 0.01 or above) or fewer hidden nodes";

}  // namespace nnstat

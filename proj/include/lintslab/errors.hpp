#pragma once

#include <stdexcept>
#include <string>

namespace lintslab {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A matrix failed the symmetry check; the message names the offending entry pair.
struct NonSymmetricError : Error {
  using Error::Error;
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

// Matrix with (numerically) zero trace where a positive one is required.
struct ZeroMatrixError : Error {
  using Error::Error;
};

struct InvalidParamError : Error {
  using Error::Error;
};

// The inflation radius' log argument came out non-positive, i.e. the posterior
// covariance is larger than the prior. Impossible under correct updates.
struct NonFiniteRhoError : Error {
  using Error::Error;
};

// Arm with (numerically) zero posterior norm; selection probabilities are undefined.
struct DegenerateArmError : Error {
  using Error::Error;
};

// Bivariate covariance with |correlation| >= 1.
struct InvalidCovarianceError : Error {
  using Error::Error;
};

// A rejection sampler hit its attempt cap.
struct RejectionExhaustedError : Error {
  using Error::Error;
};

struct EmptyInputError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace lintslab

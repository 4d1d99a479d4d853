#pragma once

#include <Eigen/Dense>

#include "lintslab/linalg.hpp"
#include "lintslab/rng.hpp"

namespace lintslab {

// Gaussian posterior over the reward parameter, kept in both precision and
// covariance form. The covariance is advanced by rank-one Sherman-Morrison
// steps (and re-symmetrized), the precision by the plain rank-one sum; the
// Cholesky factor of the covariance is refreshed after every update so
// sampling and log-determinants read straight off the state.
struct PosteriorState {
  Eigen::Index dim = 0;
  double lambda = 1.0;       // prior covariance scale: Sigma_1 = lambda * I
  PsdMatrix precision = PsdMatrix::identity(1);   // (1/lambda) I + sum a a^T
  PsdMatrix covariance = PsdMatrix::identity(1);  // Sigma_t
  Eigen::MatrixXd chol;      // lower factor of covariance
  bool chol_clamped = false; // pivot clamp fired during the last refresh
  Eigen::VectorXd info;      // sum a_s y_s
  Eigen::VectorXd mean;      // covariance * info
  int round = 1;             // t, starting at 1
};

// Fresh posterior N(0, lambda I). Throws InvalidParamError unless d >= 1 and
// lambda > 0.
PosteriorState posterior_init(Eigen::Index d, double lambda);

// Observe reward y on arm a. Throws DimensionMismatchError if a has the wrong
// length. A zero arm leaves everything but the round counter unchanged.
PosteriorState posterior_update(const PosteriorState& state, const Eigen::VectorXd& a,
                                double y);

// mean + iota * (chol * z) for a caller-supplied standard-normal vector z.
// Split out so tests can drive the formula with fixed z.
Eigen::VectorXd posterior_sample_from(const PosteriorState& state, double iota,
                                      const Eigen::VectorXd& z);

// Draws z (dim standard normals, in index order) from rng and applies
// posterior_sample_from. Throws InvalidParamError if iota <= 0.
Eigen::VectorXd posterior_sample(const PosteriorState& state, double iota,
                                 RandomStream& rng);

}  // namespace lintslab

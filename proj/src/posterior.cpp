#include "lintslab/posterior.hpp"

#include <string>

#include "lintslab/errors.hpp"

namespace lintslab {

PosteriorState posterior_init(Eigen::Index d, double lambda) {
  if (d < 1) throw InvalidParamError("posterior_init: dimension must be >= 1");
  if (!(lambda > 0.0)) throw InvalidParamError("posterior_init: lambda must be > 0");

  PosteriorState state{
      .dim = d,
      .lambda = lambda,
      .precision = PsdMatrix(Eigen::MatrixXd::Identity(d, d) / lambda),
      .covariance = PsdMatrix(Eigen::MatrixXd::Identity(d, d) * lambda),
      // The factor of lambda*I is sqrt(lambda)*I exactly; no need to run the
      // O(d^3) factorization against a diagonal matrix.
      .chol = Eigen::MatrixXd::Identity(d, d) * std::sqrt(lambda),
      .chol_clamped = false,
      .info = Eigen::VectorXd::Zero(d),
      .mean = Eigen::VectorXd::Zero(d),
      .round = 1,
  };
  return state;
}

PosteriorState posterior_update(const PosteriorState& state, const Eigen::VectorXd& a,
                                double y) {
  if (a.size() != state.dim)
    throw DimensionMismatchError("posterior_update: arm length " +
                                 std::to_string(a.size()) + " vs state dimension " +
                                 std::to_string(state.dim));

  // Precision accumulates the plain rank-one term; the covariance follows by
  // Sherman-Morrison. Both sides are re-symmetrized to stop roundoff drift.
  PsdMatrix precision =
      PsdMatrix::symmetrized(state.precision.matrix() + a * a.transpose());

  const Eigen::VectorXd cov_a = state.covariance.matrix() * a;
  const double denom = 1.0 + a.dot(cov_a);
  PsdMatrix covariance = PsdMatrix::symmetrized(
      state.covariance.matrix() - (cov_a * cov_a.transpose()) / denom);

  CholeskyFactor factor = cholesky(covariance);

  Eigen::VectorXd info = state.info + a * y;
  Eigen::VectorXd mean = covariance.matrix() * info;

  return PosteriorState{
      .dim = state.dim,
      .lambda = state.lambda,
      .precision = std::move(precision),
      .covariance = std::move(covariance),
      .chol = std::move(factor.lower),
      .chol_clamped = factor.clamped,
      .info = std::move(info),
      .mean = std::move(mean),
      .round = state.round + 1,
  };
}

Eigen::VectorXd posterior_sample_from(const PosteriorState& state, double iota,
                                      const Eigen::VectorXd& z) {
  if (z.size() != state.dim)
    throw DimensionMismatchError("posterior_sample_from: z length mismatch");
  // Exactly mean + iota * (L z): scaling iota scales the deviation linearly.
  return state.mean + iota * (state.chol * z);
}

Eigen::VectorXd posterior_sample(const PosteriorState& state, double iota,
                                 RandomStream& rng) {
  if (!(iota > 0.0)) throw InvalidParamError("posterior_sample: iota must be > 0");
  return posterior_sample_from(state, iota, rng.normals(state.dim));
}

}  // namespace lintslab

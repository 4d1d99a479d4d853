#pragma once

#include <utility>
#include <Eigen/Dense>

namespace lintslab {

// Symmetric positive semi-definite matrix. The constructor enforces squareness
// and symmetry (entrywise tolerance 1e-10); positive semi-definiteness is a
// documented expectation of the producers (Cholesky clamps, updates
// re-symmetrize) rather than an O(d^3) check on every construction.
class PsdMatrix {
 public:
  // Throws NonSymmetricError (naming the offending entry pair) or
  // InvalidParamError (non-square / empty).
  explicit PsdMatrix(Eigen::MatrixXd m);

  static PsdMatrix identity(Eigen::Index d);
  static PsdMatrix from_diagonal(const Eigen::VectorXd& diag);

  // (m + m^T)/2, for results of updates that are symmetric only up to
  // floating-point roundoff.
  static PsdMatrix symmetrized(const Eigen::MatrixXd& m);

  const Eigen::MatrixXd& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Eigen::MatrixXd m_;
};

struct CholeskyFactor {
  Eigen::MatrixXd lower;  // L with L L^T = input (up to the clamp)
  bool clamped = false;   // true if any pivot was raised to the floor
};

// Lower-triangular Cholesky factor. Pivots below 1e-12 are clamped to 1e-12
// and reported via CholeskyFactor::clamped; this keeps long update chains
// alive through rank-deficient moments at the cost of a recorded jitter event.
CholeskyFactor cholesky(const PsdMatrix& m);

// log det(m) from an already-computed factor: 2 * sum(log diag(L)).
double cholesky_logdet(const Eigen::MatrixXd& lower);

// (operator norm, nuclear norm). For PSD input these are the largest
// eigenvalue and the trace; eigenvalues come from a backward-stable symmetric
// eigensolver.
std::pair<double, double> psd_norms(const PsdMatrix& m);

// Thinness coefficient sqrt(d * ||m||_op / ||m||_*) in [1, sqrt(d)].
// Throws ZeroMatrixError when the nuclear norm is below 1e-300.
double thinness(const PsdMatrix& m);

// Weighted norm sqrt(a^T m a); tiny negative quadratic forms from roundoff
// are clamped to zero.
double quad_norm(const Eigen::VectorXd& a, const PsdMatrix& m);

}  // namespace lintslab

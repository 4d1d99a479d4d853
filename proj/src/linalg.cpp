#include "lintslab/linalg.hpp"

#include <cmath>
#include <string>

#include "lintslab/errors.hpp"

namespace lintslab {

namespace {
constexpr double kSymmetryTol = 1e-10;
constexpr double kPivotFloor = 1e-12;
constexpr double kNuclearFloor = 1e-300;
}  // namespace

PsdMatrix::PsdMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols())
    throw InvalidParamError("PsdMatrix: expected a non-empty square matrix");
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m_.cols(); ++j) {
      if (std::fabs(m_(i, j) - m_(j, i)) > kSymmetryTol) {
        throw NonSymmetricError("PsdMatrix: entries (" + std::to_string(i) + "," +
                                std::to_string(j) + ") and (" + std::to_string(j) + "," +
                                std::to_string(i) + ") differ by more than 1e-10");
      }
    }
  }
}

PsdMatrix PsdMatrix::identity(Eigen::Index d) {
  return PsdMatrix(Eigen::MatrixXd::Identity(d, d));
}

PsdMatrix PsdMatrix::from_diagonal(const Eigen::VectorXd& diag) {
  return PsdMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

PsdMatrix PsdMatrix::symmetrized(const Eigen::MatrixXd& m) {
  return PsdMatrix(((m + m.transpose()) * 0.5).eval());
}

CholeskyFactor cholesky(const PsdMatrix& m) {
  const Eigen::MatrixXd& a = m.matrix();
  const Eigen::Index d = a.rows();
  CholeskyFactor result;
  result.lower = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd& L = result.lower;

  // Textbook left-looking factorization with a pivot floor instead of an
  // outright failure on semi-definite input.
  for (Eigen::Index j = 0; j < d; ++j) {
    double pivot = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= L(j, k) * L(j, k);
    if (pivot < kPivotFloor) {
      pivot = kPivotFloor;
      result.clamped = true;
    }
    L(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < d; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  return result;
}

double cholesky_logdet(const Eigen::MatrixXd& lower) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < lower.rows(); ++i) s += std::log(lower(i, i));
  return 2.0 * s;
}

std::pair<double, double> psd_norms(const PsdMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix(),
                                                        Eigen::EigenvaluesOnly);
  const double op = solver.eigenvalues().maxCoeff();
  const double nuclear = m.matrix().trace();
  return {op, nuclear};
}

double thinness(const PsdMatrix& m) {
  const auto [op, nuclear] = psd_norms(m);
  if (nuclear < kNuclearFloor) throw ZeroMatrixError("thinness: nuclear norm is zero");
  return std::sqrt(static_cast<double>(m.dim()) * op / nuclear);
}

double quad_norm(const Eigen::VectorXd& a, const PsdMatrix& m) {
  if (a.size() != m.dim())
    throw DimensionMismatchError("quad_norm: vector length " + std::to_string(a.size()) +
                                 " vs matrix dimension " + std::to_string(m.dim()));
  const double q = a.dot(m.matrix() * a);
  return std::sqrt(q > 0.0 ? q : 0.0);
}

}  // namespace lintslab

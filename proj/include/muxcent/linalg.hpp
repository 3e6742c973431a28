#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "muxcent/errors.hpp"

namespace muxcent::linalg {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Builds Id - E without densifying.
inline SparseMatrix identityMinus(const SparseMatrix& e) {
  SparseMatrix id(e.rows(), e.cols());
  id.setIdentity();
  SparseMatrix m = id - e;
  m.makeCompressed();
  return m;
}

// Solves A x = b by sparse LU and verifies the residual, so a silently bad
// factorization cannot leak into results.  `context` names the caller in
// error messages.
inline Eigen::VectorXd solveChecked(const SparseMatrix& a, const Eigen::VectorXd& b, const std::string& context) {
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw NumericalError(context + ": sparse LU factorization failed (matrix is singular or nearly singular)");
  }
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw NumericalError(context + ": sparse LU solve failed");
  }
  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  const double residual = (a * x - b).lpNorm<Eigen::Infinity>();
  if (residual > 1e-10 * scale) {
    throw NumericalError(context + ": solve residual " + std::to_string(residual) +
                         " exceeds tolerance; system is too ill-conditioned");
  }
  return x;
}

// Dense inverse of Id - E.  Only sensible for moderate sizes; callers gate on
// a capacity limit before getting here.
inline Eigen::MatrixXd denseInverseIdentityMinus(const SparseMatrix& e, const std::string& context) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(e.rows(), e.cols()) - Eigen::MatrixXd(e);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  Eigen::MatrixXd inv = lu.inverse();
  if (!inv.allFinite()) {
    throw NumericalError(context + ": dense inverse overflowed (matrix is singular or nearly singular)");
  }
  const double residual = (m * inv - Eigen::MatrixXd::Identity(e.rows(), e.cols())).cwiseAbs().maxCoeff();
  if (residual > 1e-8) {
    throw NumericalError(context + ": dense inverse residual " + std::to_string(residual) + " exceeds tolerance");
  }
  return inv;
}

namespace detail {

// Largest eigenvalue of a dense symmetric matrix via Eigen's direct solver.
inline double denseSymTopEigenvalue(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver failed to converge");
  }
  return solver.eigenvalues().maxCoeff();
}

// Power iteration on S + shift*Id.  The shift makes the dominant eigenvalue
// of the iterated matrix strictly largest in magnitude even when S has a
// +/- eigenvalue pair of equal modulus, which would otherwise cycle forever.
inline double shiftedPowerTopEigenvalue(const SparseMatrix& s, double tol, int maxIters) {
  const auto n = s.rows();
  // Gershgorin bound on |eigenvalues| gives a safe shift scale.
  Eigen::VectorXd absRowSums = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < s.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
      absRowSums[it.row()] += std::abs(it.value());
    }
  }
  const double bound = absRowSums.size() > 0 ? absRowSums.maxCoeff() : 0.0;
  if (bound == 0.0) return 0.0;  // zero matrix
  const double shift = bound;

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double prev = 0.0;
  for (int iter = 0; iter < maxIters; ++iter) {
    Eigen::VectorXd y = s * x + shift * x;
    const double norm = y.norm();
    if (norm < 1e-300) {
      throw NumericalError("power iteration collapsed to the zero vector");
    }
    y /= norm;
    const double rayleigh = y.dot(s * y);
    if (iter > 0 && std::abs(rayleigh - prev) <= tol * std::max(1.0, std::abs(rayleigh))) {
      return rayleigh;
    }
    prev = rayleigh;
    x = std::move(y);
  }
  throw NumericalError("power iteration for the top symmetric eigenvalue did not converge");
}

}  // namespace detail

// Largest eigenvalue of the symmetric part (E + E^T)/2.  Uses the dense
// direct solver for small systems and shifted power iteration above
// `denseLimit` rows.
inline double symPartTopEigenvalue(const SparseMatrix& e, double tol = 1e-12, int maxIters = 100000,
                                   Eigen::Index denseLimit = 512) {
  if (e.rows() == 0) return 0.0;
  SparseMatrix sym = SparseMatrix(0.5 * (SparseMatrix(e.transpose()) + e));
  sym.makeCompressed();
  if (e.rows() <= denseLimit) {
    return detail::denseSymTopEigenvalue(Eigen::MatrixXd(sym));
  }
  return detail::shiftedPowerTopEigenvalue(sym, tol, maxIters);
}

}  // namespace muxcent::linalg

#ifndef BROYDEN_LAB_TESTS_SUPPORT_HPP
#define BROYDEN_LAB_TESTS_SUPPORT_HPP

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "broyden_lab/operator_core.hpp"

namespace testing_support {

using broyden_lab::Matrix;
using broyden_lab::Vector;

inline Matrix random_orthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss;
  Matrix z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  return qr.householderQ();
}

/// Symmetric positive definite with log-eigenvalues uniform in [-spread, spread].
inline Matrix random_spd_matrix(std::mt19937_64& rng, int n, double spread = 2.0) {
  std::uniform_real_distribution<double> unif(-spread, spread);
  const Matrix q = random_orthogonal(rng, n);
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = std::exp(unif(rng));
  Matrix m = q * d.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

inline Vector random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

/// Textbook inverse updates, combined with weight tau on the DFP side and inverted.
inline Matrix textbook_broyden(const Matrix& a, const Matrix& g, const Vector& u, double tau) {
  const int n = static_cast<int>(g.rows());
  const Matrix h = g.inverse();
  const Vector y = a * u;
  const double ys = y.dot(u);
  const Matrix i = Matrix::Identity(n, n);
  const Matrix h_bfgs =
      (i - u * y.transpose() / ys) * h * (i - y * u.transpose() / ys) + u * u.transpose() / ys;
  const Vector hy = h * y;
  const Matrix h_dfp = h - hy * hy.transpose() / y.dot(hy) + u * u.transpose() / ys;
  const Matrix h_plus = tau * h_dfp + (1.0 - tau) * h_bfgs;
  return h_plus.inverse();
}

/// Generalized eigenvalues of (g, a) sorted ascending.
inline Vector generalized_eigs(const Matrix& g, const Matrix& a) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(g, a);
  return es.eigenvalues();
}

/// lambda_min(upper - lower) / ||upper||_2 by a dense eigensolver.
inline double loewner_slack(const Matrix& lower, const Matrix& upper) {
  Eigen::SelfAdjointEigenSolver<Matrix> diff(upper - lower);
  Eigen::SelfAdjointEigenSolver<Matrix> up(upper);
  return diff.eigenvalues().minCoeff() / up.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace testing_support

#endif  // BROYDEN_LAB_TESTS_SUPPORT_HPP

#ifndef BROYDEN_LAB_OPERATOR_CORE_HPP
#define BROYDEN_LAB_OPERATOR_CORE_HPP

#include <Eigen/Dense>

#include <initializer_list>
#include <memory>
#include <utility>

#include "broyden_lab/errors.hpp"

namespace broyden_lab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative symmetry tolerance accepted by SpdOperator.
inline constexpr double kSymmetryTol = 1e-12;
/// Smallest admissible Cholesky pivot, relative to the operator norm.
inline constexpr double kPivotTol = 1e-14;

/// Which way a self-adjoint operator maps between the primal space E and its
/// dual E*. Hessians and their approximations are PrimalToDual, their inverses
/// DualToPrimal.
enum class Role { PrimalToDual, DualToPrimal };

constexpr Role opposite(Role r) {
  return r == Role::PrimalToDual ? Role::DualToPrimal : Role::PrimalToDual;
}

struct PrimalSpace {};
struct DualSpace {};

/// Coordinates of a vector in a fixed basis, tagged by the space it lives in.
template <class Space>
class CoordVector {
 public:
  CoordVector() = default;
  explicit CoordVector(Vector coords) : c_(std::move(coords)) {
    if (!c_.allFinite()) throw DomainError("vector has non-finite entries");
  }
  CoordVector(std::initializer_list<double> values)
      : CoordVector(Vector::Map(values.begin(), static_cast<Eigen::Index>(values.size()))) {}

  static CoordVector zero(int n) { return CoordVector(Vector::Zero(n)); }
  static CoordVector unit(int n, int i) { return CoordVector(Vector::Unit(n, i)); }

  int dim() const { return static_cast<int>(c_.size()); }
  const Vector& coords() const { return c_; }
  double operator[](int i) const { return c_(i); }
  double euclidean_norm() const { return c_.norm(); }

  friend CoordVector operator+(const CoordVector& a, const CoordVector& b) {
    return CoordVector(a.c_ + b.c_);
  }
  friend CoordVector operator-(const CoordVector& a, const CoordVector& b) {
    return CoordVector(a.c_ - b.c_);
  }
  friend CoordVector operator*(double s, const CoordVector& a) { return CoordVector(s * a.c_); }

 private:
  Vector c_;
};

using PrimalVector = CoordVector<PrimalSpace>;  // x, u, h in E
using DualVector = CoordVector<DualSpace>;      // gradients, b, a_i in E*

/// Symmetric positive definite operator in the standard basis.
///
/// The factorization is computed once at construction and shared between
/// copies, so instances are cheap to pass by value and safe to share between
/// threads.
class SpdOperator {
 public:
  /// Throws DimensionError for an empty or non-square matrix and NotSpdError
  /// when the matrix is not symmetric (to kSymmetryTol relative) or a Cholesky
  /// pivot falls below kPivotTol * ||M||. The stored matrix is exactly
  /// symmetric: (M + M^T) / 2.
  explicit SpdOperator(const Matrix& entries, Role role = Role::PrimalToDual);

  static SpdOperator identity(int n, Role role = Role::PrimalToDual);
  static SpdOperator diagonal(const Vector& diag, Role role = Role::PrimalToDual);
  static SpdOperator diagonal(std::initializer_list<double> diag,
                              Role role = Role::PrimalToDual);

  int dim() const { return static_cast<int>(m_.rows()); }
  Role role() const { return role_; }
  const Matrix& matrix() const { return m_; }

  double log_det() const { return log_det_; }
  /// Lower Cholesky factor L with M = L L^T.
  const Eigen::LLT<Matrix>& factorization() const { return *llt_; }
  Vector solve(const Vector& rhs) const;

  /// Explicit inverse, with the opposite role.
  SpdOperator inverse() const;
  SpdOperator scaled(double factor) const;

 private:
  Matrix m_;
  Role role_;
  std::shared_ptr<const Eigen::LLT<Matrix>> llt_;
  double log_det_ = 0.0;
};

/// Bracket [min_rel, max_rel] of generalized eigenvalues of one operator
/// relative to another.
struct EigenRange {
  double min_rel = 1.0;
  double max_rel = 1.0;

  bool contains(double v, double tol = 0.0) const {
    return v >= min_rel - tol && v <= max_rel + tol;
  }
};

/// <s, x>.
double pair(const DualVector& s, const PrimalVector& x);

/// A h for a PrimalToDual operator.
DualVector apply(const SpdOperator& a, const PrimalVector& h);
/// H s for a DualToPrimal operator.
PrimalVector apply(const SpdOperator& h, const DualVector& s);

/// <H, A> = Tr(HA).
double rel_trace(const SpdOperator& h, const SpdOperator& a);
/// ln Det(HA), from the two Cholesky factorizations.
double log_rel_det(const SpdOperator& h, const SpdOperator& a);
/// Det(H, A) = Det(HA).
double rel_det(const SpdOperator& h, const SpdOperator& a);

/// ||h||_A = <Ah, h>^{1/2}.
double norm_primal(const SpdOperator& a, const PrimalVector& h);
/// ||s||*_A = <s, A^{-1}s>^{1/2}, via a factorization solve.
double norm_dual(const SpdOperator& a, const DualVector& s);

/// Extreme generalized eigenvalues of G relative to A (both of the same role).
EigenRange rel_eigen_range(const SpdOperator& g, const SpdOperator& a);
/// Same, for a symmetric G given by its matrix and A by its factorization.
EigenRange rel_eigen_range(const Matrix& g, const Eigen::LLT<Matrix>& a_factor);

/// True iff lambda_min(A2 - A1) >= -tol * ||A2||_2.
bool loewner_leq(const SpdOperator& a1, const SpdOperator& a2, double tol);
/// lambda_min(upper - lower) / ||upper||_2: nonnegative iff lower <= upper.
double loewner_margin(const Matrix& lower, const Matrix& upper);

/// Solves A z = s by the cached Cholesky factorization.
PrimalVector spd_solve(const SpdOperator& a, const DualVector& s);

/// Largest absolute eigenvalue of a symmetric matrix.
double spectral_norm_sym(const Matrix& m);

}  // namespace broyden_lab

#endif  // BROYDEN_LAB_OPERATOR_CORE_HPP

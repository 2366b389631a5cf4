#include "broyden_lab/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace broyden_lab {

namespace {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

void require_role(const SpdOperator& op, Role role, const char* what) {
  if (op.role() != role) {
    throw RoleError(std::string(what) + ": operator has the wrong role");
  }
}

// C = L^{-1} G L^{-T} where A = L L^T.
Matrix congruence_reduce(const Matrix& g, const Eigen::LLT<Matrix>& a_factor) {
  const auto l = a_factor.matrixL();
  Matrix tmp = l.solve(g);
  Matrix c = l.solve(tmp.transpose());
  return 0.5 * (c + c.transpose());
}

}  // namespace

SpdOperator::SpdOperator(const Matrix& entries, Role role) : role_(role) {
  if (entries.rows() == 0 || entries.cols() == 0) {
    throw DimensionError("SpdOperator: dimension must be positive");
  }
  if (entries.rows() != entries.cols()) {
    throw DimensionError("SpdOperator: matrix is not square");
  }
  if (!entries.allFinite()) throw NotSpdError("SpdOperator: non-finite entries");

  const double scale = entries.cwiseAbs().maxCoeff();
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    throw NotSpdError("SpdOperator: matrix is not symmetric");
  }
  m_ = 0.5 * (entries + entries.transpose());

  auto llt = std::make_shared<Eigen::LLT<Matrix>>(m_);
  if (llt->info() != Eigen::Success) {
    throw NotSpdError("SpdOperator: Cholesky factorization failed");
  }
  // Frobenius norm bounds the spectral norm from above.
  const double pivot_floor = kPivotTol * m_.norm();
  const Vector diag = llt->matrixLLT().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag(i) * diag(i) > pivot_floor)) {
      throw NotSpdError("SpdOperator: Cholesky pivot below threshold");
    }
  }
  log_det_ = 2.0 * diag.array().log().sum();
  llt_ = std::move(llt);
}

SpdOperator SpdOperator::identity(int n, Role role) {
  if (n <= 0) throw DimensionError("SpdOperator: dimension must be positive");
  return SpdOperator(Matrix::Identity(n, n), role);
}

SpdOperator SpdOperator::diagonal(const Vector& diag, Role role) {
  return SpdOperator(Matrix(diag.asDiagonal()), role);
}

SpdOperator SpdOperator::diagonal(std::initializer_list<double> diag, Role role) {
  return diagonal(Vector::Map(diag.begin(), static_cast<Eigen::Index>(diag.size())), role);
}

Vector SpdOperator::solve(const Vector& rhs) const {
  require_same_dim(dim(), static_cast<int>(rhs.size()), "SpdOperator::solve");
  return llt_->solve(rhs);
}

SpdOperator SpdOperator::inverse() const {
  Matrix inv = llt_->solve(Matrix::Identity(dim(), dim()));
  return SpdOperator(0.5 * (inv + inv.transpose()), opposite(role_));
}

SpdOperator SpdOperator::scaled(double factor) const {
  if (!(factor > 0.0)) throw DomainError("SpdOperator::scaled: factor must be positive");
  return SpdOperator(factor * m_, role_);
}

double pair(const DualVector& s, const PrimalVector& x) {
  require_same_dim(s.dim(), x.dim(), "pair");
  return s.coords().dot(x.coords());
}

DualVector apply(const SpdOperator& a, const PrimalVector& h) {
  require_role(a, Role::PrimalToDual, "apply");
  require_same_dim(a.dim(), h.dim(), "apply");
  return DualVector(a.matrix() * h.coords());
}

PrimalVector apply(const SpdOperator& h, const DualVector& s) {
  require_role(h, Role::DualToPrimal, "apply");
  require_same_dim(h.dim(), s.dim(), "apply");
  return PrimalVector(h.matrix() * s.coords());
}

double rel_trace(const SpdOperator& h, const SpdOperator& a) {
  require_role(h, Role::DualToPrimal, "rel_trace");
  require_role(a, Role::PrimalToDual, "rel_trace");
  require_same_dim(h.dim(), a.dim(), "rel_trace");
  // Tr(HA) for symmetric H, A is the Frobenius inner product.
  return h.matrix().cwiseProduct(a.matrix()).sum();
}

double log_rel_det(const SpdOperator& h, const SpdOperator& a) {
  require_role(h, Role::DualToPrimal, "rel_det");
  require_role(a, Role::PrimalToDual, "rel_det");
  require_same_dim(h.dim(), a.dim(), "rel_det");
  return a.log_det() + h.log_det();
}

double rel_det(const SpdOperator& h, const SpdOperator& a) { return std::exp(log_rel_det(h, a)); }

double norm_primal(const SpdOperator& a, const PrimalVector& h) {
  require_role(a, Role::PrimalToDual, "norm_primal");
  require_same_dim(a.dim(), h.dim(), "norm_primal");
  const double q = h.coords().dot(a.matrix() * h.coords());
  return std::sqrt(std::max(q, 0.0));
}

double norm_dual(const SpdOperator& a, const DualVector& s) {
  require_role(a, Role::PrimalToDual, "norm_dual");
  require_same_dim(a.dim(), s.dim(), "norm_dual");
  // ||L^{-1} s||^2 = <s, A^{-1} s>.
  const Vector w = a.factorization().matrixL().solve(s.coords());
  return w.norm();
}

EigenRange rel_eigen_range(const Matrix& g, const Eigen::LLT<Matrix>& a_factor) {
  require_same_dim(static_cast<int>(g.rows()), static_cast<int>(a_factor.rows()),
                   "rel_eigen_range");
  const Matrix c = congruence_reduce(g, a_factor);
  Eigen::SelfAdjointEigenSolver<Matrix> es(c, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NotSpdError("rel_eigen_range: eigensolver failed");
  const Vector& ev = es.eigenvalues();
  return EigenRange{ev(0), ev(ev.size() - 1)};
}

EigenRange rel_eigen_range(const SpdOperator& g, const SpdOperator& a) {
  if (g.role() != a.role()) throw RoleError("rel_eigen_range: operators have different roles");
  return rel_eigen_range(g.matrix(), a.factorization());
}

double spectral_norm_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double loewner_margin(const Matrix& lower, const Matrix& upper) {
  require_same_dim(static_cast<int>(lower.rows()), static_cast<int>(upper.rows()),
                   "loewner_margin");
  const Matrix diff = upper - lower;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (diff + diff.transpose()),
                                           Eigen::EigenvaluesOnly);
  const double scale = spectral_norm_sym(upper);
  return es.eigenvalues()(0) / (scale > 0.0 ? scale : 1.0);
}

bool loewner_leq(const SpdOperator& a1, const SpdOperator& a2, double tol) {
  if (a1.role() != a2.role()) throw RoleError("loewner_leq: operators have different roles");
  return loewner_margin(a1.matrix(), a2.matrix()) >= -tol;
}

PrimalVector spd_solve(const SpdOperator& a, const DualVector& s) {
  require_role(a, Role::PrimalToDual, "spd_solve");
  return PrimalVector(a.solve(s.coords()));
}

}  // namespace broyden_lab

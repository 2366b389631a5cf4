#include "broyden_lab/potentials.hpp"

#include <algorithm>
#include <cmath>

namespace broyden_lab {

bool InequalityCheck::holds(double abs_tol, double rel_tol) const {
  return lhs >= rhs - (abs_tol + rel_tol * std::abs(lhs));
}

double logdet_barrier(const SpdOperator& a, const SpdOperator& g) {
  if (a.dim() != g.dim()) throw DimensionError("logdet_barrier: dimension mismatch");
  return g.log_det() - a.log_det();
}

double augmented_barrier(const SpdOperator& g, const SpdOperator& a) {
  if (a.dim() != g.dim()) throw DimensionError("augmented_barrier: dimension mismatch");
  // <G^{-1}, G - A> = n - Tr(G^{-1} A)
  const double tr_ginv_a = g.factorization().solve(a.matrix()).trace();
  return g.log_det() - a.log_det() - static_cast<double>(g.dim()) + tr_ginv_a;
}

PotentialSnapshot potentials(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u) {
  PotentialSnapshot s;
  s.v = logdet_barrier(a, g);
  s.psi = augmented_barrier(g, a);
  s.nu = u.euclidean_norm() <= kZeroDirection ? 0.0 : nu(a, g, u);
  return s;
}

double progress_lb_V(double eta, TauParam tau, double nu) {
  if (!(eta >= 1.0)) throw DomainError("progress_lb_V: eta must be >= 1");
  const double t = tau.value();
  return std::log1p((t / eta + 1.0 - t) * nu * nu);
}

double progress_lb_psi(double xi, double eta, TauParam tau, double nu) {
  if (!(xi >= 1.0) || !(eta >= 1.0)) {
    throw DomainError("progress_lb_psi: xi and eta must be >= 1");
  }
  const double t = tau.value();
  return 6.0 / 13.0 * std::log1p((t / (xi * eta) + 1.0 - t) * nu * nu);
}

ScalarGap scalar_gap(double alpha, double beta) {
  if (!(beta > 0.0) || !(alpha >= beta)) {
    throw DomainError("scalar_gap: requires alpha >= beta > 0");
  }
  const double sqrt3 = std::sqrt(3.0);
  ScalarGap out;
  out.lhs = alpha - std::log(beta) - 1.0;
  out.log_arg = alpha + 1.0 / beta - 1.0;
  const double l = std::log(out.log_arg);
  out.rhs_sharp = sqrt3 / (2.0 + sqrt3) * l;
  out.rhs = 6.0 / 13.0 * l;
  return out;
}

MetricChange metric_change_lb(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u,
                              TauParam tau) {
  if (u.euclidean_norm() <= kZeroDirection) return MetricChange{0.0, 0.0};
  const SpdOperator h_plus = broyd_inverse(a, g, u, tau);
  const double inv_xi = rel_eigen_range(g, a).min_rel;
  const double xi = 1.0 / inv_xi;
  const Vector d = (g.matrix() - a.matrix()) * u.coords();
  const double g_uu = u.coords().dot(g.matrix() * u.coords());
  const double quad = d.dot(h_plus.matrix() * d);
  const double nu_val = nu(a, g, u);
  return MetricChange{nu_val * nu_val, quad / ((1.0 + xi) * g_uu)};
}

UpdateProgress update_progress(const SpdOperator& a, const SpdOperator& g,
                               const PrimalVector& u, TauParam tau) {
  const EigenRange range = rel_eigen_range(g, a);
  UpdateProgress p;
  p.xi = std::max(1.0, 1.0 / range.min_rel);
  p.eta = std::max(1.0, range.max_rel);
  p.nu = nu(a, g, u);

  const UpdateResult upd = broyd(a, g, u, tau);
  p.v_decrease.lhs = logdet_barrier(a, g) - logdet_barrier(a, upd.g_plus);
  p.v_decrease.rhs = progress_lb_V(p.eta, tau, p.nu);
  p.psi_decrease.lhs = augmented_barrier(g, a) - augmented_barrier(upd.g_plus, a);
  p.psi_decrease.rhs = progress_lb_psi(p.xi, p.eta, tau, p.nu);
  return p;
}

}  // namespace broyden_lab

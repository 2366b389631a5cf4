#ifndef BROYDEN_LAB_POTENTIALS_HPP
#define BROYDEN_LAB_POTENTIALS_HPP

#include "broyden_lab/broyden_update.hpp"

namespace broyden_lab {

/// Absolute and relative slack used by every inequality predicate below.
inline constexpr double kInequalityAbsTol = 1e-9;
inline constexpr double kInequalityRelTol = 1e-9;

/// Outcome of checking lhs >= rhs.
struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;

  /// lhs - rhs; negative means the inequality is violated in exact terms.
  double slack() const { return lhs - rhs; }
  /// lhs >= rhs up to abs_tol + rel_tol * |lhs|.
  bool holds(double abs_tol = kInequalityAbsTol, double rel_tol = kInequalityRelTol) const;
};

struct PotentialSnapshot {
  double v = 0.0;    // log-det barrier V(A, G)
  double psi = 0.0;  // augmented barrier psi(G, A)
  double nu = 0.0;   // nu(A, G, u), 0 when u = 0
};

/// V(A, G) = ln Det(A^{-1}, G). Nonnegative when A <= G.
double logdet_barrier(const SpdOperator& a, const SpdOperator& g);

/// psi(G, A) = ln Det(A^{-1}, G) - <G^{-1}, G - A>. This is the Bregman
/// divergence of -ln Det centered at G, hence nonnegative.
double augmented_barrier(const SpdOperator& g, const SpdOperator& a);

PotentialSnapshot potentials(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u);

/// ln(1 + (tau/eta + 1 - tau) nu^2): guaranteed decrease of V for A <= G <= eta A.
double progress_lb_V(double eta, TauParam tau, double nu);

/// (6/13) ln(1 + (tau/(xi eta) + 1 - tau) nu^2): guaranteed decrease of psi for
/// A/xi <= G <= eta A.
double progress_lb_psi(double xi, double eta, TauParam tau, double nu);

/// Both sides of the scalar inequality behind the psi progress bound, for
/// alpha >= beta > 0:
///   alpha - ln beta - 1 >= sqrt(3)/(2 + sqrt(3)) ln(alpha + 1/beta - 1)
///                       >= 6/13 ln(alpha + 1/beta - 1).
struct ScalarGap {
  double lhs;        // alpha - ln beta - 1
  double rhs_sharp;  // sqrt(3)/(2 + sqrt(3)) * ln(alpha + 1/beta - 1)
  double rhs;        // 6/13 * ln(alpha + 1/beta - 1)
  double log_arg;    // alpha + 1/beta - 1, always >= 1
};
ScalarGap scalar_gap(double alpha, double beta);

/// Both sides of the metric-change inequality
///   nu^2(A, G, u) >= 1/(1 + xi) <(G - A) G+^{-1} (G - A) u, u> / <Gu, u>
/// with 1/xi the smallest eigenvalue of G relative to A.
struct MetricChange {
  double nu_sq;
  double rhs;
};
MetricChange metric_change_lb(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u,
                              TauParam tau);

/// Measured potential decreases of one update together with their
/// lower bounds. xi and eta are the tight bracket from rel_eigen_range(G, A),
/// clamped below at 1.
struct UpdateProgress {
  InequalityCheck v_decrease;    // V(A,G) - V(A,G+) >= progress_lb_V; meaningful when A <= G
  InequalityCheck psi_decrease;  // psi(G,A) - psi(G+,A) >= progress_lb_psi
  double xi;
  double eta;
  double nu;
};
UpdateProgress update_progress(const SpdOperator& a, const SpdOperator& g,
                               const PrimalVector& u, TauParam tau);

}  // namespace broyden_lab

#endif  // BROYDEN_LAB_POTENTIALS_HPP

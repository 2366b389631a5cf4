#ifndef BROYDEN_LAB_BROYDEN_UPDATE_HPP
#define BROYDEN_LAB_BROYDEN_UPDATE_HPP

#include "broyden_lab/operator_core.hpp"

namespace broyden_lab {

/// Directions with Euclidean norm at or below this are treated as u = 0.
inline constexpr double kZeroDirection = 1e-300;

/// Weight of the DFP component in the inverse-operator update. Restricted to
/// the convex class [0, 1]: tau = 1 is DFP, tau = 0 is BFGS.
class TauParam {
 public:
  explicit TauParam(double tau);

  static TauParam dfp() { return TauParam(1.0); }
  static TauParam bfgs() { return TauParam(0.0); }

  double value() const { return tau_; }

 private:
  double tau_;
};

struct UpdateResult {
  SpdOperator g_plus;      // PrimalToDual
  SpdOperator g_plus_inv;  // DualToPrimal, built from the inverse-update formula
  double phi;              // primal DFP weight
  double det_ratio;        // Det(g_plus^{-1}, G)
};

/// Primal DFP weight phi_tau(A, G, u) in [0, 1]. Throws DomainError for u = 0.
double phi_tau(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u, TauParam tau);

/// Broyd_tau(A, G, u): the rank-two update of the approximation G towards
/// the target A along u. For u = 0 returns G itself (with phi = tau and
/// det_ratio = 1). The result satisfies the secant equation G+ u = A u.
UpdateResult broyd(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u,
                   TauParam tau);

/// G+^{-1} by the closed-form inverse update, without inverting G+.
/// For u = 0 returns G^{-1}.
SpdOperator broyd_inverse(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u,
                          TauParam tau);

/// Det(G+^{-1}, G) = tau <Au,u>/<AG^{-1}Au,u> + (1 - tau) <Gu,u>/<Au,u>.
/// For u = 0 returns 1.
double broyd_det_ratio(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u,
                       TauParam tau);

/// nu(A, G, u) = ||(G - A)u||*_G / ||u||_A. Throws DomainError for u = 0.
double nu(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u);

/// nu via the quadratic form <(G - A) G^{-1} (G - A) u, u>^{1/2} / <Au, u>^{1/2},
/// assembling the operator explicitly. Kept as a cross-check of nu().
double nu_quadratic_form(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u);

namespace detail {

/// Raw update on matrices, given G and its inverse H. Used by the solver so
/// that the inverse is propagated by the closed-form formula instead of being
/// refactorized. Both outputs are symmetrized.
struct RawUpdate {
  Matrix g_plus;
  Matrix h_plus;
  double phi;
  double det_ratio;
};

RawUpdate broyd_raw(const Matrix& a, const Matrix& g, const Matrix& h, const Vector& u,
                    double tau);

}  // namespace detail

}  // namespace broyden_lab

#endif  // BROYDEN_LAB_BROYDEN_UPDATE_HPP

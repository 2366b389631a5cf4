#include "broyden_lab/broyden_update.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace broyden_lab {

namespace {

void check_operands(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u,
                    const char* what) {
  if (a.role() != Role::PrimalToDual || g.role() != Role::PrimalToDual) {
    throw RoleError(std::string(what) + ": A and G must map primal to dual");
  }
  if (a.dim() != g.dim() || a.dim() != u.dim()) {
    throw DimensionError(std::string(what) + ": dimension mismatch");
  }
}

bool is_zero_direction(const Vector& u) { return u.norm() <= kZeroDirection; }

// Scalar moments of the update along u, with w = G^{-1} A u.
struct Moments {
  Vector au;    // A u
  Vector gu;    // G u
  Vector w;     // G^{-1} A u
  double a_uu;  // <Au, u>
  double g_uu;  // <Gu, u>
  double c_uu;  // <A G^{-1} A u, u>
};

Moments moments(const Matrix& g, const Vector& w_from_h, const Vector& u, const Vector& au) {
  Moments m;
  m.au = au;
  m.gu = g * u;
  m.w = w_from_h;
  m.a_uu = m.au.dot(u);
  m.g_uu = m.gu.dot(u);
  m.c_uu = m.au.dot(m.w);
  return m;
}

double phi_from(const Moments& m, double tau) {
  const double dfp = tau * m.a_uu / m.c_uu;
  const double bfgs = (1.0 - tau) * m.g_uu / m.a_uu;
  const double denom = dfp + bfgs;
  if (!(denom > 0.0)) {
    throw std::logic_error("phi_tau: nonpositive denominator for tau in [0, 1]");
  }
  return dfp / denom;
}

double det_ratio_from(const Moments& m, double tau) {
  return tau * m.a_uu / m.c_uu + (1.0 - tau) * m.g_uu / m.a_uu;
}

Matrix primal_update(const Matrix& g, const Moments& m, double phi) {
  const Matrix au_au = m.au * m.au.transpose();
  const Matrix dfp = g - (m.au * m.gu.transpose() + m.gu * m.au.transpose()) / m.a_uu +
                     (m.g_uu / m.a_uu + 1.0) * au_au / m.a_uu;
  const Matrix bfgs = g - m.gu * m.gu.transpose() / m.g_uu + au_au / m.a_uu;
  Matrix out = phi * dfp + (1.0 - phi) * bfgs;
  return 0.5 * (out + out.transpose());
}

Matrix inverse_update(const Matrix& h, const Vector& u, const Moments& m, double tau) {
  const Matrix uu = u * u.transpose();
  const Matrix dfp = h - m.w * m.w.transpose() / m.c_uu + uu / m.a_uu;
  const Matrix bfgs = h - (m.w * u.transpose() + u * m.w.transpose()) / m.a_uu +
                      (m.c_uu / m.a_uu + 1.0) * uu / m.a_uu;
  Matrix out = tau * dfp + (1.0 - tau) * bfgs;
  return 0.5 * (out + out.transpose());
}

Moments moments_via_factor(const SpdOperator& a, const SpdOperator& g, const Vector& u) {
  const Vector au = a.matrix() * u;
  return moments(g.matrix(), g.solve(au), u, au);
}

}  // namespace

TauParam::TauParam(double tau) : tau_(tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw DomainError("TauParam: tau must lie in [0, 1], got " + std::to_string(tau));
  }
}

double phi_tau(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u, TauParam tau) {
  check_operands(a, g, u, "phi_tau");
  if (is_zero_direction(u.coords())) throw DomainError("phi_tau: direction u is zero");
  return phi_from(moments_via_factor(a, g, u.coords()), tau.value());
}

UpdateResult broyd(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u,
                   TauParam tau) {
  check_operands(a, g, u, "broyd");
  if (is_zero_direction(u.coords())) {
    return UpdateResult{g, g.inverse(), tau.value(), 1.0};
  }
  const SpdOperator h = g.inverse();
  detail::RawUpdate raw = detail::broyd_raw(a.matrix(), g.matrix(), h.matrix(), u.coords(),
                                            tau.value());
  return UpdateResult{SpdOperator(raw.g_plus, Role::PrimalToDual),
                      SpdOperator(raw.h_plus, Role::DualToPrimal), raw.phi, raw.det_ratio};
}

SpdOperator broyd_inverse(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u,
                          TauParam tau) {
  check_operands(a, g, u, "broyd_inverse");
  const SpdOperator h = g.inverse();
  if (is_zero_direction(u.coords())) return h;
  const Moments m = moments_via_factor(a, g, u.coords());
  return SpdOperator(inverse_update(h.matrix(), u.coords(), m, tau.value()), Role::DualToPrimal);
}

double broyd_det_ratio(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u,
                       TauParam tau) {
  check_operands(a, g, u, "broyd_det_ratio");
  if (is_zero_direction(u.coords())) return 1.0;
  return det_ratio_from(moments_via_factor(a, g, u.coords()), tau.value());
}

double nu(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u) {
  check_operands(a, g, u, "nu");
  if (is_zero_direction(u.coords())) throw DomainError("nu: direction u is zero");
  const Vector d = (g.matrix() - a.matrix()) * u.coords();
  const double num = norm_dual(g, DualVector(d));
  return num / norm_primal(a, u);
}

double nu_quadratic_form(const SpdOperator& a, const SpdOperator& g, const PrimalVector& u) {
  check_operands(a, g, u, "nu_quadratic_form");
  if (is_zero_direction(u.coords())) throw DomainError("nu: direction u is zero");
  const Matrix diff = g.matrix() - a.matrix();
  const Matrix op = diff * g.factorization().solve(diff);
  const Vector& x = u.coords();
  const double num = x.dot(op * x);
  const double den = x.dot(a.matrix() * x);
  return std::sqrt(std::max(num, 0.0) / den);
}

namespace detail {

RawUpdate broyd_raw(const Matrix& a, const Matrix& g, const Matrix& h, const Vector& u,
                    double tau) {
  const Vector au = a * u;
  const Moments m = moments(g, h * au, u, au);
  RawUpdate out;
  out.phi = phi_from(m, tau);
  out.det_ratio = det_ratio_from(m, tau);
  out.g_plus = primal_update(g, m, out.phi);
  out.h_plus = inverse_update(h, u, m, tau);
  return out;
}

}  // namespace detail

}  // namespace broyden_lab

#ifndef BROYDEN_LAB_BOUNDS_HPP
#define BROYDEN_LAB_BOUNDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "broyden_lab/problems.hpp"
#include "broyden_lab/solver.hpp"

namespace broyden_lab {

/// Relative and absolute slack allowed when comparing a measured value to an envelope.
inline constexpr double kEnvelopeRelTol = 1e-8;
inline constexpr double kEnvelopeAbsTol = 1e-14;

/// measured <= bound (1 + 1e-8) + 1e-14.
bool envelope_satisfied(double measured, double bound);

// --- quadratic scheme -------------------------------------------------------

/// (1 - mu/L)^k lambda0.
double env_quad_linear(double mu, double ell, int k, double lambda0);

/// [2 / prod(p_i)^{1/k} (e^{(n/k) ln(L/mu)} - 1)]^{k/2} sqrt(L/mu) lambda0,
/// p_i = tau_i mu/L + 1 - tau_i. taus[i] is tau_i; a short list holds its last value.
double env_quad_superlinear(int n, double mu, double ell, const std::vector<double>& taus, int k,
                            double lambda0);
/// Same with e^{(13/6)(n/k) ln(L/mu)}.
double env_quad_superlinear_psi(int n, double mu, double ell, const std::vector<double>& taus,
                                int k, double lambda0);

/// Natural log of the superlinear envelope with n ln(L/mu) replaced by
/// log_factor and the exponent multiplied by exponent_scale (1 or 13/6).
/// Finite whenever lambda0 > 0 and the envelope is positive.
double log_env_quad_superlinear(double log_factor, double mu, double ell,
                                const std::vector<double>& taus, int k, double lambda0,
                                double exponent_scale = 1.0);

/// sum_i ln(L / lambda_i), lambda_i the eigenvalues of A relative to B.
double env_quad_sharpened_factor(const QuadraticProblem& p);

// --- general scheme ---------------------------------------------------------

/// ceil(8n ln(2L/mu) / (tau 4mu/(9L) + 1 - tau)).
std::int64_t k0(int n, double mu, double ell, double sup_tau);

/// Largest lambda0 allowed by the region of local convergence:
/// ln(3/2) / (3/2)^{3/2} max{mu/(2L), 1/(K0 + 9)} / M; +inf for M = 0.
double region_radius(double mu, double ell, int n, double sup_tau, double m_sc);

struct EnvelopePoint {
  int k = 0;
  double measured = 0.0;
  double bound = 0.0;
  bool satisfied = true;
  double slack = 0.0;  // (bound - measured) / bound
  bool provisional = false;
};

struct EnvelopeSeries {
  std::string name;
  std::vector<EnvelopePoint> points;
  /// Whether a violation counts as a failure (the bound's hypotheses hold).
  bool asserted = true;
  std::optional<int> first_violation;
  double min_slack = 0.0;

  const EnvelopePoint* at(int k) const;
  bool passed() const { return !asserted || !first_violation.has_value(); }
};

struct EnvelopeReport {
  std::vector<EnvelopeSeries> series;
  std::int64_t k0 = 0;
  double region_radius = 0.0;
  bool lam_ini_held = false;

  const EnvelopeSeries* find(const std::string& name) const;
  /// Earliest violation among asserted series.
  std::optional<int> first_violation() const;
  /// Smallest slack among asserted series.
  double min_slack() const;
  bool passed() const;
};

/// Extra inputs for envelope evaluation on a trace.
struct EnvelopeOptions {
  /// Multiplies the trace's mu before evaluating (a value > 1 overstates the
  /// rate and is used to force violations).
  double mu_scale = 1.0;
  /// Replaces n ln(L/mu) in the quadratic superlinear envelopes ("quad_sharpened").
  std::optional<double> sharpened_factor;
};

/// Names accepted by envelope_series:
///   quad_linear, quad_superlinear, quad_superlinear_psi, quad_sharpened,
///   general_linear_xi, general_linear, general_superlinear_xi, general_superlinear.
const std::vector<std::string>& envelope_names();
bool is_envelope_name(const std::string& name);

EnvelopeSeries envelope_series(const std::string& name, const IterationTrace& trace,
                               const EnvelopeOptions& opt = {});

/// Quadratic envelopes of a trace: quad_linear, quad_superlinear, quad_superlinear_psi.
EnvelopeReport env_quad_report(const IterationTrace& trace, const EnvelopeOptions& opt = {});

/// general_linear_xi (sqrt(xi_k) lambda0 prod q_i) and general_linear
/// ((1 - mu/(2L))^k sqrt(3/2) lambda0). The latter is asserted only when the
/// starting point is inside the region of local convergence.
EnvelopeReport env_general_linear(const IterationTrace& trace, const EnvelopeOptions& opt = {});

/// general_superlinear_xi and general_superlinear, k >= 1. The final point of
/// general_superlinear_xi is provisional when xi_{k+1} is not available.
EnvelopeReport env_general_superlinear(const IterationTrace& trace,
                                       const EnvelopeOptions& opt = {});

/// Report with the named series plus K0 and region data.
EnvelopeReport envelope_report(const IterationTrace& trace, const std::vector<std::string>& names,
                               const EnvelopeOptions& opt = {});

// --- comparison with earlier estimates --------------------------------------

enum class PriorMethod { BFGS, DFP };

struct PriorComparison {
  double prev = 0.0;        // earlier rate estimate
  std::optional<double> simplified;  // simplified new rate, only for k >= start_new
  double start_prev = 0.0;  // earlier starting moment
  double start_new = 0.0;   // new starting moment
};

PriorComparison env_prior_comparison(int n, double mu, double ell, int k, double lambda0,
                                     PriorMethod method);

/// e^{(n/k) ln(L/mu)} - 1 <= 4n/(3k) ln(L/mu) and sqrt(L/mu) <= (3/2)^{k/2}.
struct DiscAuxCheck {
  double aux1_lhs = 0.0;
  double aux1_rhs = 0.0;
  double aux2_log_lhs = 0.0;  // ln sqrt(L/mu)
  double aux2_log_rhs = 0.0;  // (k/2) ln(3/2)
  bool aux1_holds() const { return aux1_lhs <= aux1_rhs; }
  bool aux2_holds() const { return aux2_log_lhs <= aux2_log_rhs; }
};
DiscAuxCheck disc_aux(int n, double l_over_mu, std::int64_t k);

}  // namespace broyden_lab

#endif  // BROYDEN_LAB_BOUNDS_HPP

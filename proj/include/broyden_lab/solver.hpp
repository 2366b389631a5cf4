#ifndef BROYDEN_LAB_SOLVER_HPP
#define BROYDEN_LAB_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include "broyden_lab/broyden_update.hpp"
#include "broyden_lab/problems.hpp"

namespace broyden_lab {

/// Per-iteration choice of tau_k.
class TauSchedule {
 public:
  enum class Kind { ConstantDFP, ConstantBFGS, Constant, Sequence };

  static TauSchedule dfp();
  static TauSchedule bfgs();
  static TauSchedule constant(double tau);
  /// tau_k = values[k]; past the end the last value is held.
  static TauSchedule sequence(std::vector<double> values);

  Kind kind() const { return kind_; }
  double at(int k) const;
  /// sup_k tau_k.
  double sup_tau() const { return sup_; }
  /// "BFGS", "DFP", "tau=<v>" or "sequence".
  std::string label() const;
  const std::vector<double>& values() const { return values_; }

 private:
  TauSchedule(Kind kind, std::vector<double> values);

  Kind kind_;
  std::vector<double> values_;
  double sup_;
};

struct SolverConfig {
  int max_iter = 1000;
  /// Stop as soon as lambda_k <= grad_tol.
  double grad_tol = 1e-12;
  int quad_order = kDefaultQuadOrder;
  /// Keep G_k and G_k^{-1} for every k (needed by secant_residual).
  bool record_operators = false;
  /// lambda_k needs a Hessian solve per iteration; disable for timing runs
  /// (the stopping test then falls back to g_k).
  bool compute_lambda = true;
  /// Flag the run when a quadrature error estimate exceeds this times ||J||.
  double quad_rel_tol = 1e-9;

  void validate() const;
};

/// Everything recorded at iteration k. Step fields describe the transition
/// from x_k to x_{k+1} and are only meaningful when has_step is set.
struct IterationRecord {
  int k = 0;
  PrimalVector x;
  DualVector grad;
  double lambda = 0.0;  // ||grad f(x_k)||*_{x_k}
  double g = 0.0;       // ||grad f(x_k)||*_{G_k}
  double xi = 1.0;      // exp(M sum_{i<k} r_i)
  EigenRange eig_range;  // G_k relative to Hess f(x_k)

  bool has_step = false;
  PrimalVector u;
  double tau = 0.0;
  double phi = 0.0;
  double r = 0.0;            // ||u_k||_{x_k}
  double xi_next = 1.0;      // xi_{k+1}
  double nu = 0.0;           // nu(T_k, G_k, u_k), T_k = A or J_k
  double v = 0.0;            // V(T_k, G_k)
  double psi = 0.0;          // psi(G_k, T_k)
  double v_after = 0.0;      // V(T_k, G_{k+1})
  double psi_after = 0.0;    // psi(G_{k+1}, T_k)
  double lb_v = 0.0;         // progress_lb_V with the tight bracket of G_k vs T_k
  double lb_psi = 0.0;       // progress_lb_psi, same bracket
  EigenRange target_range;   // G_k relative to T_k
  double quad_error = 0.0;   // absolute quadrature error estimate of J_k
  double target_norm = 0.0;  // ||T_k||_2
};

enum class TraceStatus { Converged, MaxIterations };

struct IterationTrace {
  std::vector<IterationRecord> records;
  TraceStatus status = TraceStatus::MaxIterations;
  bool general_path = false;
  int n = 0;
  double mu = 0.0;
  double ell = 0.0;
  double m_sc = 0.0;  // strong self-concordance constant M
  double sup_tau = 0.0;
  std::vector<Matrix> g_snapshots;  // G_k, when record_operators
  std::vector<Matrix> h_snapshots;  // G_k^{-1}, when record_operators
  bool quad_error_flagged = false;
  std::vector<std::string> diagnostics;

  /// Number of steps taken.
  int iterations() const;
  double lambda0() const { return records.empty() ? 0.0 : records.front().lambda; }
  /// tau_0 .. tau_{k-1} as actually used.
  std::vector<double> taus() const;
};

/// Quasi-Newton scheme for a quadratic: G_0 = L B, x_{k+1} = x_k - G_k^{-1} grad f(x_k),
/// G_{k+1} = Broyd_{tau_k}(A, G_k, u_k). The step uses the inverse propagated by
/// the closed-form inverse update. Throws DivergenceError on a non-finite iterate.
IterationTrace run_quadratic(const QuadraticProblem& p, const PrimalVector& x0,
                             const TauSchedule& sched, const SolverConfig& cfg);

/// General scheme: same loop with the update target J_k, the mean Hessian over
/// the step segment.
IterationTrace run_general(const ProblemInstance& p, const PrimalVector& x0,
                           const TauSchedule& sched, const SolverConfig& cfg);

/// ||G_{k+1} u_k - (grad f(x_{k+1}) - grad f(x_k))|| / ||grad f(x_{k+1}) - grad f(x_k)||
/// per step. Entries are empty for skipped steps: u_k = 0, or a gradient
/// difference at the rounding floor of the gradient evaluation.
/// Throws std::logic_error when the trace has no operator snapshots.
std::vector<std::optional<double>> secant_residual(const IterationTrace& trace,
                                                   const ProblemInstance& p);

/// Worst observed margins of the per-iteration invariants. Margins are relative
/// (negative = violated).
struct InvariantAudit {
  double hess_sandwich = 0.0;     // 1/xi_k H_k <= G_k <= xi_k L/mu H_k
  double target_sandwich = 0.0;   // 1/xi_{k+1} T_k <= G_k <= xi_{k+1} L/mu T_k
  double step_bound = 0.0;        // xi_k lambda_k - r_k (absolute)
  double v_progress = 0.0;        // (V_k - V(T_k, G_{k+1})) - lb_v
  double psi_progress = 0.0;      // (psi_k - psi(G_{k+1}, T_k)) - lb_psi
  double xi_recursion = 0.0;      // max relative error of xi_{k+1} = xi_k e^{M r_k}
  bool lambda_monotone = true;    // diagnostic only
};
InvariantAudit audit_invariants(const IterationTrace& trace);

}  // namespace broyden_lab

#endif  // BROYDEN_LAB_SOLVER_HPP

#ifndef BROYDEN_LAB_PROBLEMS_HPP
#define BROYDEN_LAB_PROBLEMS_HPP

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "broyden_lab/operator_core.hpp"

namespace broyden_lab {

/// Default Gauss-Legendre order for integral Hessians.
inline constexpr int kDefaultQuadOrder = 16;
/// Loewner tolerance for the certified-constant checks (mu B <= A <= L B).
inline constexpr double kCertificateTol = 1e-10;

/// f(x) = 1/2 <Ax, x> - <b, x> with certified mu B <= A <= L B.
struct QuadraticProblem {
  SpdOperator a_op;
  DualVector b;
  SpdOperator b_ref;
  double mu;
  double ell;

  /// Validates dimensions and the certificate. When mu / ell are omitted
  /// they are set to the tight extreme eigenvalues of A relative to B.
  static QuadraticProblem make(SpdOperator a, DualVector b, SpdOperator b_ref,
                               std::optional<double> mu = std::nullopt,
                               std::optional<double> ell = std::nullopt);

  int dim() const { return a_op.dim(); }
  double value(const PrimalVector& x) const;
  DualVector gradient(const PrimalVector& x) const;
  PrimalVector minimizer() const;
};

/// A = Q diag(spectrum) Q^T with Q a seeded random orthogonal matrix, B = I,
/// mu = min(spectrum), L = max(spectrum).
QuadraticProblem quad_make(const std::vector<double>& spectrum, const DualVector& b,
                           std::uint64_t seed);

/// f(x) = ln(sum_i exp(<a_i, x> + b_i)) + mu/2 <Bx, x>.
struct LogSumExpProblem {
  Matrix a_rows;   // m x n, row i holds the coordinates of a_i in E*
  Vector b_shift;  // m
  double mu;
  SpdOperator b_ref;
  double gamma;    // >= max_i ||a_i||*_B

  /// gamma defaults to the tight value max_i ||a_i||*_B.
  static LogSumExpProblem make(Matrix a_rows, Vector b_shift, double mu,
                               std::optional<SpdOperator> b_ref = std::nullopt,
                               std::optional<double> gamma = std::nullopt);

  int dim() const { return static_cast<int>(a_rows.cols()); }
  int terms() const { return static_cast<int>(a_rows.rows()); }
  /// L = gamma^2 + mu.
  double ell() const { return gamma * gamma + mu; }
  /// M = 2 gamma^3 / mu^{3/2}.
  double strong_sc() const;
};

/// Rows drawn from a seeded Gaussian and rescaled so that the largest dual
/// norm equals gamma exactly; shifts drawn from N(0, 1). B = I.
LogSumExpProblem lse_make_random(int n, int m, double gamma, double mu, std::uint64_t seed);

struct LseEval {
  double f;
  DualVector g;   // includes mu B x
  SpdOperator h;  // includes mu B
  Vector pi;      // softmax weights, sum to 1
};

/// Value, gradient and Hessian with the max-shift trick.
LseEval lse_value_grad_hess(const LogSumExpProblem& p, const PrimalVector& x);

enum class ProblemKind { Quadratic, LogSumExp };

/// Oracle bundle for either family, with its certified constants.
class ProblemInstance {
 public:
  ProblemInstance(QuadraticProblem q);  // NOLINT(google-explicit-constructor)
  ProblemInstance(LogSumExpProblem l);  // NOLINT(google-explicit-constructor)

  ProblemKind kind() const;
  int dim() const;
  double mu() const;
  double ell() const;
  /// Strong self-concordance constant; exactly 0 for quadratics.
  double strong_sc() const;
  const SpdOperator& b_ref() const;

  const QuadraticProblem* quadratic() const { return std::get_if<QuadraticProblem>(&payload_); }
  const LogSumExpProblem* logsumexp() const { return std::get_if<LogSumExpProblem>(&payload_); }

  double value(const PrimalVector& x) const;
  DualVector gradient(const PrimalVector& x) const;
  SpdOperator hessian(const PrimalVector& x) const;

 private:
  std::variant<QuadraticProblem, LogSumExpProblem> payload_;
};

/// J = int_0^1 Hess f(x + t u) dt.
struct IntegralHessian {
  SpdOperator j_op;
  int quad_order;
  double est_error;  // ||J_order - J_{2 order}||_2; 0 for quadratics
};

IntegralHessian integral_hessian(const ProblemInstance& p, const PrimalVector& x,
                                 const PrimalVector& u, int order = kDefaultQuadOrder);

/// Margins (lambda_min(upper - lower) / ||upper||) of the segment-Hessian
/// sandwiches and a sampled spot check of the strong self-concordance bound
///   Hess f(y) - Hess f(x) <= M ||y - x||_z Hess f(w).
struct SandwichReport {
  double r = 0.0;  // ||y - x||_x
  double j_x_lower = 0.0;
  double j_x_upper = 0.0;
  double j_y_lower = 0.0;
  double j_y_upper = 0.0;
  double sscf_min = 0.0;  // worst margin over the sampled (z, w)
  double est_error = 0.0;
  double j_norm = 0.0;

  double min_margin() const;
  bool passed(double tol) const { return min_margin() >= -tol; }
};

SandwichReport sandwich_check(const ProblemInstance& p, const PrimalVector& x,
                              const PrimalVector& y, int sscf_samples = 4,
                              std::uint64_t seed = 0, int order = kDefaultQuadOrder);

/// lambda(x) = ||grad f(x)||*_x.
double local_gradient_norm(const ProblemInstance& p, const PrimalVector& x);

/// Reference minimizer by damped Newton; used to place starting points.
PrimalVector newton_minimizer(const ProblemInstance& p, double tol = 1e-14, int max_iter = 200);

/// Point x* + t d with local gradient norm equal to target (bisection in t).
PrimalVector point_at_lambda(const ProblemInstance& p, const PrimalVector& x_star,
                             const PrimalVector& direction, double target);

}  // namespace broyden_lab

#endif  // BROYDEN_LAB_PROBLEMS_HPP

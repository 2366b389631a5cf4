#include "broyden_lab/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "broyden_lab/quadrature.hpp"

namespace broyden_lab {

namespace {

Matrix random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) z(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

void require_dim(int expected, int got, const char* what) {
  if (expected != got) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(expected) +
                         " vs " + std::to_string(got) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Quadratic

QuadraticProblem QuadraticProblem::make(SpdOperator a, DualVector b, SpdOperator b_ref,
                                        std::optional<double> mu, std::optional<double> ell) {
  require_dim(a.dim(), b.dim(), "QuadraticProblem");
  require_dim(a.dim(), b_ref.dim(), "QuadraticProblem");
  const EigenRange range = rel_eigen_range(a, b_ref);
  const double m = mu.value_or(range.min_rel);
  const double l = ell.value_or(range.max_rel);
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("QuadraticProblem: mu must be positive");
  if (!(l >= m) || !std::isfinite(l)) throw DomainError("QuadraticProblem: L must be >= mu");
  if (range.min_rel < m * (1.0 - kCertificateTol) || range.max_rel > l * (1.0 + kCertificateTol)) {
    throw DomainError("QuadraticProblem: mu B <= A <= L B does not hold");
  }
  return QuadraticProblem{std::move(a), std::move(b), std::move(b_ref), m, l};
}

double QuadraticProblem::value(const PrimalVector& x) const {
  require_dim(dim(), x.dim(), "QuadraticProblem::value");
  return 0.5 * x.coords().dot(a_op.matrix() * x.coords()) - b.coords().dot(x.coords());
}

DualVector QuadraticProblem::gradient(const PrimalVector& x) const {
  require_dim(dim(), x.dim(), "QuadraticProblem::gradient");
  return DualVector(a_op.matrix() * x.coords() - b.coords());
}

PrimalVector QuadraticProblem::minimizer() const { return spd_solve(a_op, b); }

QuadraticProblem quad_make(const std::vector<double>& spectrum, const DualVector& b,
                           std::uint64_t seed) {
  if (spectrum.empty()) throw DimensionError("quad_make: empty spectrum");
  for (double s : spectrum) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("quad_make: spectrum must be positive");
  }
  const int n = static_cast<int>(spectrum.size());
  require_dim(n, b.dim(), "quad_make");
  std::mt19937_64 rng(seed);
  const Matrix q = random_orthogonal(n, rng);
  const Vector d = Vector::Map(spectrum.data(), n);
  const Matrix a = q * d.asDiagonal() * q.transpose();
  const auto [lo, hi] = std::minmax_element(spectrum.begin(), spectrum.end());
  return QuadraticProblem::make(SpdOperator(0.5 * (a + a.transpose())), b,
                                SpdOperator::identity(n), *lo, *hi);
}

// ---------------------------------------------------------------------------
// Log-sum-exp

LogSumExpProblem LogSumExpProblem::make(Matrix a_rows, Vector b_shift, double mu,
                                        std::optional<SpdOperator> b_ref,
                                        std::optional<double> gamma) {
  if (a_rows.rows() == 0 || a_rows.cols() == 0) {
    throw DimensionError("LogSumExpProblem: need m >= 1 terms and n >= 1");
  }
  if (b_shift.size() != a_rows.rows()) {
    throw DimensionError("LogSumExpProblem: b has the wrong length");
  }
  if (!a_rows.allFinite() || !b_shift.allFinite()) {
    throw DomainError("LogSumExpProblem: non-finite data");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("LogSumExpProblem: mu must be positive");
  const int n = static_cast<int>(a_rows.cols());
  SpdOperator b = b_ref.value_or(SpdOperator::identity(n));
  require_dim(n, b.dim(), "LogSumExpProblem");

  double tight = 0.0;
  for (Eigen::Index i = 0; i < a_rows.rows(); ++i) {
    tight = std::max(tight, norm_dual(b, DualVector(Vector(a_rows.row(i).transpose()))));
  }
  const double g = gamma.value_or(tight);
  if (!(g >= tight - 1e-12) || !std::isfinite(g)) {
    throw DomainError("LogSumExpProblem: gamma is below max_i ||a_i||*");
  }
  return LogSumExpProblem{std::move(a_rows), std::move(b_shift), mu, std::move(b), g};
}

double LogSumExpProblem::strong_sc() const { return 2.0 * gamma * gamma * gamma / std::pow(mu, 1.5); }

LogSumExpProblem lse_make_random(int n, int m, double gamma, double mu, std::uint64_t seed) {
  if (n <= 0 || m <= 0) throw DimensionError("lse_make_random: n and m must be positive");
  if (!(gamma > 0.0)) throw DomainError("lse_make_random: gamma must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  }
  Vector shift(m);
  for (int i = 0; i < m; ++i) shift(i) = normal(rng);
  const double max_norm = a.rowwise().norm().maxCoeff();
  a *= gamma / max_norm;
  return LogSumExpProblem::make(std::move(a), std::move(shift), mu, std::nullopt, std::nullopt);
}

LseEval lse_value_grad_hess(const LogSumExpProblem& p, const PrimalVector& x) {
  require_dim(p.dim(), x.dim(), "lse_value_grad_hess");
  const Vector& xc = x.coords();
  const Vector z = p.a_rows * xc + p.b_shift;
  const double zmax = z.maxCoeff();
  const Vector e = (z.array() - zmax).exp().matrix();
  const double sum = e.sum();
  Vector pi = e / sum;

  const Vector bx = p.b_ref.matrix() * xc;
  const double f = zmax + std::log(sum) + 0.5 * p.mu * xc.dot(bx);

  const Vector g0 = p.a_rows.transpose() * pi;
  // Centered second moment: sum_i pi_i (a_i - g0)(a_i - g0)^T, PSD by construction.
  const Matrix centered = p.a_rows.rowwise() - g0.transpose();
  const Matrix h0 = centered.transpose() * pi.asDiagonal() * centered;
  Matrix h = h0 + p.mu * p.b_ref.matrix();
  return LseEval{f, DualVector(g0 + p.mu * bx), SpdOperator(0.5 * (h + h.transpose())),
                 std::move(pi)};
}

// ---------------------------------------------------------------------------
// ProblemInstance

ProblemInstance::ProblemInstance(QuadraticProblem q) : payload_(std::move(q)) {}
ProblemInstance::ProblemInstance(LogSumExpProblem l) : payload_(std::move(l)) {}

ProblemKind ProblemInstance::kind() const {
  return std::holds_alternative<QuadraticProblem>(payload_) ? ProblemKind::Quadratic
                                                            : ProblemKind::LogSumExp;
}

int ProblemInstance::dim() const {
  return std::visit([](const auto& p) { return p.dim(); }, payload_);
}

double ProblemInstance::mu() const {
  return std::visit([](const auto& p) { return p.mu; }, payload_);
}

double ProblemInstance::ell() const {
  if (const auto* q = quadratic()) return q->ell;
  return logsumexp()->ell();
}

double ProblemInstance::strong_sc() const {
  if (quadratic() != nullptr) return 0.0;
  return logsumexp()->strong_sc();
}

const SpdOperator& ProblemInstance::b_ref() const {
  return std::visit([](const auto& p) -> const SpdOperator& { return p.b_ref; }, payload_);
}

double ProblemInstance::value(const PrimalVector& x) const {
  if (const auto* q = quadratic()) return q->value(x);
  return lse_value_grad_hess(*logsumexp(), x).f;
}

DualVector ProblemInstance::gradient(const PrimalVector& x) const {
  if (const auto* q = quadratic()) return q->gradient(x);
  return lse_value_grad_hess(*logsumexp(), x).g;
}

SpdOperator ProblemInstance::hessian(const PrimalVector& x) const {
  if (const auto* q = quadratic()) {
    require_dim(q->dim(), x.dim(), "ProblemInstance::hessian");
    return q->a_op;
  }
  return lse_value_grad_hess(*logsumexp(), x).h;
}

// ---------------------------------------------------------------------------
// Integral Hessian and sandwiches

namespace {

Matrix segment_mean_hessian(const ProblemInstance& p, const Vector& x, const Vector& u,
                            const GaussRule& rule) {
  const int n = p.dim();
  Matrix j = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const PrimalVector pt(x + rule.nodes[i] * u);
    j += rule.weights[i] * p.hessian(pt).matrix();
  }
  return 0.5 * (j + j.transpose());
}

}  // namespace

IntegralHessian integral_hessian(const ProblemInstance& p, const PrimalVector& x,
                                 const PrimalVector& u, int order) {
  if (order < 2) throw DomainError("integral_hessian: order must be >= 2");
  require_dim(p.dim(), x.dim(), "integral_hessian");
  require_dim(p.dim(), u.dim(), "integral_hessian");
  if (const auto* q = p.quadratic()) return IntegralHessian{q->a_op, order, 0.0};
  if (u.euclidean_norm() == 0.0) return IntegralHessian{p.hessian(x), order, 0.0};

  const Matrix coarse = segment_mean_hessian(p, x.coords(), u.coords(), gauss_legendre(order));
  const Matrix fine = segment_mean_hessian(p, x.coords(), u.coords(), gauss_legendre(2 * order));
  const double err = spectral_norm_sym(coarse - fine);
  return IntegralHessian{SpdOperator(coarse), order, err};
}

double SandwichReport::min_margin() const {
  return std::min({j_x_lower, j_x_upper, j_y_lower, j_y_upper, sscf_min});
}

SandwichReport sandwich_check(const ProblemInstance& p, const PrimalVector& x,
                              const PrimalVector& y, int sscf_samples, std::uint64_t seed,
                              int order) {
  const double m = p.strong_sc();
  const PrimalVector u = y - x;
  const SpdOperator hx = p.hessian(x);
  const SpdOperator hy = p.hessian(y);
  const IntegralHessian j = integral_hessian(p, x, u, order);

  SandwichReport rep;
  rep.r = norm_primal(hx, u);
  rep.est_error = j.est_error;
  rep.j_norm = spectral_norm_sym(j.j_op.matrix());
  const double c = 1.0 + m * rep.r / 2.0;
  rep.j_x_lower = loewner_margin(hx.matrix() / c, j.j_op.matrix());
  rep.j_x_upper = loewner_margin(j.j_op.matrix(), c * hx.matrix());
  rep.j_y_lower = loewner_margin(hy.matrix() / c, j.j_op.matrix());
  rep.j_y_upper = loewner_margin(j.j_op.matrix(), c * hy.matrix());

  // Spot check of the defining inequality at points around the segment.
  rep.sscf_min = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.5, 1.5);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = u.euclidean_norm();
  const Matrix diff = hy.matrix() - hx.matrix();
  for (int s = 0; s < sscf_samples; ++s) {
    Vector jitter_z(p.dim());
    Vector jitter_w(p.dim());
    for (int i = 0; i < p.dim(); ++i) {
      jitter_z(i) = normal(rng);
      jitter_w(i) = normal(rng);
    }
    const PrimalVector z(x.coords() + unif(rng) * u.coords() + 0.5 * scale * jitter_z);
    const PrimalVector w(x.coords() + unif(rng) * u.coords() + 0.5 * scale * jitter_w);
    const double r_z = norm_primal(p.hessian(z), u);
    const Matrix upper = m * r_z * p.hessian(w).matrix();
    // Normalize by the larger side so that M = 0 (upper = 0) stays meaningful.
    const Matrix gap = upper - diff;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gap + gap.transpose()),
                                             Eigen::EigenvaluesOnly);
    const double norm = std::max({spectral_norm_sym(upper), spectral_norm_sym(diff),
                                  std::numeric_limits<double>::min()});
    rep.sscf_min = std::min(rep.sscf_min, es.eigenvalues()(0) / norm);
  }
  if (sscf_samples <= 0) rep.sscf_min = 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Reference points

double local_gradient_norm(const ProblemInstance& p, const PrimalVector& x) {
  return norm_dual(p.hessian(x), p.gradient(x));
}

PrimalVector newton_minimizer(const ProblemInstance& p, double tol, int max_iter) {
  if (const auto* q = p.quadratic()) return q->minimizer();
  PrimalVector x = PrimalVector::zero(p.dim());
  for (int it = 0; it < max_iter; ++it) {
    const LseEval ev = lse_value_grad_hess(*p.logsumexp(), x);
    const PrimalVector step = spd_solve(ev.h, ev.g);
    const double lam = std::sqrt(std::max(0.0, pair(ev.g, step)));
    if (lam <= tol) break;
    // Damped step, globally convergent for self-concordant-like objectives.
    const double t = lam > 0.25 ? 1.0 / (1.0 + lam) : 1.0;
    x = x - t * step;
  }
  return x;
}

PrimalVector point_at_lambda(const ProblemInstance& p, const PrimalVector& x_star,
                             const PrimalVector& direction, double target) {
  if (!(target > 0.0)) throw DomainError("point_at_lambda: target must be positive");
  const double dn = direction.euclidean_norm();
  if (!(dn > 0.0)) throw DomainError("point_at_lambda: zero direction");
  const PrimalVector d = (1.0 / dn) * direction;
  auto lam = [&](double t) { return local_gradient_norm(p, x_star + t * d); };

  double lo = 0.0;
  double hi = target;
  while (lam(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw DomainError("point_at_lambda: target not reachable along direction");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lam(mid) < target ? lo : hi) = mid;
  }
  return x_star + 0.5 * (lo + hi) * d;
}

}  // namespace broyden_lab

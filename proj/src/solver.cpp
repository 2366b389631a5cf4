#include "broyden_lab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "broyden_lab/potentials.hpp"

namespace broyden_lab {

// ---------------------------------------------------------------------------
// TauSchedule

TauSchedule::TauSchedule(Kind kind, std::vector<double> values)
    : kind_(kind), values_(std::move(values)), sup_(0.0) {
  if (values_.empty()) throw DomainError("TauSchedule: empty sequence");
  for (double t : values_) {
    TauParam{t};  // validates range
    sup_ = std::max(sup_, t);
  }
}

TauSchedule TauSchedule::dfp() { return TauSchedule(Kind::ConstantDFP, {1.0}); }
TauSchedule TauSchedule::bfgs() { return TauSchedule(Kind::ConstantBFGS, {0.0}); }
TauSchedule TauSchedule::constant(double tau) { return TauSchedule(Kind::Constant, {tau}); }
TauSchedule TauSchedule::sequence(std::vector<double> values) {
  return TauSchedule(Kind::Sequence, std::move(values));
}

double TauSchedule::at(int k) const {
  if (k < 0) throw DomainError("TauSchedule::at: negative index");
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(k), values_.size() - 1);
  return values_[idx];
}

std::string TauSchedule::label() const {
  switch (kind_) {
    case Kind::ConstantDFP:
      return "DFP";
    case Kind::ConstantBFGS:
      return "BFGS";
    case Kind::Constant: {
      std::ostringstream os;
      os << "tau=" << values_.front();
      return os.str();
    }
    case Kind::Sequence:
      return "sequence";
  }
  return "sequence";
}

void SolverConfig::validate() const {
  if (max_iter < 1) throw DomainError("SolverConfig: max_iter must be >= 1");
  if (!(grad_tol >= 0.0)) throw DomainError("SolverConfig: grad_tol must be >= 0");
  if (quad_order < 2) throw DomainError("SolverConfig: quad_order must be >= 2");
  if (!(quad_rel_tol > 0.0)) throw DomainError("SolverConfig: quad_rel_tol must be positive");
}

int IterationTrace::iterations() const {
  return static_cast<int>(std::count_if(records.begin(), records.end(),
                                        [](const IterationRecord& r) { return r.has_step; }));
}

std::vector<double> IterationTrace::taus() const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.has_step) out.push_back(r.tau);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Main loop

namespace {

IterationTrace run_loop(const ProblemInstance& p, bool general, const PrimalVector& x0,
                        const TauSchedule& sched, const SolverConfig& cfg) {
  cfg.validate();
  if (x0.dim() != p.dim()) throw DimensionError("solver: x0 has the wrong dimension");

  const double ell = p.ell();
  const double m_sc = general ? p.strong_sc() : 0.0;

  IterationTrace trace;
  trace.general_path = general;
  trace.n = p.dim();
  trace.mu = p.mu();
  trace.ell = ell;
  trace.m_sc = m_sc;
  trace.sup_tau = sched.sup_tau();

  SpdOperator g_op = p.b_ref().scaled(ell);  // G_0 = L B
  Matrix h = g_op.inverse().matrix();
  PrimalVector x = x0;
  double xi = 1.0;

  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.x = x;
    std::optional<SpdOperator> hess_opt;
    try {
      rec.grad = p.gradient(x);
      hess_opt.emplace(p.hessian(x));
    } catch (const DomainError&) {
      throw DivergenceError("solver: non-finite gradient at k = " + std::to_string(k), k);
    } catch (const NotSpdError&) {
      throw DivergenceError("solver: degenerate Hessian at k = " + std::to_string(k), k);
    }
    const SpdOperator& hess = *hess_opt;
    const Vector& gr = rec.grad.coords();
    rec.g = std::sqrt(std::max(0.0, gr.dot(h * gr)));
    rec.lambda = cfg.compute_lambda ? norm_dual(hess, rec.grad)
                                    : std::numeric_limits<double>::quiet_NaN();
    rec.xi = xi;
    rec.eig_range = rel_eigen_range(g_op, hess);
    if (cfg.record_operators) {
      trace.g_snapshots.push_back(g_op.matrix());
      trace.h_snapshots.push_back(h);
    }

    const double measure = cfg.compute_lambda ? rec.lambda : rec.g;
    if (gr.isZero(0.0) || measure <= cfg.grad_tol) {
      trace.status = TraceStatus::Converged;
      trace.records.push_back(std::move(rec));
      break;
    }
    if (k == cfg.max_iter) {
      trace.status = TraceStatus::MaxIterations;
      trace.records.push_back(std::move(rec));
      break;
    }

    const double tau = sched.at(k);
    const Vector step = -(h * gr);
    const Vector x_next = x.coords() + step;
    if (!step.allFinite() || !x_next.allFinite()) {
      throw DivergenceError("solver: non-finite iterate at k = " + std::to_string(k + 1), k + 1);
    }
    rec.has_step = true;
    rec.u = PrimalVector(step);
    rec.tau = tau;
    rec.phi = tau;
    rec.r = norm_primal(hess, rec.u);
    rec.xi_next = m_sc == 0.0 ? 1.0 : xi * std::exp(m_sc * rec.r);

    if (step.norm() <= kZeroDirection) {
      // Broyd(A, G, 0) = G: nothing to update.
      rec.target_range = rec.eig_range;
      x = PrimalVector(x_next);
      xi = rec.xi_next;
      trace.records.push_back(std::move(rec));
      continue;
    }

    SpdOperator target = p.b_ref();
    if (general) {
      IntegralHessian j = integral_hessian(p, x, rec.u, cfg.quad_order);
      rec.quad_error = j.est_error;
      target = std::move(j.j_op);
    } else {
      target = p.quadratic()->a_op;
    }
    rec.target_norm = spectral_norm_sym(target.matrix());
    if (rec.quad_error > cfg.quad_rel_tol * rec.target_norm && !trace.quad_error_flagged) {
      trace.quad_error_flagged = true;
      trace.diagnostics.push_back("quadrature error estimate above tolerance at k = " +
                                  std::to_string(k));
    }

    rec.target_range = rel_eigen_range(g_op, target);
    rec.nu = nu(target, g_op, rec.u);
    rec.v = logdet_barrier(target, g_op);
    rec.psi = augmented_barrier(g_op, target);

    const detail::RawUpdate raw = detail::broyd_raw(target.matrix(), g_op.matrix(), h, step, tau);
    rec.phi = raw.phi;
    SpdOperator g_next = [&] {
      try {
        return SpdOperator(raw.g_plus, Role::PrimalToDual);
      } catch (const NotSpdError&) {
        throw DivergenceError("solver: update lost positive definiteness at k = " +
                                  std::to_string(k),
                              k);
      }
    }();

    rec.v_after = logdet_barrier(target, g_next);
    rec.psi_after = augmented_barrier(g_next, target);
    const double xi_tight = std::max(1.0, 1.0 / rec.target_range.min_rel);
    const double eta_tight = std::max(1.0, rec.target_range.max_rel);
    rec.lb_v = progress_lb_V(eta_tight, TauParam(tau), rec.nu);
    rec.lb_psi = progress_lb_psi(xi_tight, eta_tight, TauParam(tau), rec.nu);

    g_op = std::move(g_next);
    h = raw.h_plus;
    x = PrimalVector(x_next);
    xi = rec.xi_next;
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace

IterationTrace run_quadratic(const QuadraticProblem& p, const PrimalVector& x0,
                             const TauSchedule& sched, const SolverConfig& cfg) {
  return run_loop(ProblemInstance(p), false, x0, sched, cfg);
}

IterationTrace run_general(const ProblemInstance& p, const PrimalVector& x0,
                           const TauSchedule& sched, const SolverConfig& cfg) {
  return run_loop(p, true, x0, sched, cfg);
}

// ---------------------------------------------------------------------------
// Post-hoc checks

std::vector<std::optional<double>> secant_residual(const IterationTrace& trace,
                                                   const ProblemInstance& p) {
  if (trace.g_snapshots.size() != trace.records.size()) {
    throw std::logic_error("secant_residual: trace has no operator snapshots");
  }
  std::vector<std::optional<double>> out;
  if (trace.records.empty()) return out;
  const double grad0 = trace.records.front().grad.euclidean_norm();
  for (std::size_t k = 0; k + 1 < trace.records.size(); ++k) {
    const IterationRecord& rec = trace.records[k];
    if (!rec.has_step || rec.u.euclidean_norm() <= kZeroDirection) {
      out.emplace_back();
      continue;
    }
    const IterationRecord& next = trace.records[k + 1];
    const Vector dgrad = next.grad.coords() - rec.grad.coords();
    // Gradient evaluations carry absolute noise ~ eps * (||Hess|| ||x|| + ||grad||);
    // below 1e-6 of that scale the difference is dominated by rounding.
    const double scale =
        grad0 + spectral_norm_sym(p.hessian(next.x).matrix()) * next.x.euclidean_norm();
    if (dgrad.norm() <= 1e-6 * scale) {
      out.emplace_back();
      continue;
    }
    const Vector gu = trace.g_snapshots[k + 1] * rec.u.coords();
    out.emplace_back((gu - dgrad).norm() / dgrad.norm());
  }
  return out;
}

InvariantAudit audit_invariants(const IterationTrace& trace) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  InvariantAudit a{inf, inf, inf, inf, inf, 0.0, true};
  const double cond = trace.ell / trace.mu;
  auto bracket_margin = [cond](const EigenRange& r, double xi) {
    const double lo = 1.0 / xi;
    const double hi = xi * cond;
    return std::min((r.min_rel - lo) / lo, (hi - r.max_rel) / hi);
  };

  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const IterationRecord& rec = trace.records[k];
    a.hess_sandwich = std::min(a.hess_sandwich, bracket_margin(rec.eig_range, rec.xi));
    if (k > 0) {
      const double expected = trace.records[k - 1].xi_next;
      a.xi_recursion = std::max(a.xi_recursion, std::abs(rec.xi - expected) / expected);
      if (k >= 2 && !(rec.lambda < trace.records[k - 1].lambda)) a.lambda_monotone = false;
    }
    if (!rec.has_step) continue;
    a.step_bound = std::min(a.step_bound, rec.xi * rec.lambda - rec.r);
    if (rec.u.euclidean_norm() <= kZeroDirection) continue;
    a.target_sandwich = std::min(a.target_sandwich, bracket_margin(rec.target_range, rec.xi_next));
    if (!trace.general_path) {
      a.v_progress = std::min(a.v_progress, (rec.v - rec.v_after) - rec.lb_v);
    }
    a.psi_progress = std::min(a.psi_progress, (rec.psi - rec.psi_after) - rec.lb_psi);
  }
  return a;
}

}  // namespace broyden_lab

#include "broyden_lab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "broyden_lab/errors.hpp"

namespace broyden_lab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kThirteenSixths = 13.0 / 6.0;

void check_constants(double mu, double ell) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("bounds: mu must be positive");
  if (!(ell >= mu) || !std::isfinite(ell)) throw DomainError("bounds: need L >= mu");
}

void check_lambda0(double lambda0) {
  if (!(lambda0 >= 0.0)) throw DomainError("bounds: lambda0 must be nonnegative");
}

// ln(e^x - 1) for x >= 0.
double log_expm1(double x) {
  if (x <= 0.0) return -kInf;
  if (x > 30.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

double tau_at(const std::vector<double>& taus, int i) {
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(i), taus.size() - 1);
  const double t = taus[idx];
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("bounds: tau outside [0, 1]");
  return t;
}

// ln(tau c + 1 - tau) for c in (0, 1].
double log_p(double tau, double c) { return std::log1p(-tau * (1.0 - c)); }

// ln of [C / exp(sum_log_p / k) (e^{x} - 1)]^{k/2} sqrt(R) lambda0.
double log_superlinear_shape(double log_c, double sum_log_p, double x, int k, double log_r,
                             double lambda0) {
  if (lambda0 == 0.0) return -kInf;
  const double inner = log_c - sum_log_p / k + log_expm1(x);
  if (inner == -kInf) return -kInf;
  return 0.5 * k * inner + 0.5 * log_r + std::log(lambda0);
}

double safe_exp(double v) { return v == -kInf ? 0.0 : std::exp(v); }

double slack_of(double measured, double bound) {
  if (bound == kInf) return kInf;
  if (bound > 0.0) return (bound - measured) / bound;
  return bound - measured;
}

struct RawPoint {
  int k;
  double measured;
  double bound;
  bool provisional;
};

EnvelopeSeries make_series(std::string name, const std::vector<RawPoint>& raw, bool asserted) {
  EnvelopeSeries s;
  s.name = std::move(name);
  s.asserted = asserted;
  s.min_slack = kInf;
  for (const RawPoint& r : raw) {
    EnvelopePoint p;
    p.k = r.k;
    p.measured = r.measured;
    p.bound = r.bound;
    p.satisfied = envelope_satisfied(r.measured, r.bound);
    p.slack = slack_of(r.measured, r.bound);
    p.provisional = r.provisional;
    if (!p.satisfied && !s.first_violation) s.first_violation = p.k;
    s.min_slack = std::min(s.min_slack, p.slack);
    s.points.push_back(p);
  }
  return s;
}

struct TraceView {
  const IterationTrace& t;
  double mu;
  double ell;
  double lambda0;

  TraceView(const IterationTrace& trace, const EnvelopeOptions& opt)
      : t(trace), mu(trace.mu * opt.mu_scale), ell(trace.ell), lambda0(0.0) {
    if (trace.records.empty()) throw DomainError("bounds: empty trace");
    if (!(opt.mu_scale > 0.0)) throw DomainError("bounds: mu_scale must be positive");
    check_constants(mu, ell);
    for (const auto& r : trace.records) {
      if (std::isnan(r.lambda)) throw DomainError("bounds: trace was recorded without lambda");
    }
    lambda0 = trace.records.front().lambda;
  }

  int size() const { return static_cast<int>(t.records.size()); }
  double lambda(int k) const { return t.records[k].lambda; }
  double tau(int i) const { return t.records[i].tau; }
  // xi_{i+1}; the terminal record has no step and falls back to xi_i.
  double xi_next(int i) const {
    const auto& r = t.records[i];
    return r.has_step ? r.xi_next : r.xi;
  }
  bool quadratic_theory() const { return !t.general_path || t.m_sc == 0.0; }
  bool lam_ini() const {
    return lambda0 <= region_radius(mu, ell, t.n, t.sup_tau, t.m_sc);
  }
};

EnvelopeSeries quad_linear_series(const TraceView& v) {
  std::vector<RawPoint> raw;
  for (int k = 0; k < v.size(); ++k) {
    raw.push_back({k, v.lambda(k), env_quad_linear(v.mu, v.ell, k, v.lambda0), false});
  }
  return make_series("quad_linear", raw, v.quadratic_theory());
}

EnvelopeSeries quad_superlinear_series(const TraceView& v, const std::string& name,
                                       double log_factor, double scale) {
  std::vector<RawPoint> raw;
  const double c = v.mu / v.ell;
  const double log_r = std::log(v.ell / v.mu);
  double sum_log_p = 0.0;
  for (int k = 1; k < v.size(); ++k) {
    sum_log_p += log_p(v.tau(k - 1), c);
    const double lb = log_superlinear_shape(std::log(2.0), sum_log_p, scale * log_factor / k, k,
                                            log_r, v.lambda0);
    raw.push_back({k, v.lambda(k), safe_exp(lb), false});
  }
  return make_series(name, raw, v.quadratic_theory());
}

EnvelopeSeries general_linear_xi_series(const TraceView& v) {
  std::vector<RawPoint> raw;
  double log_prod = 0.0;
  for (int k = 0; k < v.size(); ++k) {
    if (k > 0) {
      const double xi1 = v.xi_next(k - 1);
      const double q = std::max(1.0 - v.mu / (xi1 * v.ell), xi1 - 1.0);
      log_prod += std::log(q);
    }
    const double log_bound = 0.5 * std::log(v.t.records[k].xi) + log_prod;
    const double bound = v.lambda0 == 0.0 ? 0.0 : safe_exp(log_bound + std::log(v.lambda0));
    raw.push_back({k, v.lambda(k), bound, false});
  }
  return make_series("general_linear_xi", raw, true);
}

EnvelopeSeries general_linear_series(const TraceView& v) {
  std::vector<RawPoint> raw;
  const double rate = 1.0 - v.mu / (2.0 * v.ell);
  for (int k = 0; k < v.size(); ++k) {
    raw.push_back({k, v.lambda(k), std::pow(rate, k) * std::sqrt(1.5) * v.lambda0, false});
  }
  return make_series("general_linear", raw, v.quadratic_theory() || v.lam_ini());
}

EnvelopeSeries general_superlinear_xi_series(const TraceView& v) {
  std::vector<RawPoint> raw;
  const double n = v.t.n;
  const double log_r = std::log(v.ell / v.mu);
  double sum_log_p = 0.0;
  for (int k = 1; k < v.size(); ++k) {
    const double xi_i1 = v.xi_next(k - 1);
    sum_log_p += log_p(v.tau(k - 1), v.mu / (xi_i1 * xi_i1 * v.ell));
    const auto& rec = v.t.records[k];
    const bool provisional = !rec.has_step;
    const double xi_k = rec.xi;
    const double xi_k1 = v.xi_next(k);
    const double x = kThirteenSixths * (n / k) * (xi_k1 * std::log(xi_k1) + log_r);
    const double lb = log_superlinear_shape(std::log1p(xi_k), sum_log_p, x, k,
                                            std::log(xi_k) + log_r, v.lambda0);
    raw.push_back({k, v.lambda(k), safe_exp(lb), provisional});
  }
  return make_series("general_superlinear_xi", raw, true);
}

EnvelopeSeries general_superlinear_series(const TraceView& v) {
  std::vector<RawPoint> raw;
  const double n = v.t.n;
  const double c = 4.0 * v.mu / (9.0 * v.ell);
  const double log_2r = std::log(2.0 * v.ell / v.mu);
  double sum_log_p = 0.0;
  for (int k = 1; k < v.size(); ++k) {
    sum_log_p += log_p(v.tau(k - 1), c);
    const double x = kThirteenSixths * (n / k) * log_2r;
    const double lb = log_superlinear_shape(std::log(2.5), sum_log_p, x, k,
                                            std::log(1.5 * v.ell / v.mu), v.lambda0);
    raw.push_back({k, v.lambda(k), safe_exp(lb), false});
  }
  return make_series("general_superlinear", raw, v.quadratic_theory() || v.lam_ini());
}

void fill_header(EnvelopeReport& rep, const TraceView& v) {
  rep.k0 = k0(v.t.n, v.mu, v.ell, v.t.sup_tau);
  rep.region_radius = region_radius(v.mu, v.ell, v.t.n, v.t.sup_tau, v.t.m_sc);
  rep.lam_ini_held = v.lambda0 <= rep.region_radius;
}

}  // namespace

bool envelope_satisfied(double measured, double bound) {
  return measured <= bound * (1.0 + kEnvelopeRelTol) + kEnvelopeAbsTol;
}

double env_quad_linear(double mu, double ell, int k, double lambda0) {
  check_constants(mu, ell);
  check_lambda0(lambda0);
  if (k < 0) throw DomainError("env_quad_linear: k must be nonnegative");
  return std::pow(1.0 - mu / ell, k) * lambda0;
}

double log_env_quad_superlinear(double log_factor, double mu, double ell,
                                const std::vector<double>& taus, int k, double lambda0,
                                double exponent_scale) {
  check_constants(mu, ell);
  check_lambda0(lambda0);
  if (k < 1) throw DomainError("superlinear envelope: k must be >= 1");
  if (taus.empty()) throw DomainError("superlinear envelope: empty tau list");
  if (!(log_factor >= 0.0)) throw DomainError("superlinear envelope: negative log factor");
  const double c = mu / ell;
  double sum_log_p = 0.0;
  for (int i = 0; i < k; ++i) sum_log_p += log_p(tau_at(taus, i), c);
  return log_superlinear_shape(std::log(2.0), sum_log_p, exponent_scale * log_factor / k, k,
                               std::log(ell / mu), lambda0);
}

double env_quad_superlinear(int n, double mu, double ell, const std::vector<double>& taus, int k,
                            double lambda0) {
  if (n < 1) throw DomainError("env_quad_superlinear: n must be positive");
  check_constants(mu, ell);
  return safe_exp(log_env_quad_superlinear(n * std::log(ell / mu), mu, ell, taus, k, lambda0));
}

double env_quad_superlinear_psi(int n, double mu, double ell, const std::vector<double>& taus,
                                int k, double lambda0) {
  if (n < 1) throw DomainError("env_quad_superlinear_psi: n must be positive");
  check_constants(mu, ell);
  return safe_exp(
      log_env_quad_superlinear(n * std::log(ell / mu), mu, ell, taus, k, lambda0, kThirteenSixths));
}

double env_quad_sharpened_factor(const QuadraticProblem& p) {
  // ln Det(A^{-1}, L B) = n ln L + logdet B - logdet A.
  const double v = p.dim() * std::log(p.ell) + p.b_ref.log_det() - p.a_op.log_det();
  return std::max(0.0, v);
}

std::int64_t k0(int n, double mu, double ell, double sup_tau) {
  if (n < 1) throw DomainError("k0: n must be positive");
  check_constants(mu, ell);
  if (!(sup_tau >= 0.0 && sup_tau <= 1.0)) throw DomainError("k0: tau outside [0, 1]");
  const double ratio = ell / mu;
  const double log2r = std::log(2.0 * ratio);
  double v;
  if (sup_tau == 0.0) {
    v = 8.0 * n * log2r;
  } else if (sup_tau == 1.0) {
    v = 18.0 * n * ratio * log2r;
  } else {
    v = 8.0 * n * log2r / (sup_tau * 4.0 / (9.0 * ratio) + 1.0 - sup_tau);
  }
  return static_cast<std::int64_t>(std::ceil(v));
}

double region_radius(double mu, double ell, int n, double sup_tau, double m_sc) {
  if (!(m_sc >= 0.0)) throw DomainError("region_radius: M must be nonnegative");
  const std::int64_t kk = k0(n, mu, ell, sup_tau);
  if (m_sc == 0.0) return kInf;
  const double c = std::log(1.5) / std::pow(1.5, 1.5);
  const double rhs = c * std::max(mu / (2.0 * ell), 1.0 / (static_cast<double>(kk) + 9.0));
  return rhs / m_sc;
}

const EnvelopePoint* EnvelopeSeries::at(int k) const {
  for (const auto& p : points) {
    if (p.k == k) return &p;
  }
  return nullptr;
}

const EnvelopeSeries* EnvelopeReport::find(const std::string& name) const {
  for (const auto& s : series) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::optional<int> EnvelopeReport::first_violation() const {
  std::optional<int> out;
  for (const auto& s : series) {
    if (s.asserted && s.first_violation && (!out || *s.first_violation < *out)) {
      out = s.first_violation;
    }
  }
  return out;
}

double EnvelopeReport::min_slack() const {
  double out = kInf;
  for (const auto& s : series) {
    if (s.asserted) out = std::min(out, s.min_slack);
  }
  return out;
}

bool EnvelopeReport::passed() const {
  return std::all_of(series.begin(), series.end(), [](const auto& s) { return s.passed(); });
}

const std::vector<std::string>& envelope_names() {
  static const std::vector<std::string> names = {
      "quad_linear",       "quad_superlinear",       "quad_superlinear_psi", "quad_sharpened",
      "general_linear_xi", "general_linear",         "general_superlinear_xi",
      "general_superlinear"};
  return names;
}

bool is_envelope_name(const std::string& name) {
  const auto& names = envelope_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

EnvelopeSeries envelope_series(const std::string& name, const IterationTrace& trace,
                               const EnvelopeOptions& opt) {
  const TraceView v(trace, opt);
  const double n_log = trace.n * std::log(v.ell / v.mu);
  if (name == "quad_linear") return quad_linear_series(v);
  if (name == "quad_superlinear") return quad_superlinear_series(v, name, n_log, 1.0);
  if (name == "quad_superlinear_psi") {
    return quad_superlinear_series(v, name, n_log, kThirteenSixths);
  }
  if (name == "quad_sharpened") {
    if (!opt.sharpened_factor) {
      throw DomainError("envelope quad_sharpened needs the sharpened factor");
    }
    return quad_superlinear_series(v, name, *opt.sharpened_factor, 1.0);
  }
  if (name == "general_linear_xi") return general_linear_xi_series(v);
  if (name == "general_linear") return general_linear_series(v);
  if (name == "general_superlinear_xi") return general_superlinear_xi_series(v);
  if (name == "general_superlinear") return general_superlinear_series(v);
  throw DomainError("unknown envelope: " + name);
}

EnvelopeReport envelope_report(const IterationTrace& trace, const std::vector<std::string>& names,
                               const EnvelopeOptions& opt) {
  const TraceView v(trace, opt);
  EnvelopeReport rep;
  fill_header(rep, v);
  for (const auto& name : names) rep.series.push_back(envelope_series(name, trace, opt));
  return rep;
}

EnvelopeReport env_quad_report(const IterationTrace& trace, const EnvelopeOptions& opt) {
  return envelope_report(trace, {"quad_linear", "quad_superlinear", "quad_superlinear_psi"}, opt);
}

EnvelopeReport env_general_linear(const IterationTrace& trace, const EnvelopeOptions& opt) {
  return envelope_report(trace, {"general_linear_xi", "general_linear"}, opt);
}

EnvelopeReport env_general_superlinear(const IterationTrace& trace, const EnvelopeOptions& opt) {
  return envelope_report(trace, {"general_superlinear_xi", "general_superlinear"}, opt);
}

PriorComparison env_prior_comparison(int n, double mu, double ell, int k, double lambda0,
                                     PriorMethod method) {
  if (n < 1) throw DomainError("env_prior_comparison: n must be positive");
  if (k < 1) throw DomainError("env_prior_comparison: k must be >= 1");
  check_constants(mu, ell);
  check_lambda0(lambda0);
  const double r = ell / mu;
  const double log_r = std::log(r);
  const double half_k = 0.5 * k;
  PriorComparison out;
  double simplified_base;
  if (method == PriorMethod::BFGS) {
    out.prev = std::pow(n * r / k, half_k) * lambda0;
    out.start_prev = n * r;
    out.start_new = 4.0 * n * log_r;
    simplified_base = 4.0 * n / k * log_r;
  } else {
    out.prev = std::pow(n * r * r / k, half_k) * lambda0;
    out.start_prev = n * r * r;
    out.start_new = 4.0 * n * r * log_r;
    simplified_base = 4.0 * n * r / k * log_r;
  }
  if (k >= out.start_new) out.simplified = std::pow(simplified_base, half_k) * lambda0;
  return out;
}

DiscAuxCheck disc_aux(int n, double l_over_mu, std::int64_t k) {
  if (n < 1 || k < 1) throw DomainError("disc_aux: n and k must be positive");
  if (!(l_over_mu >= 1.0)) throw DomainError("disc_aux: need L/mu >= 1");
  const double log_r = std::log(l_over_mu);
  const double kd = static_cast<double>(k);
  DiscAuxCheck c;
  c.aux1_lhs = std::expm1(n / kd * log_r);
  c.aux1_rhs = 4.0 * n / (3.0 * kd) * log_r;
  c.aux2_log_lhs = 0.5 * log_r;
  c.aux2_log_rhs = 0.5 * kd * std::log(1.5);
  return c;
}

}  // namespace broyden_lab

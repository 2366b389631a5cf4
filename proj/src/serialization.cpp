#include "serialization.hpp"

#include <charconv>
#include <cmath>
#include <random>

#include "broyden_lab/errors.hpp"

namespace broyden_lab::io {

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

int positive_int(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("instance: missing '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ConfigError(std::string("instance: '") + key + "' must be a positive integer");
  }
  return v.get<int>();
}

Vector vector_of(const json& j, int expected, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  if (static_cast<int>(j.size()) != expected) {
    throw ConfigError(std::string(what) + " has " + std::to_string(j.size()) +
                      " entries, expected " + std::to_string(expected));
  }
  Vector v(expected);
  for (int i = 0; i < expected; ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string(what) + " must hold numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

Vector gaussian_vector(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

std::vector<double> spectrum_of(const json& j, int n) {
  std::vector<double> out;
  if (j.is_array()) {
    const Vector v = vector_of(j, n, "spectrum");
    out.assign(v.data(), v.data() + n);
  } else if (j.is_object() && (j.contains("logspace") || j.contains("condition"))) {
    double lo = 1.0;
    double hi = 1.0;
    if (j.contains("logspace")) {
      const Vector ends = vector_of(j.at("logspace"), 2, "spectrum.logspace");
      lo = ends(0);
      hi = ends(1);
    } else {
      hi = j.at("condition").get<double>();
    }
    if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("spectrum: need 0 < lo <= hi");
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 1.0 : static_cast<double>(i) / (n - 1);
      out.push_back(lo * std::pow(hi / lo, t));
    }
    out.front() = lo;
    out.back() = hi;
  } else {
    throw ConfigError("spectrum must be an array or {\"logspace\": [lo, hi]} or {\"condition\": c}");
  }
  for (double s : out) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("spectrum entries must be positive");
  }
  return out;
}

ProblemInstance quadratic_from_json(const json& j, std::uint64_t seed) {
  const int n = positive_int(j, "n");
  if (!j.contains("spectrum")) throw ConfigError("quadratic instance needs 'spectrum'");
  const std::vector<double> spectrum = spectrum_of(j.at("spectrum"), n);
  const Vector b = j.contains("b") ? vector_of(j.at("b"), n, "b") : gaussian_vector(seed + 1, n);
  QuadraticProblem q = quad_make(spectrum, DualVector(b), seed);
  const auto mu = get_opt(j, "mu");
  const auto ell = get_opt(j, "L");
  if (mu && !(*mu > 0.0)) throw ConfigError("instance: mu must be positive");
  if (ell && !(*ell > 0.0)) throw ConfigError("instance: L must be positive");
  if (mu || ell) {
    q = QuadraticProblem::make(q.a_op, q.b, q.b_ref, mu.value_or(q.mu), ell.value_or(q.ell));
  }
  return ProblemInstance(std::move(q));
}

ProblemInstance lse_from_json(const json& j, std::uint64_t seed) {
  const int n = positive_int(j, "n");
  const int m = positive_int(j, "m");
  if (!j.contains("mu")) throw ConfigError("logsumexp instance needs 'mu'");
  const double mu = j.at("mu").get<double>();
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("instance: mu must be positive");
  const auto gamma = get_opt(j, "gamma");
  if (gamma && !(*gamma > 0.0)) throw ConfigError("instance: gamma must be positive");

  if (j.contains("a_rows")) {
    const json& rows = j.at("a_rows");
    if (!rows.is_array() || static_cast<int>(rows.size()) != m) {
      throw ConfigError("a_rows must be an array of m rows");
    }
    Matrix a(m, n);
    for (int i = 0; i < m; ++i) a.row(i) = vector_of(rows[i], n, "a_rows row").transpose();
    const Vector b = j.contains("b") ? vector_of(j.at("b"), m, "b") : Vector::Zero(m);
    return ProblemInstance(LogSumExpProblem::make(a, b, mu, std::nullopt, gamma));
  }
  LogSumExpProblem l = lse_make_random(n, m, gamma.value_or(1.0), mu, seed);
  if (j.contains("b")) {
    l = LogSumExpProblem::make(l.a_rows, vector_of(j.at("b"), m, "b"), mu, std::nullopt, l.gamma);
  }
  return ProblemInstance(std::move(l));
}

}  // namespace

json resolved_instance_json(const json& j, std::uint64_t default_seed) {
  if (!j.is_object()) throw ConfigError("instance must be an object");
  json out = j;
  if (!out.contains("seed")) out["seed"] = default_seed;
  return out;
}

ProblemInstance instance_from_json(const json& j, std::uint64_t default_seed) {
  if (!j.is_object()) throw ConfigError("instance must be an object");
  try {
    const std::uint64_t seed = get_or<std::uint64_t>(j, "seed", default_seed);
    const std::string kind = get_or<std::string>(j, "kind", "");
    if (kind == "quadratic") return quadratic_from_json(j, seed);
    if (kind == "logsumexp") return lse_from_json(j, seed);
    throw ConfigError("instance.kind must be \"quadratic\" or \"logsumexp\"");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("instance: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("instance: ") + e.what());
  } catch (const NotSpdError& e) {
    throw ConfigError(std::string("instance: ") + e.what());
  }
}

TauSchedule schedule_from_json(const json& j) {
  try {
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s == "BFGS" || s == "bfgs") return TauSchedule::bfgs();
      if (s == "DFP" || s == "dfp") return TauSchedule::dfp();
      throw ConfigError("method must be \"BFGS\", \"DFP\", a tau value or {\"sequence\": [...]}");
    }
    if (j.is_number()) return TauSchedule::constant(j.get<double>());
    if (j.is_object() && j.contains("tau")) return TauSchedule::constant(j.at("tau").get<double>());
    if (j.is_object() && j.contains("sequence")) {
      return TauSchedule::sequence(j.at("sequence").get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("method: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("method: ") + e.what());
  }
  throw ConfigError("method must be \"BFGS\", \"DFP\", a tau value or {\"sequence\": [...]}");
}

SolverConfig solver_from_json(const json& j) {
  SolverConfig cfg;
  if (j.is_null()) return cfg;
  if (!j.is_object()) throw ConfigError("solver must be an object");
  try {
    cfg.max_iter = get_or(j, "max_iter", cfg.max_iter);
    cfg.grad_tol = get_or(j, "grad_tol", cfg.grad_tol);
    cfg.quad_order = get_or(j, "quad_order", cfg.quad_order);
    cfg.record_operators = get_or(j, "record_operators", cfg.record_operators);
    cfg.compute_lambda = get_or(j, "compute_lambda", cfg.compute_lambda);
    cfg.quad_rel_tol = get_or(j, "quad_rel_tol", cfg.quad_rel_tol);
    cfg.validate();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace broyden_lab::io

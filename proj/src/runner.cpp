#include "broyden_lab/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "broyden_lab/bounds.hpp"
#include "broyden_lab/errors.hpp"
#include "broyden_lab/solver.hpp"
#include "broyden_lab/verify.hpp"
#include "serialization.hpp"

namespace broyden_lab {

namespace fs = std::filesystem;
using io::json;

namespace {

struct EnvelopeRequest {
  std::string name;
  double mu_scale = 1.0;

  std::string label() const {
    return mu_scale == 1.0 ? name : name + "_mu_scale_" + io::format_double(mu_scale);
  }
};

struct Experiment {
  std::string name;
  json config;
  ProblemInstance instance;
  std::string instance_hash;
  TauSchedule schedule;
  bool general_path;
  PrimalVector x0;
  SolverConfig solver;
  std::vector<EnvelopeRequest> envelopes;
  fs::path out_dir;
  std::uint64_t seed;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("BROYDEN_LAB_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (errno != 0 || end == s || *end != '\0') {
    throw ConfigError(std::string("BROYDEN_LAB_SEED is not an unsigned integer: ") + s);
  }
  return v;
}

PrimalVector random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss;
  Vector v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  } while (v.norm() == 0.0);
  return PrimalVector(v / v.norm());
}

PrimalVector minimizer_of(const ProblemInstance& p) {
  if (const auto* q = p.quadratic()) return q->minimizer();
  return newton_minimizer(p);
}

PrimalVector x0_from_json(const json& j, const ProblemInstance& p, const TauSchedule& sched,
                          std::uint64_t seed) {
  const int n = p.dim();
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  if (j.is_null()) return PrimalVector(Vector::Zero(n));
  if (j.is_array()) {
    if (static_cast<int>(j.size()) != n) throw ConfigError("x0 has the wrong dimension");
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = j[i].get<double>();
    return PrimalVector(v);
  }
  if (!j.is_object()) throw ConfigError("x0 must be an array or an object");

  if (j.contains("random_ball")) {
    const json& b = j.at("random_ball");
    const double radius = b.is_number() ? b.get<double>() : b.at("radius").get<double>();
    if (!(radius > 0.0) || !std::isfinite(radius)) {
      throw ConfigError("x0.random_ball: radius must be positive");
    }
    Vector center = Vector::Zero(n);
    if (b.is_object() && b.contains("center")) {
      const json& c = b.at("center");
      if (c.is_string() && c.get<std::string>() == "minimizer") {
        center = minimizer_of(p).coords();
      } else if (c.is_array() && static_cast<int>(c.size()) == n) {
        for (int i = 0; i < n; ++i) center(i) = c[i].get<double>();
      } else if (!(c.is_string() && c.get<std::string>() == "origin")) {
        throw ConfigError("x0.random_ball.center must be \"origin\", \"minimizer\" or a point");
      }
    }
    const PrimalVector d = random_unit(rng, n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double t = radius * std::pow(unif(rng), 1.0 / n);
    return PrimalVector(center + t * d.coords());
  }

  double target = 0.0;
  if (j.contains("region_fraction")) {
    const double f = j.at("region_fraction").get<double>();
    if (!(f > 0.0)) throw ConfigError("x0.region_fraction must be positive");
    const double radius = region_radius(p.mu(), p.ell(), n, sched.sup_tau(), p.strong_sc());
    if (!std::isfinite(radius)) {
      throw ConfigError("x0.region_fraction needs an instance with M > 0");
    }
    target = f * radius;
  } else if (j.contains("lambda0")) {
    target = j.at("lambda0").get<double>();
    if (!(target > 0.0)) throw ConfigError("x0.lambda0 must be positive");
  } else {
    throw ConfigError("x0 object needs random_ball, region_fraction or lambda0");
  }
  const PrimalVector x_star = minimizer_of(p);
  return point_at_lambda(p, x_star, random_unit(rng, n), target);
}

std::vector<EnvelopeRequest> envelopes_from_json(const json& j, bool general, bool quadratic) {
  std::vector<EnvelopeRequest> out;
  if (j.is_null()) {
    if (general) {
      for (const char* n : {"general_linear_xi", "general_linear", "general_superlinear_xi",
                            "general_superlinear"}) {
        out.push_back({n, 1.0});
      }
    } else {
      out.push_back({"quad_linear", 1.0});
      out.push_back({"quad_superlinear", 1.0});
    }
    return out;
  }
  if (!j.is_array()) throw ConfigError("envelopes must be an array");
  std::set<std::string> labels;
  for (const auto& e : j) {
    EnvelopeRequest r;
    if (e.is_string()) {
      r.name = e.get<std::string>();
    } else if (e.is_object() && e.contains("name")) {
      r.name = e.at("name").get<std::string>();
      if (e.contains("mu_scale")) r.mu_scale = e.at("mu_scale").get<double>();
    } else {
      throw ConfigError("envelope entries must be names or {\"name\": ..., \"mu_scale\": ...}");
    }
    if (!is_envelope_name(r.name)) throw ConfigError("unknown envelope: " + r.name);
    if (!(r.mu_scale > 0.0) || !std::isfinite(r.mu_scale)) {
      throw ConfigError("envelope mu_scale must be positive");
    }
    if (r.name == "quad_sharpened" && !quadratic) {
      throw ConfigError("quad_sharpened needs a quadratic instance");
    }
    if (!labels.insert(r.label()).second) throw ConfigError("duplicate envelope " + r.label());
    out.push_back(r);
  }
  return out;
}

Experiment experiment_from_json(const json& j, const std::string& default_name,
                                const std::optional<std::uint64_t>& seed_override) {
  if (!j.is_object()) throw ConfigError("experiment must be an object");
  try {
    const std::string name = j.value("name", default_name);
    if (name.empty() || name.find('/') != std::string::npos || name == "." || name == "..") {
      throw ConfigError("invalid experiment name: " + name);
    }
    std::uint64_t seed = j.value("seed", std::uint64_t{0});
    if (seed_override) seed = *seed_override;
    if (!j.contains("instance")) throw ConfigError(name + ": missing 'instance'");
    ProblemInstance inst = io::instance_from_json(j.at("instance"), seed);
    const std::string hash = io::fnv1a_hex(io::resolved_instance_json(j.at("instance"), seed).dump());
    TauSchedule sched = io::schedule_from_json(j.contains("method") ? j.at("method") : json("BFGS"));
    SolverConfig solver = io::solver_from_json(j.contains("solver") ? j.at("solver") : json());

    const std::string path = j.value("path", std::string("auto"));
    bool general;
    if (path == "auto") {
      general = inst.kind() == ProblemKind::LogSumExp;
    } else if (path == "general") {
      general = true;
    } else if (path == "quadratic") {
      if (inst.kind() != ProblemKind::Quadratic) {
        throw ConfigError(name + ": the quadratic path needs a quadratic instance");
      }
      general = false;
    } else {
      throw ConfigError(name + ": path must be \"auto\", \"quadratic\" or \"general\"");
    }
    if (!solver.compute_lambda) {
      throw ConfigError(name + ": envelope checks need solver.compute_lambda");
    }
    auto envelopes = envelopes_from_json(j.contains("envelopes") ? j.at("envelopes") : json(),
                                         general, inst.kind() == ProblemKind::Quadratic);
    PrimalVector x0 = x0_from_json(j.contains("x0") ? j.at("x0") : json(), inst, sched, seed);
    fs::path out_dir = j.contains("output_dir") ? fs::path(j.at("output_dir").get<std::string>())
                                                : fs::path();
    return Experiment{name,  j,     std::move(inst),     hash,   std::move(sched),
                      general, std::move(x0), solver, std::move(envelopes), std::move(out_dir),
                      seed};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const NotSpdError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::vector<Experiment> parse_suite(const std::string& text, const RunOptions& opt) {
  const json root = parse_json(text);
  const auto seed_override = env_seed();
  std::vector<Experiment> exps;
  bool suite = false;
  if (root.is_array()) {
    suite = true;
    if (root.empty()) throw ConfigError("empty experiment suite");
    for (std::size_t i = 0; i < root.size(); ++i) {
      std::ostringstream name;
      name << "exp_" << std::setw(3) << std::setfill('0') << i;
      exps.push_back(experiment_from_json(root[i], name.str(), seed_override));
    }
  } else if (root.is_object()) {
    exps.push_back(experiment_from_json(root, "experiment", seed_override));
  } else {
    throw ConfigError("config must be an experiment object or an array of experiments");
  }

  std::set<std::string> names;
  for (auto& e : exps) {
    if (!names.insert(e.name).second) throw ConfigError("duplicate experiment name " + e.name);
    if (!suite) {
      if (opt.out_dir) e.out_dir = *opt.out_dir;
      if (e.out_dir.empty()) e.out_dir = ".";
    } else if (opt.out_dir) {
      e.out_dir = fs::path(*opt.out_dir) / e.name;
    } else if (e.out_dir.empty()) {
      e.out_dir = fs::path(".") / e.name;
    }
  }
  return exps;
}

std::string cell(double v) { return io::format_double(v); }

void write_trace_csv(const fs::path& path, const IterationTrace& t) {
  std::ofstream out(path, std::ios::binary);
  out << "k,lambda,g,r,xi,nu,v,psi,eig_min,eig_max,tau\n";
  for (const auto& r : t.records) {
    out << r.k << ',' << cell(r.lambda) << ',' << cell(r.g) << ',';
    if (r.has_step) out << cell(r.r);
    out << ',' << cell(r.xi) << ',';
    if (r.has_step) out << cell(r.nu) << ',' << cell(r.v) << ',' << cell(r.psi);
    else out << ",,";
    out << ',' << cell(r.eig_range.min_rel) << ',' << cell(r.eig_range.max_rel) << ',';
    if (r.has_step) out << cell(r.tau);
    out << '\n';
  }
}

void write_point(std::ostream& out, const EnvelopeSeries& s, int k) {
  const EnvelopePoint* p = s.at(k);
  out << ',';
  if (p) out << cell(p->bound);
}

void write_flag(std::ostream& out, const EnvelopeSeries& s, int k) {
  const EnvelopePoint* p = s.at(k);
  out << ',';
  if (p) out << (p->satisfied ? 1 : 0);
}

void write_envelopes_csv(const fs::path& path, const IterationTrace& t,
                         const EnvelopeSeries& linear, const EnvelopeSeries& superlinear,
                         const std::vector<std::pair<std::string, EnvelopeSeries>>& extra) {
  std::ofstream out(path, std::ios::binary);
  out << "k,measured,bound_linear,bound_superlinear,satisfied_linear,satisfied_superlinear";
  for (const auto& [label, s] : extra) out << ",bound_" << label << ",satisfied_" << label;
  out << '\n';
  for (const auto& r : t.records) {
    out << r.k << ',' << cell(r.lambda);
    write_point(out, linear, r.k);
    write_point(out, superlinear, r.k);
    write_flag(out, linear, r.k);
    write_flag(out, superlinear, r.k);
    for (const auto& [label, s] : extra) {
      write_point(out, s, r.k);
      write_flag(out, s, r.k);
    }
    out << '\n';
  }
}

json optional_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

ExperimentResult run_experiment(const Experiment& e) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult res;
  res.name = e.name;
  res.output_dir = e.out_dir.string();
  json summary;
  summary["name"] = e.name;
  summary["instance_hash"] = e.instance_hash;
  summary["config"] = e.config;
  summary["seed"] = e.seed;
  summary["method"] = e.schedule.label();
  summary["path"] = e.general_path ? "general" : "quadratic";

  fs::create_directories(e.out_dir);
  try {
    const IterationTrace trace =
        e.general_path ? run_general(e.instance, e.x0, e.schedule, e.solver)
                       : run_quadratic(*e.instance.quadratic(), e.x0, e.schedule, e.solver);
    res.iterations = trace.iterations();

    EnvelopeOptions base;
    if (const auto* q = e.instance.quadratic()) base.sharpened_factor = env_quad_sharpened_factor(*q);
    const EnvelopeReport header = envelope_report(trace, {}, base);
    const EnvelopeSeries linear =
        envelope_series(e.general_path ? "general_linear" : "quad_linear", trace, base);
    const EnvelopeSeries superlinear =
        envelope_series(e.general_path ? "general_superlinear" : "quad_superlinear", trace, base);

    std::vector<std::pair<std::string, EnvelopeSeries>> checked;
    for (const auto& req : e.envelopes) {
      EnvelopeOptions o = base;
      o.mu_scale = req.mu_scale;
      checked.emplace_back(req.label(), envelope_series(req.name, trace, o));
    }

    write_trace_csv(e.out_dir / "trace.csv", trace);
    write_envelopes_csv(e.out_dir / "envelopes.csv", trace, linear, superlinear, checked);

    double min_slack = std::numeric_limits<double>::infinity();
    json env_json = json::object();
    for (const auto& [label, s] : checked) {
      if (s.asserted) {
        min_slack = std::min(min_slack, s.min_slack);
        if (s.first_violation && (!res.first_violation || *s.first_violation < *res.first_violation)) {
          res.first_violation = s.first_violation;
        }
      }
      env_json[label] = {{"asserted", s.asserted},
                         {"passed", s.passed()},
                         {"first_violation", optional_int(s.first_violation)},
                         {"min_slack", io::json_number(s.min_slack)}};
    }
    res.min_slack = min_slack;
    res.passed = !res.first_violation.has_value();

    const InvariantAudit audit = audit_invariants(trace);
    summary["status"] = trace.status == TraceStatus::Converged ? "converged" : "max_iterations";
    summary["iterations"] = res.iterations;
    summary["lambda0"] = io::json_number(trace.lambda0());
    summary["lambda_final"] = io::json_number(trace.records.back().lambda);
    summary["K0"] = header.k0;
    summary["region_radius"] = io::json_number(header.region_radius);
    summary["lam_ini_held"] = header.lam_ini_held;
    summary["first_violation"] = optional_int(res.first_violation);
    summary["min_slack"] = io::json_number(min_slack);
    summary["envelopes"] = env_json;
    summary["audit"] = {{"hess_sandwich", io::json_number(audit.hess_sandwich)},
                        {"target_sandwich", io::json_number(audit.target_sandwich)},
                        {"step_bound", io::json_number(audit.step_bound)},
                        {"v_progress", io::json_number(audit.v_progress)},
                        {"psi_progress", io::json_number(audit.psi_progress)},
                        {"xi_recursion", io::json_number(audit.xi_recursion)},
                        {"lambda_monotone", audit.lambda_monotone}};
    summary["quad_error_flagged"] = trace.quad_error_flagged;
    summary["diagnostics"] = trace.diagnostics;
    if (!audit.lambda_monotone) {
      summary["diagnostics"].push_back("lambda_k is not strictly decreasing after k = 1");
    }
  } catch (const DivergenceError& ex) {
    res.diverged = true;
    res.passed = false;
    res.message = ex.what();
    summary["status"] = "diverged";
    summary["diverged_at"] = ex.iteration();
    summary["error"] = ex.what();
  } catch (const std::exception& ex) {
    res.passed = false;
    res.message = ex.what();
    summary["status"] = "error";
    summary["error"] = ex.what();
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  summary["passed"] = res.passed;
  summary["wall_time_s"] = res.wall_seconds;
  std::ofstream(e.out_dir / "summary.json", std::ios::binary) << summary.dump(2) << '\n';
  return res;
}

}  // namespace

bool SuiteResult::passed() const {
  return std::all_of(experiments.begin(), experiments.end(),
                     [](const auto& e) { return e.passed; });
}

SuiteResult run_suite(const std::string& config_text, const RunOptions& opt) {
  if (opt.jobs < 1) throw ConfigError("--jobs must be >= 1");
  const std::vector<Experiment> exps = parse_suite(config_text, opt);

  SuiteResult suite;
  suite.experiments.resize(exps.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < exps.size(); i = next++) {
      suite.experiments[i] = run_experiment(exps[i]);
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(opt.jobs), exps.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return suite;
}

int cmd_run(const std::string& config_path, const RunOptions& opt, std::ostream& out,
            std::ostream& err) {
  SuiteResult suite;
  try {
    suite = run_suite(read_file(config_path), opt);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  for (const auto& r : suite.experiments) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " iterations=" << r.iterations
        << " first_violation=" << (r.first_violation ? std::to_string(*r.first_violation) : "none")
        << " min_slack=" << io::format_double(r.min_slack) << " dir=" << r.output_dir;
    if (!r.message.empty()) out << " error=\"" << r.message << '"';
    out << '\n';
  }
  return suite.passed() ? kExitPass : kExitViolation;
}

int cmd_verify(int n_max, int trials, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  if (n_max < 1 || trials < 1) {
    err << "error: verify needs n_max >= 1 and trials >= 1\n";
    return kExitConfig;
  }
  const VerifyReport rep = run_verify_suite(n_max, trials, seed);
  out << std::left << std::setw(22) << "check" << std::right << std::setw(8) << "trials"
      << std::setw(12) << "violations" << std::setw(16) << "worst_slack" << std::setw(10)
      << "seconds" << "  result\n";
  for (const auto& r : rep.results) {
    out << std::left << std::setw(22) << r.name << std::right << std::setw(8) << r.trials
        << std::setw(12) << r.violations << std::setw(16) << std::setprecision(6)
        << r.worst_slack << std::setw(10) << std::setprecision(3) << r.seconds << "  "
        << (r.passed() ? "PASS" : "FAIL") << '\n';
  }
  return rep.passed() ? kExitPass : kExitViolation;
}

namespace {

struct SweepCell {
  int n;
  double ratio;
  json method;
};

// First k >= 1 with the superlinear quadratic envelope strictly below the linear one.
std::optional<std::int64_t> first_crossing(int n, double ratio, double tau) {
  if (ratio <= 1.0) return std::nullopt;
  constexpr std::int64_t kLimit = 10'000'000;
  const double log_r = std::log(ratio);
  const double lp = std::log1p(-tau * (1.0 - 1.0 / ratio));
  const double log_rate = std::log1p(-1.0 / ratio);
  for (std::int64_t k = 1; k <= kLimit; ++k) {
    const double kd = static_cast<double>(k);
    const double sup =
        0.5 * kd * (std::log(2.0) - lp + std::log(std::expm1(n * log_r / kd))) + 0.5 * log_r;
    if (sup < kd * log_rate) return k;
  }
  return std::nullopt;
}

}  // namespace

int cmd_sweep(const std::string& grid_path, std::ostream& out, std::ostream& err) {
  std::vector<SweepCell> cells;
  std::uint64_t seed = 0;
  int max_iter = 100000;
  std::optional<std::string> output;
  try {
    const json g = parse_json(read_file(grid_path));
    if (!g.is_object()) throw ConfigError("grid must be an object");
    const auto ns = g.at("n").get<std::vector<int>>();
    const auto ratios = g.at("L_over_mu").get<std::vector<double>>();
    const json methods = g.value("methods", json::array({"BFGS", "DFP"}));
    if (ns.empty() || ratios.empty() || !methods.is_array() || methods.empty()) {
      throw ConfigError("grid: n, L_over_mu and methods must be nonempty lists");
    }
    seed = g.value("seed", std::uint64_t{0});
    if (const auto s = env_seed()) seed = *s;
    max_iter = g.value("max_iter", max_iter);
    if (max_iter < 1) throw ConfigError("grid: max_iter must be >= 1");
    if (g.contains("output")) output = g.at("output").get<std::string>();
    for (int n : ns) {
      if (n < 1) throw ConfigError("grid: n must be positive");
      for (double r : ratios) {
        if (!(r >= 1.0) || !std::isfinite(r)) throw ConfigError("grid: L_over_mu must be >= 1");
        for (const auto& m : methods) {
          io::schedule_from_json(m);  // validates
          cells.push_back({n, r, m});
        }
      }
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    err << "error: grid: " << e.what() << '\n';
    return kExitConfig;
  }

  std::ostringstream csv;
  csv << "n,L_over_mu,method,iters_to_1e-10,K0_new,K0_prev,"
         "first_k_superlinear_env_below_linear_env,envelopes_pass,K0_new_lt_K0_prev\n";
  bool ok = true;
  for (const SweepCell& c : cells) {
    const TauSchedule sched = io::schedule_from_json(c.method);
    std::vector<double> spectrum;
    for (int i = 0; i < c.n; ++i) {
      const double t = c.n == 1 ? 1.0 : static_cast<double>(i) / (c.n - 1);
      spectrum.push_back(std::pow(c.ratio, t));
    }
    spectrum.front() = 1.0;
    spectrum.back() = c.ratio;
    std::mt19937_64 rng(seed + 17 * static_cast<std::uint64_t>(c.n));
    std::normal_distribution<double> gauss;
    Vector b(c.n);
    for (int i = 0; i < c.n; ++i) b(i) = gauss(rng);
    QuadraticProblem q = quad_make(spectrum, DualVector(b), seed + static_cast<std::uint64_t>(c.n));
    q = QuadraticProblem::make(q.a_op, q.b, q.b_ref, 1.0, c.ratio);

    const PrimalVector x0(Vector::Zero(c.n));
    const double lambda0 = local_gradient_norm(ProblemInstance(q), x0);
    SolverConfig cfg;
    cfg.max_iter = max_iter;
    cfg.grad_tol = 1e-10 * lambda0;

    std::string iters;
    bool env_pass = false;
    try {
      const IterationTrace t = run_quadratic(q, x0, sched, cfg);
      if (t.status == TraceStatus::Converged) iters = std::to_string(t.iterations());
      env_pass = env_quad_report(t).passed();
    } catch (const DivergenceError&) {
      env_pass = false;
    }

    std::string k0_new;
    std::string k0_prev;
    std::string k0_cmp;
    const bool is_bfgs = sched.kind() == TauSchedule::Kind::ConstantBFGS;
    const bool is_dfp = sched.kind() == TauSchedule::Kind::ConstantDFP;
    if (is_bfgs || is_dfp) {
      const PriorComparison cmp = env_prior_comparison(
          c.n, 1.0, c.ratio, 1, 1.0, is_bfgs ? PriorMethod::BFGS : PriorMethod::DFP);
      k0_new = io::format_double(cmp.start_new);
      k0_prev = io::format_double(cmp.start_prev);
      const bool lt = cmp.start_new < cmp.start_prev;
      k0_cmp = lt ? "1" : "0";
      if (c.ratio >= 10.0 && !lt) ok = false;
    }
    std::string crossing;
    if (sched.kind() != TauSchedule::Kind::Sequence) {
      if (const auto k = first_crossing(c.n, c.ratio, sched.at(0))) crossing = std::to_string(*k);
    }
    if (!env_pass) ok = false;
    csv << c.n << ',' << io::format_double(c.ratio) << ',' << sched.label() << ',' << iters << ','
        << k0_new << ',' << k0_prev << ',' << crossing << ',' << (env_pass ? 1 : 0) << ','
        << k0_cmp << '\n';
  }
  out << csv.str();
  if (output) std::ofstream(*output, std::ios::binary) << csv.str();
  return ok ? kExitPass : kExitViolation;
}

ProblemInstance instance_from_json_text(const std::string& text, std::uint64_t default_seed) {
  return io::instance_from_json(parse_json(text), default_seed);
}

std::string format_number(double v) { return io::format_double(v); }

}  // namespace broyden_lab

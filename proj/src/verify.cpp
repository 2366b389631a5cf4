#include "broyden_lab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "broyden_lab/broyden_update.hpp"
#include "broyden_lab/errors.hpp"
#include "broyden_lab/potentials.hpp"

namespace broyden_lab {

namespace {

constexpr double kTaus[] = {0.0, 0.25, 0.5, 0.75, 1.0};
constexpr double kInverseTol = 1e-10;
constexpr double kDetTol = 1e-9;
constexpr double kBracketTol = 1e-9;
constexpr double kProgressTol = 1e-8;

Matrix random_orthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss;
  Matrix z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  return qr.householderQ();
}

double nonsym_norm2(const Matrix& m) {
  // ||M||_2 = sqrt(lambda_max(M^T M)).
  return std::sqrt(std::max(0.0, spectral_norm_sym(m.transpose() * m)));
}

class Tally {
 public:
  explicit Tally(std::string name) : start_(std::chrono::steady_clock::now()) {
    r_.name = std::move(name);
    r_.worst_slack = std::numeric_limits<double>::infinity();
  }
  void add(double slack, bool ok) {
    ++r_.trials;
    if (!ok) ++r_.violations;
    r_.worst_slack = std::min(r_.worst_slack, slack);
  }
  CheckResult finish() {
    r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return r_;
  }

 private:
  CheckResult r_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

SpdOperator random_spd(std::mt19937_64& rng, int n, double log_spread, Role role) {
  if (n < 1) throw DimensionError("random_spd: n must be positive");
  std::uniform_real_distribution<double> unif(-log_spread, log_spread);
  const Matrix q = random_orthogonal(rng, n);
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = std::exp(unif(rng));
  Matrix m = q * d.asDiagonal() * q.transpose();
  m = 0.5 * (m + m.transpose()).eval();
  return SpdOperator(m, role);
}

UpdateCase random_update_case(std::mt19937_64& rng, int n, double tau, bool a_below_g) {
  std::normal_distribution<double> gauss;
  const SpdOperator a = random_spd(rng, n, 2.0);
  Matrix g;
  if (a_below_g) {
    std::uniform_int_distribution<int> rank_dist(0, n);
    const int rank = rank_dist(rng);
    Matrix w = Matrix::Zero(n, n);
    for (int r = 0; r < rank; ++r) {
      Vector v(n);
      for (int i = 0; i < n; ++i) v(i) = gauss(rng);
      w += v * v.transpose();
    }
    // Scale W relative to A so that eta ranges over a few orders of magnitude.
    std::uniform_real_distribution<double> scale(-3.0, 3.0);
    const double s = std::exp(scale(rng)) * spectral_norm_sym(a.matrix()) /
                     std::max(1.0, spectral_norm_sym(w));
    g = a.matrix() + s * w;
  } else {
    g = random_spd(rng, n, 2.0).matrix();
  }
  g = 0.5 * (g + g.transpose()).eval();
  Vector u(n);
  for (int i = 0; i < n; ++i) u(i) = gauss(rng);
  return {a, SpdOperator(g), PrimalVector(u), tau};
}

bool VerifyReport::passed() const {
  return !results.empty() &&
         std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed(); });
}

VerifyReport run_verify_suite(int n_max, int trials, std::uint64_t seed) {
  if (n_max < 1) throw DomainError("verify: n_max must be >= 1");
  if (trials < 1) throw DomainError("verify: trials must be >= 1");

  VerifyReport rep;
  auto dim_of = [n_max](int t) { return 1 + t % n_max; };
  auto tau_of = [](int t) { return kTaus[t % 5]; };

  {
    std::mt19937_64 rng(seed);
    Tally inv("inverse_identity");
    Tally det("det_identity");
    Tally eigs("eigen_bracket");
    for (int t = 0; t < trials; ++t) {
      const UpdateCase c = random_update_case(rng, dim_of(t), tau_of(t), false);
      const int n = c.a.dim();
      const UpdateResult up = broyd(c.a, c.g, c.u, TauParam(c.tau));
      const Matrix h_plus = broyd_inverse(c.a, c.g, c.u, TauParam(c.tau)).matrix();
      const double err = nonsym_norm2(up.g_plus.matrix() * h_plus - Matrix::Identity(n, n));
      inv.add(kInverseTol - err, err <= kInverseTol);

      const double det_direct = std::exp(c.g.log_det() - up.g_plus.log_det());
      const double rel = std::abs(up.det_ratio - det_direct) / det_direct;
      det.add(kDetTol - rel, rel <= kDetTol);

      const EigenRange before = rel_eigen_range(c.g, c.a);
      const EigenRange after = rel_eigen_range(up.g_plus, c.a);
      const double lo = std::min(1.0, before.min_rel);
      const double hi = std::max(1.0, before.max_rel);
      const double slack = std::min(after.min_rel / lo - 1.0, 1.0 - after.max_rel / hi);
      eigs.add(slack, slack >= -kBracketTol);
    }
    rep.results.push_back(inv.finish());
    rep.results.push_back(det.finish());
    rep.results.push_back(eigs.finish());
  }

  {
    std::mt19937_64 rng(seed + 1);
    Tally prog_v("progress_logdet");
    for (int t = 0; t < trials; ++t) {
      const UpdateCase c = random_update_case(rng, dim_of(t), tau_of(t), true);
      const UpdateProgress p = update_progress(c.a, c.g, c.u, TauParam(c.tau));
      const double slack = p.v_decrease.slack();
      prog_v.add(slack, slack >= -kProgressTol);
    }
    rep.results.push_back(prog_v.finish());
  }

  {
    std::mt19937_64 rng(seed + 2);
    Tally prog_psi("progress_augmented");
    Tally metric("metric_change");
    for (int t = 0; t < trials; ++t) {
      const UpdateCase c = random_update_case(rng, dim_of(t), tau_of(t), false);
      const UpdateProgress p = update_progress(c.a, c.g, c.u, TauParam(c.tau));
      const double slack = p.psi_decrease.slack();
      prog_psi.add(slack, slack >= -kProgressTol);

      const MetricChange m = metric_change_lb(c.a, c.g, c.u, TauParam(c.tau));
      const double ms = m.nu_sq - m.rhs;
      metric.add(ms, ms >= -kProgressTol * std::max(1.0, m.rhs));
    }
    rep.results.push_back(prog_psi.finish());
    rep.results.push_back(metric.finish());
  }

  {
    // (alpha, beta) grid with alpha >= beta > 0: beta log-spaced, alpha = beta + gap.
    Tally sharp("scalar_gap_sharp");
    Tally loose("scalar_gap");
    const int side = std::max(1, static_cast<int>(std::ceil(std::sqrt(trials))));
    for (int i = 0; i < side; ++i) {
      const double beta = std::pow(10.0, -4.0 + 8.0 * (side == 1 ? 0.5 : i / (side - 1.0)));
      for (int j = 0; j < side; ++j) {
        const double gap = j == 0 ? 0.0 : std::pow(10.0, -6.0 + 10.0 * (j - 1.0) / std::max(1, side - 1));
        const ScalarGap s = scalar_gap(beta + gap, beta);
        const double tol = kProgressTol * std::max(1.0, std::abs(s.lhs));
        sharp.add(s.lhs - s.rhs_sharp, s.lhs - s.rhs_sharp >= -tol);
        loose.add(s.lhs - s.rhs, s.lhs - s.rhs >= -tol);
      }
    }
    rep.results.push_back(sharp.finish());
    rep.results.push_back(loose.finish());
  }
  return rep;
}

}  // namespace broyden_lab

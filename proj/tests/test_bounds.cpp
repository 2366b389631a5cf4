#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "broyden_lab/bounds.hpp"
#include "broyden_lab/errors.hpp"
#include "test_support.hpp"

using namespace broyden_lab;
using testing_support::random_vector;

namespace {

// Direct evaluation of the quadratic superlinear envelope, no log space.
double direct_superlinear(int n, double mu, double ell, double tau, int k, double lambda0,
                          double c) {
  const double p = tau * mu / ell + 1.0 - tau;
  const double inner = 2.0 / p * (std::exp(c * n / k * std::log(ell / mu)) - 1.0);
  return std::pow(inner, k / 2.0) * std::sqrt(ell / mu) * lambda0;
}

}  // namespace

TEST(QuadLinear, Examples) {
  EXPECT_DOUBLE_EQ(env_quad_linear(1.0, 10.0, 0, 2.5), 2.5);
  EXPECT_DOUBLE_EQ(env_quad_linear(3.0, 3.0, 4, 1.0), 0.0);
  EXPECT_NEAR(env_quad_linear(0.01, 1.0, 100, 1.0), 0.3660323412732292, 1e-15);
  EXPECT_THROW(env_quad_linear(2.0, 1.0, 1, 1.0), DomainError);
}

TEST(QuadSuperlinear, BfgsAndDfpShapes) {
  for (int k : {1, 3, 10, 40}) {
    const double bfgs = env_quad_superlinear(5, 1.0, 20.0, {0.0}, k, 0.7);
    EXPECT_NEAR(bfgs, direct_superlinear(5, 1.0, 20.0, 0.0, k, 0.7, 1.0), 1e-10 * bfgs);
    // DFP: the prefactor becomes 2L/mu.
    const double dfp = env_quad_superlinear(5, 1.0, 20.0, {1.0}, k, 0.7);
    const double dfp_direct =
        std::pow(2.0 * 20.0 * std::expm1(5.0 / k * std::log(20.0)), k / 2.0) * std::sqrt(20.0) * 0.7;
    EXPECT_NEAR(dfp, dfp_direct, 1e-10 * dfp_direct);
    const double psi = env_quad_superlinear_psi(5, 1.0, 20.0, {0.5}, k, 0.7);
    EXPECT_NEAR(psi, direct_superlinear(5, 1.0, 20.0, 0.5, k, 0.7, 13.0 / 6.0), 1e-10 * psi);
  }
}

TEST(QuadSuperlinear, PerfectConditioningGivesZero) {
  EXPECT_EQ(env_quad_superlinear(4, 2.0, 2.0, {0.3}, 5, 1.0), 0.0);
  EXPECT_EQ(env_quad_superlinear_psi(4, 2.0, 2.0, {0.3}, 5, 1.0), 0.0);
  EXPECT_THROW(env_quad_superlinear(4, 1.0, 2.0, {0.3}, 0, 1.0), DomainError);
}

TEST(QuadSuperlinear, PsiDominatesAndSequenceUsesEachTau) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + t % 30;
    const double ratio = std::pow(10.0, 4.0 * u01(rng));
    const int k = 1 + t % 50;
    std::vector<double> taus(k);
    for (double& x : taus) x = u01(rng);
    const double v = log_env_quad_superlinear(n * std::log(ratio), 1.0, ratio, taus, k, 1.0);
    const double psi =
        log_env_quad_superlinear(n * std::log(ratio), 1.0, ratio, taus, k, 1.0, 13.0 / 6.0);
    EXPECT_GE(psi, v);
  }
  // Explicit product over two different taus.
  const double two = env_quad_superlinear(1, 1.0, 4.0, {0.0, 1.0}, 2, 1.0);
  const double expected = 2.0 / std::sqrt(0.25) * std::expm1(0.5 * std::log(4.0)) * 2.0;
  EXPECT_NEAR(two, expected, 1e-12);
}

TEST(QuadSuperlinear, FiniteInLogSpaceForExtremeInputs) {
  for (double ratio : {2.0, 1e6, 1e12}) {
    for (int k : {1, 10, 1000, 1000000}) {
      const double v = log_env_quad_superlinear(50 * std::log(ratio), 1.0, ratio, {1.0}, k, 1.0,
                                                13.0 / 6.0);
      EXPECT_TRUE(std::isfinite(v)) << ratio << " " << k;
      EXPECT_FALSE(std::isnan(env_quad_superlinear_psi(50, 1.0, ratio, {1.0}, k, 1.0)));
    }
  }
}

TEST(SharpenedFactor, Examples) {
  const QuadraticProblem at_l = quad_make({5.0, 5.0, 5.0}, DualVector{1.0, 1.0, 1.0}, 1);
  EXPECT_NEAR(env_quad_sharpened_factor(at_l), 0.0, 1e-12);
  const QuadraticProblem at_mu =
      QuadraticProblem::make(SpdOperator::identity(3), DualVector{1.0, 1.0, 1.0},
                             SpdOperator::identity(3), 1.0, 8.0);
  EXPECT_NEAR(env_quad_sharpened_factor(at_mu), 3.0 * std::log(8.0), 1e-12);
  const std::vector<double> spec = {1.0, 10.0, 100.0};
  const QuadraticProblem logq = quad_make(spec, DualVector{1.0, 1.0, 1.0}, 2);
  double oracle = 0.0;
  for (double s : spec) oracle += std::log(100.0 / s);
  EXPECT_NEAR(env_quad_sharpened_factor(logq), oracle, 1e-12);
  EXPECT_LE(env_quad_sharpened_factor(logq), 3.0 * std::log(100.0));
}

TEST(K0, Examples) {
  EXPECT_EQ(k0(10, 1.0, 100.0, 0.0), 424);
  EXPECT_EQ(k0(1, 1.0, 1.0, 1.0), 13);
  // The general formula at tau = 0 agrees with the BFGS closed form.
  EXPECT_EQ(k0(7, 1.0, 30.0, 0.0),
            static_cast<std::int64_t>(std::ceil(8.0 * 7 * std::log(60.0) / 1.0)));
  EXPECT_GT(k0(7, 1.0, 30.0, 0.5), k0(7, 1.0, 30.0, 0.0));
  EXPECT_LT(k0(7, 1.0, 30.0, 0.5), k0(7, 1.0, 30.0, 1.0));
}

TEST(RegionRadius, Examples) {
  EXPECT_EQ(region_radius(1.0, 10.0, 5, 0.0, 0.0), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(region_radius(1.0, 10.0, 5, 0.0, 1.0), 0.011035362481860234, 1e-17);
  // Large L/mu relative to n: the 1/(K0 + 9) branch wins.
  const double c = std::log(1.5) / std::pow(1.5, 1.5);
  const std::int64_t kk = k0(1, 1.0, 1e4, 0.0);
  EXPECT_NEAR(region_radius(1.0, 1e4, 1, 0.0, 2.0), c / (kk + 9.0) / 2.0, 1e-17);
  EXPECT_THROW(region_radius(1.0, 10.0, 5, 0.0, -1.0), DomainError);
}

TEST(PriorComparison, Examples) {
  const PriorComparison b = env_prior_comparison(10, 1.0, 100.0, 1, 1.0, PriorMethod::BFGS);
  EXPECT_NEAR(b.start_prev, 1000.0, 1e-12);
  EXPECT_NEAR(b.start_new, 184.2068074395237, 1e-10);
  EXPECT_FALSE(b.simplified.has_value());
  const PriorComparison d = env_prior_comparison(10, 1.0, 100.0, 1, 1.0, PriorMethod::DFP);
  EXPECT_NEAR(d.start_prev, 1e5, 1e-8);
  EXPECT_NEAR(d.start_new, 18420.680743952365, 1e-8);

  const PriorComparison late = env_prior_comparison(10, 1.0, 100.0, 200, 1.0, PriorMethod::BFGS);
  ASSERT_TRUE(late.simplified.has_value());
  const double simplified = std::pow(40.0 / 200.0 * std::log(100.0), 100.0);
  EXPECT_NEAR(*late.simplified, simplified, 1e-12 * simplified);
  EXPECT_NEAR(late.prev, std::pow(1000.0 / 200.0, 100.0), 1e-12 * std::pow(5.0, 100.0));
}

TEST(PriorComparison, AuxiliaryInequalitiesOnGrid) {
  for (int n = 1; n <= 50; ++n) {
    for (double ratio : {2.0, 10.0, 100.0, 1e4}) {
      const std::int64_t start = k0(n, 1.0, ratio, 0.0);
      for (std::int64_t k = start; k < start + 2000; k += 7) {
        const DiscAuxCheck c = disc_aux(n, ratio, k);
        EXPECT_TRUE(c.aux1_holds()) << n << " " << ratio << " " << k;
        EXPECT_TRUE(c.aux2_holds()) << n << " " << ratio << " " << k;
      }
    }
  }
}

TEST(EnvelopeSatisfied, Tolerance) {
  EXPECT_TRUE(envelope_satisfied(1.0, 1.0));
  EXPECT_TRUE(envelope_satisfied(1.0 + 5e-9, 1.0));
  EXPECT_FALSE(envelope_satisfied(1.0 + 2e-8, 1.0));
  EXPECT_TRUE(envelope_satisfied(5e-15, 0.0));
  EXPECT_FALSE(envelope_satisfied(1e-13, 0.0));
}

TEST(TraceEnvelopes, GeneralFormsReduceOnQuadraticTraces) {
  std::mt19937_64 rng(32);
  const QuadraticProblem q =
      quad_make({1.0, 3.0, 9.0, 27.0, 81.0}, DualVector(random_vector(rng, 5)), 3);
  const IterationTrace t = run_quadratic(q, PrimalVector::zero(5), TauSchedule::constant(0.5), {});
  const EnvelopeSeries lin = envelope_series("quad_linear", t);
  const EnvelopeSeries lin_xi = envelope_series("general_linear_xi", t);
  const EnvelopeSeries sup_psi = envelope_series("quad_superlinear_psi", t);
  const EnvelopeSeries sup_xi = envelope_series("general_superlinear_xi", t);
  ASSERT_EQ(lin.points.size(), lin_xi.points.size());
  for (std::size_t i = 0; i < lin.points.size(); ++i) {
    EXPECT_NEAR(lin_xi.points[i].bound, lin.points[i].bound, 1e-12 * lin.points[i].bound);
  }
  ASSERT_EQ(sup_psi.points.size(), sup_xi.points.size());
  for (std::size_t i = 0; i < sup_psi.points.size(); ++i) {
    EXPECT_NEAR(sup_xi.points[i].bound, sup_psi.points[i].bound, 1e-10 * sup_psi.points[i].bound);
  }
  EXPECT_EQ(lin_xi.points.front().bound, t.lambda0());

  const EnvelopeReport rep = env_quad_report(t);
  EXPECT_TRUE(rep.passed());
  EXPECT_FALSE(rep.first_violation().has_value());
  EXPECT_EQ(rep.region_radius, std::numeric_limits<double>::infinity());
  EXPECT_TRUE(rep.lam_ini_held);
}

TEST(TraceEnvelopes, ForcedViolation) {
  std::mt19937_64 rng(33);
  const QuadraticProblem q =
      quad_make({1.0, 2.0, 4.0, 8.0, 16.0, 32.0}, DualVector(random_vector(rng, 6)), 4);
  const IterationTrace t = run_quadratic(q, PrimalVector::zero(6), TauSchedule::dfp(), {});
  EnvelopeOptions opt;
  opt.mu_scale = 31.0;  // mu' = 0.97 L: the claimed rate is far too fast
  const EnvelopeSeries s = envelope_series("quad_linear", t, opt);
  ASSERT_TRUE(s.first_violation.has_value());
  EXPECT_EQ(*s.first_violation, 1);
  EXPECT_LT(s.min_slack, 0.0);
  EXPECT_THROW(envelope_series("no_such_envelope", t), DomainError);
  EXPECT_THROW(envelope_series("quad_sharpened", t), DomainError);
}

TEST(TraceEnvelopes, GeneralRunInsideRegion) {
  const ProblemInstance p = lse_make_random(4, 10, 1.0, 0.2, 34);
  const double radius = region_radius(p.mu(), p.ell(), 4, 0.0, p.strong_sc());
  const PrimalVector xs = newton_minimizer(p);
  const PrimalVector x0 = point_at_lambda(p, xs, PrimalVector{1.0, -1.0, 0.5, 0.0}, 0.5 * radius);
  const IterationTrace t = run_general(p, x0, TauSchedule::bfgs(), {});
  const EnvelopeReport lin = env_general_linear(t);
  const EnvelopeReport sup = env_general_superlinear(t);
  EXPECT_TRUE(lin.lam_ini_held);
  for (const auto* rep : {&lin, &sup}) {
    for (const auto& s : rep->series) {
      EXPECT_TRUE(s.asserted) << s.name;
      EXPECT_FALSE(s.first_violation.has_value()) << s.name;
    }
  }
  const EnvelopeSeries& xi_sup = *sup.find("general_superlinear_xi");
  EXPECT_TRUE(xi_sup.points.back().provisional);
}

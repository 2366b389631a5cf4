#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "broyden_lab/broyden_update.hpp"
#include "broyden_lab/errors.hpp"
#include "test_support.hpp"

using namespace broyden_lab;
using testing_support::random_spd_matrix;
using testing_support::random_vector;
using testing_support::textbook_broyden;

namespace {
constexpr double kTaus[] = {0.0, 0.25, 0.5, 0.75, 1.0};
}

TEST(TauParam, RangeChecked) {
  EXPECT_THROW(TauParam(-0.1), DomainError);
  EXPECT_THROW(TauParam(1.1), DomainError);
  EXPECT_DOUBLE_EQ(TauParam::dfp().value(), 1.0);
  EXPECT_DOUBLE_EQ(TauParam::bfgs().value(), 0.0);
}

TEST(Broyd, TwoByTwoBfgsOracle) {
  // Hand computation: Au = (1, 2), Gu = (3, 3), <Au,u> = 3, <Gu,u> = 6.
  const SpdOperator a = SpdOperator::diagonal({1.0, 2.0});
  const SpdOperator g = SpdOperator::diagonal({3.0, 3.0});
  const UpdateResult r = broyd(a, g, PrimalVector{1.0, 1.0}, TauParam::bfgs());
  Matrix expected(2, 2);
  expected << 11.0 / 6.0, -5.0 / 6.0, -5.0 / 6.0, 17.0 / 6.0;
  EXPECT_LE((r.g_plus.matrix() - expected).norm(), 1e-14);
  EXPECT_DOUBLE_EQ(r.phi, 0.0);
}

TEST(Broyd, MatchesTextbookInverseUpdates) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + t % 7;
    const Matrix a = random_spd_matrix(rng, n);
    const Matrix g = random_spd_matrix(rng, n);
    const Vector u = random_vector(rng, n);
    const double tau = kTaus[t % 5];
    const Matrix oracle = textbook_broyden(a, g, u, tau);
    const UpdateResult r = broyd(SpdOperator(a), SpdOperator(g), PrimalVector(u), TauParam(tau));
    EXPECT_LE((r.g_plus.matrix() - oracle).norm(), 1e-8 * oracle.norm()) << "trial " << t;
  }
}

TEST(Broyd, SecantEquationAndInverse) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 8;
    const SpdOperator a(random_spd_matrix(rng, n));
    const SpdOperator g(random_spd_matrix(rng, n));
    const PrimalVector u(random_vector(rng, n));
    const TauParam tau(kTaus[t % 5]);
    const UpdateResult r = broyd(a, g, u, tau);
    const Vector au = a.matrix() * u.coords();
    EXPECT_LE((r.g_plus.matrix() * u.coords() - au).norm(), 1e-10 * au.norm());
    const Matrix h = broyd_inverse(a, g, u, tau).matrix();
    EXPECT_LE((h * au - u.coords()).norm(), 1e-10 * u.euclidean_norm());
    EXPECT_LE((r.g_plus.matrix() * h - Matrix::Identity(n, n)).norm(), 1e-9);
  }
}

TEST(Broyd, DetRatioMatchesDeterminants) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 8;
    const Matrix a = random_spd_matrix(rng, n);
    const Matrix g = random_spd_matrix(rng, n);
    const Vector u = random_vector(rng, n);
    const TauParam tau(kTaus[t % 5]);
    const UpdateResult r = broyd(SpdOperator(a), SpdOperator(g), PrimalVector(u), tau);
    const double direct = g.determinant() / r.g_plus.matrix().determinant();
    EXPECT_NEAR(r.det_ratio, direct, 1e-9 * direct);
    EXPECT_DOUBLE_EQ(broyd_det_ratio(SpdOperator(a), SpdOperator(g), PrimalVector(u), tau),
                     r.det_ratio);
  }
}

TEST(Broyd, PhiEndpoints) {
  std::mt19937_64 rng(14);
  const SpdOperator a(random_spd_matrix(rng, 4));
  const SpdOperator g(random_spd_matrix(rng, 4));
  const PrimalVector u(random_vector(rng, 4));
  EXPECT_DOUBLE_EQ(phi_tau(a, g, u, TauParam::bfgs()), 0.0);
  EXPECT_DOUBLE_EQ(phi_tau(a, g, u, TauParam::dfp()), 1.0);
  const double mid = phi_tau(a, g, u, TauParam(0.5));
  EXPECT_GT(mid, 0.0);
  EXPECT_LT(mid, 1.0);
}

TEST(Broyd, ExactApproximationIsFixedPoint) {
  std::mt19937_64 rng(15);
  const Matrix m = random_spd_matrix(rng, 5);
  const SpdOperator a(m);
  for (double tau : kTaus) {
    const UpdateResult r = broyd(a, a, PrimalVector(random_vector(rng, 5)), TauParam(tau));
    EXPECT_LE((r.g_plus.matrix() - m).norm(), 1e-12 * m.norm());
    EXPECT_NEAR(r.det_ratio, 1.0, 1e-12);
  }
}

TEST(Broyd, ZeroDirectionConventions) {
  const SpdOperator a = SpdOperator::diagonal({1.0, 2.0});
  const SpdOperator g = SpdOperator::diagonal({3.0, 5.0});
  const PrimalVector zero = PrimalVector::zero(2);
  const UpdateResult r = broyd(a, g, zero, TauParam(0.3));
  EXPECT_EQ(r.g_plus.matrix(), g.matrix());
  EXPECT_DOUBLE_EQ(r.det_ratio, 1.0);
  EXPECT_DOUBLE_EQ(r.phi, 0.3);
  EXPECT_DOUBLE_EQ(broyd_det_ratio(a, g, zero, TauParam(0.3)), 1.0);
  EXPECT_NEAR(broyd_inverse(a, g, zero, TauParam(0.3)).matrix()(1, 1), 0.2, 1e-15);
  EXPECT_THROW(phi_tau(a, g, zero, TauParam(0.3)), DomainError);
  EXPECT_THROW(nu(a, g, zero), DomainError);
}

TEST(Broyd, DimensionMismatch) {
  const SpdOperator a = SpdOperator::identity(2);
  const SpdOperator g = SpdOperator::identity(3);
  EXPECT_THROW(broyd(a, g, PrimalVector{1.0, 1.0}, TauParam(0.0)), DimensionError);
}

TEST(Nu, ZeroAtTargetAndMatchesQuadraticForm) {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 6;
    const SpdOperator a(random_spd_matrix(rng, n));
    const SpdOperator g(random_spd_matrix(rng, n));
    const PrimalVector u(random_vector(rng, n));
    EXPECT_NEAR(nu(a, a, u), 0.0, 1e-7);
    const double v = nu(a, g, u);
    EXPECT_NEAR(v, nu_quadratic_form(a, g, u), 1e-9 * (1.0 + v));
  }
}

TEST(Nu, ScalarCase) {
  // n = 1: nu = |g - a| / sqrt(g a).
  const SpdOperator a = SpdOperator::diagonal({2.0});
  const SpdOperator g = SpdOperator::diagonal({8.0});
  EXPECT_NEAR(nu(a, g, PrimalVector{0.7}), 6.0 / 4.0, 1e-15);
}

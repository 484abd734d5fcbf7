#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "jnb/bellman.hpp"
#include "jnb/sampling.hpp"
#include "oracle.hpp"

using namespace jnb;

TEST(BellmanValue, InfinityOrdersAboveFinite) {
  const auto inf = BellmanValue::infinity();
  EXPECT_FALSE(inf.is_finite());
  EXPECT_GT(inf, BellmanValue::finite(1e300));
  EXPECT_EQ(inf.to_string(), "inf");
  EXPECT_THROW((void)inf.value(), DomainError);
  EXPECT_EQ(BellmanValue::finite(2.0), BellmanValue::finite(2.0));
}

TEST(Eval, Examples) {
  EXPECT_DOUBLE_EQ(eval(Epsilon(0.3), {0.0, 0.09}).value(), std::exp(0.3));
  EXPECT_NEAR(eval(Epsilon(0.75), {0.0, 0.5625}).value(), static_cast<double>(oracle::kTwoExpQuarter), 1e-15);
  EXPECT_FALSE(eval(Epsilon(1.2), {0.0, 0.1}).is_finite());
  EXPECT_THROW(eval(Epsilon(0.3), {0.0, 0.2}), DomainError);
}

TEST(Eval, FrozenPoints) {
  for (const auto& fp : oracle::kFrozenPoints) {
    const double v = eval(Epsilon(fp.eps), {fp.x1, fp.x2}).value();
    EXPECT_NEAR(v, static_cast<double>(fp.value), 1e-14 * v) << fp.eps << " " << fp.x1 << " " << fp.x2;
  }
}

TEST(Eval, ZeroRegimeIsTheParabola) {
  EXPECT_DOUBLE_EQ(eval(Epsilon(0.0), {-0.7, 0.49}).value(), std::exp(0.7));
  EXPECT_THROW(eval(Epsilon(0.0), {0.0, 0.1}), DomainError);
}

TEST(Eval, OriginIsARegularPoint) {
  for (double e : {0.0, 0.2, 0.7, 2.0}) EXPECT_EQ(eval(Epsilon(e), {0.0, 0.0}).value(), 1.0);
}

TEST(Eval, BoundaryDataOnTheParabola) {
  for (double e : {0.0, 0.1, 0.3, 0.5, 0.8, 1.0, 3.0}) {
    const Epsilon eps(e);
    for (int k = -500; k <= 500; ++k) {
      const double x1 = k / 100.0;
      const double v = eval(eps, {x1, x1 * x1}).value();
      ASSERT_NEAR(v, std::exp(std::abs(x1)), kIdentityTol * v) << "eps " << e << " x1 " << x1;
    }
  }
}

TEST(Eval, SymmetricInX1) {
  for (double e : {0.15, 0.35, 0.6, 0.9}) {
    const Epsilon eps(e);
    const double ext = sampling_extent(eps);
    for (std::uint64_t k = 0; k < 2000; ++k) {
      const auto [u, v] = r2_point(k);
      const Point p = strip_point(eps, ext * u, v);
      ASSERT_EQ(eval(eps, p), eval(eps, p.mirrored())) << to_string(p);
    }
  }
}

TEST(Eval, AtLeastExpAbsX1) {
  for (double e : {0.15, 0.35, 0.6, 0.9}) {
    const Epsilon eps(e);
    const double ext = sampling_extent(eps);
    for (std::uint64_t k = 0; k < 2000; ++k) {
      const auto [u, v] = r2_point(k);
      const Point p = strip_point(eps, -ext + 2.0 * ext * u, v);
      ASSERT_GE(eval(eps, p).value(), std::exp(std::abs(p.x1)) * (1.0 - 1e-15)) << to_string(p);
    }
  }
}

TEST(EvalAsym, Examples) {
  EXPECT_NEAR(eval_asym(Epsilon(0.4), {0.3, 0.09}).value(), std::exp(0.3), 1e-15);
  EXPECT_NEAR(eval_asym(Epsilon(0.75), {1.0, 1.5625}).value(), static_cast<double>(oracle::kFourExpQuarter), 1e-14);
  // Same point through the region-3 closed form.
  EXPECT_NEAR(eval(Epsilon(0.75), {1.0, 1.5625}).value(), static_cast<double>(oracle::kFourExpQuarter), 1e-14);
  EXPECT_FALSE(eval_asym(Epsilon(1.5), {0.0, 0.1}).is_finite());
  EXPECT_DOUBLE_EQ(eval_asym(Epsilon(1.5), {0.5, 0.25}).value(), std::exp(0.5));
}

TEST(EvalAsym, DominatedByEval) {
  std::mt19937_64 rng(11);
  for (double e : {0.1, 0.3, 0.5, 0.7, 0.95}) {
    const Epsilon eps(e);
    for (int k = 0; k < 2000; ++k) {
      const Point p = strip_point(eps, uniform(rng, 0.0, 3.0), uniform(rng, 0.0, 1.0));
      ASSERT_GE(eval(eps, p).value(), eval_asym(eps, p).value() - 1e-12) << to_string(p);
    }
  }
}

TEST(Sharp, Branches) {
  EXPECT_EQ(sharp_constant(Epsilon(0.0)).value(), 1.0);
  EXPECT_NEAR(sharp_constant(Epsilon(0.9)).value(), static_cast<double>(oracle::kSharpNinety), 1e-14);
  EXPECT_NEAR(sharp_constant(Epsilon(0.5)).value(), std::exp(1.0 - 0.5) / (2.0 - 1.0), 1e-15);
  EXPECT_FALSE(sharp_constant(Epsilon(1.0)).is_finite());
}

TEST(Sharp, EqualsBAtTheTopOfTheAxisAndIsTheMaximumThere) {
  for (double e = 0.02; e < 1.0; e += 0.04) {
    const Epsilon eps(e);
    const double c = sharp_constant(eps).value();
    EXPECT_NEAR(eval(eps, {0.0, e * e}).value(), c, kIdentityTol * c) << e;
    double best = 0.0;
    for (int k = 0; k <= 1000; ++k) best = std::max(best, eval(eps, {0.0, e * e * k / 1000.0}).value());
    EXPECT_NEAR(best, c, kIdentityTol * c) << e;
  }
}

TEST(Monotone, NondecreasingInEps) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 5000; ++k) {
    const double e1 = uniform(rng, 0.01, 0.98);
    const double e2 = uniform(rng, e1, 0.99);
    const Point p = strip_point(Epsilon(e1), uniform(rng, -2.0, 2.0), uniform(rng, 0.0, 1.0));
    ASSERT_LE(eval(Epsilon(e1), p).value(), eval(Epsilon(e2), p).value() + kIdentityTol) << e1 << " " << e2;
  }
}

TEST(Candidate, OnlyForOpenUnitInterval) {
  EXPECT_THROW(Candidate(Epsilon(0.0)), DomainError);
  EXPECT_THROW(Candidate(Epsilon(1.0)), DomainError);
  EXPECT_THROW(Bellman(Epsilon(2.0)).candidate(), DomainError);
  EXPECT_EQ(Candidate(Epsilon(0.3)).regions(), 4);
  EXPECT_EQ(Candidate(Epsilon(0.6)).regions(), 3);
}

TEST(Candidate, DerivativeConstantsOnTheChords) {
  const Epsilon eps(0.25);
  const Candidate c(eps);
  const double a = alpha_of(eps);
  const double expected = std::exp(a) / (2.0 - 2.0 * 0.25);
  EXPECT_NEAR(c.d_dx2(3, {0.7, 0.5}), expected, 1e-12);
  EXPECT_NEAR(c.d_dx2(2, {a - 0.25, (a - 0.25) * (a - 0.25) + 0.0625}, 0.0), expected, 1e-12);
  EXPECT_NEAR(c.d_dx2(4, {a + 0.25, (a + 0.25) * (a + 0.25) + 0.0625}, 0.0), expected, 1e-12);
  EXPECT_NEAR(c.d_dx2(1, {0.1, 0.0625}), std::exp(0.25) / 0.5, 1e-12);
  EXPECT_NEAR(c.d_dx2(2, {0.1, 0.0625}), std::exp(0.25) / 0.5, 1e-12);
}

TEST(Candidate, MidRangeDerivativeAtTheCorner) {
  const Candidate c(Epsilon(0.75));
  const double expected = std::exp(0.25) / 0.5;
  EXPECT_NEAR(c.d_dx2(2, {1.0, 1.5625}), expected, 1e-12);
  EXPECT_NEAR(c.d_dx2(3, {1.0, 1.5625}, 0.0), expected, 1e-12);
}

TEST(G1, SecondDerivativeNonpositiveUpToOne) {
  for (int k = 1; k <= 1000; ++k) EXPECT_LE(g1_d2_dx2(k / 1000.0), 0.0);
  EXPECT_GT(g1_d2_dx2(1.5), 0.0);
}

TEST(Weak, Examples) {
  const Epsilon eps(0.3);
  for (auto form : {WeakForm::OneSided, WeakForm::Symmetric}) EXPECT_EQ(weak_constant(eps, 0.0, form), 1.0);
  EXPECT_NEAR(weak_constant_branch(eps, 0.3, WeakForm::OneSided, 1), 0.5, 1e-15);
  EXPECT_NEAR(weak_constant_branch(eps, 0.3, WeakForm::OneSided, 2), 0.5, 1e-15);
  EXPECT_NEAR(weak_constant_branch(eps, 0.3, WeakForm::Symmetric, 1),
              weak_constant_branch(eps, 0.3, WeakForm::Symmetric, 2), 1e-14);
  EXPECT_NEAR(weak_constant_branch(eps, 0.6, WeakForm::Symmetric, 2),
              weak_constant_branch(eps, 0.6, WeakForm::Symmetric, 3), 1e-14);
  EXPECT_THROW(weak_constant(eps, -1.0, WeakForm::OneSided), DomainError);
  EXPECT_THROW(weak_constant(Epsilon(0.0), 1.0, WeakForm::OneSided), DomainError);
}

TEST(Weak, BranchSelection) {
  const Epsilon eps(0.2);
  EXPECT_EQ(weak_branch(eps, 0.2, WeakForm::OneSided), 1);
  EXPECT_EQ(weak_branch(eps, 0.3, WeakForm::OneSided), 2);
  EXPECT_EQ(weak_branch(eps, 0.4, WeakForm::Symmetric), 2);
  EXPECT_EQ(weak_branch(eps, 0.41, WeakForm::Symmetric), 3);
  EXPECT_EQ(weak_branch_count(WeakForm::Symmetric), 3);
}

TEST(Weak, NonincreasingInLambda) {
  for (auto form : {WeakForm::OneSided, WeakForm::Symmetric}) {
    double prev = 2.0;
    for (int k = 0; k <= 400; ++k) {
      const double v = weak_constant(Epsilon(0.4), k * 0.01, form);
      EXPECT_LE(v, prev + 1e-15);
      prev = v;
    }
  }
}

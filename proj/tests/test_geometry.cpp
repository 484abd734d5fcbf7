#include <cmath>

#include <gtest/gtest.h>

#include "jnb/geometry.hpp"
#include "jnb/sampling.hpp"
#include "oracle.hpp"

using namespace jnb;

TEST(Epsilon, RejectsNegativeAndNonFinite) {
  EXPECT_THROW(Epsilon{-0.1}, DomainError);
  EXPECT_THROW(Epsilon{std::nan("")}, DomainError);
  EXPECT_THROW(Epsilon{INFINITY}, DomainError);
  EXPECT_NO_THROW(Epsilon(0.0));
}

TEST(Epsilon, RegimeIsTotal) {
  EXPECT_EQ(regime(Epsilon(0.0)), Regime::Zero);
  EXPECT_EQ(regime(Epsilon(0.3)), Regime::SubHalf);
  EXPECT_EQ(regime(Epsilon(0.5)), Regime::MidRange);
  EXPECT_EQ(regime(Epsilon(0.99)), Regime::MidRange);
  EXPECT_EQ(regime(Epsilon(1.0)), Regime::Degenerate);
  EXPECT_EQ(regime(Epsilon(7.0)), Regime::Degenerate);
}

TEST(Beta, Examples) {
  EXPECT_DOUBLE_EQ(beta_of(Epsilon(0.3), {0.1, 0.01}), 0.3);
  EXPECT_EQ(beta_of(Epsilon(0.3), {0.0, 0.09}), 0.0);
  EXPECT_NEAR(beta_of(Epsilon(0.25), {0.5, 0.28}), static_cast<double>(oracle::kBetaExample), 1e-15);
}

TEST(Beta, ClampsWithinToleranceAndRejectsBeyond) {
  const Epsilon eps(0.3);
  EXPECT_EQ(beta_of(eps, {0.0, 0.09 + 5e-10}), 0.0);
  EXPECT_THROW(beta_of(eps, {0.0, 0.09 + 1e-6}), DomainError);
  EXPECT_THROW(beta_of(eps, {0.5, 0.2}), DomainError);
}

TEST(Strip, ErrorNamesTheViolatedInequality) {
  try {
    require_in_strip(Epsilon(0.3), {0.0, 0.2});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("x2 <= x1^2 + eps^2"), std::string::npos);
  }
  try {
    require_in_strip(Epsilon(0.3), {1.0, 0.5});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("x1^2 <= x2"), std::string::npos);
  }
}

TEST(Alpha, Examples) {
  EXPECT_DOUBLE_EQ(alpha_of(Epsilon(0.5)), 0.5);
  EXPECT_NEAR(alpha_of(Epsilon(0.25)), static_cast<double>(oracle::kAlphaQuarter), 1e-15);
  EXPECT_NEAR(alpha_of(Epsilon(0.1)), static_cast<double>(oracle::kAlphaTenth), 1e-15);
  EXPECT_THROW(alpha_of(Epsilon(0.0)), DomainError);
  EXPECT_THROW(alpha_of(Epsilon(0.6)), DomainError);
}

TEST(Alpha, IdentitiesOverSweep) {
  for (double e = 0.01; e < 0.5; e += 0.04) {
    const Epsilon eps(e);
    const double a = alpha_of(eps);
    EXPECT_GE(a, e);
    EXPECT_NEAR(std::exp((a - e) * (1.0 + e) / e), (1.0 - e) / (2.0 * e * e),
                kIdentityTol * std::max(1.0, (1.0 - e) / (2.0 * e * e)))
        << "eps " << e;
    const auto [c, b] = cb_of(eps);
    EXPECT_NEAR(b, std::exp(a) / (2.0 - 2.0 * e), kIdentityTol) << "eps " << e;
  }
}

TEST(CB, FrozenValuesAtQuarter) {
  const auto [c, b] = cb_of(Epsilon(0.25));
  EXPECT_NEAR(c, static_cast<double>(oracle::kCQuarter), 1e-13);
  EXPECT_NEAR(b, static_cast<double>(oracle::kBQuarter), 1e-13);
  EXPECT_THROW(cb_of(Epsilon(0.5)), DomainError);
}

TEST(CB, ReassociatedEvaluationAgrees) {
  const double e = 0.25;
  const double a = alpha_of(Epsilon(e));
  // Same closed forms, grouped differently.
  const double tail = std::exp(e - (a - e) / e);
  const double c2 = std::exp(a) * (1.0 - a) / ((1.0 - e) * (1.0 + e)) - tail * (e + a) / (2.0 * e) / (1.0 + e);
  const double b2 = (std::exp(a) / (1.0 - e * e) + tail / (2.0 * e * (1.0 + e))) / 2.0;
  const auto [c, b] = cb_of(Epsilon(e));
  EXPECT_NEAR(c, c2, 1e-13);
  EXPECT_NEAR(b, b2, 1e-13);
}

TEST(CB, EndpointIdentity) {
  for (double e : {0.05, 0.15, 0.25, 0.35, 0.45}) {
    const Epsilon eps(e);
    const double a = alpha_of(eps);
    const auto [c, b] = cb_of(eps);
    // g2 at the upper endpoint (a - e, (a - e)^2 + e^2), where beta = 0.
    const double g2 = 1.0 / (1.0 + e) * std::exp(a) + e / (1.0 + e) * std::exp(-(a - e) / e + e);
    EXPECT_NEAR(-c * e + b * (2.0 * e * e - 2.0 * e * a) + std::exp(a), g2, kIdentityTol * g2) << "eps " << e;
  }
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(Epsilon(0.3), {0.0, 0.04}), 1);
  const double a = alpha_of(Epsilon(0.25));
  EXPECT_EQ(classify(Epsilon(0.25), {a, a * a}), 2);
  EXPECT_EQ(classify(Epsilon(0.75), {1.0, 1.5625}), 2);
  EXPECT_THROW(classify(Epsilon(0.3), {0.0, 0.2}), DomainError);
  EXPECT_THROW(classify(Epsilon(1.5), {0.0, 0.2}), DomainError);
}

TEST(Classify, FrozenPointsLieInTheirRegions) {
  for (const auto& fp : oracle::kFrozenPoints) {
    EXPECT_EQ(classify(Epsilon(fp.eps), {fp.x1, fp.x2}), fp.region) << fp.eps << " " << fp.x1 << " " << fp.x2;
  }
}

class Coverage : public ::testing::TestWithParam<double> {};

TEST_P(Coverage, QuasiRandomPointsAreClassifiedAndSymmetric) {
  const Epsilon eps(GetParam());
  const double ext = sampling_extent(eps);
  for (std::uint64_t k = 0; k < 100000; ++k) {
    const auto [u, v] = r2_point(k);
    const Point p = strip_point(eps, -ext + 2.0 * ext * u, v);
    const int j = classify(eps, p);
    ASSERT_TRUE(in_region(eps, p, j)) << to_string(p);
    for (int i = 1; i < j; ++i) ASSERT_FALSE(in_region(eps, p, i)) << to_string(p);
    ASSERT_EQ(classify(eps, p.mirrored()), j) << to_string(p);
  }
}

INSTANTIATE_TEST_SUITE_P(Regimes, Coverage, ::testing::Values(0.05, 0.25, 0.45, 0.5, 0.75, 0.95));

TEST(Boundaries, SegmentsLieInBothAdjacentRegions) {
  for (double e : {0.1, 0.25, 0.4, 0.5, 0.7, 0.9}) {
    const Epsilon eps(e);
    for (const auto& b : region_boundaries(eps)) {
      for (int k = 0; k <= 50; ++k) {
        const Point p = b.segment.at(k / 50.0);
        EXPECT_TRUE(in_region(eps, p, b.lower)) << e << " " << to_string(p);
        EXPECT_TRUE(in_region(eps, p, b.lower + 1)) << e << " " << to_string(p);
      }
    }
  }
}

TEST(Boundaries, TangentBoundariesTouchTheUpperParabola) {
  for (double e : {0.2, 0.75}) {
    const Epsilon eps(e);
    for (const auto& b : region_boundaries(eps)) {
      if (!b.touch) continue;
      for (int k = 0; k <= 10; ++k) {
        const Point p = b.segment.at(k / 10.0);
        const double w = *b.touch;
        const double a = std::abs(p.x1);
        EXPECT_NEAR(p.x2, 2.0 * w * a - w * w + e * e, 1e-14);
      }
    }
  }
}

TEST(Boundaries, NoneOutsideTheOpenUnitInterval) {
  EXPECT_THROW(region_boundaries(Epsilon(0.0)), DomainError);
  EXPECT_THROW(region_boundaries(Epsilon(1.0)), DomainError);
}

TEST(Leaves, StayInsideTheirRegion) {
  for (double e : {0.25, 0.75}) {
    const Epsilon eps(e);
    for (const auto& l : foliation_leaves(eps, 7)) {
      for (int k = 0; k <= 20; ++k) {
        const Point p = l.segment.at(k / 20.0);
        EXPECT_TRUE(in_region(eps, p, l.region)) << e << " leaf in " << l.region << " " << to_string(p);
      }
    }
  }
}

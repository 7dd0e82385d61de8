#include <pellsq/intkit.hpp>

#include <gtest/gtest.h>

#include "oracle.hpp"

using pellsq::Int;

TEST(Intkit, ValuationExamples) {
  EXPECT_EQ(pellsq::valuation(48, 2), 4u);
  EXPECT_EQ(pellsq::valuation(-9, 3), 2u);
  EXPECT_EQ(pellsq::valuation(161, 7), 1u);
  EXPECT_EQ(pellsq::valuation(161, 5), 0u);
  EXPECT_THROW(pellsq::valuation(0, 2), pellsq::DomainError);
  EXPECT_THROW(pellsq::valuation(12, 6), pellsq::DomainError);
}

TEST(Intkit, CoreExamples) {
  EXPECT_EQ(pellsq::core(1), 1);
  EXPECT_EQ(pellsq::core(-16), -1);
  EXPECT_EQ(pellsq::core(-36), -1);
  EXPECT_EQ(pellsq::core(18), 2);
  EXPECT_EQ(pellsq::core(-161), -161);
  EXPECT_THROW(pellsq::core(0), pellsq::DomainError);
}

TEST(Intkit, RadExamples) {
  EXPECT_EQ(pellsq::rad(1), 1);
  EXPECT_EQ(pellsq::rad(-1), 1);
  EXPECT_EQ(pellsq::rad(12), 6);
  EXPECT_EQ(pellsq::rad(-161), 161);
}

TEST(Intkit, SqrtExact) {
  EXPECT_EQ(*pellsq::sqrt_exact(961), 31);
  EXPECT_EQ(*pellsq::sqrt_exact(27889), 167);
  EXPECT_FALSE(pellsq::sqrt_exact(2).has_value());
  EXPECT_FALSE(pellsq::sqrt_exact(-4).has_value());
  EXPECT_EQ(*pellsq::sqrt_exact(0), 0);
}

TEST(Intkit, FactorizeExamples) {
  auto f = pellsq::factorize(161);
  ASSERT_EQ(f.factors.size(), 2u);
  EXPECT_EQ(f.factors[0].first, 7);
  EXPECT_EQ(f.factors[1].first, 23);
  auto g = pellsq::factorize(-4);
  EXPECT_EQ(g.sign, -1);
  ASSERT_EQ(g.factors.size(), 1u);
  EXPECT_EQ(g.factors[0].first, 2);
  EXPECT_EQ(g.factors[0].second, 2u);
  EXPECT_TRUE(pellsq::factorize(1).factors.empty());
  EXPECT_THROW(pellsq::factorize(0), pellsq::DomainError);
}

TEST(Intkit, FactorizeBeyondTrialDivision) {
  // Products of two primes above the trial-division limit force the rho path.
  Int p("1000000007"), q("998244353"), r("2305843009213693951");
  Int n = p * q * q * r;
  auto f = pellsq::factorize(n);
  EXPECT_EQ(f.value(), n);
  ASSERT_EQ(f.factors.size(), 3u);
  EXPECT_EQ(f.factors[0].first, q);
  EXPECT_EQ(f.factors[0].second, 2u);
  EXPECT_EQ(f.factors[1].first, p);
  EXPECT_EQ(f.factors[2].first, r);
}

TEST(Intkit, PocklingtonCertifiesLargePrime) {
  // 2^89 - 1 is a Mersenne prime above the deterministic Miller-Rabin range.
  Int m89 = (Int(1) << 89) - 1;
  EXPECT_TRUE(pellsq::is_prime(m89));
  EXPECT_FALSE(pellsq::is_prime(m89 * 3));
}

TEST(Intkit, BudgetExceeded) {
  pellsq::FactorBudget tiny;
  tiny.rho_iterations = 4;
  Int n = Int("1000000007") * Int("1000000009");
  EXPECT_THROW(pellsq::factorize(n, tiny), pellsq::BudgetExceeded);
}

TEST(Intkit, PrimalityAgreesWithTrialDivision) {
  for (std::uint64_t n = 0; n < 20000; ++n) EXPECT_EQ(pellsq::is_prime(Int(n)), oracle::naive_prime(n)) << n;
}

TEST(Intkit, RandomProperties) {
  std::uniform_int_distribution<std::int64_t> dist(-1000000000000LL, 1000000000000LL);
  for (int i = 0; i < 400; ++i) {
    std::int64_t v = dist(oracle::rng());
    if (v == 0) continue;
    Int n(v);
    Int c = pellsq::core(n);
    EXPECT_EQ(c, oracle::naive_core(v));
    auto q = pellsq::sqrt_exact(n / c);
    ASSERT_TRUE(q.has_value());
    EXPECT_EQ(c * *q * *q, n);

    Int r = pellsq::rad(n);
    EXPECT_EQ(n % r, 0);
    EXPECT_TRUE(pellsq::is_squarefree(r));
    EXPECT_EQ(pellsq::rad(n * n), r);

    for (auto [p, e] : oracle::trial_factor(static_cast<std::uint64_t>(v < 0 ? -v : v)))
      EXPECT_EQ(pellsq::valuation(n, Int(p)), e);

    EXPECT_EQ(*pellsq::sqrt_exact(n * n), pellsq::abs_int(n));
    EXPECT_EQ(pellsq::factorize(n).value(), n);
  }
}

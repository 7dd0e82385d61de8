#include <pellsq/quadratic.hpp>

#include <gtest/gtest.h>

#include "oracle.hpp"

using pellsq::Int;
using pellsq::QuadInt;
using pellsq::Rat;

TEST(Quadratic, Multiplication) {
  QuadInt a = QuadInt::integral(1, 1, 2);
  EXPECT_EQ(a * a, QuadInt::integral(3, 2, 2));
  QuadInt b = QuadInt::half(6, 2, 10);
  EXPECT_EQ(b * b, QuadInt::integral(19, 6, 10));
  QuadInt c = QuadInt::half(1, 1, 5);
  EXPECT_EQ(c * c, QuadInt::half(3, 1, 5));
}

TEST(Quadratic, NormTraceConj) {
  EXPECT_EQ(QuadInt::half(2, 2, 2).norm(), Rat(-1));
  EXPECT_EQ(QuadInt::integral(1, 9, 2).norm(), Rat(-161));
  EXPECT_EQ(QuadInt::half(1, 1, 5).norm(), Rat(-1));
  EXPECT_EQ(QuadInt::half(3, 1, 13).trace(), 3);
  EXPECT_EQ(QuadInt::half(3, 1, 13).conj(), QuadInt::half(3, -1, 13));
}

TEST(Quadratic, Powers) {
  QuadInt e = QuadInt::integral(1, 1, 2);
  EXPECT_EQ(pellsq::qpow(e, 6), QuadInt::integral(99, 70, 2));
  EXPECT_EQ(pellsq::qpow(e, -1), QuadInt::integral(-1, 1, 2));
  EXPECT_EQ(pellsq::qpow(e, 0), QuadInt::integral(1, 0, 2));
  EXPECT_EQ(pellsq::qpow(e, 5) * pellsq::qpow(e, -5), QuadInt::integral(1, 0, 2));
  EXPECT_THROW(pellsq::qpow(QuadInt::integral(1, 9, 2), -1), pellsq::DomainError);
}

TEST(Quadratic, Invariants) {
  EXPECT_THROW(QuadInt::half(1, 2, 5), pellsq::DomainError);
  EXPECT_THROW(QuadInt::half(1, 1, 3), pellsq::DomainError);
  EXPECT_THROW(QuadInt::half(1, 0, 8), pellsq::DomainError);
  EXPECT_NO_THROW(QuadInt::half(6, 1, 40));
  EXPECT_EQ(QuadInt::half(6, 1, 40).norm(), Rat(-1));
  EXPECT_THROW(QuadInt::integral(1, 1, 2) * QuadInt::integral(1, 1, 3), pellsq::DomainError);
}

TEST(Quadratic, NormIsMultiplicative) {
  std::uniform_int_distribution<int> dist(-50, 50);
  for (Int d : {Int(2), Int(5), Int(13), Int(40), Int(-1), Int(-3), Int(-23)}) {
    for (int i = 0; i < 50; ++i) {
      int h1 = dist(oracle::rng()), k1 = dist(oracle::rng()), h2 = dist(oracle::rng()), k2 = dist(oracle::rng());
      if (pellsq::mod_floor(d, 4) != 1) {
        h1 &= ~1;
        k1 &= ~1;
        h2 &= ~1;
        k2 &= ~1;
      } else {
        k1 = (k1 & ~1) | (h1 & 1);
        k2 = (k2 & ~1) | (h2 & 1);
      }
      QuadInt x = QuadInt::half(h1, k1, d), y = QuadInt::half(h2, k2, d);
      EXPECT_EQ((x * y).norm(), x.norm() * y.norm());
      EXPECT_EQ((x * y).conj(), x.conj() * y.conj());
    }
  }
}

TEST(Quadratic, Pell4Examples) {
  auto p5 = pellsq::pell4_min(5);
  EXPECT_EQ(p5.t, 1);
  EXPECT_EQ(p5.u, 1);
  EXPECT_EQ(p5.norm4, -4);
  auto p2 = pellsq::pell4_min(2);
  EXPECT_EQ(p2.t, 2);
  EXPECT_EQ(p2.u, 2);
  EXPECT_EQ(p2.norm4, -4);
  auto p40 = pellsq::pell4_min(40);
  EXPECT_EQ(p40.t, 6);
  EXPECT_EQ(p40.u, 1);
  EXPECT_EQ(p40.norm4, -4);
  EXPECT_THROW(pellsq::pell4_min(16), pellsq::DomainError);
}

TEST(Quadratic, Pell4AgreesWithBruteForce) {
  for (std::int64_t d = 2; d <= 500; ++d) {
    if (oracle::naive_square(d)) continue;
    auto p = pellsq::pell4_min(d);
    EXPECT_EQ(p.t * p.t - d * p.u * p.u, p.norm4) << d;
    auto b = oracle::brute_pell4(d, 10000);
    if (b.found) {
      EXPECT_EQ(p.t, b.t) << d;
      EXPECT_EQ(p.u, b.u) << d;
      EXPECT_EQ(p.norm4, b.n4) << d;
    } else {
      EXPECT_GT(p.u, 10000) << d;
    }
  }
}

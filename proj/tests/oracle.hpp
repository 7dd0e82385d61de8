#pragma once

// Independent reference implementations used only by the tests. These use
// plain 64-bit or naive big-integer arithmetic and avoid the library paths.

#include <pellsq/types.hpp>

#include <cstdint>
#include <map>
#include <random>

namespace oracle {

using pellsq::Int;

inline std::map<std::uint64_t, unsigned> trial_factor(std::uint64_t n) {
  std::map<std::uint64_t, unsigned> f;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    while (n % p == 0) {
      ++f[p];
      n /= p;
    }
  if (n > 1) ++f[n];
  return f;
}

inline bool naive_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

inline std::int64_t naive_core(std::int64_t n) {
  std::int64_t c = n < 0 ? -1 : 1;
  for (auto [p, e] : trial_factor(static_cast<std::uint64_t>(n < 0 ? -n : n)))
    if (e & 1) c *= static_cast<std::int64_t>(p);
  return c;
}

inline std::uint64_t naive_isqrt(std::uint64_t n) {
  std::uint64_t lo = 0, hi = 1ull << 32;
  while (hi - lo > 1) {
    std::uint64_t mid = (lo + hi) / 2;
    if (mid * mid <= n)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

inline bool naive_square(std::int64_t n) {
  if (n < 0) return false;
  auto r = naive_isqrt(static_cast<std::uint64_t>(n));
  return r * r == static_cast<std::uint64_t>(n);
}

// Smallest u <= umax with d u^2 -+ 4 a square, preferring -4 at equal u.
struct BrutePell {
  bool found = false;
  std::int64_t t = 0, u = 0;
  int n4 = 0;
};
inline BrutePell brute_pell4(std::int64_t d, std::int64_t umax) {
  for (std::int64_t u = 1; u <= umax; ++u) {
    std::int64_t du2 = d * u * u;
    if (du2 > 4 && naive_square(du2 - 4)) return {true, static_cast<std::int64_t>(naive_isqrt(du2 - 4)), u, -4};
    if (naive_square(du2 + 4)) return {true, static_cast<std::int64_t>(naive_isqrt(du2 + 4)), u, 4};
  }
  return {};
}

// (x + y sqrt d) products with plain Int, doubled coordinates.
struct Doubled {
  Int h, k;
};
inline Doubled mul(const Doubled& a, const Doubled& b, const Int& d) {
  return {(a.h * b.h + d * a.k * b.k) / 2, (a.h * b.k + a.k * b.h) / 2};
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611);
  return g;
}

}  // namespace oracle

#pragma once

#include <pellsq/types.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace pellsq {

struct Factorization {
  int sign = 1;
  // Increasing primes with multiplicity.
  std::vector<std::pair<Int, unsigned>> factors;

  Int value() const {
    Int v = sign;
    for (auto& [p, e] : factors) v *= boost::multiprecision::pow(p, e);
    return v;
  }
};

struct FactorBudget {
  std::uint32_t trial_limit = 1000000;
  std::uint64_t rho_iterations = std::uint64_t(1) << 22;
};

namespace detail {

inline const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    const std::uint32_t limit = 1000000;
    std::vector<bool> composite(limit + 1, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 2; i <= limit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (std::uint64_t j = std::uint64_t(i) * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

inline Int modpow(const Int& b, const Int& e, const Int& m) {
  Int r;
  mpz_powm(r.backend().data(), b.backend().data(), e.backend().data(), m.backend().data());
  return r;
}

inline bool miller_rabin(const Int& n, unsigned base) {
  Int d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  Int x = modpow(Int(base), d, n);
  if (x == 1 || x == n - 1) return true;
  for (unsigned i = 1; i < s; ++i) {
    x = x * x % n;
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace detail

inline Int abs_int(const Int& n) { return n < 0 ? Int(-n) : n; }

inline Int gcd_int(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.backend().data(), a.backend().data(), b.backend().data());
  return r;
}

inline Int lcm_int(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.backend().data(), a.backend().data(), b.backend().data());
  return r;
}

// Floor square root of n >= 0.
inline Int isqrt(const Int& n) {
  if (n < 0) throw DomainError("isqrt: negative argument");
  Int r;
  mpz_sqrt(r.backend().data(), n.backend().data());
  return r;
}

inline std::optional<Int> sqrt_exact(const Int& n) {
  if (n < 0) return std::nullopt;
  if (!mpz_perfect_square_p(n.backend().data())) return std::nullopt;
  return isqrt(n);
}

inline bool is_square(const Int& n) { return n >= 0 && mpz_perfect_square_p(n.backend().data()); }

// Floor of the mathematical n mod m for m > 0.
inline Int mod_floor(const Int& n, const Int& m) {
  Int r = n % m;
  if (r < 0) r += m;
  return r;
}

inline long mod_floor(const Int& n, long m) { return static_cast<long>(mod_floor(n, Int(m))); }

inline unsigned v2(const Int& n) {
  if (n == 0) throw DomainError("v2: zero argument");
  return static_cast<unsigned>(mpz_scan1(n.backend().data(), 0));
}

// Primality with a certificate: deterministic Miller-Rabin below 3.3e24,
// Pocklington above it.
bool is_prime(const Int& n, const FactorBudget& budget = {});
Factorization factorize(const Int& n, const FactorBudget& budget = {});

namespace detail {

inline bool mr_deterministic(const Int& n) {
  static const std::array<unsigned, 13> bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
  for (unsigned a : bases)
    if (!miller_rabin(n, a)) return false;
  return true;
}

inline Int pollard_brent(const Int& n, std::uint64_t& budget) {
  if ((n & 1) == 0) return Int(2);
  for (unsigned c = 1; c < 64; ++c) {
    Int y = 2, x, g = 1, q = 1, ys;
    std::uint64_t r = 1;
    const std::uint64_t m = 128;
    auto f = [&](const Int& v) { return (v * v + c) % n; };
    do {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      std::uint64_t k = 0;
      do {
        ys = y;
        std::uint64_t lim = std::min(m, r - k);
        for (std::uint64_t i = 0; i < lim; ++i) {
          y = f(y);
          q = q * abs_int(x - y) % n;
        }
        if (budget < lim) throw BudgetExceeded("unfactored residue " + n.str());
        budget -= lim;
        g = gcd_int(q, n);
        k += lim;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd_int(abs_int(x - ys), n);
        if (budget == 0) throw BudgetExceeded("unfactored residue " + n.str());
        --budget;
      } while (g == 1);
    }
    if (g != n) return g;
  }
  throw BudgetExceeded("unfactored residue " + n.str());
}

inline void split_into(const Int& n, std::vector<Int>& out, std::uint64_t& budget, const FactorBudget& fb) {
  if (n == 1) return;
  if (is_prime(n, fb)) {
    out.push_back(n);
    return;
  }
  Int d = pollard_brent(n, budget);
  split_into(d, out, budget, fb);
  split_into(n / d, out, budget, fb);
}

inline bool pocklington(const Int& n, const FactorBudget& fb) {
  Int m = n - 1;
  Factorization f = factorize(m, fb);
  for (auto& [q, e] : f.factors) {
    bool witnessed = false;
    for (unsigned a = 2; a < 1000 && !witnessed; ++a) {
      if (modpow(Int(a), m, n) != 1) return false;
      Int t = modpow(Int(a), m / q, n) - 1;
      if (gcd_int(t, n) == 1) witnessed = true;
    }
    if (!witnessed) throw BudgetExceeded("no Pocklington witness for " + n.str());
  }
  return true;
}

}  // namespace detail

inline bool is_prime(const Int& n, const FactorBudget& budget) {
  if (n < 2) return false;
  for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u, 41u}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 1681) return true;
  if (!detail::mr_deterministic(n)) return false;
  static const Int mr_bound("3317044064679887385961981");
  if (n < mr_bound) return true;
  return detail::pocklington(n, budget);
}

inline Factorization factorize(const Int& n, const FactorBudget& budget) {
  if (n == 0) throw DomainError("factorize: zero argument");
  Factorization out;
  out.sign = n < 0 ? -1 : 1;
  Int m = abs_int(n);
  std::vector<std::pair<Int, unsigned>> found;
  if (m.backend().data()[0]._mp_size <= 1) {
    std::uint64_t v = static_cast<std::uint64_t>(m);
    for (std::uint32_t p : detail::small_primes()) {
      if (p > budget.trial_limit || std::uint64_t(p) * p > v) break;
      if (v % p) continue;
      unsigned e = 0;
      while (v % p == 0) {
        v /= p;
        ++e;
      }
      found.emplace_back(Int(p), e);
    }
    m = Int(v);
  } else {
    for (std::uint32_t p : detail::small_primes()) {
      if (p > budget.trial_limit) break;
      if (Int(p) * p > m) break;
      if (mpz_divisible_ui_p(m.backend().data(), p) == 0) continue;
      unsigned e = 0;
      while (mpz_divisible_ui_p(m.backend().data(), p)) {
        m /= p;
        ++e;
      }
      found.emplace_back(Int(p), e);
    }
  }
  if (m > 1) {
    Int limit = Int(std::min<std::uint32_t>(budget.trial_limit, 1000000));
    if (m <= limit * limit) {
      found.emplace_back(m, 1);
    } else {
      std::vector<Int> primes;
      std::uint64_t rho = budget.rho_iterations;
      detail::split_into(m, primes, rho, budget);
      std::sort(primes.begin(), primes.end());
      for (auto& p : primes) {
        if (!found.empty() && found.back().first == p)
          ++found.back().second;
        else
          found.emplace_back(p, 1);
      }
    }
  }
  std::sort(found.begin(), found.end());
  out.factors = std::move(found);
  return out;
}

inline unsigned valuation(const Int& n, const Int& p) {
  if (n == 0) throw DomainError("valuation: zero argument");
  if (!is_prime(p)) throw DomainError("valuation: " + p.str() + " is not prime");
  Int m = abs_int(n);
  unsigned e = 0;
  while (m % p == 0) {
    m /= p;
    ++e;
  }
  return e;
}

// Signed squarefree kernel: n = core(n) * m^2 with core(n) squarefree.
inline Int core(const Int& n) {
  if (n == 0) throw DomainError("core: zero argument");
  Factorization f = factorize(n);
  Int c = f.sign;
  for (auto& [p, e] : f.factors)
    if (e & 1) c *= p;
  return c;
}

inline Int rad(const Int& n) {
  if (n == 0) throw DomainError("rad: zero argument");
  Factorization f = factorize(n);
  Int r = 1;
  for (auto& [p, e] : f.factors) r *= p;
  return r;
}

inline bool is_squarefree(const Int& n) {
  if (n == 0) return false;
  for (auto& [p, e] : factorize(n).factors)
    if (e > 1) return false;
  return true;
}

}  // namespace pellsq

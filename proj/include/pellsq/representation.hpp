#pragma once

#include <pellsq/sequence.hpp>

#include <string>
#include <vector>

namespace pellsq {

struct GSet {
  Int g1, g2;
  int g3 = 1;
  Rat gsq;
  Int dprime;
  Int n_sq;
  Int t_prime, u1, u2;

  // (|g| N_{d',4})^2
  Rat gn_sq() const { return gsq * Rat(n_sq); }
};

inline GSet g_quantities(const Int& t_prime, const Int& u1, const Int& u2) {
  if (t_prime == 0 || !is_squarefree(t_prime)) throw DomainError("g_quantities: t' must be squarefree");
  if (mod_floor(u1 * u1 - t_prime * u2 * u2, 4) != 0)
    throw DomainError("g_quantities: (u1 + u2 sqrt(t'))/2 is not an algebraic integer");
  if (u2 == 0) throw DomainError("g_quantities: u2 must be nonzero");
  GSet g;
  g.t_prime = t_prime;
  g.u1 = u1;
  g.u2 = u2;
  g.g1 = gcd_int(u1, u2);
  g.g2 = gcd_int(u1 / g.g1, t_prime);
  bool even = mod_floor((u1 - u2) / g.g1, 2) == 0;
  long tm = mod_floor(t_prime, 4);
  g.g3 = (tm == 1 && even) ? 1 : (tm == 3 && even) ? 2 : 4;
  g.gsq = Rat(g.g1 * g.g1 * g.g2, g.g3);
  Rat dp = Rat(u2 * u2 * t_prime) / g.gsq;
  if (denominator(dp) != 1) throw DomainError("g_quantities: d' is not an integer");
  g.dprime = numerator(dp);
  g.n_sq = Int(1) << std::min(v2(g.dprime), 6u);
  return g;
}

enum class Branch { Plus, Minus };  // r1' = tb^2 + au + 2by, r1'' = tb^2 + au - 2by

// Which divisibility certificate applies to f.
enum class RepCase { A, B, C };

struct Decomposition {
  Int f, r, s;
  int sign = 1;
  Branch branch = Branch::Minus;
  Int g1sq;
  Int fprime;
  RepCase rep_case = RepCase::A;
  bool reduced = false;  // the (1+i) rewrite was applied
};

struct Verdict {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
};

namespace detail {

// Data shared by decompose and verify_decomposition.
struct RepContext {
  Int a, b, d, x, y, n_alpha, core_n, m, t, u;
  int n_eps = 1;
};

inline RepContext rep_context(const SeqParams& p, long k) {
  p.validate();
  if (p.step != 2) throw DomainError("decompose: step must be 2");
  if (k == 0) throw DomainError("decompose: k must be nonzero");
  auto b = sqrt_exact(p.b0);
  if (!b) throw DomainError("decompose: b0 must be a perfect square");
  RepContext c;
  c.a = p.a;
  c.b = *b;
  c.d = p.d;
  c.n_alpha = p.n_alpha();
  if (c.n_alpha == 0 || is_square(c.n_alpha)) throw DomainError("decompose: N_alpha must not be a square");
  Term tk = element(p, k);
  if (!tk.integral()) throw DomainError("decompose: x_k, y_k are not integers");
  c.x = tk.x();
  auto y = sqrt_exact(tk.y());
  if (tk.y() <= 0 || !y) throw DomainError("decompose: y_k is not a positive square");
  c.y = *y;
  QuadInt ek = qpow(p.eps(), k);
  c.t = ek.h();
  c.u = ek.k();
  c.n_eps = ek.norm() == 1 ? 1 : -1;
  c.core_n = core(c.n_alpha);
  c.m = isqrt(c.n_alpha / c.core_n);
  return c;
}

inline bool core_is_small_prime_shape(const Int& core_abs, Int& odd_p, bool& has_two) {
  Factorization fz = factorize(core_abs);
  has_two = false;
  odd_p = 0;
  for (auto& [q, e] : fz.factors) {
    if (q == 2) {
      has_two = true;
    } else if (odd_p == 0) {
      odd_p = q;
    } else {
      return false;
    }
  }
  return core_abs > 1;
}

inline RepCase rep_case(const RepContext& c) {
  if (c.core_n == -1) return RepCase::B;
  Int p;
  bool two;
  if (core_is_small_prime_shape(abs_int(c.core_n), p, two)) return RepCase::C;
  return RepCase::A;
}

struct BranchData {
  Int r1, g1sq, g1;
};

inline BranchData branch_data(const RepContext& c, Branch br) {
  Int base = c.t * c.b * c.b + c.a * c.u;
  Int r1 = br == Branch::Plus ? Int(base + 2 * c.b * c.y) : Int(base - 2 * c.b * c.y);
  if (r1 == 0) throw DomainError("decompose: r1 vanished");
  // g1 | s1' = -u m, so only primes of gcd(r1, u m) and 2 can divide g1.
  std::vector<Int> primes{Int(2)};
  for (auto& [q, e] : factorize(gcd_int(r1, c.u * c.m)).factors)
    if (q != 2) primes.push_back(q);
  Int g1sq = 1;
  for (const Int& q : primes) {
    if (r1 % q != 0) continue;
    long vr = valuation(r1, q), vb = valuation(4 * c.b * c.b, q);
    g1sq *= boost::multiprecision::pow(q, unsigned(std::min(vb + vr - (vr & 1), 2 * vr)));
  }
  auto g1 = sqrt_exact(g1sq);
  if (!g1) throw DomainError("decompose: g1^2 = " + g1sq.str() + " is not a square");
  return {r1, g1sq, *g1};
}

inline long rel_valuation(const BranchData& bd, const Int& p) {
  return long(valuation(bd.r1, p)) - long(valuation(bd.g1sq, p));
}

}  // namespace detail

inline Verdict verify_decomposition(const SeqParams& p, long k, const Decomposition& dec) {
  detail::RepContext c;
  try {
    c = detail::rep_context(p, k);
  } catch (const DomainError& e) {
    return {false, std::string("precondition: ") + e.what()};
  }
  if (dec.f == 0) return {false, "f is zero"};
  if (dec.sign != 1 && dec.sign != -1) return {false, "sign must be +-1"};

  QuadInt alpha = QuadInt::integral(c.a, c.m, c.core_n);
  QuadInt lhs = QuadInt::integral(c.x, c.n_eps * c.m, c.core_n) * (dec.f * dec.f * dec.sign);
  QuadInt rhs = alpha * qpow(QuadInt::integral(dec.r, dec.s, c.core_n), 4);
  if (lhs != rhs) return {false, "quartic identity"};
  if (dec.f * c.y != c.b * (dec.r * dec.r - c.core_n * dec.s * dec.s)) return {false, "f*sqrt(y) identity"};

  Int b2 = c.b * c.b;
  Int fa = abs_int(dec.f);
  switch (detail::rep_case(c)) {
    case RepCase::B: {
      Int bound = b2 * rad(gcd_int(c.u * c.n_alpha, Int(c.n_eps)));
      if (bound % fa != 0) return {false, "divisibility (b)"};
      break;
    }
    case RepCase::C: {
      Int mult = (mod_floor(c.n_alpha, 4) == 1 && mod_floor(c.d, 4) == 0) ? 4 : 2;
      Int bound = mult * b2 * rad(gcd_int(c.u * c.n_alpha / c.core_n, Int(c.n_eps)));
      if (bound % fa != 0) return {false, "divisibility (c)"};
      break;
    }
    case RepCase::A: {
      if (dec.fprime <= 0 || abs_int(c.core_n) % dec.fprime != 0) return {false, "f' does not divide core(N_alpha)"};
      Int bound = 4 * b2 * rad(dec.fprime * gcd_int(c.u * c.n_alpha / c.core_n, Int(c.n_eps)));
      if (bound % fa != 0) return {false, "divisibility (a)"};
      break;
    }
  }
  return {};
}

inline Decomposition decompose(const SeqParams& p, long k) {
  detail::RepContext c = detail::rep_context(p, k);
  detail::BranchData plus = detail::branch_data(c, Branch::Plus);
  detail::BranchData minus = detail::branch_data(c, Branch::Minus);

  Int core_abs = abs_int(c.core_n);
  Int d1 = 1, d2 = 1, d3 = 1;
  for (auto& [q, e] : factorize(core_abs).factors) {
    long vp = detail::rel_valuation(plus, q), vm = detail::rel_valuation(minus, q);
    (vp < vm ? d1 : vm < vp ? d2 : d3) *= q;
  }

  Decomposition dec;
  dec.rep_case = detail::rep_case(c);
  dec.branch = d1 > d2 ? Branch::Plus : Branch::Minus;
  dec.fprime = core_abs / std::max(Int(d1 * d3), Int(d2 * d3));

  Int odd_p;
  bool has_two;
  if (dec.rep_case == RepCase::C && detail::core_is_small_prime_shape(core_abs, odd_p, has_two) && has_two &&
      odd_p != 0) {
    dec.branch = detail::rel_valuation(plus, odd_p) <= detail::rel_valuation(minus, odd_p) ? Branch::Plus
                                                                                             : Branch::Minus;
  }

  const detail::BranchData& bd = dec.branch == Branch::Plus ? plus : minus;
  Int s1 = -c.u * c.m;
  if (s1 % bd.g1 != 0) throw DomainError("decompose: g1 does not divide s1'");
  dec.g1sq = bd.g1sq;
  dec.r = bd.r1 / bd.g1;
  dec.s = s1 / bd.g1;
  dec.f = 4 * c.b * c.b * bd.r1 / bd.g1sq;
  if (dec.branch == Branch::Minus) dec.f = -dec.f;
  dec.sign = 1;

  if (dec.rep_case == RepCase::B && (dec.f & 1) == 0 && (dec.r & 1) != 0 && (dec.s & 1) != 0) {
    Int r = (dec.r + dec.s) / 2, s = (dec.s - dec.r) / 2;
    dec.r = std::move(r);
    dec.s = std::move(s);
    dec.f /= 2;
    dec.sign = -1;
    dec.reduced = true;
  }

  Verdict v = verify_decomposition(p, k, dec);
  if (!v) throw DomainError("decompose: internal check failed (" + v.reason + ") for " + p.str() + " k=" +
                            std::to_string(k));
  return dec;
}

// (|g| N_{d',4})^2 = gcd(a^2, d) * 2^(2 + min(4, v2(b'))) with b' = N_alpha / gcd(a^2, d).
// The value does not depend on k.
inline Int gn_closed_form(const SeqParams& p) {
  p.validate();
  if (p.b0 != 1) throw DomainError("gn_closed_form: b0 must be 1");
  Int n = p.n_alpha();
  if (n >= 0) throw DomainError("gn_closed_form: N_alpha must be negative");
  Int g = gcd_int(p.a * p.a, p.d);
  Int bp = n / g;
  return g << (2 + std::min(4u, v2(bp)));
}

inline Int gn_closed_form(const SeqParams& p, long k) {
  Int v = gn_closed_form(p);
  if (k == 0) throw DomainError("gn_closed_form: k must be nonzero");
  if (!element(p, k).integral()) throw DomainError("gn_closed_form: x_k, y_k are not integers");
  return v;
}

// The same quantity from g_quantities with t' = core(N_alpha), u1 = 2 x_k, u2 = 2 sqrt(N_alpha / t').
inline GSet g_quantities_for(const SeqParams& p, long k) {
  Term tk = element(p, k);
  if (!tk.integral()) throw DomainError("g_quantities_for: x_k, y_k are not integers");
  Int n = p.n_alpha();
  Int c = core(n);
  return g_quantities(c, 2 * tk.x(), 2 * isqrt(n / c));
}

}  // namespace pellsq

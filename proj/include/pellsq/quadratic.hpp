#pragma once

#include <pellsq/intkit.hpp>

#include <ostream>

namespace pellsq {

// (h + k*sqrt(d)) / 2, required to be an algebraic integer.
class QuadInt {
 public:
  QuadInt() = default;

  static QuadInt half(Int h, Int k, Int d) {
    QuadInt q;
    q.h_ = std::move(h);
    q.k_ = std::move(k);
    q.d_ = std::move(d);
    q.check();
    return q;
  }
  static QuadInt integral(const Int& x, const Int& y, Int d) { return half(2 * x, 2 * y, std::move(d)); }

  const Int& h() const { return h_; }
  const Int& k() const { return k_; }
  const Int& d() const { return d_; }

  bool has_integral_coords() const { return (h_ & 1) == 0 && (k_ & 1) == 0; }
  // Coordinates x + y*sqrt(d); only meaningful when has_integral_coords().
  Int x() const { return h_ / 2; }
  Int y() const { return k_ / 2; }

  Rat norm() const { return Rat(h_ * h_ - d_ * k_ * k_, 4); }
  Int trace() const { return h_; }
  QuadInt conj() const { return half(h_, -k_, d_); }

  QuadInt operator-() const { return half(-h_, -k_, d_); }
  QuadInt operator+(const QuadInt& o) const {
    same_field(o);
    return half(h_ + o.h_, k_ + o.k_, d_);
  }
  QuadInt operator-(const QuadInt& o) const {
    same_field(o);
    return half(h_ - o.h_, k_ - o.k_, d_);
  }
  QuadInt operator*(const QuadInt& o) const {
    same_field(o);
    Int hh = h_ * o.h_ + d_ * k_ * o.k_;
    Int kk = h_ * o.k_ + k_ * o.h_;
    if ((hh & 1) != 0 || (kk & 1) != 0) throw DomainError("QuadInt product left the order");
    return half(hh / 2, kk / 2, d_);
  }
  QuadInt operator*(const Int& c) const { return half(h_ * c, k_ * c, d_); }
  bool operator==(const QuadInt& o) const { return h_ == o.h_ && k_ == o.k_ && d_ == o.d_; }
  bool operator!=(const QuadInt& o) const { return !(*this == o); }

  friend std::ostream& operator<<(std::ostream& os, const QuadInt& q) {
    return os << "(" << q.h_ << " + " << q.k_ << "*sqrt(" << q.d_ << "))/2";
  }

 private:
  void check() const {
    if (mod_floor(h_ * h_ - d_ * k_ * k_, 4) != 0) throw DomainError("QuadInt: not an algebraic integer");
  }
  void same_field(const QuadInt& o) const {
    if (d_ != o.d_) throw DomainError("QuadInt: mixed fields " + d_.str() + " and " + o.d_.str());
  }

  Int h_ = 0, k_ = 0, d_ = 0;
};

inline QuadInt qpow(QuadInt base, long e) {
  if (e < 0) {
    Rat n = base.norm();
    if (n != 1 && n != -1) throw DomainError("qpow: negative exponent of a non-unit");
    base = n == 1 ? base.conj() : -base.conj();
    e = -e;
  }
  QuadInt r = QuadInt::half(2, 0, base.d());
  while (e > 0) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

// a + b*sqrt(d) with rational a, b.
struct QuadRat {
  Rat a = 0, b = 0;
  Int d = 0;

  QuadRat() = default;
  QuadRat(Rat a_, Rat b_, Int d_) : a(std::move(a_)), b(std::move(b_)), d(std::move(d_)) {}
  static QuadRat from(const QuadInt& q) { return {Rat(q.h(), 2), Rat(q.k(), 2), q.d()}; }

  QuadRat operator+(const QuadRat& o) const { return {a + o.a, b + o.b, d}; }
  QuadRat operator-(const QuadRat& o) const { return {a - o.a, b - o.b, d}; }
  QuadRat operator*(const QuadRat& o) const {
    if (d != o.d) throw DomainError("QuadRat: mixed fields");
    return {a * o.a + Rat(d) * b * o.b, a * o.b + b * o.a, d};
  }
  QuadRat operator*(const Rat& c) const { return {a * c, b * c, d}; }
  QuadRat conj() const { return {a, -b, d}; }
  Rat norm() const { return a * a - Rat(d) * b * b; }
  Rat trace() const { return 2 * a; }
  bool is_zero() const { return a == 0 && b == 0; }
  bool operator==(const QuadRat& o) const { return a == o.a && b == o.b && d == o.d; }
  // Algebraic integer test via the minimal polynomial x^2 - trace x + norm.
  bool is_algebraic_integer() const {
    return denominator(trace()) == 1 && denominator(norm()) == 1;
  }
};

inline QuadRat qpow(QuadRat base, unsigned e) {
  QuadRat r{Rat(1), Rat(0), base.d};
  while (e > 0) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

// Smallest t, u > 0 with t^2 - d u^2 = +-4; norm4 records which sign.
struct Pell4 {
  Int t, u;
  int norm4 = 0;
};

namespace detail {

// Fundamental solution of x^2 - d y^2 = +-1 from the continued fraction of sqrt(d).
inline std::pair<Int, Int> pell1_min(const Int& d) {
  Int a0 = isqrt(d);
  Int m = 0, q = 1, a = a0;
  Int p_prev = 1, p = a0, r_prev = 0, r = 1;
  while (true) {
    Int n = p * p - d * r * r;
    if (n == 1 || n == -1) return {p, r};
    m = q * a - m;
    q = (d - m * m) / q;
    a = (a0 + m) / q;
    Int p_next = a * p + p_prev, r_next = a * r + r_prev;
    p_prev = std::move(p);
    p = std::move(p_next);
    r_prev = std::move(r);
    r = std::move(r_next);
  }
}

inline Int icbrt_floor(const Int& n) {
  Int r;
  mpz_root(r.backend().data(), n.backend().data(), 3);
  return r;
}

}  // namespace detail

inline Pell4 pell4_min(const Int& d) {
  if (d <= 1 || is_square(d)) throw DomainError("pell4_min: d must be a positive nonsquare");
  auto [x, y] = detail::pell1_min(d);
  int n1 = (x * x - d * y * y == 1) ? 1 : -1;
  // The +-4 fundamental unit eps satisfies eps^j = x + y sqrt(d) with j in {1,2,3}.
  {
    int n4 = 4 * n1;
    // 4t^3 - 3 n4 t = 8x
    Int c = detail::icbrt_floor(2 * x);
    for (Int t = (c > 2 ? c - 2 : Int(1)); t <= c + 2; ++t) {
      if (4 * t * t * t - 3 * n4 * t != 8 * x) continue;
      Int du2 = t * t - n4;
      if (du2 <= 0 || du2 % d != 0) continue;
      auto u = sqrt_exact(du2 / d);
      if (!u || *u == 0) continue;
      if (3 * t * t * *u + d * *u * *u * *u != 8 * y) continue;
      return {t, *u, n4};
    }
  }
  if (n1 == 1) {
    for (int n4 : {-4, 4}) {
      Int t2 = 2 * x + n4 / 2;
      auto t = sqrt_exact(t2);
      if (!t || *t == 0 || (2 * y) % *t != 0) continue;
      Int u = 2 * y / *t;
      if (*t * *t - d * u * u == n4) return {*t, u, n4};
    }
  }
  return {2 * x, 2 * y, 4 * n1};
}

}  // namespace pellsq

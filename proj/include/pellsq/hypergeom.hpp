#pragma once

#include <pellsq/representation.hpp>

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <optional>
#include <vector>

namespace pellsq {

// Coefficients c_0..c_deg of a polynomial with rational coefficients.
struct RatPoly {
  std::vector<Rat> c;

  RatPoly() = default;
  explicit RatPoly(std::vector<Rat> coeffs) : c(std::move(coeffs)) { trim(); }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  long degree() const { return static_cast<long>(c.size()) - 1; }
  Rat operator()(const Rat& z) const {
    Rat v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + *it;
    return v;
  }
  bool operator==(const RatPoly& o) const { return c == o.c; }
};

// X_{m,4,r}(z) = 2F1(-r - m/4, -r; 1 - m/4; z).
inline RatPoly xpoly(unsigned r, unsigned m = 1) {
  if (m != 1 && m != 3) throw DomainError("xpoly: m must be 1 or 3");
  Rat nu(m, 4);
  std::vector<Rat> c{Rat(1)};
  Rat term = 1;
  for (unsigned j = 0; j < r; ++j) {
    term *= (Rat(-long(r)) - nu + j) * Rat(-long(r) + long(j)) / ((Rat(1) - nu + j) * Rat(j + 1));
    c.push_back(term);
  }
  return RatPoly(std::move(c));
}

// Y_{m,4,r}(z) = z^r X_{m,4,r}(1/z).
inline RatPoly ypoly(unsigned r, unsigned m = 1) {
  RatPoly x = xpoly(r, m);
  x.c.resize(r + 1, Rat(0));
  return RatPoly(std::vector<Rat>(x.c.rbegin(), x.c.rend()));
}

struct Denominators {
  Int D, N;
};

namespace detail {

inline Int binom(unsigned n, unsigned k) {
  Int r;
  mpz_bin_uiui(r.backend().data(), n, k);
  return r;
}

// Coefficients e_i of X(1 - w) = sum e_i (-w)^i.
inline std::vector<Rat> shifted_coeffs(const RatPoly& x) {
  std::size_t n = x.c.size();
  std::vector<Rat> e(n, Rat(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) e[i] += x.c[j] * Rat(binom(unsigned(j), unsigned(i)));
  return e;
}

}  // namespace detail

// D_{4,r} and N_{d',4,r}. With both_m the lcm/gcd run over m in {1, 3};
// otherwise over m = 1, the only polynomial the approximants use.
inline Denominators denominators(unsigned r, const Int& dprime, bool both_m = false) {
  if (dprime == 0) throw DomainError("denominators: d' must be nonzero");
  std::vector<RatPoly> polys{xpoly(r, 1)};
  if (both_m) polys.push_back(xpoly(r, 3));
  Int D = 1;
  for (auto& x : polys)
    for (auto& c : x.c) D = lcm_int(D, denominator(c));
  Int N = 0;
  for (auto& x : polys) {
    std::vector<Rat> e = detail::shifted_coeffs(x);
    Int dpow = 1;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (i >= 2 && i % 2 == 0) dpow *= dprime;
      Rat v = e[i] * Rat(D) * Rat(dpow);
      if (denominator(v) != 1) throw DomainError("denominators: D_{4,r} X(1 - x) is not integral");
      N = gcd_int(N, numerator(v));
    }
  }
  return {D, abs_int(N)};
}

// N_{d',4}^2 = 2^min(v2(d'), 6).
inline Int calN_sq(const Int& dprime) { return Int(1) << std::min(v2(dprime), 6u); }

// Gamma(3/4) r!/Gamma(r + 3/4) and Gamma(r + 5/4)/(Gamma(1/4) r!) as exact rationals.
inline Rat gamma_ratio1(unsigned r) {
  Rat v = 1;
  for (unsigned i = 0; i < r; ++i) v *= Rat(4 * (i + 1), 4 * i + 3);
  return v;
}
inline Rat gamma_ratio2(unsigned r) {
  Rat v = Rat(1, 4);
  for (unsigned i = 1; i <= r; ++i) v *= Rat(4 * i + 1, 4 * i);
  return v;
}

struct RatioRow {
  unsigned r;
  Rat ratio1, ratio2;  // before normalisation
  Real norm1, norm2;   // times (N_{d',4}/e^{1.68})^r
};

struct RatioReport {
  Int dprime;
  std::vector<RatioRow> rows;
  unsigned argmax1 = 0, argmax2 = 0;
  Real max1, max2;
};

// Sweep over rmin <= r <= rmax. At r = 0 the two ratios are 1 and 1/4.
inline RatioReport denominator_ratios(unsigned rmax, const Int& dprime, bool both_m = false, unsigned rmin = 1) {
  RatioReport rep;
  rep.dprime = dprime;
  Real calN = sqrt(Real(calN_sq(dprime)));
  Real step = calN / exp(Real("1.68"));
  Real scale = pow(step, rmin);
  for (unsigned r = rmin; r <= rmax; ++r) {
    Denominators dn = denominators(r, dprime, both_m);
    Rat dn_ratio(dn.D, dn.N);
    RatioRow row{r, gamma_ratio1(r) * dn_ratio, gamma_ratio2(r) * dn_ratio, 0, 0};
    row.norm1 = to_real(row.ratio1) * scale;
    row.norm2 = to_real(row.ratio2) * scale;
    if (r == rmin || row.norm1 > rep.max1) {
      rep.max1 = row.norm1;
      rep.argmax1 = r;
    }
    if (r == rmin || row.norm2 > rep.max2) {
      rep.max2 = row.norm2;
      rep.argmax2 = r;
    }
    rep.rows.push_back(std::move(row));
    scale *= step;
  }
  return rep;
}

struct BinomialRow {
  unsigned r;
  bool first_holds, second_holds;
  bool first_equal, second_equal;
};

// 5/(24 4^r r^(1/4)) <= (1/4)...(r+1/4)/((r+1)...(2r+1)) and
// r! Gamma(3/4)/Gamma(r+3/4) <= 4 r^(1/4)/3, compared after raising to the fourth power.
inline std::vector<BinomialRow> binomial_rows(unsigned rmax) {
  std::vector<BinomialRow> out;
  for (unsigned r = 1; r <= rmax; ++r) {
    Rat lhs = Rat(1, 4);
    for (unsigned i = 1; i <= r; ++i) lhs *= Rat(4 * i + 1, 4);
    for (unsigned i = r + 1; i <= 2 * r + 1; ++i) lhs /= i;
    Rat lo = Rat(5, 24) / Rat(Int(1) << (2 * r));
    Rat a4 = lo * lo * lo * lo, b4 = lhs * lhs * lhs * lhs * Rat(r);
    Rat g = gamma_ratio1(r);
    Rat c4 = g * g * g * g, d4 = Rat(256 * Int(r), 81);
    out.push_back({r, a4 <= b4, c4 <= d4, a4 == b4, c4 == d4});
  }
  return out;
}

// Complex numbers over Real.
struct Cx {
  Real re = 0, im = 0;

  Cx() = default;
  Cx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  static Cx polar(const Real& rho, const Real& th) { return {rho * cos(th), rho * sin(th)}; }

  Cx operator+(const Cx& o) const { return {re + o.re, im + o.im}; }
  Cx operator-(const Cx& o) const { return {re - o.re, im - o.im}; }
  Cx operator*(const Cx& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
  Cx operator*(const Real& s) const { return {re * s, im * s}; }
  Cx operator/(const Cx& o) const {
    Real n = o.re * o.re + o.im * o.im;
    return {(re * o.re + im * o.im) / n, (im * o.re - re * o.im) / n};
  }
  Real abs() const { return sqrt(re * re + im * im); }
  Real arg() const { return atan2(im, re); }
};

// a + b sqrt(d) with d < 0, as a complex number.
inline Cx to_cx(const QuadRat& q) {
  if (q.d >= 0) throw DomainError("to_cx: field must be imaginary");
  return {to_real(q.a), to_real(q.b) * sqrt(to_real(Int(-q.d)))};
}

namespace detail {

inline unsigned precision_digits(unsigned bits) {
  if (bits < 64) throw DomainError("precision must be at least 64 bits");
  return digits10_for_bits(bits);
}

// Sets the float precision when it differs from the current default. Callers
// running in parallel set the precision once beforehand, so this stays a no-op.
class EnsurePrecision {
 public:
  explicit EnsurePrecision(unsigned bits) {
    unsigned want = precision_digits(bits);
    if (Real::default_precision() != want) scope_.emplace(bits);
  }

 private:
  std::optional<PrecisionScope> scope_;
};

inline Real principal_arg(const Cx& z) {
  Real a = z.arg();
  if (a <= -boost::math::constants::pi<Real>()) a += 2 * boost::math::constants::pi<Real>();
  return a;
}

}  // namespace detail

// Data of the approximation setting for (x_k + N_eps sqrt(N_alpha)).
struct OmegaData {
  Int x, y, n_alpha, t_prime, m, u1, u2;
  int n_eps = 1;
  GSet g;
};

inline OmegaData omega_data(const SeqParams& p, long k) {
  p.validate();
  if (p.n_alpha() >= 0) throw DomainError("omega data needs N_alpha < 0");
  Term tk = element(p, k);
  if (!tk.integral()) throw DomainError("omega data: x_k, y_k are not integers");
  OmegaData o;
  o.x = tk.x();
  o.y = tk.y();
  o.n_alpha = p.n_alpha();
  o.t_prime = core(o.n_alpha);
  o.m = isqrt(o.n_alpha / o.t_prime);
  o.n_eps = qpow(p.eps_step(), k).norm() == 1 ? 1 : -1;
  o.u1 = 2 * o.x;
  o.u2 = 2 * o.n_eps * o.m;
  o.g = g_quantities(o.t_prime, o.u1, o.u2);
  return o;
}

// phi_k with omega_k = e^{i phi_k} and -pi < phi_k <= pi.
inline Real omega_angle(const OmegaData& o) {
  Cx u{to_real(o.x), to_real(Int(o.n_eps * o.m)) * sqrt(to_real(Int(-o.t_prime)))};
  Cx w = u / Cx{u.re, -u.im};
  return detail::principal_arg(w);
}

struct BoundSet {
  Real E, Q, k0 = Real("0.89"), ell0, c = Real("0.75");
  Rat gn_sq;  // (|g| N_{d',4})^2
  Real phi;
  bool E_ok = false, Q_ok = false;
  // Left-hand sides of the d >= 105 inequalities: literal, and the form
  // 0.1832 |g|N (|x| + sqrt(x^2 - N_alpha))/(2|N_alpha|) built from E's numerator.
  Real lhs_e_literal, lhs_e_from_x, lhs_q_literal;
};

inline BoundSet bounds_from(const OmegaData& o, const Int& d, const Real& c, unsigned bits = 256) {
  detail::EnsurePrecision prec(bits);
  if (o.y <= 1) throw DomainError("bounds: y_k must exceed 1");
  BoundSet bs;
  bs.c = c;
  bs.gn_sq = o.g.gn_sq();
  Real gn = sqrt(to_real(bs.gn_sq));
  Real D4 = exp(Real("1.68"));
  Real nabs = to_real(abs_int(o.n_alpha));
  Real xabs = to_real(abs_int(o.x));
  Real root = sqrt(to_real(Int(o.x * o.x - o.n_alpha)));
  bs.E = gn * (xabs + root) / (2 * D4 * nabs);
  bs.Q = D4 * (2 * xabs + 2 * root) / gn;
  bs.phi = omega_angle(o);
  bs.ell0 = Real("0.2") * abs(bs.phi);
  bs.E_ok = bs.E > 1;
  bs.Q_ok = bs.Q > 1;
  Real sd = sqrt(to_real(d)), y = to_real(o.y);
  bs.lhs_e_literal = Real("0.1832") * gn * sd * y / nabs;
  bs.lhs_e_from_x = Real("0.1832") * gn * (xabs + root) / (2 * nabs);
  bs.lhs_q_literal = Real("21.12") * sd * y / gn;
  return bs;
}

inline BoundSet bounds(const SeqParams& p, long k, const Real& c = Real("0.75"), unsigned bits = 256) {
  if (p.b0 != 1) throw DomainError("bounds: b0 must be 1");
  if (p.step != 2) throw DomainError("bounds: step must be 2");
  if (k == 0) throw DomainError("bounds: k must be nonzero");
  return bounds_from(omega_data(p, k), p.d, c, bits);
}

struct R0Result {
  long r0 = 1;
  Real lb_mismatch, lb_match, threshold;
};

inline R0Result r0_and_lowerbound(const BoundSet& bs, const Real& q_abs) {
  if (!(bs.E > 1) || !(bs.Q > 1)) throw DomainError("r0: E and Q must exceed 1");
  if (!(bs.c > 0) || !(bs.c < 1)) throw DomainError("r0: c must lie in (0,1)");
  R0Result out;
  out.threshold = (bs.Q - 1 / bs.E) * bs.ell0 * q_abs / (bs.Q - 1);
  long r = 1;
  if (out.threshold >= bs.c * bs.E) {
    Real est = log(out.threshold / bs.c) / log(bs.E);
    r = std::max(1L, static_cast<long>(est) - 1);
  }
  while (!(out.threshold < bs.c * pow(bs.E, r))) ++r;
  while (r > 1 && out.threshold < bs.c * pow(bs.E, r - 1)) --r;
  out.r0 = r;
  out.lb_mismatch = (1 - bs.c) / (bs.k0 * pow(bs.Q, r));
  out.lb_match = (1 - bs.c / bs.E) / (bs.k0 * pow(bs.Q, r + 1));
  return out;
}

struct ApproxPair {
  unsigned r = 0;
  // p_r g^r and q_r g^r; g itself may be irrational.
  QuadRat P, Q;
  Rat gsq;
  Denominators dn;
  Cx p, q, residual, R;
  bool algebraic_integers = false;
};

namespace detail {

// 2F1(a, b; c; z) by its power series, |z| < 1.
inline Cx hyp2f1(const Real& a, const Real& b, const Real& c, const Cx& z, unsigned bits) {
  Cx sum{1, 0}, term{1, 0};
  Real eps = pow(Real(2), -static_cast<long>(bits) - 16);
  for (long n = 0; n < 1000000; ++n) {
    Real f = (a + n) * (b + n) / ((c + n) * (n + 1));
    term = term * z * f;
    sum = sum + term;
    if (term.abs() < eps * sum.abs() && n > 4) return sum;
  }
  throw DomainError("hyp2f1: series did not converge");
}

}  // namespace detail

// The residual q_r omega^(1/4) - p_r cancels about log2|q_r| bits, so the float
// part runs at bits plus that magnitude. Changes the global precision while it runs.
inline ApproxPair approx_pair_from(const OmegaData& o, unsigned r, unsigned bits = 256) {
  detail::precision_digits(bits);
  ApproxPair ap;
  ap.r = r;
  ap.gsq = o.g.gsq;
  ap.dn = denominators(r, o.g.dprime);
  Rat scale(ap.dn.D, ap.dn.N);
  RatPoly x = xpoly(r);
  QuadRat u{Rat(o.u1, 2), Rat(o.u2, 2), o.t_prime};
  QuadRat beta = u.conj();
  std::vector<QuadRat> up{QuadRat{1, 0, o.t_prime}}, bp{QuadRat{1, 0, o.t_prime}};
  for (unsigned j = 0; j < r; ++j) {
    up.push_back(up.back() * u);
    bp.push_back(bp.back() * beta);
  }
  ap.P = QuadRat{0, 0, o.t_prime};
  ap.Q = QuadRat{0, 0, o.t_prime};
  for (unsigned j = 0; j <= r; ++j) {
    ap.P = ap.P + up[j] * bp[r - j] * x.c[j];
    ap.Q = ap.Q + up[r - j] * bp[j] * x.c[j];
  }
  ap.P = ap.P * scale;
  ap.Q = ap.Q * scale;
  Rat gpow = 1;
  for (unsigned j = 0; j < r; ++j) gpow *= o.g.gsq;
  QuadRat p2 = ap.P * ap.P * (1 / gpow), q2 = ap.Q * ap.Q * (1 / gpow);
  ap.algebraic_integers = p2.is_algebraic_integer() && q2.is_algebraic_integer();

  long mag = 0;
  for (const Rat* v : {&ap.P.a, &ap.P.b, &ap.Q.a, &ap.Q.b}) {
    if (*v == 0) continue;
    mag = std::max(mag, long(msb(abs_int(numerator(*v)))) - long(msb(denominator(*v))));
  }
  mag += long(msb(abs_int(o.t_prime)));
  PrecisionScope prec(bits + static_cast<unsigned>(std::max(0L, mag)) + 64);

  Real gr = pow(sqrt(to_real(o.g.gsq)), r);
  ap.p = to_cx(ap.P) * (1 / gr);
  ap.q = to_cx(ap.Q) * (1 / gr);
  Cx uc = to_cx(u), bc = to_cx(beta);
  Cx w = uc / bc;
  Real phi = detail::principal_arg(w);
  Cx w4 = Cx::polar(Real(1), phi / 4);
  ap.residual = ap.q * w4 - ap.p;

  if (!((w - Cx{1, 0}).abs() < 1)) throw DomainError("approx_pair: |omega - 1| must be < 1");
  Real nu = Real(1) / 4;
  Real coef = 1;
  for (unsigned i = 0; i <= r; ++i) coef *= (nu + i);
  for (unsigned i = r + 1; i <= 2 * r + 1; ++i) coef /= i;
  Cx wm1 = w - Cx{1, 0};
  Cx pw{1, 0};
  for (unsigned i = 0; i < 2 * r + 1; ++i) pw = pw * wm1;
  Cx f = detail::hyp2f1(Real(r + 1) - nu, Real(r + 1), Real(2 * r + 2), Cx{1, 0} - w, bits);
  Cx rr = pw * f * coef;
  Cx bg{bc.re / sqrt(to_real(o.g.gsq)), bc.im / sqrt(to_real(o.g.gsq))};
  Cx bgr{1, 0};
  for (unsigned i = 0; i < r; ++i) bgr = bgr * bg;
  ap.R = bgr * rr * to_real(scale);
  return ap;
}

inline ApproxPair approx_pair(const SeqParams& p, long k, unsigned r, unsigned bits = 256) {
  detail::precision_digits(bits);
  if (p.step != 2) throw DomainError("approx_pair: step must be 2");
  if (k == 0) throw DomainError("approx_pair: k must be nonzero");
  OmegaData o = omega_data(p, k);
  if (o.y < 2) throw DomainError("approx_pair: y_k must be at least 2");
  return approx_pair_from(o, r, bits);
}

// p_r q_{r+1} != p_{r+1} q_r, decided on the numerators.
inline bool nondegenerate(const ApproxPair& a, const ApproxPair& b) { return !(a.P * b.Q - b.P * a.Q).is_zero(); }

// c2 = (2 - c1^2) sqrt(4 - c1^2) for 0 < c1 < sqrt(2).
inline Real omega_factor_inv(const Real& c1) {
  if (!(c1 > 0) || !(c1 * c1 < 2)) throw DomainError("omega_factor_inv: c1 must lie in (0, sqrt 2)");
  return (2 - c1 * c1) * sqrt(4 - c1 * c1);
}

// Smallest positive root of x^8 - 8x^6 + 20x^4 - 16x^2 + c0^2 for 0 < c0 <= 2.
inline Real omega_factors(const Real& c0) {
  if (!(c0 > 0) || c0 > 2) throw DomainError("omega_factors: c0 must lie in (0, 2]");
  // In X = x^2 the polynomial is X (X-2)^2 (X-4) + c0^2, decreasing on [0, 2 - sqrt 2].
  auto h = [&](const Real& X) { return X * (X - 2) * (X - 2) * (X - 4) + c0 * c0; };
  Real lo = 0, hi = 2 - sqrt(Real(2));
  Real tol = pow(Real(2), -static_cast<long>(Real::default_precision() * 3));
  for (int i = 0; i < 4000 && hi - lo > tol; ++i) {
    Real mid = (lo + hi) / 2;
    (h(mid) > 0 ? lo : hi) = mid;
  }
  return sqrt((lo + hi) / 2);
}

// j minimising |omega^(1/4) - i^j z| with the principal fourth root; ties go to the smaller j.
inline int quartic_root_alignment(const Cx& omega, const Cx& z) {
  Cx w4 = Cx::polar(Real(1), detail::principal_arg(omega) / 4);
  Cx rot[4] = {Cx{1, 0}, Cx{0, 1}, Cx{-1, 0}, Cx{0, -1}};
  int best = 0;
  Real bestd;
  for (int j = 0; j < 4; ++j) {
    Real dist = (w4 - rot[j] * z).abs();
    if (j == 0 || dist < bestd) {
      bestd = dist;
      best = j;
    }
  }
  return best;
}

}  // namespace pellsq

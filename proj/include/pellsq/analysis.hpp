#pragma once

#include <pellsq/hypergeom.hpp>
#include <pellsq/representation.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace pellsq {

// ---------------------------------------------------------------------------
// Gap principle

enum class GapPart { A, B };

struct GapVerdict {
  GapPart part = GapPart::A;
  bool applicable = false;
  std::string reason;
  Rat constant;   // 57.32, 15.36 or 182
  Rat threshold;  // y_j must exceed this
  bool satisfied = false;
};

namespace detail {

inline Int b_of(const SeqParams& p) {
  auto b = sqrt_exact(p.b0);
  if (!b) throw DomainError("b0 must be a perfect square");
  return *b;
}

inline Rat cube(const Rat& x) { return x * x * x; }

}  // namespace detail

inline GapVerdict gap_check(const SeqParams& p, const SquareHit& yi, const SquareHit& yj, const Int& fi,
                            const Int& fj, GapPart part) {
  p.validate();
  Int n = p.n_alpha();
  if (n >= 0) throw DomainError("gap_check: N_alpha must be negative");
  if (yi.k == 0 || yj.k == 0) throw DomainError("gap_check: indices must be nonzero");
  if (yj.y <= yi.y) throw DomainError("gap_check: need y_j > y_i");
  bool sq = is_square(-n);
  if (part == GapPart::A && !sq) throw DomainError("gap_check: part (a) needs -N_alpha a square");
  if (part == GapPart::B && sq) throw DomainError("gap_check: part (b) needs -N_alpha not a square");
  Int b = detail::b_of(p), b2 = b * b, na = -n;

  GapVerdict v;
  v.part = part;
  Rat y = Rat(yi.y);
  bool floor_root = yi.y * yi.y * p.d >= 16 * na;  // y_i >= 4 sqrt(|N|/d)
  if (part == GapPart::A) {
    v.constant = Rat(5732, 100);
    Rat ratio(p.d, b2 * na);
    v.threshold = v.constant * ratio * ratio * detail::cube(y);
    bool floor_lin = yi.y * p.d >= b2 * na;
    v.applicable = floor_root && floor_lin;
    if (!floor_root) v.reason = "y_i < 4 sqrt(|N_alpha|/d)";
    else if (!floor_lin) v.reason = "y_i < b^2 |N_alpha|/d";
  } else {
    if (fi == 0 || fj == 0) throw DomainError("gap_check: f values must be nonzero");
    bool big = 100 * yi.y * p.d >= 427 * b2 * na * na;
    v.constant = big ? Rat(182) : Rat(1536, 100);
    Rat ratio(b2 * p.d, abs_int(fi * fj) * na);
    v.threshold = v.constant * ratio * ratio * detail::cube(y);
    v.applicable = floor_root;
    if (!floor_root) v.reason = "y_i < 4 sqrt(|N_alpha|/d)";
  }
  v.satisfied = Rat(yj.y) > v.threshold;
  return v;
}

struct GapPair {
  SquareHit i, j;
  GapVerdict verdict;
};

// Every ordered pair of square hits with distinct values and nonzero index.
// Part (b) leaves the choice of pair open, so all of them are reported.
inline std::vector<GapPair> gap_pairs(const SeqParams& p, const std::vector<SquareHit>& hits) {
  Int n = p.n_alpha();
  GapPart part = is_square(-n) ? GapPart::A : GapPart::B;
  std::vector<SquareHit> hs;
  for (auto& h : hits)
    if (h.k != 0) hs.push_back(h);
  std::map<long, Int> fs;
  if (part == GapPart::B)
    for (auto& h : hs) fs[h.k] = decompose(p, h.k).f;
  std::vector<GapPair> out;
  for (auto& a : hs)
    for (auto& c : hs) {
      if (!(c.y > a.y)) continue;
      Int fi = part == GapPart::B ? fs[a.k] : Int(1), fj = part == GapPart::B ? fs[c.k] : Int(1);
      out.push_back({a, c, gap_check(p, a, c, fi, fj, part)});
    }
  std::sort(out.begin(), out.end(), [](const GapPair& x, const GapPair& y) {
    return std::tie(x.i.y, x.j.y) < std::tie(y.i.y, y.j.y);
  });
  return out;
}

// ---------------------------------------------------------------------------
// At most one square above max(1, 76 |N|^(3/2) / (sqrt(d) (|g|N)^2))

struct ThresholdValue {
  Int n_abs, d, gn_sq;

  // y > threshold, decided by squaring: y^2 d gn^4 > 76^2 |N|^3.
  bool exceeded_by(const Int& y) const {
    if (y <= 1) return false;
    return y * y * d * gn_sq * gn_sq > Int(76 * 76) * n_abs * n_abs * n_abs;
  }
  Real value(unsigned bits = 256) const {
    detail::EnsurePrecision prec(bits);
    Real t = 76 * pow(to_real(n_abs), Real("1.5")) / (sqrt(to_real(d)) * to_real(gn_sq));
    return t < 1 ? Real(1) : t;
  }
};

inline ThresholdValue prop41_threshold(const SeqParams& p) {
  p.validate();
  if (p.b0 != 1) throw DomainError("prop41_threshold: b0 must be 1");
  Int n = p.n_alpha();
  if (n >= 0) throw DomainError("prop41_threshold: N_alpha must be negative");
  if (!is_square(-n)) throw DomainError("prop41_threshold: -N_alpha must be a square");
  return {-n, p.d, gn_closed_form(p)};
}

inline std::size_t count_above(const ThresholdValue& th, const std::vector<SquareHit>& hits) {
  std::set<Int> vals;
  for (auto& h : hits)
    if (th.exceeded_by(h.y)) vals.insert(h.y);
  return vals.size();
}

// ---------------------------------------------------------------------------
// x^2 - d y^4 = N by enumeration of y; complete up to y_bound only.

inline std::vector<std::pair<Int, Int>> quartic_solutions(const Int& d, const Int& n, const Int& y_bound) {
  if (d <= 0 || is_square(d)) throw DomainError("quartic_solutions: d must be a positive nonsquare");
  if (y_bound < 1) throw DomainError("quartic_solutions: y_bound must be >= 1");
  std::vector<std::pair<Int, Int>> out;
  for (Int y = 1; y <= y_bound; ++y) {
    Int y2 = y * y;
    Int v = d * y2 * y2 + n;
    if (v <= 0) continue;
    if (auto x = sqrt_exact(v)) out.emplace_back(*x, y);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scan of the two d >= 105 inequalities over (a, d, k)

struct InequalityPoint {
  Int a, d, x, y, n_alpha;
  long k = 0;
  Real value;
};

struct InequalityReport {
  long d_min = 2, d_max = 2, claim_d = 105;
  std::size_t checked = 0;
  // Minima over d >= claim_d.
  std::optional<InequalityPoint> min_e_from_x, min_e_literal, min_q;
  std::vector<InequalityPoint> violations_e, violations_q;  // d >= claim_d
  std::vector<InequalityPoint> e_below_one;                 // E of the bound set, any d
  std::vector<InequalityPoint> e_proxy_below_one;           // from-x form, any d
};

namespace detail {

inline void keep_min(std::optional<InequalityPoint>& slot, const InequalityPoint& pt) {
  if (!slot || pt.value < slot->value) slot = pt;
}

}  // namespace detail

inline InequalityReport lemma313_scan(long d_min, long d_max, unsigned bits = 256) {
  if (d_min < 2) throw DomainError("lemma313_scan: d_min must be >= 2");
  detail::EnsurePrecision prec(bits);
  InequalityReport rep;
  rep.d_min = d_min;
  rep.d_max = d_max;
  const Real e_claim("1.13"), q_claim(217);
  for (long dl = d_min; dl <= d_max; ++dl) {
    Int d(dl);
    if (is_square(d)) continue;
    Pell4 e = pell4_min(d);
    for (long al = 1; Int(al) * al < d; ++al) {
      SeqParams p{Int(al), Int(1), d, e.t, e.u, 2};
      Int n = p.n_alpha(), na = -n;
      // Stopping rule with |g|N replaced by its lower bound 2^(1 + min(v2(N)/2, 2)).
      Real lowg = pow(Real(2), 1 + std::min(Real(v2(na)) / 2, Real(2)));
      Real sd = sqrt(to_real(d));
      auto wanted = [&](const Rat& y) {
        Real ry = to_real(y);
        return Real("0.1832") * lowg * sd * ry / to_real(na) < 2 || Real("21.12") * ry / lowg < 300;
      };
      for (int dir : {1, -1}) {
        Rat prev(p.b0);
        for (long j = 1; j <= 400; ++j) {
          long k = dir * j;
          Term tk = element(p, k);
          Rat y(tk.y2, 2);
          bool rising = y > prev;
          prev = y;
          if (!wanted(y)) {
            if (rising) break;
            continue;
          }
          if (!tk.integral() || tk.y() <= 1) continue;
          OmegaData o = omega_data(p, k);
          BoundSet bs = bounds_from(o, d, Real("0.75"), bits);
          ++rep.checked;
          InequalityPoint pt{p.a, d, o.x, o.y, n, k, Real(0)};
          if (bs.E < 1) {
            pt.value = bs.E;
            rep.e_below_one.push_back(pt);
          }
          if (bs.lhs_e_from_x < 1) {
            pt.value = bs.lhs_e_from_x;
            rep.e_proxy_below_one.push_back(pt);
          }
          if (dl < rep.claim_d) continue;
          pt.value = bs.lhs_e_from_x;
          detail::keep_min(rep.min_e_from_x, pt);
          if (!(bs.lhs_e_from_x > e_claim)) rep.violations_e.push_back(pt);
          pt.value = bs.lhs_e_literal;
          detail::keep_min(rep.min_e_literal, pt);
          if (!(bs.lhs_e_literal > e_claim)) rep.violations_e.push_back(pt);
          pt.value = bs.lhs_q_literal;
          detail::keep_min(rep.min_q, pt);
          if (!(bs.lhs_q_literal > q_claim)) rep.violations_q.push_back(pt);
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Congruence sieve over residues (a, t, d) mod M

enum class NCond { Any, Square, OddSquare, EvenSquare, Odd, Even };
enum class WhichY { Plus, Minus, Either };

struct SieveSpec {
  long modulus = 16;
  long u = 1;
  int sign = 4;  // t^2 - d u^2 = sign
  NCond ncond = NCond::Any;
  long b0 = 1;
  WhichY which = WhichY::Either;
};

struct SievePrime {
  long p = 0;
  unsigned cap = 0;  // exponent of p in M
  unsigned min_va = 0, min_vd = 0;
};

struct SieveReport {
  SieveSpec spec;
  std::size_t survivors = 0;
  std::vector<std::array<long, 3>> sample;  // (a, t, d), first few in lexicographic order
  std::vector<SievePrime> primes;
  Int forced_gcd = 1;  // divides gcd(a^2, d) for every survivor
  std::set<long> survivor_u;
};

inline std::string describe(NCond c) {
  switch (c) {
    case NCond::Any: return "any";
    case NCond::Square: return "square";
    case NCond::OddSquare: return "odd-square";
    case NCond::EvenSquare: return "even-square";
    case NCond::Odd: return "odd";
    case NCond::Even: return "even";
  }
  return "?";
}

inline std::optional<NCond> parse_ncond(const std::string& s) {
  for (NCond c : {NCond::Any, NCond::Square, NCond::OddSquare, NCond::EvenSquare, NCond::Odd, NCond::Even})
    if (describe(c) == s) return c;
  return std::nullopt;
}

namespace detail {

inline unsigned capped_val(long x, long p, unsigned cap) {
  if (x == 0) return cap;
  unsigned v = 0;
  while (x % p == 0 && v < cap) {
    x /= p;
    ++v;
  }
  return v;
}

}  // namespace detail

// The N_alpha conditions are on -N_alpha = b0^2 d - a^2. Parity conditions only
// make sense for even M; for odd M they are vacuous.
inline SieveReport congruence_sieve(const SieveSpec& spec, std::size_t sample_max = 32) {
  const long M = spec.modulus;
  if (M < 2 || M > 1000000) throw DomainError("congruence_sieve: modulus must be in [2, 10^6]");
  if (spec.sign != 4 && spec.sign != -4) throw DomainError("congruence_sieve: sign must be +4 or -4");
  using U = unsigned long long;
  auto md = [M](long long v) { return static_cast<long>(((v % M) + M) % M); };
  const long u = md(spec.u), b0 = md(spec.b0), b02 = md(static_cast<long long>(b0) * b0);

  // Residues of s^2 by parity of s; s runs over [0, 2M) so parity is meaningful for even M.
  std::vector<char> sq_any(M, 0), sq_odd(M, 0), sq_even(M, 0), four_sq(M, 0);
  for (long s = 0; s < 2 * M; ++s) {
    long r = md(static_cast<long long>(s) * s);
    sq_any[r] = 1;
    (s & 1 ? sq_odd : sq_even)[r] = 1;
    four_sq[md(4LL * r)] = 1;
  }
  auto n_ok = [&](long neg_n) {
    switch (spec.ncond) {
      case NCond::Any: return true;
      case NCond::Square: return sq_any[neg_n] != 0;
      case NCond::OddSquare: return sq_odd[neg_n] != 0 && (M % 2 == 1 || neg_n % 2 == 1);
      case NCond::EvenSquare: return sq_even[neg_n] != 0 && (M % 2 == 1 || neg_n % 2 == 0);
      case NCond::Odd: return M % 2 == 1 || neg_n % 2 == 1;
      case NCond::Even: return M % 2 == 1 || neg_n % 2 == 0;
    }
    return false;
  };

  // Pairs (t, d) with t^2 - d u^2 = sign mod M.
  long u2 = md(static_cast<long long>(u) * u);
  std::vector<std::vector<long>> d_by_du2(M);
  for (long d = 0; d < M; ++d) d_by_du2[md(static_cast<long long>(d) * u2)].push_back(d);
  std::vector<std::pair<long, long>> td;
  for (long t = 0; t < M; ++t)
    for (long d : d_by_du2[md(static_cast<long long>(t) * t - spec.sign)]) td.emplace_back(t, d);
  if (static_cast<U>(td.size()) * static_cast<U>(M) > 4000000000ULL)
    throw DomainError("congruence_sieve: modulus " + std::to_string(M) + " is infeasible for enumeration");

  SieveReport rep;
  rep.spec = spec;
  Factorization fm = factorize(Int(M));
  for (auto& [q, e] : fm.factors) rep.primes.push_back({static_cast<long>(q), e, e, e});

  std::vector<std::array<long, 3>> surv;
  for (auto& [t, d] : td) {
    long base = md(static_cast<long long>(b0) * md(static_cast<long long>(t) * t + static_cast<long long>(d) * u2));
    long cross = md(2LL * t * u);
    for (long a = 0; a < M; ++a) {
      long neg_n = md(static_cast<long long>(b02) * d - static_cast<long long>(a) * a);
      if (!n_ok(neg_n)) continue;
      long ac = md(static_cast<long long>(a) * cross);
      bool plus = four_sq[md(base + ac)] != 0, minus = four_sq[md(base - ac)] != 0;
      bool ok = spec.which == WhichY::Plus ? plus : spec.which == WhichY::Minus ? minus : (plus || minus);
      if (!ok) continue;
      ++rep.survivors;
      if (rep.sample.size() < sample_max) rep.sample.push_back({a, t, d});
      for (auto& pr : rep.primes) {
        pr.min_va = std::min(pr.min_va, detail::capped_val(a, pr.p, pr.cap));
        pr.min_vd = std::min(pr.min_vd, detail::capped_val(d, pr.p, pr.cap));
      }
    }
  }
  std::sort(rep.sample.begin(), rep.sample.end());
  if (rep.survivors == 0) {
    for (auto& pr : rep.primes) pr.min_va = pr.min_vd = 0;
    return rep;
  }
  for (auto& pr : rep.primes) {
    unsigned e = std::min(std::min(2 * pr.min_va, pr.min_vd), pr.cap);
    rep.forced_gcd *= boost::multiprecision::pow(Int(pr.p), e);
  }
  return rep;
}

// Runs the sieve for every u mod M and collects which residues admit survivors.
inline std::set<long> sieve_u_classes(SieveSpec spec) {
  std::set<long> out;
  for (long u = 0; u < spec.modulus; ++u) {
    spec.u = u;
    if (congruence_sieve(spec, 0).survivors > 0) out.insert(u);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Case split for b = 1, -N_alpha a square

struct Thm14Class {
  char label = 'c';
  int bound = 2;
  Int n_alpha, gcd_a2d, y_plus, y_minus;
  int n_eps = 1;
  bool y_plus_square = false, y_minus_square = false;
};

inline Thm14Class classify_theorem14(const SeqParams& p) {
  p.validate();
  if (p.b0 != 1) throw DomainError("classify_theorem14: b0 must be 1");
  Int n = p.n_alpha();
  if (n >= 0) throw DomainError("classify_theorem14: N_alpha must be negative");
  if (!is_square(-n)) throw DomainError("classify_theorem14: -N_alpha = " + Int(-n).str() + " is not a square");
  SeqParams q = p;
  q.step = 2;
  Thm14Class c;
  c.n_alpha = n;
  c.n_eps = q.n_eps();
  c.gcd_a2d = gcd_int(p.a * p.a, p.d);
  Term t1 = element(q, 1), tm1 = element(q, -1);
  c.y_plus = t1.y2 / 2;
  c.y_minus = tm1.y2 / 2;
  c.y_plus_square = t1.integral() && is_square(t1.y());
  c.y_minus_square = tm1.integral() && is_square(tm1.y());
  bool one_square = c.y_plus_square || c.y_minus_square;
  if (p.u == 1 && c.n_eps == -1 && mod_floor(n, 16) == 12 && (c.gcd_a2d == 1 || c.gcd_a2d == 4) && one_square) {
    c.label = 'a';
    c.bound = 3;
  } else if (p.u == 2 && c.n_eps == -1 && (n & 1) != 0 && c.gcd_a2d == 1 && one_square) {
    c.label = 'b';
    c.bound = 3;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Conjecture scans

enum class AMode { Near, Small, Both };

struct ScanRanges {
  long b_max = 1, d_min = 2, d_max = 10;
  AMode a_mode = AMode::Both;
  long a_radius = 1000;  // near mode: around sqrt(d b^4)
  long a_small = 2000;   // small mode: 1..a_small
  long window = 40;      // step 2; step 1 uses step1_window
  long step1_window = 80;
  bool step1 = true, step2 = true;
  bool squarefree_only = true;
  bool negative_square_only = false;  // keep only N_alpha < 0 with -N_alpha a square
};

enum class CoreClass { Square, SmallPrimeShape, PrimePower, General };

inline std::string describe(CoreClass c) {
  switch (c) {
    case CoreClass::Square: return "square";
    case CoreClass::SmallPrimeShape: return "2^l p^m";
    case CoreClass::PrimePower: return "prime-power";
    case CoreClass::General: return "general";
  }
  return "?";
}

struct SequenceRecord {
  SeqParams p;
  Int n_alpha;
  CoreClass core_class = CoreClass::General;
  std::vector<SquareHit> hits;
  std::size_t distinct_count = 0;
  int limit = 4;
  std::optional<ThresholdValue> threshold;
  std::size_t above_threshold = 0;
  std::optional<Thm14Class> thm14;
  std::vector<std::string> violations;
};

namespace detail {

inline bool is_prime_power(const Int& n) {
  if (n < 2) return false;
  return factorize(n).factors.size() == 1;
}

}  // namespace detail

// Classifies |N_alpha| and evaluates the conjectured bound for this step.
inline SequenceRecord classify_sequence(const SeqParams& p, const SquareScan& scan) {
  SequenceRecord r;
  r.p = p;
  r.n_alpha = p.n_alpha();
  r.hits = scan.hits;
  r.distinct_count = scan.distinct_count;
  Int na = abs_int(r.n_alpha);
  bool neg = r.n_alpha < 0;
  if (is_square(na)) {
    r.core_class = CoreClass::Square;
  } else if (p.step == 2) {
    Int odd;
    bool two;
    r.core_class = detail::core_is_small_prime_shape(core(na), odd, two) ? CoreClass::SmallPrimeShape
                                                                           : CoreClass::General;
  } else {
    r.core_class = detail::is_prime_power(na) ? CoreClass::PrimePower : CoreClass::General;
  }
  if (p.step == 2) {
    r.limit = r.core_class == CoreClass::Square ? 2 : r.core_class == CoreClass::SmallPrimeShape ? 3 : 4;
    if (p.b0 == 1 && neg) r.limit = std::min(r.limit, is_square(na) ? 2 : 3);
  } else {
    r.limit = r.core_class == CoreClass::General ? 4 : 3;
  }
  if (int(r.distinct_count) > r.limit)
    r.violations.push_back("conjecture bound " + std::to_string(r.limit) + " exceeded");
  if (p.step == 2 && p.b0 == 1 && neg && is_square(na)) {
    r.threshold = prop41_threshold(p);
    r.above_threshold = count_above(*r.threshold, r.hits);
    if (r.above_threshold > 1) r.violations.push_back("more than one square above the threshold");
    r.thm14 = classify_theorem14(p);
    if (int(r.distinct_count) > r.thm14->bound)
      r.violations.push_back("case (" + std::string(1, r.thm14->label) + ") bound " +
                             std::to_string(r.thm14->bound) + " exceeded");
  }
  return r;
}

inline std::vector<Int> a_values(const ScanRanges& rg, const Int& b, const Int& d) {
  std::vector<Int> out;
  Int b2 = b * b;
  auto keep = [&](const Int& a) { return a >= 1 && is_squarefree(gcd_int(a, b2)); };
  if (rg.a_mode != AMode::Near)
    for (long a = 1; a <= rg.a_small; ++a)
      if (keep(Int(a))) out.emplace_back(a);
  if (rg.a_mode != AMode::Small) {
    Int c = isqrt(d * b2 * b2);
    Int lo = c - rg.a_radius, hi = c + 1 + rg.a_radius;
    if (lo < 1) lo = 1;
    for (Int a = lo; a <= hi; ++a)
      if (keep(a) && (rg.a_mode == AMode::Near || a > rg.a_small)) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct ScanSummary {
  std::size_t sequences = 0, with_violation = 0;
  std::map<std::string, std::size_t> max_distinct;  // per class label
};

inline unsigned default_jobs() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

// Work units are (b, d) pairs in ascending order; records within a unit are
// ordered by (a, step 2 before step 1). Output order does not depend on jobs.
inline ScanSummary conjecture_scan(const ScanRanges& rg, const std::function<void(const SequenceRecord&)>& sink,
                                   unsigned jobs = 1) {
  if (jobs == 0) jobs = 1;
  std::vector<std::pair<long, long>> units;
  for (long b = 1; b <= rg.b_max; ++b)
    for (long d = std::max(2L, rg.d_min); d <= rg.d_max; ++d) {
      Int dd(d);
      if (is_square(dd)) continue;
      if (rg.squarefree_only && !is_squarefree(dd)) continue;
      units.emplace_back(b, d);
    }
  std::map<long, Pell4> units_eps;
  for (auto& [b, d] : units)
    if (!units_eps.count(d)) units_eps.emplace(d, pell4_min(Int(d)));

  auto run_unit = [&](std::size_t idx) {
    auto [b, d] = units[idx];
    const Pell4& e = units_eps.at(d);
    std::vector<SequenceRecord> recs;
    Int bb(b), b0 = bb * bb, dd(d);
    for (const Int& a : a_values(rg, bb, dd)) {
      Int n = a * a - b0 * b0 * dd;
      if (rg.negative_square_only && !(n < 0 && is_square(-n))) continue;
      for (int step : {2, 1}) {
        if ((step == 2 && !rg.step2) || (step == 1 && !rg.step1)) continue;
        SeqParams p{a, b0, dd, e.t, e.u, step};
        recs.push_back(classify_sequence(p, scan_squares(p, step == 2 ? rg.window : rg.step1_window)));
      }
    }
    return recs;
  };

  ScanSummary sum;
  auto emit = [&](const std::vector<SequenceRecord>& recs) {
    for (auto& r : recs) {
      ++sum.sequences;
      if (!r.violations.empty()) ++sum.with_violation;
      std::string key = "step" + std::to_string(r.p.step) + "/" + describe(r.core_class);
      sum.max_distinct[key] = std::max(sum.max_distinct[key], r.distinct_count);
      sink(r);
    }
  };

  const std::size_t batch = std::max<std::size_t>(1, 4 * std::size_t(jobs));
  for (std::size_t start = 0; start < units.size(); start += batch) {
    std::size_t end = std::min(units.size(), start + batch);
    std::vector<std::vector<SequenceRecord>> out(end - start);
    if (jobs == 1) {
      for (std::size_t i = start; i < end; ++i) out[i - start] = run_unit(i);
    } else {
      std::atomic<std::size_t> next{start};
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
          for (std::size_t i; (i = next.fetch_add(1)) < end;) out[i - start] = run_unit(i);
        });
      for (auto& th : pool) th.join();
    }
    for (auto& recs : out) emit(recs);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Listed examples and families

struct ListedExample {
  std::string label;
  SeqParams p;
  std::vector<std::pair<long, Int>> squares;  // (k, sqrt(y_k))
};

// Four-square examples for d = 2, t = u = 2 (step 2).
inline std::vector<ListedExample> table_d2() {
  struct Row {
    const char* a;
    long b;
    std::array<long, 4> k;
    std::array<const char*, 4> r;
  };
  static const Row rows[] = {
      {"1", 3, {0, -1, 3, -5}, {"3", "5", "31", "167"}},
      {"1019", 27, {0, 1, -3, -7}, {"27", "65", "29", "983"}},
      {"167", 13, {0, 1, -3, 4}, {"13", "29", "71", "407"}},
      {"157", 29, {0, -1, 3, -4}, {"29", "47", "307", "649"}},
      {"1", 41, {0, -1, -9, 11}, {"41", "71", "80753", "470861"}},
      {"1633", 65, {0, -1, -4, 7}, {"65", "97", "1331", "24791"}},
      {"48479", 211, {0, -3, 4, -7}, {"211", "1007", "6743", "34205"}},
      {"45649", 677, {0, -1, -4, 4}, {"677", "1133", "15679", "16825"}},
      {"1940147", 1217, {0, -3, 4, -11}, {"1217", "3289", "40573", "3794239"}},
      {"600589", 2213, {0, -1, -4, 4}, {"2213", "3673", "50801", "55415"}},
      {"20509501", 8689, {0, -1, 3, -4}, {"8689", "13619", "94393", "187603"}},
      {"255488029", 13457, {0, -1, 3, -4}, {"13457", "5683", "189241", "15821"}},
      {"409660129", 17023, {0, -1, -4, -8}, {"17023", "7073", "7949", "269495"}},
      {"3032771269", 46313, {0, -1, -4, -8}, {"46313", "19213", "15269", "516625"}},
  };
  std::vector<ListedExample> out;
  for (auto& r : rows) {
    ListedExample ex;
    ex.label = std::string("d=2 a=") + r.a + " b=" + std::to_string(r.b);
    ex.p = {Int(r.a), Int(r.b * r.b), Int(2), Int(2), Int(2), 2};
    for (int i = 0; i < 4; ++i) ex.squares.emplace_back(r.k[i], Int(r.r[i]));
    std::sort(ex.squares.begin(), ex.squares.end());
    out.push_back(std::move(ex));
  }
  return out;
}

namespace detail {

inline ListedExample listed(std::string label, long d, long t, long u, const char* a, long b, int step,
                            std::vector<std::pair<long, long>> sq) {
  ListedExample ex{std::move(label), {Int(a), Int(b * b), Int(d), Int(t), Int(u), step}, {}};
  for (auto& [k, r] : sq) ex.squares.emplace_back(k, Int(r));
  std::sort(ex.squares.begin(), ex.squares.end());
  return ex;
}

}  // namespace detail

// Step-1 examples with three or four distinct squares, keyed by (d, t, u, a, b).
inline std::vector<ListedExample> step1_examples() {
  using detail::listed;
  return {
      listed("(5,1,1,43,3)", 5, 1, 1, "43", 3, 1, {{-3, 5}, {0, 3}, {11, 53}}),
      listed("(10,6,2,1,1)", 10, 6, 2, "1", 1, 1, {{0, 1}, {1, 2}, {2, 5}}),
      listed("(5,1,1,153,4)", 5, 1, 1, "153", 4, 1, {{-3, 11}, {0, 4}, {30, 8862}}),
      listed("(51,100,14,2,1)", 51, 100, 14, "2", 1, 1, {{-1, 6}, {0, 1}, {1, 8}}),
      listed("(5,1,1,7,1)", 5, 1, 1, "7", 1, 1, {{-9, 9}, {0, 1}, {1, 2}, {3, 3}}),
      listed("(6,10,4,2,3)", 6, 10, 4, "2", 3, 1, {{-3, 63}, {0, 3}, {1, 7}, {3, 69}}),
  };
}

// Further step-2 parameter sets with four distinct squares; only the count is listed.
inline std::vector<SeqParams> more_four_square_examples() {
  auto P = [](long d, long t, long u, const char* a, long b) {
    return SeqParams{Int(a), Int(b * b), Int(d), Int(t), Int(u), 2};
  };
  return {P(3, 4, 2, "672", 91),   P(6, 10, 4, "78", 7),       P(6, 10, 4, "34986", 149),
          P(6, 10, 4, "3663828", 2257), P(30, 22, 4, "826320", 1111), P(37, 12, 2, "138", 5)};
}

struct FamilyMember {
  SeqParams p;
  std::vector<std::pair<long, Int>> squares;  // predicted (k, sqrt(y_k))
};

// n odd >= 5: a = (n^2-9)/4, d = (n^4-2n^2+17)/16, t = (n^2-1)/2, u = 2; N_alpha = 4 - n^2.
inline std::vector<FamilyMember> family_three_squares(long count) {
  std::vector<FamilyMember> out;
  for (long n = 5; long(out.size()) < count; n += 2) {
    Int N(n), n2 = N * N;
    SeqParams p{(n2 - 9) / 4, Int(1), (n2 * n2 - 2 * n2 + 17) / 16, (n2 - 1) / 2, Int(2), 2};
    if (is_square(p.d)) continue;
    out.push_back({p, {{-1, N}, {0, Int(1)}, {1, (n2 - 3) / 2}}});
  }
  return out;
}

// n = 1 mod 4, n > 5, 5 does not divide n: a = (n-5)/4, d = (n^2+6n+25)/16, t = 2a+4, u = 2; N_alpha = -n.
inline std::vector<FamilyMember> family_prime_norm(long count) {
  std::vector<FamilyMember> out;
  for (long n = 9; long(out.size()) < count; n += 4) {
    if (n % 5 == 0) continue;
    Int N(n);
    Int a = (N - 5) / 4;
    SeqParams p{a, Int(1), (N * N + 6 * N + 25) / 16, 2 * a + 4, Int(2), 2};
    if (is_square(p.d)) continue;
    out.push_back({p, {{0, Int(1)}, {1, (N + 1) / 2}}});
  }
  return out;
}

// a = 2, b = u = 1, d = t^2 + 4 with y_1 = (t^2 + 2t + 2)/2 a square and N_alpha = -t^2 = 12 mod 16.
// The t values come from (t+1)^2 - 2 s^2 = -1 directly.
inline std::vector<FamilyMember> family_case_a(long count) {
  std::vector<FamilyMember> out;
  Int x = 1, s = 1;  // x = t + 1, x^2 - 2 s^2 = -1
  while (long(out.size()) < count) {
    Int nx = 3 * x + 4 * s, ns = 2 * x + 3 * s;
    x = nx;
    s = ns;
    Int t = x - 1;
    if (mod_floor(Int(-t * t), 16) != 12) continue;
    SeqParams p{Int(2), Int(1), t * t + 4, t, Int(1), 2};
    out.push_back({p, {{0, Int(1)}, {1, s}}});
  }
  return out;
}

// n >= 2, 5 does not divide a = 2n^2 - 3: d = 4n^4 - 8n^2 + 8, (t, u) = (a + 1, 1), y_{-1} = n^2.
inline std::vector<FamilyMember> family_lower_bound(long count) {
  std::vector<FamilyMember> out;
  for (long n = 2; long(out.size()) < count; ++n) {
    Int N(n), n2 = N * N;
    Int a = 2 * n2 - 3;
    if (a % 5 == 0) continue;
    SeqParams p{a, Int(1), 4 * n2 * n2 - 8 * n2 + 8, a + 1, Int(1), 2};
    out.push_back({p, {{-1, N}, {0, Int(1)}}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parameter sets with y_{+1} or y_{-1} a perfect square.
// With eps^step = (T + U sqrt(d))/2, 2 y_{+-1} = b0 T +- a U, so a is solved from a chosen square.

struct HarvestCase {
  SeqParams p;
  long k;
};

inline std::vector<HarvestCase> harvest_pm1(long d_max, const std::vector<long>& bs, long s_max, long a_max,
                                            int step = 2) {
  std::vector<HarvestCase> out;
  for (long d = 2; d <= d_max; ++d) {
    if (is_square(Int(d))) continue;
    Pell4 e = pell4_min(Int(d));
    SeqParams base{Int(1), Int(1), Int(d), e.t, e.u, step};
    QuadInt es = base.eps_step();
    Int T = es.h(), U = es.k();
    for (long b : bs) {
      Int b0 = Int(b) * b;
      for (long s = 1; s <= s_max; ++s)
        for (long k : {1L, -1L}) {
          Int num = k == 1 ? Int(2 * s * s - b0 * T) : Int(b0 * T - 2 * s * s);
          if (num <= 0 || num % U != 0) continue;
          Int a = num / U;
          if (a > a_max) continue;
          SeqParams p{a, b0, Int(d), e.t, e.u, step};
          if (is_square(p.n_alpha())) continue;
          if (!element(p, k).integral()) continue;
          out.push_back({p, k});
        }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Approximation pairs checked against the remainder, nondegeneracy and the
// inequalities |q_r| < k0 Q^r, |R_r| <= l0 E^-r.

struct HypergeomCheck {
  SeqParams p;
  long k = 0;
  Int dprime;
  unsigned r_max = 0;
  Real max_identity_err;
  bool identity_ok = true, nondegenerate_ok = true, integers_ok = true;
  bool q_bound_ok = true, r_bound_ok = true;
  unsigned first_q_fail = 0, first_r_fail = 0;
};

inline HypergeomCheck hypergeom_check(const SeqParams& p, long k, unsigned r_max, const Real& tol,
                                      unsigned bits = 256) {
  detail::EnsurePrecision prec(bits);
  if (p.b0 != 1 || p.step != 2 || k == 0) throw DomainError("hypergeom_check: needs b0 = 1, step 2, k != 0");
  OmegaData o = omega_data(p, k);
  if (o.y < 2) throw DomainError("hypergeom_check: y_k must be at least 2");
  BoundSet bs = bounds_from(o, p.d, Real("0.75"), bits);
  HypergeomCheck hc;
  hc.p = p;
  hc.k = k;
  hc.dprime = o.g.dprime;
  hc.r_max = r_max;
  hc.max_identity_err = 0;
  ApproxPair prev;
  for (unsigned r = 0; r <= r_max; ++r) {
    ApproxPair ap = approx_pair_from(o, r, bits);
    Real err = (ap.residual - ap.R).abs();
    if (err > hc.max_identity_err) hc.max_identity_err = err;
    if (!(err < tol)) hc.identity_ok = false;
    if (!ap.algebraic_integers) hc.integers_ok = false;
    if (r > 0) {
      if (!nondegenerate(prev, ap)) hc.nondegenerate_ok = false;
      if (hc.q_bound_ok && !(ap.q.abs() < bs.k0 * pow(bs.Q, r))) {
        hc.q_bound_ok = false;
        hc.first_q_fail = r;
      }
      if (hc.r_bound_ok && !(ap.R.abs() <= bs.ell0 * pow(bs.E, -static_cast<long>(r)))) {
        hc.r_bound_ok = false;
        hc.first_r_fail = r;
      }
    }
    prev = std::move(ap);
  }
  return hc;
}

// Random (a, d, k) with d in [6, d_max], b = 1, the minimal unit, x_k, y_k integers,
// y_k >= 2 and |phi| < 1. Deterministic for a given seed.
inline std::vector<std::pair<SeqParams, long>> hypergeom_cases(std::size_t count, std::uint64_t seed,
                                                                long d_max = 400) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<SeqParams, long>> out;
  std::set<std::tuple<Int, Int, long>> seen;
  for (std::size_t tries = 0; out.size() < count && tries < 200 * count; ++tries) {
    long d = std::uniform_int_distribution<long>(6, d_max)(rng);
    if (is_square(Int(d))) continue;
    long amax = static_cast<long>(isqrt(Int(d - 1)));
    long a = std::uniform_int_distribution<long>(1, amax)(rng);
    long k = std::array<long, 4>{-2, -1, 1, 2}[std::uniform_int_distribution<int>(0, 3)(rng)];
    Pell4 e = pell4_min(Int(d));
    SeqParams p{Int(a), Int(1), Int(d), e.t, e.u, 2};
    if (!element(p, k).integral()) continue;
    OmegaData o = omega_data(p, k);
    if (o.y < 2 || !(abs(omega_angle(o)) < 1)) continue;
    if (!seen.insert({p.a, p.d, k}).second) continue;
    out.emplace_back(p, k);
  }
  return out;
}

}  // namespace pellsq

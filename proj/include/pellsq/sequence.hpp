#pragma once

#include <pellsq/quadratic.hpp>

#include <array>
#include <cstdint>
#include <set>
#include <sstream>
#include <vector>

namespace pellsq {

// x_k + y_k sqrt(d) = (a + b0 sqrt(d)) * eps^(step*k), eps = (t + u sqrt(d))/2.
struct SeqParams {
  Int a, b0, d, t, u;
  int step = 2;

  void validate() const {
    if (a <= 0 || b0 <= 0 || d <= 0 || t <= 0 || u <= 0) throw DomainError("SeqParams: entries must be positive");
    if (is_square(d)) throw DomainError("SeqParams: d must be a nonsquare");
    Int n = t * t - d * u * u;
    if (n != 4 && n != -4) throw DomainError("SeqParams: t^2 - d u^2 must be +-4");
    if (step != 1 && step != 2) throw DomainError("SeqParams: step must be 1 or 2");
  }

  QuadInt alpha() const { return QuadInt::integral(a, b0, d); }
  QuadInt eps() const { return QuadInt::half(t, u, d); }
  QuadInt eps_step() const { return step == 2 ? eps() * eps() : eps(); }
  Int n_alpha() const { return a * a - b0 * b0 * d; }
  int n_eps() const { return t * t - d * u * u == 4 ? 1 : -1; }

  std::string str() const {
    std::ostringstream os;
    os << "(" << a << "," << b0 << "," << d << "," << t << "," << u << ";step " << step << ")";
    return os.str();
  }
  auto key() const { return std::tie(d, t, u, b0, a, step); }
  bool operator<(const SeqParams& o) const { return key() < o.key(); }
  bool operator==(const SeqParams& o) const { return key() == o.key(); }
};

// Doubled coordinates of an element: x = x2/2, y = y2/2.
struct Term {
  Int x2, y2;
  bool integral() const { return (x2 & 1) == 0 && (y2 & 1) == 0; }
  Int x() const { return x2 / 2; }
  Int y() const { return y2 / 2; }
};

inline Term element(const SeqParams& p, long k) {
  p.validate();
  QuadInt v = p.alpha() * qpow(p.eps_step(), k);
  return {v.h(), v.k()};
}

struct SquareHit {
  long k;
  Int x, y, root;
};

struct SquareScan {
  std::vector<SquareHit> hits;  // ascending k
  std::size_t distinct_count = 0;
};

namespace detail {

// Quadratic-residue filter over several small moduli. y is reduced modulo
// kFilterModulus; a term survives only if it is a residue modulo every factor.
struct SquareFilter {
  static constexpr std::array<std::uint32_t, 10> moduli{64, 63, 65, 11, 17, 19, 23, 29, 31, 37};
  std::array<std::vector<bool>, 10> residue;

  SquareFilter() {
    for (std::size_t i = 0; i < moduli.size(); ++i) {
      residue[i].assign(moduli[i], false);
      for (std::uint32_t x = 0; x < moduli[i]; ++x) residue[i][(std::uint64_t(x) * x) % moduli[i]] = true;
    }
  }
  static const SquareFilter& get() {
    static const SquareFilter f;
    return f;
  }
};

// Two moduli whose factors cover SquareFilter::moduli; doubled for the y2 -> y halving.
constexpr std::uint64_t kFilterA = 2ull * 64 * 63 * 65 * 11;
constexpr std::uint64_t kFilterB = 2ull * 17 * 19 * 23 * 29 * 31 * 37;

inline std::uint64_t reduce(const Int& v, std::uint64_t m) {
  return static_cast<std::uint64_t>(mod_floor(v, Int(m)));
}

inline bool passes_filter(std::uint64_t ya2, std::uint64_t yb2) {
  if (ya2 & 1) return false;
  const auto& f = SquareFilter::get();
  std::uint64_t ya = ya2 / 2, yb = yb2 / 2;
  for (std::size_t i = 0; i < 4; ++i)
    if (!f.residue[i][ya % f.moduli[i]]) return false;
  for (std::size_t i = 4; i < f.moduli.size(); ++i)
    if (!f.residue[i][yb % f.moduli[i]]) return false;
  return true;
}

// y2 residues for k = 0, 1, 2, ... (dir = +1) or k = 0, -1, -2, ... (dir = -1).
class ResidueWalk {
 public:
  ResidueWalk(const Int& y2_0, const Int& y2_1, const Int& trace, int norm, std::uint64_t m)
      : m_(m), prev_(reduce(y2_0, m)), cur_(reduce(y2_1, m)), tr_(reduce(trace, m)), norm_(norm) {}
  std::uint64_t prev() const { return prev_; }
  std::uint64_t cur() const { return cur_; }
  // Forward: Y_{k+1} = T Y_k - n Y_{k-1}. Backward: Y_{k-1} = n (T Y_k - Y_{k+1}).
  void step_forward() {
    std::uint64_t next = (tr_ * cur_ % m_ + (norm_ == 1 ? m_ - prev_ : prev_)) % m_;
    prev_ = cur_;
    cur_ = next;
  }
  void step_backward() {
    std::uint64_t v = (tr_ * cur_ % m_ + m_ - prev_) % m_;
    if (norm_ == -1) v = (m_ - v) % m_;
    prev_ = cur_;
    cur_ = v;
  }

 private:
  std::uint64_t m_, prev_, cur_, tr_;
  int norm_;
};

inline void check_candidate(const SeqParams& p, long k, std::vector<SquareHit>& hits) {
  QuadInt v = p.alpha() * qpow(p.eps_step(), k);
  if (!v.has_integral_coords()) return;
  Int y = v.y();
  if (y <= 0) return;
  if (auto r = sqrt_exact(y)) hits.push_back({k, v.x(), y, *r});
}

}  // namespace detail

inline SquareScan scan_squares(const SeqParams& p, long window) {
  p.validate();
  if (window < 1) throw DomainError("scan_squares: window must be >= 1");
  QuadInt e = p.eps_step();
  Int tr = e.trace();
  int n = e.norm() == 1 ? 1 : -1;
  Term t0 = {2 * p.a, 2 * p.b0};
  Term t1 = element(p, 1);
  Term tm1 = element(p, -1);

  std::vector<SquareHit> hits;
  if (detail::passes_filter(detail::reduce(t0.y2, detail::kFilterA), detail::reduce(t0.y2, detail::kFilterB)))
    detail::check_candidate(p, 0, hits);

  for (int dir : {1, -1}) {
    const Int& y2_1 = dir == 1 ? t1.y2 : tm1.y2;
    detail::ResidueWalk wa(t0.y2, y2_1, tr, n, detail::kFilterA);
    detail::ResidueWalk wb(t0.y2, y2_1, tr, n, detail::kFilterB);
    for (long j = 1; j <= window; ++j) {
      if (j > 1) {
        if (dir == 1) {
          wa.step_forward();
          wb.step_forward();
        } else {
          wa.step_backward();
          wb.step_backward();
        }
      }
      if (detail::passes_filter(wa.cur(), wb.cur())) detail::check_candidate(p, dir * j, hits);
    }
  }
  std::sort(hits.begin(), hits.end(), [](const SquareHit& x, const SquareHit& y) { return x.k < y.k; });
  std::set<Int> values;
  for (auto& h : hits) values.insert(h.y);
  return {std::move(hits), values.size()};
}

// Reference scan without the residue filter; used to cross-check scan_squares.
inline SquareScan scan_squares_exact(const SeqParams& p, long window) {
  p.validate();
  std::vector<SquareHit> hits;
  for (long k = -window; k <= window; ++k) detail::check_candidate(p, k, hits);
  std::set<Int> values;
  for (auto& h : hits) values.insert(h.y);
  return {std::move(hits), values.size()};
}

namespace detail {
inline void require_bound_domain(const SeqParams& p) {
  p.validate();
  if (p.step != 2) throw DomainError("lower bounds and K are defined for step 2 only");
  if (p.n_alpha() >= 0) throw DomainError("lower bounds and K need N_alpha < 0");
}
}  // namespace detail

inline Rat growth_factor(const SeqParams& p) {
  if (p.n_eps() == 1) return Rat(p.d * p.u * p.u);
  if (p.d == 5 && p.t == 1 && p.u == 1) return Rat(2 * p.d * p.u * p.u, 5);
  return Rat(5 * p.d * p.u * p.u, 8);
}

inline long k_cutoff(const SeqParams& p) {
  detail::require_bound_domain(p);
  for (long k = -1; k >= -64; --k) {
    Term tk = element(p, k);
    if (tk.y2 > 2 * p.b0) return k;
  }
  throw DomainError("k_cutoff: no k >= -64 with y_k > b0");
}

inline Rat lower_bound_y(const SeqParams& p, long k) {
  detail::require_bound_domain(p);
  if (k == 0) throw DomainError("lower_bound_y: k must be nonzero");
  Rat base(abs_int(p.n_alpha()) * p.u * p.u, 4 * p.b0);
  long e = k > 0 ? k - 1 : std::max(0L, k_cutoff(p) - k);
  Rat f = growth_factor(p), r = base;
  for (long i = 0; i < e; ++i) r *= f;
  return r;
}

}  // namespace pellsq

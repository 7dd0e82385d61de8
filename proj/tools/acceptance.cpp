// Acceptance run: one PASS/FAIL line per criterion.
//
// A criterion marked KNOWN fails for a documented reason that is checked
// exactly; it is still reported as FAIL but does not change the exit status.
// Any other failure does.

#include <pellsq/analysis.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

using pellsq::Int;
using pellsq::Rat;
using pellsq::Real;
using pellsq::SeqParams;

namespace {

struct Outcome {
  bool pass = true;
  bool known = false;  // failure matches a documented, checked cause
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok: " : "FAILED: ") + what);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(const Real& v, int digits = 10) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

bool near(const Real& v, double target, double tol) { return abs(v - Real(target)) <= Real(tol); }

std::vector<std::pair<long, Int>> found(const pellsq::SquareScan& s) {
  std::vector<std::pair<long, Int>> out;
  for (auto& h : s.hits) out.emplace_back(h.k, h.root);
  return out;
}

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1
Outcome table_d2(double& secs) {
  Outcome o;
  auto t0 = Clock::now();
  std::size_t match = 0;
  auto rows = pellsq::table_d2();
  for (auto& ex : rows) {
    bool ok = found(pellsq::scan_squares(ex.p, 80)) == ex.squares;
    match += ok;
    if (!ok) o.check(false, ex.label);
  }
  secs = since(t0);
  o.check(match == rows.size() && rows.size() == 14, std::to_string(match) + "/14 rows exact");
  o.check(secs < 60, "runtime < 60 s");
  return o;
}

// 2
Outcome step1(double& secs) {
  Outcome o;
  auto t0 = Clock::now();
  const std::set<std::string> required{"(5,1,1,43,3)", "(10,6,2,1,1)", "(5,1,1,7,1)", "(6,10,4,2,3)"};
  std::size_t seen = 0;
  for (auto& ex : pellsq::step1_examples()) {
    auto got = found(pellsq::scan_squares(ex.p, 80));
    bool ok = got == ex.squares;
    seen += required.count(ex.label);
    std::ostringstream os;
    os << ex.label << (required.count(ex.label) ? "" : " (extra)") << ":";
    for (auto& [k, r] : got) os << " y_" << k << "=" << r << "^2";
    o.check(ok, os.str());
  }
  o.check(seen == required.size(), "all four required parameter sets present");
  secs = since(t0);
  return o;
}

// 3
Outcome quartic(double& secs) {
  Outcome o;
  auto t0 = Clock::now();
  using Sol = std::vector<std::pair<Int, Int>>;
  Sol a = pellsq::quartic_solutions(Int(17), Int(-16), Int(10000));
  Sol b = pellsq::quartic_solutions(Int(68), Int(-64), Int(10000));
  o.check(a == Sol{{Int(1), Int(1)}, {Int(16), Int(2)}, {Int(103), Int(5)}}, "(17, -16): {(1,1), (16,2), (103,5)}");
  o.check(b == Sol{{Int(2), Int(1)}, {Int(32), Int(2)}, {Int(206), Int(5)}}, "(68, -64): {(2,1), (32,2), (206,5)}");
  secs = since(t0);
  o.check(secs < 5, "runtime < 5 s");
  return o;
}

// 4
Outcome d105_extremals(double& secs) {
  Outcome o;
  auto t0 = Clock::now();
  auto rep = pellsq::lemma313_scan(2, 1000);
  secs = since(t0);
  o.note("checked " + std::to_string(rep.checked) + " points");

  bool e973 = false;
  for (auto& pt : rep.e_proxy_below_one)
    if (pt.a == 9 && pt.d == 104 && pt.k == -1) e973 = near(pt.value, 0.973, 0.001);
  o.check(e973, "E = 0.973 +- 0.001 at (a, d) = (9, 104)");

  auto& me = rep.min_e_from_x;
  o.check(me && me->a == 11 && me->d == 140 && near(me->value, 1.139, 0.001),
          "min E-side = 1.139 +- 0.001 at (11, 140)" + (me ? ", got " + fmt(me->value) : std::string()));

  auto& mq = rep.min_q;
  bool q_ok = mq && mq->a == 10 && mq->d == 140 && near(mq->value, 217.3, 0.1);
  std::string got_q = mq ? " (got " + fmt(mq->value) + " at (" + mq->a.str() + ", " + mq->d.str() + "))" : "";
  o.check(q_ok, "min Q-side = 217.3 +- 0.1 at (10, 140)" + got_q);
  bool no_viol = rep.violations_e.empty() && rep.violations_q.empty();
  o.check(no_viol, "no violation for d >= 105 (" + std::to_string(rep.violations_e.size()) + " E-side, " +
                       std::to_string(rep.violations_q.size()) + " Q-side)");
  o.check(secs < 600, "runtime < 600 s");

  // The only violation is the Q-side at (9, 117, -1); away from d = 117 the
  // stated minimum is reproduced.
  if (!o.pass && e973 && me && secs < 600 && rep.violations_e.empty() && rep.violations_q.size() == 1) {
    auto& v = rep.violations_q[0];
    auto lo = pellsq::lemma313_scan(105, 116), hi = pellsq::lemma313_scan(118, 1000);
    std::optional<pellsq::InequalityPoint> rest = hi.min_q;
    if (lo.min_q && (!rest || lo.min_q->value < rest->value)) rest = lo.min_q;
    bool rest_ok = rest && rest->a == 10 && rest->d == 140 && near(rest->value, 217.3, 0.1);
    if (v.a == 9 && v.d == 117 && v.k == -1 && v.x == -108 && v.y == 10 && rest_ok) {
      o.known = true;
      o.note("KNOWN: Q-side is " + fmt(v.value, 7) +
             " < 217 at (a, d, k) = (9, 117, -1), x = -108, y = 10, eps = (11 + sqrt(117))/2;"
             " with d = 117 left out the minimum is " +
             fmt(rest->value, 7) + " at (10, 140)");
    }
  }
  return o;
}

// 5
Outcome denominators(double& secs) {
  Outcome o;
  auto t0 = Clock::now();
  auto rep = pellsq::denominator_ratios(155, Int(1));
  secs = since(t0);
  o.check(rep.argmax1 == 3 && rep.argmax2 == 3, "both maxima at r = 3");
  o.check(rep.max1 < Real("0.83"), "first ratio max " + fmt(rep.max1) + " < 0.83");
  o.check(rep.max2 < Real("0.2"), "second ratio max " + fmt(rep.max2) + " < 0.2");
  o.check(secs < 60, "runtime < 60 s");
  return o;
}

// 6
Outcome representation(double& secs, unsigned jobs) {
  Outcome o;
  auto t0 = Clock::now();
  std::vector<pellsq::HarvestCase> cases = pellsq::harvest_pm1(200, {1, 2, 3}, 300, 1000000);
  std::size_t harvested = cases.size();
  pellsq::ScanRanges rg;
  rg.b_max = 3;
  rg.d_max = 60;
  rg.a_mode = pellsq::AMode::Both;
  rg.a_radius = 200;
  rg.a_small = 200;
  rg.step1 = false;
  pellsq::conjecture_scan(
      rg,
      [&](const pellsq::SequenceRecord& r) {
        Int n = r.p.n_alpha();
        if (n == 0 || pellsq::is_square(n)) return;
        for (auto& h : r.hits)
          if (h.k != 0) cases.push_back({r.p, h.k});
      },
      jobs);
  std::size_t total = 0, failures = 0;
  std::map<char, std::size_t> by_case;
  std::string first_failure;
  for (auto& c : cases) {
    ++total;
    try {
      auto dec = pellsq::decompose(c.p, c.k);
      auto v = pellsq::verify_decomposition(c.p, c.k, dec);
      if (!v) throw pellsq::DomainError(v.reason);
      ++by_case[dec.rep_case == pellsq::RepCase::A ? 'a' : dec.rep_case == pellsq::RepCase::B ? 'b' : 'c'];
    } catch (const pellsq::DomainError& e) {
      if (failures++ == 0) first_failure = c.p.str() + " k=" + std::to_string(c.k) + ": " + e.what();
    }
  }
  secs = since(t0);
  o.note(std::to_string(harvested) + " from y_{+-1} harvest, " + std::to_string(total - harvested) + " from scans");
  o.check(total >= 1000, std::to_string(total) + " cases (>= 1000)");
  o.check(failures == 0, std::to_string(failures) + " failures" + (failures ? " first: " + first_failure : ""));
  o.check(by_case['a'] > 0 && by_case['b'] > 0 && by_case['c'] > 0,
          "divisibility certificates exercised: (a) " + std::to_string(by_case['a']) + ", (b) " +
              std::to_string(by_case['b']) + ", (c) " + std::to_string(by_case['c']));
  return o;
}

// 7
Outcome closed_form(double& secs) {
  Outcome o;
  auto t0 = Clock::now();
  std::vector<pellsq::HarvestCase> cases;
  for (auto& c : pellsq::harvest_pm1(400, {1}, 2000, 1000000))
    if (c.p.n_alpha() < 0) cases.push_back(c);
  std::size_t square_cases = cases.size();
  for (long d = 2; d <= 300; ++d) {
    if (pellsq::is_square(Int(d))) continue;
    auto e = pellsq::pell4_min(Int(d));
    for (long a = 1; a * a < d; ++a)
      for (long k : {-3L, -2L, -1L, 1L, 2L, 3L}) {
        SeqParams p{Int(a), Int(1), Int(d), e.t, e.u, 2};
        if (pellsq::element(p, k).integral()) cases.push_back({p, k});
      }
  }
  std::size_t failures = 0;
  std::string first;
  for (auto& c : cases) {
    bool ok = false;
    try {
      ok = pellsq::g_quantities_for(c.p, c.k).gn_sq() == Rat(pellsq::gn_closed_form(c.p, c.k));
    } catch (const pellsq::DomainError&) {
    }
    if (!ok && failures++ == 0) first = c.p.str() + " k=" + std::to_string(c.k);
  }
  secs = since(t0);
  o.note(std::to_string(square_cases) + " cases with y_k a square, " + std::to_string(cases.size() - square_cases) +
         " further integral terms");
  o.check(cases.size() >= 1000, std::to_string(cases.size()) + " cases (>= 1000)");
  o.check(failures == 0, std::to_string(failures) + " mismatches" + (failures ? " first: " + first : ""));
  return o;
}

// 8
Outcome threshold_scan(double& secs, unsigned jobs) {
  Outcome o;
  auto t0 = Clock::now();
  pellsq::ScanRanges rg;
  rg.b_max = 1;
  rg.d_max = 500;
  rg.a_mode = pellsq::AMode::Both;
  rg.window = 40;
  rg.step1 = false;
  rg.squarefree_only = false;
  rg.negative_square_only = true;
  std::size_t seqs = 0, bad = 0, with_square_above = 0;
  std::string first;
  pellsq::conjecture_scan(
      rg,
      [&](const pellsq::SequenceRecord& r) {
        ++seqs;
        if (!r.threshold) return;
        with_square_above += r.above_threshold > 0;
        if (r.above_threshold > 1 && bad++ == 0) first = r.p.str();
      },
      jobs);
  secs = since(t0);
  o.check(seqs > 0, std::to_string(seqs) + " sequences, " + std::to_string(with_square_above) +
                        " with a square above the threshold");
  o.check(bad == 0, std::to_string(bad) + " with two or more" + (bad ? " first: " + first : ""));
  o.check(secs < 600, "runtime < 600 s");
  return o;
}

// 9
Outcome conjecture(double& secs, unsigned jobs) {
  Outcome o;
  auto t0 = Clock::now();
  pellsq::ScanRanges rg;
  rg.b_max = 20;
  rg.d_max = 200;
  rg.window = 40;
  rg.step1_window = 80;
  rg.squarefree_only = true;
  std::string first;
  auto sum = pellsq::conjecture_scan(
      rg,
      [&](const pellsq::SequenceRecord& r) {
        if (!r.violations.empty() && first.empty()) first = r.p.str() + ": " + r.violations[0];
      },
      jobs);
  secs = since(t0);
  std::ostringstream os;
  os << sum.sequences << " sequences; max distinct squares:";
  for (auto& [k, v] : sum.max_distinct) os << ' ' << k << '=' << v;
  o.note(os.str());
  o.check(sum.with_violation == 0,
          std::to_string(sum.with_violation) + " sequences above their bound" + (first.empty() ? "" : " first: " + first));
  o.check(secs < 1800, "runtime < 1800 s");
  return o;
}

// 10
Outcome hypergeometric(double& secs) {
  Outcome o;
  auto t0 = Clock::now();
  pellsq::PrecisionScope prec(256);
  auto cases = pellsq::hypergeom_cases(50, 20261019);
  std::size_t ident = 0, nondeg = 0, integ = 0, hyp = 0;
  std::size_t hyp_fail_bad_dprime = 0, hyp_fail_other = 0, good_dprime = 0;
  std::map<Int, bool> dprime_ok;
  std::set<Int> bad_dprimes;  // denominator ratios stay below 1 for r <= 30
  std::string first_other;
  for (auto& [p, k] : cases) {
    auto hc = pellsq::hypergeom_check(p, k, 30, Real("1e-30"), 256);
    ident += hc.identity_ok;
    nondeg += hc.nondegenerate_ok;
    integ += hc.integers_ok;
    if (!dprime_ok.count(hc.dprime)) {
      auto rep = pellsq::denominator_ratios(30, hc.dprime);
      dprime_ok[hc.dprime] = rep.max1 < 1 && rep.max2 < 1;
    }
    bool dp_ok = dprime_ok[hc.dprime];
    good_dprime += dp_ok;
    if (hc.q_bound_ok && hc.r_bound_ok) {
      ++hyp;
    } else if (dp_ok) {
      if (hyp_fail_other++ == 0) first_other = p.str() + " k=" + std::to_string(k);
    } else {
      ++hyp_fail_bad_dprime;
      bad_dprimes.insert(hc.dprime);
    }
  }
  secs = since(t0);
  std::size_t n = cases.size();
  auto of = [&](std::size_t v) { return std::to_string(v) + "/" + std::to_string(n); };
  o.check(n >= 50, std::to_string(n) + " random cases, r <= 30, 256 bits");
  o.check(ident == n, "remainder identity within 1e-30: " + of(ident));
  o.check(nondeg == n, "p_r q_{r+1} != p_{r+1} q_r: " + of(nondeg));
  o.check(integ == n, "p_r, q_r algebraic integers after scaling: " + of(integ));
  o.check(hyp == n, "|q_r| < k0 Q^r and |R_r| <= l0 E^-r: " + of(hyp));
  bool rest_ok = n >= 50 && ident == n && nondeg == n && integ == n;
  if (!o.pass && rest_ok && hyp_fail_other == 0 && hyp_fail_bad_dprime > 0) {
    o.known = true;
    std::string list;
    bool all_even = true;
    for (auto& dp : bad_dprimes) {
      list += (list.empty() ? "" : ", ") + dp.str();
      all_even = all_even && dp % 2 == 0;
    }
    o.note("KNOWN: all " + std::to_string(hyp_fail_bad_dprime) +
           " failing cases have a d' whose denominator ratio exceeds 1 for some r <= 30" +
           (all_even ? " (all even)" : "") + ": d' in {" + list + "}; the " + std::to_string(good_dprime) +
           " cases with ratio < 1 all satisfy both inequalities");
  } else if (hyp_fail_other > 0) {
    o.note("unexplained inequality failure, first: " + first_other);
  }
  return o;
}

// 11
Outcome sieve(double& secs) {
  Outcome o;
  auto t0 = Clock::now();
  using pellsq::NCond;
  auto r1 = pellsq::congruence_sieve({32, 4, 4, NCond::OddSquare});
  o.check(r1.survivors == 0, "u = 4, t^2 - d u^2 = 4, -N odd square: no survivors mod 32");
  auto r2 = pellsq::congruence_sieve({9, 8, 4, NCond::OddSquare});
  o.check(r2.survivors > 0 && r2.forced_gcd % 9 == 0,
          "u = 8, t^2 - d u^2 = 4, -N odd square: 9 | gcd(a^2, d) mod 9 (forced " + r2.forced_gcd.str() + ")");
  auto r3 = pellsq::congruence_sieve({9, 6, -4, NCond::Any});
  o.check(r3.survivors == 0, "u = 6, t^2 - d u^2 = -4: no survivors mod 9");
  auto minus = pellsq::sieve_u_classes({16, 0, -4, NCond::OddSquare});
  auto plus = pellsq::sieve_u_classes({16, 0, 4, NCond::OddSquare});
  bool m_ok = !minus.empty(), p_ok = !plus.empty();
  for (long u : minus) m_ok = m_ok && u % 4 == 2;
  for (long u : plus) p_ok = p_ok && u % 4 == 0;
  o.check(m_ok && p_ok, "-N odd square, y_{+-1} square: u = 2 mod 4 for norm -4, u = 0 mod 4 for norm 4 (mod 16)");
  secs = since(t0);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  unsigned jobs = pellsq::default_jobs();
  std::vector<int> only;
  bool verbose = false;
  app.add_option("--jobs,-j", jobs)->capture_default_str()->check(CLI::Range(1u, 1024u));
  app.add_option("--only", only, "criteria to run (default all)")->check(CLI::Range(1, 11));
  app.add_flag("--verbose,-v", verbose, "print every sub-check");
  CLI11_PARSE(app, argc, argv);

  pellsq::PrecisionScope prec(256);
  struct Item {
    int id;
    const char* name;
    std::function<Outcome(double&)> run;
  };
  std::vector<Item> items = {
      {1, "d=2 table, window 80", table_d2},
      {2, "step-1 square sets", step1},
      {3, "quartic solver", quartic},
      {4, "d >= 105 inequality extremals", d105_extremals},
      {5, "denominator ratio maxima, d' = 1", denominators},
      {6, "representation identity suite", [&](double& s) { return representation(s, jobs); }},
      {7, "closed form for (|g|N)^2", closed_form},
      {8, "one square above the threshold", [&](double& s) { return threshold_scan(s, jobs); }},
      {9, "conjecture scan b <= 20, d <= 200", [&](double& s) { return conjecture(s, jobs); }},
      {10, "hypergeometric approximations", hypergeometric},
      {11, "congruence sieve conclusions", sieve},
  };

  int unexpected = 0, known = 0, passed = 0;
  for (auto& it : items) {
    if (!only.empty() && std::find(only.begin(), only.end(), it.id) == only.end()) continue;
    double secs = 0;
    Outcome o;
    try {
      o = it.run(secs);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const char* tag = o.pass ? "PASS" : "FAIL";
    std::printf("[%s] %2d %s (%.1f s)%s\n", tag, it.id, it.name, secs, o.pass ? "" : o.known ? " KNOWN" : "");
    for (auto& n : o.notes)
      if (verbose || !o.pass || n.rfind("ok: ", 0) != 0) std::printf("       %s\n", n.c_str());
    std::fflush(stdout);
    if (o.pass) {
      ++passed;
    } else if (o.known) {
      ++known;
    } else {
      ++unexpected;
    }
  }
  std::printf("%d passed, %d known failures, %d unexpected failures\n", passed, known, unexpected);
  return unexpected == 0 ? 0 : 1;
}

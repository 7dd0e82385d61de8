// pellsq: command-line front end for the pellsq library.
//
// Every subcommand prints a human-readable report by default and JSON lines
// with --json. Exit status: 0 ok, 1 violation or failed verification,
// 2 usage or domain error.

#include <pellsq/analysis.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <functional>
#include <map>
#include <memory>
#include <regex>
#include <sstream>

using json = nlohmann::ordered_json;
using pellsq::Int;
using pellsq::Rat;
using pellsq::Real;
using pellsq::SeqParams;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Int parse_int(const std::string& flag, const std::string& s) {
  static const std::regex re("[+-]?[0-9]+");
  if (!std::regex_match(s, re)) throw UsageError("--" + flag + ": not an integer: '" + s + "'");
  return Int(s[0] == '+' ? s.substr(1) : s);
}

long parse_long(const std::string& flag, const std::string& s) {
  Int v = parse_int(flag, s);
  if (v > Int(1) << 62 || v < -(Int(1) << 62)) throw UsageError("--" + flag + ": out of range: " + s);
  return static_cast<long>(v);
}

Real parse_real(const std::string& flag, const std::string& s) {
  static const std::regex re("[+-]?([0-9]+\\.?[0-9]*|\\.[0-9]+)([eE][+-]?[0-9]+)?");
  if (!std::regex_match(s, re)) throw UsageError("--" + flag + ": not a number: '" + s + "'");
  return Real(s);
}

std::string fmt(const Real& v, int digits = 12) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

// Reports go to stdout or --output; one JSON object per line in --json mode.
class Emitter {
 public:
  void open(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw UsageError("cannot open output file " + path);
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }
  bool json_mode = false;

  void record(const std::string& kind, json j, const std::string& human) {
    if (json_mode) {
      json out;
      out["schema"] = 1;
      out["kind"] = kind;
      for (auto& [k, v] : j.items()) out[k] = v;
      os() << out.dump() << '\n';
    } else {
      os() << human;
      if (!human.empty() && human.back() != '\n') os() << '\n';
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct ParamFlags {
  std::string a = "1", b0 = "1", d, t, u;
  int step = 2;

  void add(CLI::App* app) {
    app->add_option("--a", a, "a in alpha = a + b0 sqrt(d)")->capture_default_str();
    app->add_option("--b0", b0, "b0 = b^2")->capture_default_str();
    app->add_option("--d", d, "nonsquare d > 1")->required();
    app->add_option("--t", t, "unit trace; with --u, defaults to the minimal unit");
    app->add_option("--u", u, "unit coefficient");
    app->add_option("--step", step, "1 or 2 (powers of eps or eps^2)")->capture_default_str()->check(
        CLI::IsMember({1, 2}));
  }

  SeqParams get() const {
    SeqParams p;
    p.a = parse_int("a", a);
    p.b0 = parse_int("b0", b0);
    p.d = parse_int("d", d);
    p.step = step;
    if (t.empty() != u.empty()) throw UsageError("--t and --u go together");
    if (t.empty()) {
      if (p.d < 2 || pellsq::is_square(p.d)) throw pellsq::DomainError("d must be a nonsquare > 1");
      auto e = pellsq::pell4_min(p.d);
      p.t = e.t;
      p.u = e.u;
    } else {
      p.t = parse_int("t", t);
      p.u = parse_int("u", u);
    }
    p.validate();
    return p;
  }
};

json params_json(const SeqParams& p) {
  return {{"a", p.a.str()}, {"b0", p.b0.str()}, {"d", p.d.str()},
          {"t", p.t.str()}, {"u", p.u.str()},   {"step", p.step}};
}

json hits_json(const std::vector<pellsq::SquareHit>& hits) {
  json arr = json::array();
  for (auto& h : hits) arr.push_back({{"k", h.k}, {"y", h.y.str()}, {"root", h.root.str()}});
  return arr;
}

std::string hits_text(const std::vector<pellsq::SquareHit>& hits) {
  std::ostringstream os;
  for (auto& h : hits) os << "  y_" << h.k << " = " << h.root << "^2\n";
  return os.str();
}

json record_json(const pellsq::SequenceRecord& r) {
  json j = {{"params", params_json(r.p)},
            {"n_alpha", r.n_alpha.str()},
            {"class", pellsq::describe(r.core_class)},
            {"distinct", r.distinct_count},
            {"limit", r.limit},
            {"hits", hits_json(r.hits)}};
  if (r.threshold) {
    j["threshold"] = fmt(r.threshold->value());
    j["above_threshold"] = r.above_threshold;
  }
  if (r.thm14) j["case"] = std::string(1, r.thm14->label);
  j["violations"] = r.violations;
  return j;
}

std::string record_text(const pellsq::SequenceRecord& r) {
  std::ostringstream os;
  os << r.p.str() << " N=" << r.n_alpha << " class=" << pellsq::describe(r.core_class) << " distinct=" << r.distinct_count
     << " limit=" << r.limit;
  if (r.thm14) os << " case=" << r.thm14->label;
  os << '\n' << hits_text(r.hits);
  for (auto& v : r.violations) os << "  VIOLATION: " << v << '\n';
  return os.str();
}

std::vector<std::pair<long, Int>> found(const pellsq::SquareScan& s) {
  std::vector<std::pair<long, Int>> out;
  for (auto& h : s.hits) out.emplace_back(h.k, h.root);
  return out;
}

std::string squares_text(const std::vector<std::pair<long, Int>>& sq) {
  std::ostringstream os;
  for (std::size_t i = 0; i < sq.size(); ++i) os << (i ? ", " : "") << "y_" << sq[i].first << "=" << sq[i].second << "^2";
  return os.str();
}

json squares_json(const std::vector<std::pair<long, Int>>& sq) {
  json arr = json::array();
  for (auto& [k, r] : sq) arr.push_back({{"k", k}, {"root", r.str()}});
  return arr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perfect squares in binary recurrence sequences"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file mirroring the flags (use [subcommand] sections)");

  Emitter out;
  std::string output;
  unsigned precision = 256;
  app.add_flag("--json", out.json_mode, "JSON lines output");
  app.add_option("--output,-o", output, "write the report to a file");
  if (const char* env = std::getenv("PELLSQ_PRECISION")) {
    try {
      long v = parse_long("precision", env);
      if (v < 64 || v > (1 << 16)) throw UsageError("PELLSQ_PRECISION must lie in [64, 65536]");
      precision = static_cast<unsigned>(v);
    } catch (const UsageError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }
  app.add_option("--precision", precision, "float precision in bits (default from PELLSQ_PRECISION)")
      ->capture_default_str()
      ->check(CLI::Range(64u, 1u << 16));

  int status = 0;
  std::map<CLI::App*, std::function<void()>> handlers;
  auto on = [&](CLI::App* sub, std::function<void()> f) { handlers[sub] = std::move(f); };
  auto fail_if = [&](bool bad) {
    if (bad) status = 1;
  };

  // scan
  auto* scan = app.add_subcommand("scan", "conjecture scan over (b, d, a)");
  pellsq::ScanRanges rg;
  std::string amode = "both", steps = "both";
  bool all_d = false;
  unsigned jobs = pellsq::default_jobs();
  std::size_t min_distinct = 3;
  scan->add_option("--bmax", rg.b_max)->capture_default_str()->check(CLI::PositiveNumber);
  scan->add_option("--dmin", rg.d_min)->capture_default_str()->check(CLI::Range(2L, 1L << 40));
  scan->add_option("--dmax", rg.d_max)->capture_default_str();
  scan->add_option("--amode", amode, "near, small or both")->capture_default_str()->check(
      CLI::IsMember({"near", "small", "both"}));
  scan->add_option("--aradius", rg.a_radius, "near mode: a within this of sqrt(d) b^2")->capture_default_str();
  scan->add_option("--asmall", rg.a_small, "small mode: a in 1..asmall")->capture_default_str();
  scan->add_option("--window", rg.window, "index window for step 2")->capture_default_str();
  scan->add_option("--step1-window", rg.step1_window, "index window for step 1")->capture_default_str();
  scan->add_option("--steps", steps, "1, 2 or both")->capture_default_str()->check(CLI::IsMember({"1", "2", "both"}));
  scan->add_flag("--all-d", all_d, "include d that are not squarefree");
  scan->add_flag("--negative-square-only", rg.negative_square_only, "keep only -N_alpha a positive square");
  scan->add_option("--jobs,-j", jobs, "worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
  scan->add_option("--min-distinct", min_distinct, "report sequences with at least this many squares")
      ->capture_default_str();
  on(scan, [&] {
    rg.a_mode = amode == "near" ? pellsq::AMode::Near : amode == "small" ? pellsq::AMode::Small : pellsq::AMode::Both;
    rg.step1 = steps != "2";
    rg.step2 = steps != "1";
    rg.squarefree_only = !all_d;
    if (rg.d_max < rg.d_min) throw UsageError("--dmax must be >= --dmin");
    auto sum = pellsq::conjecture_scan(
        rg,
        [&](const pellsq::SequenceRecord& r) {
          if (r.distinct_count >= min_distinct || !r.violations.empty())
            out.record("sequence", record_json(r), record_text(r));
        },
        jobs);
    json j = {{"sequences", sum.sequences}, {"with_violation", sum.with_violation}, {"max_distinct", sum.max_distinct}};
    std::ostringstream os;
    os << "scanned " << sum.sequences << " sequences, " << sum.with_violation << " with a violation\n";
    for (auto& [k, v] : sum.max_distinct) os << "  max distinct squares [" << k << "] = " << v << '\n';
    out.record("scan_summary", j, os.str());
    fail_if(sum.with_violation > 0);
  });

  // squares
  auto* squares = app.add_subcommand("squares", "square terms y_k for one sequence");
  ParamFlags sp;
  long window = 40;
  bool exact = false;
  sp.add(squares);
  squares->add_option("--window", window, "scan k in [-window, window]")->capture_default_str()->check(
      CLI::Range(0L, 1000000L));
  squares->add_flag("--exact", exact, "skip the residue prefilter");
  on(squares, [&] {
    SeqParams p = sp.get();
    auto s = exact ? pellsq::scan_squares_exact(p, window) : pellsq::scan_squares(p, window);
    std::ostringstream os;
    os << p.str() << ": " << s.hits.size() << " hits, " << s.distinct_count << " distinct\n" << hits_text(s.hits);
    out.record("squares",
               {{"params", params_json(p)}, {"window", window}, {"distinct", s.distinct_count}, {"hits", hits_json(s.hits)}},
               os.str());
  });

  // decompose / verify
  auto* decompose = app.add_subcommand("decompose", "f, r, s with f(x_k + sqrt N) = alpha (r + s sqrt N')^4");
  ParamFlags dp;
  long dk = 1;
  dp.add(decompose);
  decompose->add_option("--k", dk, "index with y_k a square")->required();
  auto dec_json = [](const pellsq::Decomposition& dec) {
    const char* cs = dec.rep_case == pellsq::RepCase::A ? "a" : dec.rep_case == pellsq::RepCase::B ? "b" : "c";
    return json{{"f", dec.f.str()},
                {"r", dec.r.str()},
                {"s", dec.s.str()},
                {"sign", dec.sign},
                {"branch", dec.branch == pellsq::Branch::Plus ? "plus" : "minus"},
                {"g1sq", dec.g1sq.str()},
                {"fprime", dec.fprime.str()},
                {"case", cs},
                {"reduced", dec.reduced}};
  };
  on(decompose, [&] {
    SeqParams p = dp.get();
    auto dec = pellsq::decompose(p, dk);
    json j = dec_json(dec);
    std::ostringstream os;
    os << p.str() << " k=" << dk << ": f=" << dec.f << " r=" << dec.r << " s=" << dec.s << " sign=" << dec.sign
       << " case=" << j["case"].get<std::string>() << " f'=" << dec.fprime << (dec.reduced ? " (reduced)" : "") << '\n';
    out.record("decomposition", {{"params", params_json(p)}, {"k", dk}, {"decomposition", j}}, os.str());
  });

  auto* verify = app.add_subcommand("verify", "check a decomposition; computes one if --f is omitted");
  ParamFlags vp;
  long vk = 1;
  std::string vf, vr, vs, vfp = "1";
  int vsign = 1;
  vp.add(verify);
  verify->add_option("--k", vk)->required();
  verify->add_option("--f", vf);
  verify->add_option("--r", vr);
  verify->add_option("--s", vs);
  verify->add_option("--sign", vsign)->capture_default_str();
  verify->add_option("--fprime", vfp, "divisor of core(N_alpha) for case (a)")->capture_default_str();
  on(verify, [&] {
    SeqParams p = vp.get();
    pellsq::Decomposition dec;
    if (vf.empty()) {
      dec = pellsq::decompose(p, vk);
    } else {
      if (vr.empty() || vs.empty()) throw UsageError("--f needs --r and --s");
      dec.f = parse_int("f", vf);
      dec.r = parse_int("r", vr);
      dec.s = parse_int("s", vs);
      dec.sign = vsign;
      dec.fprime = parse_int("fprime", vfp);
    }
    auto v = pellsq::verify_decomposition(p, vk, dec);
    fail_if(!v.ok);
    out.record("verify", {{"params", params_json(p)}, {"k", vk}, {"decomposition", dec_json(dec)}, {"ok", v.ok},
                          {"reason", v.reason}},
               std::string(v.ok ? "ok" : "FAILED: " + v.reason));
  });

  // bounds / r0
  auto* bounds = app.add_subcommand("bounds", "E, Q, l0, phi and the d >= 105 inequalities for (params, k)");
  ParamFlags bp;
  long bk = 1;
  std::string bc = "0.75";
  bp.add(bounds);
  bounds->add_option("--k", bk)->required();
  bounds->add_option("--c", bc)->capture_default_str();
  auto bounds_json = [](const pellsq::BoundSet& bs) {
    return json{{"E", fmt(bs.E)},         {"Q", fmt(bs.Q)},
                {"k0", fmt(bs.k0)},       {"l0", fmt(bs.ell0)},
                {"c", fmt(bs.c)},         {"phi", fmt(bs.phi)},
                {"gn_sq", bs.gn_sq.str()}, {"E_ok", bs.E_ok},
                {"Q_ok", bs.Q_ok},        {"lhs_e_literal", fmt(bs.lhs_e_literal)},
                {"lhs_e_from_x", fmt(bs.lhs_e_from_x)}, {"lhs_q_literal", fmt(bs.lhs_q_literal)}};
  };
  on(bounds, [&] {
    SeqParams p = bp.get();
    auto bs = pellsq::bounds(p, bk, parse_real("c", bc), precision);
    std::ostringstream os;
    os << p.str() << " k=" << bk << ": E=" << fmt(bs.E) << " Q=" << fmt(bs.Q) << " l0=" << fmt(bs.ell0)
       << " phi=" << fmt(bs.phi) << " (|g|N)^2=" << bs.gn_sq << '\n'
       << "  0.1832|g|N sqrt(d) y/|N| = " << fmt(bs.lhs_e_literal) << " (from x: " << fmt(bs.lhs_e_from_x) << ")\n"
       << "  21.12 sqrt(d) y/(|g|N) = " << fmt(bs.lhs_q_literal) << '\n';
    fail_if(!bs.E_ok || !bs.Q_ok);
    out.record("bounds", {{"params", params_json(p)}, {"k", bk}, {"bounds", bounds_json(bs)}}, os.str());
  });

  auto* r0 = app.add_subcommand("r0", "r0 and the lower bounds for |x omega^(1/4) - y| given |q|");
  ParamFlags rp;
  long rk = 1;
  std::string rc = "0.75", rq;
  rp.add(r0);
  r0->add_option("--k", rk)->required();
  r0->add_option("--c", rc)->capture_default_str();
  r0->add_option("--q", rq, "the |q| of the approximation")->required();
  on(r0, [&] {
    SeqParams p = rp.get();
    auto bs = pellsq::bounds(p, rk, parse_real("c", rc), precision);
    auto res = pellsq::r0_and_lowerbound(bs, parse_real("q", rq));
    std::ostringstream os;
    os << "r0=" << res.r0 << " threshold=" << fmt(res.threshold) << " lower bounds: " << fmt(res.lb_mismatch) << " / "
       << fmt(res.lb_match) << '\n';
    out.record("r0",
               {{"params", params_json(p)}, {"k", rk}, {"r0", res.r0}, {"threshold", fmt(res.threshold)},
                {"lb_mismatch", fmt(res.lb_mismatch)}, {"lb_match", fmt(res.lb_match)}},
               os.str());
  });

  // gap
  auto* gap = app.add_subcommand("gap", "gap inequalities over all pairs of square terms");
  ParamFlags gp;
  long gwindow = 40;
  gp.add(gap);
  gap->add_option("--window", gwindow)->capture_default_str();
  on(gap, [&] {
    SeqParams p = gp.get();
    auto s = pellsq::scan_squares(p, gwindow);
    auto pairs = pellsq::gap_pairs(p, s.hits);
    std::size_t bad = 0;
    for (auto& pr : pairs) {
      auto& v = pr.verdict;
      bool broken = v.applicable && !v.satisfied;
      bad += broken;
      std::ostringstream os;
      os << "(" << pr.i.k << ", " << pr.j.k << ") part " << (v.part == pellsq::GapPart::A ? "a" : "b")
         << ": " << (v.applicable ? (v.satisfied ? "holds" : "VIOLATED") : "not applicable (" + v.reason + ")")
         << " threshold=" << fmt(pellsq::to_real(v.threshold));
      out.record("gap",
                 {{"params", params_json(p)}, {"ki", pr.i.k}, {"kj", pr.j.k},
                  {"part", v.part == pellsq::GapPart::A ? "a" : "b"}, {"applicable", v.applicable},
                  {"reason", v.reason}, {"constant", v.constant.str()}, {"threshold", v.threshold.str()},
                  {"satisfied", v.satisfied}},
                 os.str());
    }
    fail_if(bad > 0);
    out.record("gap_summary", {{"pairs", pairs.size()}, {"violated", bad}},
               std::to_string(pairs.size()) + " pairs, " + std::to_string(bad) + " violated");
  });

  // threshold
  auto* threshold = app.add_subcommand("threshold", "squares above max(1, 76|N|^1.5/(sqrt(d)(|g|N)^2))");
  ParamFlags tp;
  long twindow = 40;
  tp.add(threshold);
  threshold->add_option("--window", twindow)->capture_default_str();
  on(threshold, [&] {
    SeqParams p = tp.get();
    auto th = pellsq::prop41_threshold(p);
    auto s = pellsq::scan_squares(p, twindow);
    std::size_t above = pellsq::count_above(th, s.hits);
    fail_if(above > 1);
    std::ostringstream os;
    os << p.str() << ": threshold=" << fmt(th.value(precision)) << " (|g|N)^2=" << th.gn_sq << ", " << above
       << " distinct square(s) above\n"
       << hits_text(s.hits);
    out.record("threshold",
               {{"params", params_json(p)}, {"threshold", fmt(th.value(precision))}, {"gn_sq", th.gn_sq.str()},
                {"above", above}, {"hits", hits_json(s.hits)}},
               os.str());
  });

  // quartic
  auto* quartic = app.add_subcommand("quartic", "x^2 - d y^4 = n with 1 <= y <= ybound");
  std::string qd, qn, qy = "10000";
  quartic->add_option("--d", qd)->required();
  quartic->add_option("--n", qn)->required();
  quartic->add_option("--ybound", qy)->capture_default_str();
  on(quartic, [&] {
    Int d = parse_int("d", qd), n = parse_int("n", qn), yb = parse_int("ybound", qy);
    auto sols = pellsq::quartic_solutions(d, n, yb);
    json arr = json::array();
    std::ostringstream os;
    os << sols.size() << " solution(s) of x^2 - " << d << " y^4 = " << n << " with y <= " << yb << '\n';
    for (auto& [x, y] : sols) {
      arr.push_back({{"x", x.str()}, {"y", y.str()}});
      os << "  (" << x << ", " << y << ")\n";
    }
    out.record("quartic", {{"d", d.str()}, {"n", n.str()}, {"ybound", yb.str()}, {"solutions", arr}}, os.str());
  });

  // sieve
  auto* sieve = app.add_subcommand("sieve", "residue sieve on (a, t, d) mod M");
  pellsq::SieveSpec ss;
  std::string ssign = "4", sncond = "any", swhich = "either";
  std::size_t ssample = 8;
  bool su_classes = false;
  sieve->add_option("--modulus", ss.modulus)->capture_default_str()->check(CLI::Range(2L, 1000000L));
  sieve->add_option("--u", ss.u)->capture_default_str();
  sieve->add_option("--sign", ssign, "+4 or -4: t^2 - d u^2")->capture_default_str();
  sieve->add_option("--nalpha", sncond, "any, square, odd-square, even-square, odd, even")->capture_default_str();
  sieve->add_option("--b0", ss.b0)->capture_default_str();
  sieve->add_option("--which", swhich, "plus, minus or either: which of y_1, y_-1 is a square")
      ->capture_default_str()
      ->check(CLI::IsMember({"plus", "minus", "either"}));
  sieve->add_option("--sample", ssample, "survivors to list")->capture_default_str();
  sieve->add_flag("--u-classes", su_classes, "also report which u mod M admit survivors");
  on(sieve, [&] {
    long sg = parse_long("sign", ssign);
    if (sg != 4 && sg != -4) throw UsageError("--sign must be +4 or -4");
    ss.sign = static_cast<int>(sg);
    auto nc = pellsq::parse_ncond(sncond);
    if (!nc) throw UsageError("--nalpha: unknown condition '" + sncond + "'");
    ss.ncond = *nc;
    ss.which = swhich == "plus" ? pellsq::WhichY::Plus : swhich == "minus" ? pellsq::WhichY::Minus : pellsq::WhichY::Either;
    auto rep = pellsq::congruence_sieve(ss, ssample);
    json sample = json::array();
    for (auto& s : rep.sample) sample.push_back({{"a", s[0]}, {"t", s[1]}, {"d", s[2]}});
    json primes = json::array();
    for (auto& pr : rep.primes)
      primes.push_back({{"p", pr.p}, {"cap", pr.cap}, {"min_va", pr.min_va}, {"min_vd", pr.min_vd}});
    json j = {{"modulus", ss.modulus}, {"u", ss.u},           {"sign", ss.sign},
              {"nalpha", sncond},      {"b0", ss.b0},         {"which", swhich},
              {"survivors", rep.survivors}, {"forced_gcd", rep.forced_gcd.str()}, {"sample", sample},
              {"primes", primes}};
    std::ostringstream os;
    os << "mod " << ss.modulus << ", u=" << ss.u << ", t^2-du^2=" << (ss.sign > 0 ? "+4" : "-4") << ", -N_alpha "
       << sncond << ": ";
    if (rep.survivors == 0) {
      os << "no survivors\n";
    } else {
      os << rep.survivors << " survivors, gcd(a^2, d) divisible by " << rep.forced_gcd << '\n';
      for (auto& s : rep.sample) os << "  (a, t, d) = (" << s[0] << ", " << s[1] << ", " << s[2] << ")\n";
    }
    if (su_classes) {
      auto cls = pellsq::sieve_u_classes(ss);
      j["u_classes"] = cls;
      os << "u mod " << ss.modulus << " with survivors:";
      for (long c : cls) os << ' ' << c;
      os << '\n';
    }
    out.record("sieve", j, os.str());
  });

  // classify
  auto* classify = app.add_subcommand("classify", "case (a)/(b)/(c) for b = 1 and -N_alpha a square");
  ParamFlags cp;
  cp.add(classify);
  on(classify, [&] {
    SeqParams p = cp.get();
    auto c = pellsq::classify_theorem14(p);
    std::ostringstream os;
    os << p.str() << ": case (" << c.label << "), at most " << c.bound << " squares; N=" << c.n_alpha
       << " gcd(a^2,d)=" << c.gcd_a2d << " y_1=" << c.y_plus << (c.y_plus_square ? " (square)" : "")
       << " y_-1=" << c.y_minus << (c.y_minus_square ? " (square)" : "") << '\n';
    out.record("classify",
               {{"params", params_json(p)}, {"case", std::string(1, c.label)}, {"bound", c.bound},
                {"n_alpha", c.n_alpha.str()}, {"gcd_a2d", c.gcd_a2d.str()}, {"n_eps", c.n_eps},
                {"y_plus", c.y_plus.str()}, {"y_minus", c.y_minus.str()}, {"y_plus_square", c.y_plus_square},
                {"y_minus_square", c.y_minus_square}},
               os.str());
  });

  // lemma313
  auto* l313 = app.add_subcommand("lemma313", "minima of the d >= 105 inequalities over a range of d");
  long ldmin = 2, ldmax = 1000;
  l313->add_option("--dmin", ldmin)->capture_default_str()->check(CLI::Range(2L, 1L << 30));
  l313->add_option("--dmax", ldmax)->capture_default_str();
  on(l313, [&] {
    auto rep = pellsq::lemma313_scan(ldmin, ldmax, precision);
    auto pt_json = [](const pellsq::InequalityPoint& p) {
      return json{{"a", p.a.str()}, {"d", p.d.str()}, {"k", p.k},
                  {"x", p.x.str()}, {"y", p.y.str()}, {"n_alpha", p.n_alpha.str()}, {"value", fmt(p.value)}};
    };
    auto pt_text = [](const pellsq::InequalityPoint& p) {
      std::ostringstream os;
      os << fmt(p.value, 8) << " at (a, d, k) = (" << p.a << ", " << p.d << ", " << p.k << "), (x, y) = (" << p.x
         << ", " << p.y << ")";
      return os.str();
    };
    json j = {{"dmin", rep.d_min}, {"dmax", rep.d_max}, {"claim_d", rep.claim_d}, {"checked", rep.checked}};
    std::ostringstream os;
    os << "checked " << rep.checked << " points with d in [" << rep.d_min << ", " << rep.d_max << "]\n";
    auto opt = [&](const char* key, const char* label, const std::optional<pellsq::InequalityPoint>& p) {
      if (!p) return;
      j[key] = pt_json(*p);
      os << "  " << label << ": " << pt_text(*p) << '\n';
    };
    opt("min_e_from_x", "min E-side (from x) for d >= 105", rep.min_e_from_x);
    opt("min_e_literal", "min E-side (literal) for d >= 105", rep.min_e_literal);
    opt("min_q", "min Q-side for d >= 105", rep.min_q);
    auto list = [&](const char* key, const char* label, const std::vector<pellsq::InequalityPoint>& v) {
      json arr = json::array();
      for (auto& p : v) {
        arr.push_back(pt_json(p));
        os << "  " << label << ": " << pt_text(p) << '\n';
      }
      j[key] = arr;
    };
    list("violations_e", "E-side below 1.13", rep.violations_e);
    list("violations_q", "Q-side below 217", rep.violations_q);
    list("e_below_one", "E < 1", rep.e_below_one);
    list("e_proxy_below_one", "E-side (from x) < 1", rep.e_proxy_below_one);
    fail_if(!rep.violations_e.empty() || !rep.violations_q.empty());
    out.record("lemma313", j, os.str());
  });

  // lemma22
  auto* l22 = app.add_subcommand("lemma22", "denominator ratios and the binomial inequalities");
  unsigned lrmax = 155, lrmin = 1;
  std::string ldprime = "1";
  bool lboth = false, lrows = false;
  l22->add_option("--rmax", lrmax)->capture_default_str()->check(CLI::Range(1u, 2000u));
  l22->add_option("--rmin", lrmin)->capture_default_str();
  l22->add_option("--dprime", ldprime)->capture_default_str();
  l22->add_flag("--both-m", lboth, "lcm over m = 1 and m = 3");
  l22->add_flag("--rows", lrows, "print every r");
  on(l22, [&] {
    pellsq::PrecisionScope prec(precision);
    Int dprime = parse_int("dprime", ldprime);
    auto rep = pellsq::denominator_ratios(lrmax, dprime, lboth, lrmin);
    auto rows_b = pellsq::binomial_rows(lrmax);
    bool b_ok = std::all_of(rows_b.begin(), rows_b.end(), [](auto& r) { return r.first_holds && r.second_holds; });
    if (lrows)
      for (auto& row : rep.rows)
        out.record("lemma22_row", {{"r", row.r}, {"norm1", fmt(row.norm1)}, {"norm2", fmt(row.norm2)}},
                   "  r=" + std::to_string(row.r) + " " + fmt(row.norm1) + " " + fmt(row.norm2));
    std::ostringstream os;
    os << "d'=" << dprime << ", r in [" << lrmin << ", " << lrmax << "]: max ratio 1 = " << fmt(rep.max1) << " at r="
       << rep.argmax1 << ", max ratio 2 = " << fmt(rep.max2) << " at r=" << rep.argmax2 << '\n'
       << "binomial inequalities " << (b_ok ? "hold" : "FAIL") << " for r <= " << lrmax << '\n';
    fail_if(!b_ok || !(rep.max1 < 1) || !(rep.max2 < 1));
    out.record("lemma22",
               {{"dprime", dprime.str()}, {"rmin", lrmin}, {"rmax", lrmax}, {"max1", fmt(rep.max1)},
                {"argmax1", rep.argmax1}, {"max2", fmt(rep.max2)}, {"argmax2", rep.argmax2},
                {"binomial_ok", b_ok}},
               os.str());
  });

  // examples
  auto* examples = app.add_subcommand("examples", "reproduce the listed tables and families");
  std::string eset = "all";
  long ewindow = 80, ecount = 4;
  examples->add_option("--set", eset, "table, step1, more, families or all")->capture_default_str()->check(
      CLI::IsMember({"table", "step1", "more", "families", "all"}));
  examples->add_option("--window", ewindow)->capture_default_str();
  examples->add_option("--count", ecount, "members per family")->capture_default_str()->check(CLI::Range(1L, 50L));
  on(examples, [&] {
    auto listed = [&](const std::vector<pellsq::ListedExample>& v, const char* set) {
      for (auto& ex : v) {
        auto got = found(pellsq::scan_squares(ex.p, ewindow));
        bool ok = got == ex.squares;
        fail_if(!ok);
        out.record("example",
                   {{"set", set}, {"label", ex.label}, {"params", params_json(ex.p)}, {"expected", squares_json(ex.squares)},
                    {"found", squares_json(got)}, {"match", ok}},
                   std::string(ok ? "ok   " : "DIFF ") + ex.label + ": " + squares_text(got) +
                       (ok ? "" : "\n     expected " + squares_text(ex.squares)));
      }
    };
    if (eset == "table" || eset == "all") listed(pellsq::table_d2(), "table");
    if (eset == "step1" || eset == "all") listed(pellsq::step1_examples(), "step1");
    if (eset == "more" || eset == "all")
      for (auto& p : pellsq::more_four_square_examples()) {
        auto s = pellsq::scan_squares(p, ewindow);
        bool ok = s.distinct_count == 4;
        fail_if(!ok);
        out.record("example", {{"set", "more"}, {"params", params_json(p)}, {"distinct", s.distinct_count}, {"match", ok}},
                   std::string(ok ? "ok   " : "DIFF ") + p.str() + ": " + squares_text(found(s)));
      }
    if (eset == "families" || eset == "all") {
      auto fam = [&](const char* name, const std::vector<pellsq::FamilyMember>& v) {
        for (auto& m : v) {
          bool ok = true;
          for (auto& [k, r] : m.squares) {
            auto t = pellsq::element(m.p, k);
            ok = ok && t.integral() && t.y() == r * r;
          }
          fail_if(!ok);
          out.record("family", {{"family", name}, {"params", params_json(m.p)}, {"squares", squares_json(m.squares)},
                                {"match", ok}},
                     std::string(ok ? "ok   " : "DIFF ") + name + " " + m.p.str() + ": " + squares_text(m.squares));
        }
      };
      fam("three-squares", pellsq::family_three_squares(ecount));
      fam("prime-norm", pellsq::family_prime_norm(ecount));
      fam("case-a", pellsq::family_case_a(ecount));
      fam("lower-bound", pellsq::family_lower_bound(ecount));
    }
  });

  try {
    app.parse(argc, argv);
    out.open(output);
    pellsq::PrecisionScope prec(precision);
    for (auto* sub : app.get_subcommands()) handlers.at(sub)();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const pellsq::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 2;
  } catch (const pellsq::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return 2;
  }
  return status;
}

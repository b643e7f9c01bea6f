#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sosgap/algebra.hpp"
#include "sosgap/ball.hpp"
#include "sosgap/bounds.hpp"
#include "sosgap/certify.hpp"
#include "sosgap/elements.hpp"
#include "sosgap/error.hpp"
#include "sosgap/permutation.hpp"

using namespace sosgap;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

struct Context {
  fs::path work;
  std::string cli;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

Rational q(const std::string& s) { return parse_rational(s); }

// Runs the command line tool; stdout and stderr go to log.
int run_cli(const Context& ctx, const std::string& args, const fs::path& log) {
  const std::string cmd = "'" + ctx.cli + "' " + args + " >'" + log.string() + "' 2>&1";
  const int raw = std::system(cmd.c_str());
  if (raw == -1 || !WIFEXITED(raw)) return -1;
  return WEXITSTATUS(raw);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path fresh_dir(const Context& ctx, const std::string& name) {
  const fs::path d = ctx.work / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void require_identities(Outcome& out, const std::vector<IdentityCheck>& checks,
                        const std::set<std::string>& ids, const std::string& family, int n_lo, int n_hi) {
  std::map<std::pair<std::string, int>, int> seen;
  for (const auto& c : checks) {
    if (!ids.count(c.id)) continue;
    out.require(c.pass && c.max_abs_deviation == 0,
                c.id + " " + c.family + " n=" + std::to_string(c.n) + " m=" + std::to_string(c.m) + " " + c.detail);
    ++seen[{c.id, c.n}];
  }
  for (const auto& id : ids)
    for (int n = n_lo; n <= n_hi; ++n)
      out.require(seen.count({id, n}) > 0, id + " " + family + " n=" + std::to_string(n) + " present");
}

// Identity suite: edge decomposition of the Laplacian, Sq + Adj + Op = Delta^2
// and the explicit square decompositions, ranks 3 to 5.
Outcome criterion1(const Context&) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t total = 0;
  for (auto kind : {FamilyKind::SpecialLinear, FamilyKind::SpecialAutFree}) {
    IdentityOptions opt;
    opt.n_max = 5;
    opt.m_max = 5;
    opt.symmetrization = false;
    opt.x_identities = false;
    const GroupFamily fam{kind, 5};
    const auto checks = verify_identities(fam, opt);
    require_identities(out, checks,
                       {"laplacian-edge-sum", "square-split", "laplacian-squares", "sq-squares", "op-squares"},
                       fam.kind_name(), 3, 5);
    for (const auto& c : checks) out.require(c.pass, c.id + " " + c.family + " n=" + std::to_string(c.n));
    total += checks.size();

    // Independent recomputation of Delta_n^2 at each rank.
    for (int n = 3; n <= 5; ++n) {
      const GroupFamily fn{kind, n};
      const BallPtr u = cached_ball(fn, 2);
      const AlgebraElement d = laplacian(fn, n, u).value;
      const SqAdjOp parts = sq_adj_op(fn, n, u);
      out.require(parts.sq.value + parts.adj.value + parts.op.value == mul_direct(d, d, u),
                  "Sq + Adj + Op = Delta^2 for " + fn.name());
    }
  }
  const double secs = seconds_since(t0);
  out.require(secs < 600, "runtime under 10 min");
  out.note(std::to_string(total) + " exact checks, " + fmt(secs) + " s");
  return out;
}

// Symmetrization constants and the closed form of X_n by exhaustive A_m sums.
Outcome criterion2(const Context&) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t total = 0;
  for (auto kind : {FamilyKind::SpecialLinear, FamilyKind::SpecialAutFree}) {
    IdentityOptions opt;
    opt.n_max = 5;
    opt.m_max = 6;
    opt.symmetrization = true;
    opt.x_identities = true;
    opt.x_n_max = 5;
    const GroupFamily fam{kind, 6};
    const auto checks = verify_identities(fam, opt);
    for (const auto& c : checks) out.require(c.pass, c.id + " " + c.family + " n=" + std::to_string(c.n));
    std::set<std::pair<int, int>> lap, adj, op;
    bool x4 = false, x5 = false;
    for (const auto& c : checks) {
      if (c.id == "laplacian-symmetrization") lap.insert({c.n, c.m});
      if (c.id == "adj-symmetrization") adj.insert({c.n, c.m});
      if (c.id == "op-symmetrization") op.insert({c.n, c.m});
      if (c.id == "x-closed-form" && c.n == 4) x4 = c.pass;
      if (c.id == "x-closed-form" && c.n == 5) x5 = c.pass;
    }
    for (int m = 4; m <= 6; ++m)
      for (int n = 3; n <= std::min(m, 5); ++n) {
        const std::string where = fam.kind_name() + " n=" + std::to_string(n) + " m=" + std::to_string(m);
        out.require(lap.count({n, m}) > 0, "Laplacian symmetrization " + where);
        out.require(adj.count({n, m}) > 0, "Adj symmetrization " + where);
        if (n >= 4) out.require(op.count({n, m}) > 0, "Op symmetrization " + where);
      }
    out.require(x4 && x5, "X closed form at n = 4, 5 for " + fam.kind_name());
    total += checks.size();

    // The special coefficient: sum over A_4 of sigma(Adj_3) is 3 Adj_4.
    const GroupFamily f4{kind, 4};
    const BallPtr u = cached_ball(f4, 2);
    const AlgebraElement adj3 = sq_adj_op(f4, 3, u).adj.value;
    const AlgebraElement adj4 = sq_adj_op(f4, 4, u).adj.value;
    AlgebraElement sum(u);
    for (const auto& sigma : alternating_group(4)) sum += act_algebra(sigma, adj3);
    out.require(sum == Rational(3) * adj4, "sum over A_4 of sigma(Adj_3) = 3 Adj_4 for " + f4.name());
    out.require(!(sum == Rational(2) * adj4), "coefficient 3 is not 2 for " + f4.name());
  }
  const double secs = seconds_since(t0);
  out.require(secs < 600, "runtime under 10 min");
  out.note(std::to_string(total) + " exact checks, " + fmt(secs) + " s");
  return out;
}

// Runs the pipeline and independent verification for one target.
void end_to_end(const Context& ctx, Outcome& out, const std::string& target, const Rational& threshold,
                const std::string& dir_name) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = fresh_dir(ctx, dir_name);
  const int rc = run_cli(ctx, "pipeline --family sl --rank 3 --radius 2 --target " + target + " --out-dir '" +
                                  dir.string() + "' -q",
                         dir / "pipeline.log");
  const double secs = seconds_since(t0);
  out.require(rc == 0, "pipeline exit code 0 (got " + std::to_string(rc) + ", see " +
                           (dir / "pipeline.log").string() + ")");
  const fs::path cert = dir / ("sl3-" + target + "-r2.cert");
  if (!fs::exists(cert)) {
    out.require(false, "certificate written");
    return;
  }
  std::ifstream is(cert);
  const CertificateHeader h = read_certificate_header(is);
  out.require(h.valid, "certificate valid");
  out.require(h.radius == 2, "radius 2");
  out.require(h.target.to_string() == TargetDescriptor::parse(target).to_string(), "target " + target);
  out.require(h.certified_gap >= threshold && h.lambda - h.epsilon == h.certified_gap,
              "certified gap " + decimal(h.certified_gap, 6) + " >= " + decimal(threshold, 2));
  out.require(secs < 3600, "runtime under 60 min");

  const int vrc = run_cli(ctx, "verify-cert --in '" + cert.string() + "' -q", dir / "verify.log");
  out.require(vrc == 0, "verify-cert in a fresh process accepts (exit " + std::to_string(vrc) + ")");
  out.note("lambda " + rational_string(h.lambda) + ", epsilon " + decimal(h.epsilon, 12) + ", certified gap " +
           decimal(h.certified_gap, 6) + ", " + fmt(secs, 1) + " s");

  const fs::path json_path = dir / ("sl3-" + target + "-r2.bounds.json");
  if (fs::exists(json_path)) {
    const auto rows = nlohmann::json::parse(slurp(json_path));
    bool m3 = false;
    for (const auto& r : rows)
      if (r.at("m") == 3 && r.at("valid") == true) m3 = true;
    out.require(m3, "bound table has a valid m = 3 row");
  } else {
    out.require(false, "bound table written");
  }
}

Outcome criterion3(const Context& ctx) {
  Outcome out;
  end_to_end(ctx, out, "delta2", q("1/4"), "criterion3");
  return out;
}

Outcome criterion4(const Context& ctx) {
  Outcome out;
  end_to_end(ctx, out, "adj", q("1/10"), "criterion4");
  return out;
}

// floor(sqrt(x) 1e5) / 1e5 in long double, as an independent check of the exact routine.
std::string float_kappa(long double x) {
  const long double v = std::floor(std::sqrt(x) * 100000.0L);
  return decimal(Rational(static_cast<long>(v), 100000), 5);
}

Outcome criterion5(const Context&) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  constexpr auto SL = FamilyKind::SpecialLinear;
  constexpr auto SAUT = FamilyKind::SpecialAutFree;
  auto base = [](FamilyKind f, int n, BaseFact::Kind kind, const std::string& k, const std::string& lambda) {
    BaseFact b;
    b.family = f;
    b.n = n;
    b.kind = kind;
    b.k = q(k);
    b.lambda = q(lambda);
    b.radius = 2;
    b.provenance = "cite:published";
    b.validate();
    return b;
  };
  const Rational lambda5 = q("1.29999"), mu = q("0.277");

  struct Row {
    std::string name;
    Rational gap;
    int m;
    std::string expected;
  };
  std::vector<Row> rows;
  rows.push_back({"kappa_5", lambda5, 5, "0.18027"});
  const GapResult g6 = method2(lambda5, mu, 3, 6);
  out.require(g6.valid, "method II applies at n = 6 with k = 3");
  rows.push_back({"kappa_6", g6.gap, 6, "0.00983"});
  const BaseFact two = base(SAUT, 5, BaseFact::Kind::AdjPlusKOp, "2", "0.138");
  const BaseFact three = base(SAUT, 5, BaseFact::Kind::AdjPlusKOp, "3", "1.316");
  for (int m : {7, 8}) {
    const GapResult g = method1(two, m);
    out.require(g.valid, "method I applies at m = " + std::to_string(m) + " with k = 2");
    rows.push_back({"kappa_" + std::to_string(m), g.gap, m, m == 7 ? "0.05233" : "0.04965"});
  }
  out.require(!method1(two, 6).valid, "k = 2 base does not reach m = 6");
  out.require(!method1(three, 8).valid, "k = 3 base does not reach m = 8");
  const GapResult g9 = method1(three, 9);
  out.require(g9.valid, "method I applies at m = 9 with k = 3");
  rows.push_back({"kappa_9", g9.gap, 9, "0.14606"});

  for (const auto& r : rows) {
    const std::string got = decimal(kazhdan_constant(r.gap, SAUT, r.m), 5);
    const long double s = static_cast<long double>(generating_set_size(SAUT, r.m));
    const std::string oracle = float_kappa(2.0L * r.gap.get_d() / s);
    out.require(got == oracle, r.name + " exact " + got + " agrees with floating " + oracle);
    out.require(got == r.expected, r.name + " = " + got + ", published " + r.expected);
    out.note(r.name + " " + got + (got == r.expected ? "" : " (published " + r.expected + ")"));
  }

  struct Closed {
    BaseFact base;
    long double c;
  };
  const std::vector<Closed> closed = {
      {base(SL, 3, BaseFact::Kind::AdjPlusKOp, "0", "0.157999"), 0.157999L},
      {base(SL, 4, BaseFact::Kind::AdjPlusKOp, "1", "0.82"), 0.41L},
      {base(SL, 5, BaseFact::Kind::AdjPlusKOp, "1.5", "1.5"), 0.5L},
  };
  std::vector<int> ms;
  for (int m = 3; m <= 10; ++m) ms.push_back(m);
  for (const auto& [b, c] : closed) {
    const auto table = bound_table({b}, ms);
    const int from = b.n == 5 ? 6 : b.n;
    for (const auto& r : table) {
      const bool expect = r.m >= from;
      out.require(r.valid == expect, "closed form from " + b.describe() + " validity at n = " + std::to_string(r.m));
      if (!expect || !r.valid) continue;
      const std::string want = float_kappa(c * (r.m - 2) / (static_cast<long double>(r.m) * r.m - r.m));
      const std::string got = decimal(r.kappa, 5);
      out.require(got == want, "closed form c = " + fmt(static_cast<double>(c), 6) +
                                   " at n = " + std::to_string(r.m) + ": " + got + " vs " + want);
    }
  }
  const double secs = seconds_since(t0);
  out.require(secs < 1.0, "pure arithmetic under 1 s (" + fmt(secs, 4) + " s)");
  return out;
}

// Checks one witness independently of the library's own exactness flag.
void check_witness(Outcome& out, const SquaresWitness& w, const BallPtr& u, const GroupFamily& fam) {
  const AlgebraElement delta = laplacian(fam, fam.rank, u).value;
  const AlgebraElement defect = w.bound * delta - w.lhs;
  // defect must be 2 - v - v* for one v of word length <= radius; zero when v is the identity.
  std::uint32_t v = 0;
  for (const auto& [i, c] : defect.terms())
    if (c < 0) {
      v = i;
      break;
    }
  bool shape = defect.is_zero() || (v != 0 && u->word_length(v) <= static_cast<std::uint32_t>(w.radius) && w.radius <= 2);
  if (shape && !defect.is_zero()) {
    AlgebraElement expect = AlgebraElement::basis(u, 0, 2);
    expect -= AlgebraElement::basis(u, v);
    expect -= AlgebraElement::basis(u, u->inverse(v));
    shape = expect == defect;
  }
  out.require(shape, w.label + ": left side is bound Delta minus one defect (2 - v - v*)");
  out.require(w.bound == order_unit_bound(w.radius), w.label + ": bound matches the order unit bound");
  AlgebraElement sum(u);
  for (const auto& [c, xi] : w.squares) {
    if (c <= 0) out.require(false, w.label + ": positive weights");
    sum += c * mul_direct(star(xi), xi, u);
  }
  out.require(sum == w.lhs, w.label + ": squares sum to the left side");
}

Outcome criterion6(const Context&) {
  Outcome out;
  const GroupFamily sl3{FamilyKind::SpecialLinear, 3};
  const BallPtr u = cached_ball(sl3, 2);
  // b = 10^-9 / 4 (2 - s - s*) has l1 norm 10^-9.
  const std::uint32_t s = u->generator_position(0);
  AlgebraElement b = AlgebraElement::basis(u, 0, 2);
  b -= AlgebraElement::basis(u, s);
  b -= AlgebraElement::basis(u, u->inverse(s));
  b = q("1/4000000000") * b;
  out.require(l1_norm(b) == q("1/1000000000"), "anchor residual has l1 norm 1e-9");
  out.require(epsilon_bound(b, 2) == q("4/1000000000"), "epsilon_bound(1e-9, R = 2) = 4e-9");
  out.note("epsilon_bound(1e-9, 2) = " + rational_string(epsilon_bound(b, 2)));

  const std::vector<std::pair<int, Rational>> units = {{1, 2}, {2, 4}, {3, 16}, {4, 16}};
  for (const auto& [r, want] : units)
    out.require(order_unit_bound(r) == want, "order_unit_bound(" + std::to_string(r) + ") = " + rational_string(want));

  for (auto kind : {FamilyKind::SpecialLinear, FamilyKind::SpecialAutFree}) {
    const GroupFamily fam{kind, 3};
    const BallPtr v = cached_ball(fam, 2);
    const auto witnesses = order_unit_witnesses(fam);
    const std::size_t g = static_cast<std::size_t>(fam.generator_count());
    out.require(witnesses.size() == g + g * g, fam.name() + ": one witness per generator and two-letter product");
    std::size_t exact = 0;
    for (const auto& w : witnesses) {
      check_witness(out, w, v, fam);
      if (w.exact) ++exact;
    }
    out.require(exact == witnesses.size(), fam.name() + ": library reports every witness exact");
    out.note(fam.name() + ": " + std::to_string(witnesses.size()) + " witnesses verified");
  }
  return out;
}

Outcome criterion7(const Context& ctx) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = fresh_dir(ctx, "criterion7");
  const int rc = run_cli(ctx, "pipeline --family sl --rank 2 --radius 2 --lambda 0.1 --out-dir '" + dir.string() +
                                  "' -q",
                         dir / "pipeline.log");
  out.require(rc == 2, "exit code 2 (got " + std::to_string(rc) + ")");
  const fs::path cert = dir / "sl2-delta2-r2.cert";
  if (fs::exists(cert)) {
    std::ifstream is(cert);
    const CertificateHeader h = read_certificate_header(is);
    out.require(!h.valid, "certificate marked invalid");
    out.note("epsilon " + decimal(h.epsilon, 6) + " exceeds lambda 0.1, " + fmt(seconds_since(t0), 1) + " s");
  } else {
    out.require(false, "certificate written");
  }
  return out;
}

Outcome criterion8(const Context&) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const GroupFamily fam{FamilyKind::SpecialAutFree, 5};
  const BallPtr u = cached_ball(fam, 2);
  const AlgebraElement delta = laplacian(fam, 5, u).value;
  const SqAdjOp parts = sq_adj_op(fam, 5, u);
  auto target = [&](int k) {
    TargetDescriptor t;
    t.kind = TargetDescriptor::Kind::AdjPlusKOp;
    t.k = k;
    return build_target(t, fam, u);
  };
  const std::vector<std::pair<std::string, AlgebraElement>> elements = {
      {"Delta_5", delta},         {"Sq_5", parts.sq.value}, {"Adj_5", parts.adj.value},
      {"Op_5", parts.op.value},   {"Adj_5+2Op_5", target(2)}, {"Adj_5+3Op_5", target(3)},
  };
  out.require(elements[4].second == parts.adj.value + Rational(2) * parts.op.value, "Adj_5+2Op_5 target");
  out.require(elements[5].second == parts.adj.value + Rational(3) * parts.op.value, "Adj_5+3Op_5 target");
  out.require(static_cast<int>(delta.support_size()) == 1 + fam.generator_count(), "Delta_5 support 1 + |S|");

  const auto a5 = alternating_group(5);
  out.require(a5.size() == 60, "|A_5| = 60");
  const fs::path dir = fs::temp_directory_path();
  for (const auto& [name, x] : elements) {
    out.require(!x.is_zero(), name + " nonzero");
    out.require(augmentation(x) == 0, name + " in the augmentation ideal");
    out.require(star(x) == x, name + " star invariant");
    bool invariant = true;
    for (const auto& sigma : a5)
      if (!(act_algebra(sigma, x) == x)) invariant = false;
    out.require(invariant, name + " A_5 invariant");

    std::ostringstream first;
    write_element(first, x);
    std::istringstream in(first.str());
    const AlgebraElement back = read_element(in, u);
    std::ostringstream second;
    write_element(second, back);
    out.require(back == x && first.str() == second.str(), name + " text round trip bit-exact");
    const fs::path p = dir / ("sosgap_acceptance_" + std::to_string(::getpid()) + ".elem");
    save_element_file(x, p.string());
    const AlgebraElement loaded = load_element_file(p.string(), u);
    out.require(loaded == x && slurp(p) == first.str(), name + " file round trip bit-exact");
    fs::remove(p);
  }
  const AlgebraElement d2 = mul_direct(delta, delta, u);
  out.require(parts.sq.value + parts.adj.value + parts.op.value == d2, "Sq_5 + Adj_5 + Op_5 = Delta_5^2");
  const double secs = seconds_since(t0);
  out.require(secs < 1800, "runtime under 30 min");
  out.note("B_2 of saut5 has " + std::to_string(u->size()) + " elements, " + fmt(secs, 1) + " s");
  return out;
}

Outcome criterion9(const Context& ctx) {
  Outcome out;
  std::vector<std::string> bytes;
  for (int run = 1; run <= 2; ++run) {
    const fs::path dir = fresh_dir(ctx, "criterion9-run" + std::to_string(run));
    const int rc = run_cli(ctx, "pipeline --family sl --rank 3 --radius 2 --out-dir '" + dir.string() + "' -q",
                           dir / "pipeline.log");
    out.require(rc == 0, "run " + std::to_string(run) + " exit code 0 (got " + std::to_string(rc) + ")");
    const fs::path cert = dir / "sl3-delta2-r2.cert";
    bytes.push_back(fs::exists(cert) ? slurp(cert) : std::string());
  }
  out.require(!bytes[0].empty(), "certificate written");
  out.require(bytes[0] == bytes[1], "certificates byte-identical");
  out.note(std::to_string(bytes[0].size()) + " bytes per certificate");
  return out;
}

const std::map<int, std::pair<std::string, std::function<Outcome(const Context&)>>> kCriteria = {
    {1, {"exact identity suite, both families, n = 3..5", criterion1}},
    {2, {"symmetrization constants and X closed form, m <= 6", criterion2}},
    {3, {"SL3 Delta^2 certificate, gap >= 0.25, fresh-process verification", criterion3}},
    {4, {"SL3 Adj certificate, gap >= 0.10", criterion4}},
    {5, {"Kazhdan constants and closed-form bound tables", criterion5}},
    {6, {"epsilon anchors, order unit bounds, exact witnesses at n = 3", criterion6}},
    {7, {"SL2 negative control exits 2", criterion7}},
    {8, {"SAut5 elements: invariance, square split, serialization", criterion8}},
    {9, {"determinism of the SL3 certificate", criterion9}},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> which;
  Context ctx;
  std::string work = "acceptance-work";
  ctx.cli = SOSGAP_CLI_PATH;
  app.add_option("--criterion", which, "criteria to run (default: all)")->check(CLI::Range(1, 9));
  app.add_option("--work-dir", work, "scratch directory")->capture_default_str();
  app.add_option("--cli", ctx.cli, "command line tool")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  ctx.work = work;
  fs::create_directories(ctx.work);
  if (which.empty())
    for (const auto& [k, v] : kCriteria) which.push_back(k);

  int failed = 0;
  for (int k : which) {
    const auto& [label, fn] = kCriteria.at(k);
    Outcome out;
    try {
      out = fn(ctx);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    for (const auto& n : out.notes) std::cout << "  [" << k << "] " << n << '\n';
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << label << std::endl;
    if (!out.pass) ++failed;
  }
  return failed ? 1 : 0;
}

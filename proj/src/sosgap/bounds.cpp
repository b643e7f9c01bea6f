#include "sosgap/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "sosgap/certify.hpp"
#include "sosgap/error.hpp"

namespace sosgap {

std::string decimal(const Rational& q, int digits) {
  mpz_class scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  mpz_class v = q.get_num() * scale;
  mpz_fdiv_q(v.get_mpz_t(), v.get_mpz_t(), q.get_den_mpz_t());
  const bool neg = sgn(v) < 0;
  if (neg) v = -v;
  std::string s = v.get_str();
  if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, digits + 1 - s.size(), '0');
  s.insert(s.size() - digits, ".");
  return (neg ? "-" : "") + s;
}

namespace {

std::string family_label(FamilyKind f) { return GroupFamily{f, 3}.kind_name(); }


}  // namespace

void BaseFact::validate() const {
  require(n >= 2, ErrorCode::InvalidArgument, "base rank must be at least 2");
  require(sgn(lambda) > 0, ErrorCode::InvalidArgument, "base lambda must be positive");
  require(sgn(k) >= 0, ErrorCode::InvalidArgument, "base k must be nonnegative");
  require(radius >= 2, ErrorCode::InvalidArgument, "base radius must be at least 2");
  if (kind == Kind::AdjPlusKOp) require(n >= 3, ErrorCode::InvalidArgument, "Adj bases need rank >= 3");
}

std::string BaseFact::describe() const {
  std::ostringstream os;
  os << family_label(family) << n << ' ';
  if (kind == Kind::DeltaSquared)
    os << "delta^2";
  else
    os << "adj+" << rational_string(k) << "op";
  os << " lambda=" << rational_string(lambda) << " R=" << radius;
  return os.str();
}

mpz_class hyper(int n) {
  require(n >= 3, ErrorCode::InvalidArgument, "hypersimplex number needs n >= 3");
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n - 1));
  return f * (n - 2) / 2;
}

GapResult method1(const BaseFact& base, int m) {
  GapResult r;
  if (base.kind != BaseFact::Kind::AdjPlusKOp) {
    r.reason = "method I needs an Adj + k Op base";
    return r;
  }
  if (m < base.n || base.n < 3) {
    r.reason = "m < n";
    return r;
  }
  if (base.k * (base.n - 3) > m - 3) {
    r.reason = "k(n-3) = " + rational_string(base.k * (base.n - 3)) + " exceeds m-3 = " + std::to_string(m - 3);
    return r;
  }
  r.valid = true;
  r.gap = base.lambda * (m - 2) / (base.n - 2);
  return r;
}

GapResult method2(const Rational& lambda_prev, const Rational& mu, const Rational& k, int n) {
  GapResult r;
  if (sgn(lambda_prev) <= 0 || sgn(mu) < 0 || sgn(k) < 0) {
    r.reason = "method II needs lambda > 0, mu >= 0, k >= 0";
    return r;
  }
  if (n < 5) {
    r.reason = "method II needs n >= 5";
    return r;
  }
  if (Rational(n) < k + 3) {
    r.reason = "n = " + std::to_string(n) + " is below k+3 = " + rational_string(k + 3);
    return r;
  }
  r.valid = true;
  r.gap = (3 * lambda_prev + mu) / (3 * Rational(hyper(n)));
  return r;
}

std::int64_t generating_set_size(FamilyKind family, int m) {
  const std::int64_t pairs = static_cast<std::int64_t>(m) * (m - 1);
  return family == FamilyKind::SpecialLinear ? 2 * pairs : 4 * pairs;
}

Rational kazhdan_constant(const Rational& gap, FamilyKind family, int m) {
  require(sgn(gap) > 0, ErrorCode::InvalidArgument, "gap must be positive");
  require(m >= 2, ErrorCode::InvalidArgument, "rank must be at least 2");
  // floor(sqrt(x) 10^5) = isqrt(floor(x 10^10))
  Rational x = 2 * gap / generating_set_size(family, m) * Rational(mpz_class("10000000000"));
  mpz_class f, root;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  mpz_sqrt(root.get_mpz_t(), f.get_mpz_t());
  Rational k(root, 100000);
  k.canonicalize();
  return k;
}

std::vector<BoundRow> bound_table(const std::vector<BaseFact>& bases, const std::vector<int>& ms) {
  std::vector<FamilyKind> families;
  for (const auto& b : bases) {
    b.validate();
    if (std::find(families.begin(), families.end(), b.family) == families.end()) families.push_back(b.family);
  }
  std::vector<BoundRow> rows;
  for (FamilyKind fam : families)
    for (int m : ms) {
      BoundRow best;
      best.family = fam;
      best.m = m;
      best.method = "-";
      int best_n = 0;
      std::vector<std::string> reasons;
      auto offer = [&](const std::string& method, const Rational& gap, int radius, int n,
                       std::vector<std::size_t> used) {
        const bool better = !best.valid || gap > best.gap ||
                            (gap == best.gap && (radius < best.radius || (radius == best.radius && n < best_n)));
        if (!better) return;
        best.valid = true;
        best.method = method;
        best.gap = gap;
        best.radius = radius;
        best.bases = std::move(used);
        best_n = n;
      };
      for (std::size_t i = 0; i < bases.size(); ++i) {
        const BaseFact& b = bases[i];
        if (b.family != fam) continue;
        if (b.kind == BaseFact::Kind::DeltaSquared) {
          if (b.n == m) offer("direct", b.lambda, b.radius, b.n, {i});
          for (std::size_t j = 0; j < bases.size(); ++j) {
            const BaseFact& a = bases[j];
            if (a.family != fam || a.kind != BaseFact::Kind::AdjPlusKOp || a.n != 5 || b.n != m - 1) continue;
            const GapResult g = method2(b.lambda, a.lambda, a.k, m);
            if (g.valid)
              offer("II", g.gap, std::max(a.radius, b.radius), b.n, {i, j});
            else
              reasons.push_back("II[" + b.describe() + "; " + a.describe() + "]: " + g.reason);
          }
        } else {
          const GapResult g = method1(b, m);
          if (g.valid)
            offer("I", g.gap, b.radius, b.n, {i});
          else
            reasons.push_back("I[" + b.describe() + "]: " + g.reason);
        }
      }
      if (best.valid) {
        best.kappa = kazhdan_constant(best.gap, fam, m);
      } else {
        std::string r;
        for (const auto& s : reasons) r += (r.empty() ? "" : "; ") + s;
        best.reason = r.empty() ? "no applicable base" : r;
      }
      rows.push_back(std::move(best));
    }
  return rows;
}

void write_table(std::ostream& os, const std::vector<BoundRow>& rows) {
  os << std::left << std::setw(6) << "family" << std::right << std::setw(4) << "m" << std::setw(8) << "method"
     << std::setw(14) << "gap" << std::setw(10) << "kappa" << std::setw(4) << "R" << "  note\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(6) << family_label(r.family) << std::right << std::setw(4) << r.m << std::setw(8)
       << r.method;
    if (r.valid)
      os << std::setw(14) << decimal(r.gap, 8) << std::setw(10) << decimal(r.kappa, 5) << std::setw(4) << r.radius
         << "  gap " << rational_string(r.gap);
    else
      os << std::setw(14) << "-" << std::setw(10) << "-" << std::setw(4) << "-" << "  " << r.reason;
    os << '\n';
  }
}

void write_rows_json(std::ostream& os, const std::vector<BoundRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["family"] = family_label(r.family);
    j["m"] = r.m;
    j["method"] = r.method;
    j["valid"] = r.valid;
    if (r.valid) {
      j["gap"] = rational_string(r.gap);
      j["kappa"] = decimal(r.kappa, 5);
      j["radius"] = r.radius;
      j["bases"] = r.bases;
    } else {
      j["reason"] = r.reason;
    }
    out.push_back(std::move(j));
  }
  os << out.dump(2) << '\n';
}

double pra_mixing_bound(std::int64_t generators, const Rational& gap, double log_gamma, double eps) {
  require(sgn(gap) > 0, ErrorCode::InvalidArgument, "gap must be positive");
  require(generators > 0, ErrorCode::InvalidArgument, "generating set must be nonempty");
  require(eps > 0.0 && eps < 1.0, ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
  return static_cast<double>(generators) / gap.get_d() * (log_gamma - std::log(eps));
}

std::vector<BaseFact> parse_manifest(std::istream& is) {
  std::vector<BaseFact> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string fam, kind, k, lambda, prov;
    int n = 0, r = 0;
    if (!(ls >> fam)) continue;
    auto bad = [&](const std::string& why) {
      fail(ErrorCode::Format, "manifest line " + std::to_string(lineno) + ": " + why);
    };
    if (!(ls >> n >> kind >> k >> lambda >> r >> prov)) bad("expected 'family n kind k lambda R provenance'");
    std::string extra;
    if (ls >> extra) bad("trailing field '" + extra + "'");
    BaseFact b;
    try {
      b.family = GroupFamily::parse_kind(fam);
      b.n = n;
      if (kind == "delta2" || kind == "delta^2")
        b.kind = BaseFact::Kind::DeltaSquared;
      else if (kind == "adj" || kind == "adj+kop")
        b.kind = BaseFact::Kind::AdjPlusKOp;
      else
        bad("unknown kind '" + kind + "'");
      b.k = parse_rational(k);
      b.lambda = parse_rational(lambda);
      b.radius = r;
      b.validate();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Format) throw;
      bad(e.what());
    }
    if (b.kind == BaseFact::Kind::DeltaSquared && sgn(b.k) != 0) bad("delta2 bases take k = 0");
    if (prov.rfind("cert:", 0) != 0 && prov.rfind("cite:", 0) != 0) bad("provenance must be cert:<path> or cite:<label>");
    b.provenance = prov;
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<BaseFact> load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::Io, "cannot open " + path);
  return parse_manifest(is);
}

void check_provenance(const std::vector<BaseFact>& bases) {
  for (const auto& b : bases) {
    if (b.provenance.rfind("cert:", 0) != 0) continue;
    const std::string path = b.provenance.substr(5);
    std::ifstream is(path);
    if (!is) fail(ErrorCode::Io, "cannot open certificate " + path);
    const CertificateHeader h = read_certificate_header(is);
    auto bad = [&](const std::string& why) {
      fail(ErrorCode::InvalidArgument, "base " + b.describe() + " does not match " + path + ": " + why);
    };
    if (!h.valid) bad("certificate is not valid");
    if (h.family.kind != b.family || h.family.rank != b.n) bad("family or rank differs");
    if (h.radius > b.radius) bad("certificate radius is larger");
    const bool delta = h.target.kind == TargetDescriptor::Kind::DeltaSquared;
    if (delta != (b.kind == BaseFact::Kind::DeltaSquared)) bad("target kind differs");
    if (!delta && h.target.k != b.k) bad("Op coefficient differs");
    if (b.lambda > h.certified_gap) bad("lambda exceeds the certified gap " + rational_string(h.certified_gap));
  }
}

}  // namespace sosgap

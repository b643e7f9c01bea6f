#include "sosgap/certify.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sosgap/binary_io.hpp"
#include "sosgap/error.hpp"
#include "sosgap/sos.hpp"

namespace sosgap {

namespace {

constexpr const char* kCertificateMagic = "sosgap-certificate";
constexpr int kCertificateVersion = 1;

int ceil_log2(int r) {
  int k = 0;
  while ((1 << k) < r) ++k;
  return k;
}

Residual finish(AlgebraElement b) {
  if (!(star(b) == b) || sgn(augmentation(b)) != 0)
    fail(ErrorCode::InternalInconsistency, "residual is not *-invariant with zero augmentation");
  Residual r{std::move(b), 0};
  r.l1 = l1_norm(r.b);
  return r;
}

void check_vector(const AlgebraElement& x) {
  if (sgn(augmentation(x)) != 0)
    fail(ErrorCode::InvalidArgument, "decomposition vector has nonzero augmentation");
}

}  // namespace

Rational order_unit_bound(int radius) {
  require(radius >= 1, ErrorCode::InvalidArgument, "radius must be positive");
  if (radius == 1) return 2;
  mpz_class v = 1;
  v <<= static_cast<mp_bitcnt_t>(2 * ceil_log2(radius));
  return Rational(v);
}

Rational epsilon_bound(const AlgebraElement& b, int radius) {
  require(radius >= 1, ErrorCode::InvalidArgument, "radius must be positive");
  if (b.support_radius() > 2 * radius)
    fail(ErrorCode::CertificateScope, "residual support exceeds B_" + std::to_string(2 * radius));
  if (!(star(b) == b)) fail(ErrorCode::MalformedResidual, "residual is not *-invariant");
  if (sgn(augmentation(b)) != 0) fail(ErrorCode::MalformedResidual, "residual has nonzero augmentation");
  mpz_class f = 1;
  f <<= static_cast<mp_bitcnt_t>(2 * ceil_log2(radius));
  return Rational(f) * l1_norm(b);
}

std::vector<AlgebraElement> extract_vectors(const Matrix& q_difference, const BallPtr& basis, int bits) {
  require(bits >= 1 && bits <= 200, ErrorCode::InvalidArgument, "denominator bits out of range");
  const std::size_t d = q_difference.rows();
  require(q_difference.cols() == d && d + 1 == basis->size(), ErrorCode::InvalidArgument,
          "Gram matrix does not match the basis ball");
  Matrix q = q_difference;
  q.symmetrize();
  const double lmin = jacobi_eigen(q).values.front();
  const double delta = std::max(0.0, -lmin) + std::ldexp(1.0, -40);
  for (std::size_t i = 0; i < d; ++i) q(i, i) += delta;
  Matrix l;
  if (!cholesky(q, l)) {
    std::ostringstream os;
    os << "Cholesky factorization failed after diagonal shift " << delta << "; a larger shift is needed";
    fail(ErrorCode::NumericalFailure, os.str());
  }
  std::vector<AlgebraElement> out;
  mpz_class num;
  for (std::size_t k = 0; k < d; ++k) {
    AlgebraElement xi(basis);
    Rational total = 0;
    for (std::size_t i = k; i < d; ++i) {
      const double v = std::nearbyint(std::ldexp(l(i, k), bits));
      if (v == 0.0) continue;
      num = v;
      Rational c(num);
      c /= Rational(mpz_class(1) << static_cast<mp_bitcnt_t>(bits));
      xi.add_term(static_cast<std::uint32_t>(i + 1), c);
      total += c;
    }
    if (xi.is_zero()) continue;
    xi.add_term(0, -total);
    out.push_back(std::move(xi));
  }
  return out;
}

Residual residual(const AlgebraElement& y, const Rational& lambda, const std::vector<AlgebraElement>& xi,
                  const ProductTable& table) {
  const BallPtr& basis = table.source();
  const BallPtr& universe = table.target();
  const GroupFamily& f = universe->family();
  AlgebraElement b = embed(y, universe) - lambda * laplacian(f, f.rank, universe).value;

  mpz_class den = 1;
  for (const auto& x : xi)
    for (const auto& [i, c] : x.terms()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  std::vector<mpz_class> acc(universe->size());
  std::vector<std::pair<std::uint32_t, mpz_class>> coeffs;
  for (const auto& x0 : xi) {
    const AlgebraElement x = embed(x0, basis);
    check_vector(x);
    coeffs.clear();
    for (const auto& [i, c] : x.terms()) coeffs.emplace_back(i, c.get_num() * (den / c.get_den()));
    for (const auto& [i, a] : coeffs)
      for (const auto& [j, c] : coeffs)
        mpz_addmul(acc[table(i, j)].get_mpz_t(), a.get_mpz_t(), c.get_mpz_t());
  }
  const mpz_class den2 = den * den;
  for (std::uint32_t g = 0; g < acc.size(); ++g)
    if (sgn(acc[g]) != 0) b.add_term(g, -Rational(acc[g], den2));
  return finish(std::move(b));
}

Residual residual_direct(const AlgebraElement& y, const Rational& lambda, const std::vector<AlgebraElement>& xi,
                         const BallPtr& basis, const BallPtr& universe) {
  const GroupFamily& f = universe->family();
  AlgebraElement b = embed(y, universe);
  const AlgebraElement d = laplacian(f, f.rank, universe).value;
  b -= lambda * d;
  for (const auto& x0 : xi) {
    const AlgebraElement x = embed(x0, basis);
    check_vector(x);
    if (x.support_radius() > basis->radius())
      fail(ErrorCode::SupportOverflow, "decomposition vector leaves the basis ball");
    b -= mul_direct(star(x), x, universe);
  }
  return finish(std::move(b));
}

std::string Certificate::statement() const {
  std::ostringstream os;
  if (!valid) {
    os << "no claim: epsilon exceeds lambda by " << rational_string(shortfall());
    return os.str();
  }
  os << target.to_string() << " - " << rational_string(certified_gap()) << " delta is a sum of squares over the "
     << "augmentation ideal supported in B_" << radius << " of " << family.name();
  if (target.kind == TargetDescriptor::Kind::DeltaSquared && sgn(certified_gap()) > 0)
    os << "; property (T) with Kazhdan radius at most " << radius;
  return os.str();
}

Certificate certify(const TargetDescriptor& target, const AlgebraElement& y, const Rational& lambda,
                    std::vector<AlgebraElement> xi, const ProductTable& table) {
  Certificate c;
  c.family = table.target()->family();
  c.radius = table.source()->radius();
  c.target = target;
  c.lambda = lambda;
  for (auto& x : xi) x = embed(x, table.source());
  Residual r = residual(y, lambda, xi, table);
  c.xi = std::move(xi);
  c.b = std::move(r.b);
  c.b_l1 = r.l1;
  c.epsilon = epsilon_bound(c.b, c.radius);
  c.valid = lambda >= c.epsilon;
  c.library_version = library_version();
  return c;
}

void write_certificate(std::ostream& os, const Certificate& c) {
  os << kCertificateMagic << ' ' << kCertificateVersion << '\n';
  os << "library " << c.library_version << '\n';
  os << "config " << io::hex64(c.config_hash) << '\n';
  os << "family " << c.family.name() << '\n';
  os << "radius " << c.radius << '\n';
  os << "target " << c.target.to_string() << '\n';
  os << "lambda " << rational_string(c.lambda) << '\n';
  os << "epsilon " << rational_string(c.epsilon) << '\n';
  os << "b_l1 " << rational_string(c.b_l1) << '\n';
  os << "certified_gap " << rational_string(c.certified_gap()) << '\n';
  os << "valid " << (c.valid ? "true" : "false") << '\n';
  os << "statement " << c.statement() << '\n';
  os << "vectors " << c.xi.size() << '\n';
  for (const auto& x : c.xi) write_element(os, x);
  os << "residual\n";
  write_element(os, c.b);
  os << "end\n";
}

void save_certificate(const Certificate& c, const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  write_certificate(os, c);
  if (!os) fail(ErrorCode::Io, "write to " + path + " failed");
}

CertificateHeader read_certificate_header(std::istream& is) {
  auto field = [&](const std::string& key) {
    std::string line;
    if (!std::getline(is, line)) fail(ErrorCode::Format, "truncated certificate header");
    if (line.compare(0, key.size() + 1, key + " ") != 0)
      fail(ErrorCode::Format, "expected certificate field '" + key + "'");
    return line.substr(key.size() + 1);
  };
  CertificateHeader h;
  if (field(kCertificateMagic) != std::to_string(kCertificateVersion))
    fail(ErrorCode::Format, "unsupported certificate version");
  h.library_version = field("library");
  const std::string cfg = field("config");
  const std::string raw = io::from_hex(cfg);
  if (raw.size() != 8) fail(ErrorCode::Format, "malformed config hash");
  h.config_hash = std::stoull(cfg, nullptr, 16);
  h.family = GroupFamily::parse(field("family"));
  h.radius = std::stoi(field("radius"));
  if (h.radius < 1) fail(ErrorCode::Format, "certificate radius must be positive");
  h.target = TargetDescriptor::parse(field("target"));
  h.lambda = parse_rational(field("lambda"));
  h.epsilon = parse_rational(field("epsilon"));
  h.b_l1 = parse_rational(field("b_l1"));
  h.certified_gap = parse_rational(field("certified_gap"));
  const std::string v = field("valid");
  if (v != "true" && v != "false") fail(ErrorCode::Format, "malformed validity flag");
  h.valid = v == "true";
  field("statement");
  h.vectors = std::stoull(field("vectors"));
  return h;
}

namespace {

Certificate read_body(std::istream& is, const CertificateHeader& h, const BallPtr& basis, const BallPtr& universe) {
  require(basis->family() == h.family && universe->family() == h.family && basis->radius() == h.radius &&
              universe->radius() == 2 * h.radius,
          ErrorCode::MismatchedBalls, "balls do not match the certificate header");
  Certificate c;
  c.family = h.family;
  c.radius = h.radius;
  c.target = h.target;
  c.lambda = h.lambda;
  c.epsilon = h.epsilon;
  c.b_l1 = h.b_l1;
  c.valid = h.valid;
  c.config_hash = h.config_hash;
  c.library_version = h.library_version;
  for (std::size_t k = 0; k < h.vectors; ++k) c.xi.push_back(read_element(is, basis));
  std::string tag;
  if (!(is >> tag) || tag != "residual") fail(ErrorCode::Format, "missing residual section");
  c.b = read_element(is, universe);
  if (!(is >> tag) || tag != "end") fail(ErrorCode::Format, "missing certificate terminator");
  return c;
}

}  // namespace

Certificate read_certificate(std::istream& is, const BallPtr& basis, const BallPtr& universe) {
  const CertificateHeader h = read_certificate_header(is);
  Certificate c = read_body(is, h, basis, universe);
  if (c.certified_gap() != h.certified_gap) fail(ErrorCode::Format, "certified gap is not lambda - epsilon");
  return c;
}

Certificate load_certificate(const std::string& path, const BallPtr& basis, const BallPtr& universe) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::Io, "cannot open " + path);
  return read_certificate(is, basis, universe);
}

VerificationReport verify_certificate(std::istream& is, bool independent) {
  VerificationReport rep;
  auto& div = rep.divergences;
  const CertificateHeader h = read_certificate_header(is);
  const BallPtr basis = enumerate_ball(h.family, h.radius);
  const BallPtr universe = enumerate_ball(h.family, 2 * h.radius);
  Certificate stored;
  try {
    stored = read_body(is, h, basis, universe);
  } catch (const Error& e) {
    div.push_back(std::string("stored data does not match the rebuilt balls: ") + e.what());
    return rep;
  }
  if (h.certified_gap != h.lambda - h.epsilon) div.push_back("stored certified gap differs from lambda - epsilon");

  const AlgebraElement y = build_target(h.target, h.family, universe);
  Residual r;
  try {
    if (independent) {
      r = residual_direct(y, h.lambda, stored.xi, basis, universe);
    } else {
      const ProductTable table = build_product_table(basis, universe);
      r = residual(y, h.lambda, stored.xi, table);
    }
  } catch (const Error& e) {
    div.push_back(std::string("residual recomputation failed: ") + e.what());
    return rep;
  }
  for (std::size_t k = 0; k < stored.xi.size(); ++k)
    if (sgn(augmentation(stored.xi[k])) != 0) div.push_back("vector " + std::to_string(k) + " has nonzero augmentation");
  if (!(r.b == stored.b)) {
    const AlgebraElement diff = r.b - stored.b;
    div.push_back("residual differs from the stored one in " + std::to_string(diff.support_size()) +
                  " coefficients (l1 of difference " + rational_string(l1_norm(diff)) + ")");
  }
  if (r.l1 != h.b_l1)
    div.push_back("residual l1 norm " + rational_string(r.l1) + " differs from stored " + rational_string(h.b_l1));
  Rational eps;
  try {
    eps = epsilon_bound(r.b, h.radius);
  } catch (const Error& e) {
    div.push_back(std::string("epsilon bound is not applicable: ") + e.what());
    return rep;
  }
  if (eps != h.epsilon)
    div.push_back("epsilon " + rational_string(eps) + " differs from stored " + rational_string(h.epsilon));
  const bool valid = h.lambda >= eps;
  if (valid != h.valid) div.push_back("validity verdict differs from the stored one");
  if (!valid) div.push_back("lambda " + rational_string(h.lambda) + " is below epsilon " + rational_string(eps));

  Certificate& c = rep.recomputed;
  c.family = h.family;
  c.radius = h.radius;
  c.target = h.target;
  c.lambda = h.lambda;
  c.xi = std::move(stored.xi);
  c.b = std::move(r.b);
  c.b_l1 = r.l1;
  c.epsilon = eps;
  c.valid = valid;
  c.config_hash = h.config_hash;
  c.library_version = h.library_version;
  rep.ok = div.empty();
  return rep;
}

VerificationReport verify_certificate(const std::string& path, bool independent) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::Io, "cannot open " + path);
  return verify_certificate(is, independent);
}

std::vector<SquaresWitness> order_unit_witnesses(const GroupFamily& family) {
  family.validate();
  const BallPtr universe = cached_ball(family, 2);
  const Ball& u = *universe;
  const int count = family.generator_count();
  const AlgebraElement delta = laplacian(family, family.rank, universe).value;
  auto one_minus = [&](std::uint32_t pos) {
    AlgebraElement x(universe);
    x.add_term(0, 1);
    x.add_term(pos, -1);
    return x;
  };
  auto pos = [&](int k) { return u.generator_position(static_cast<std::uint32_t>(k)); };
  auto close = [&](SquaresWitness& w) {
    AlgebraElement sum(universe);
    bool inside = true;
    for (const auto& [c, x] : w.squares) {
      inside = inside && sgn(c) > 0 && x.support_radius() <= 1;
      sum += c * mul_direct(star(x), x, universe);
    }
    w.exact = inside && sum == w.lhs;
  };
  const auto desc = generator_descriptors(family);
  std::vector<SquaresWitness> out;
  for (int s = 0; s < count; ++s) {
    SquaresWitness w;
    w.label = "s=" + desc[s].to_string();
    w.radius = 1;
    w.bound = order_unit_bound(1);
    const AlgebraElement as = one_minus(pos(s));
    w.lhs = w.bound * delta - mul_direct(star(as), as, universe);
    for (int c = 0; c < count; c += 2) {
      const Rational weight = (c == (s & ~1)) ? 1 : 2;
      w.squares.emplace_back(weight, one_minus(pos(c)));
    }
    close(w);
    out.push_back(std::move(w));
  }
  for (int s = 0; s < count; ++s)
    for (int t = 0; t < count; ++t) {
      SquaresWitness w;
      w.label = "st=" + desc[s].to_string() + "*" + desc[t].to_string();
      w.radius = 2;
      w.bound = order_unit_bound(2);
      const auto st = u.find(multiply(u.element(pos(s)), u.element(pos(t))));
      require(st.has_value(), ErrorCode::InternalInconsistency, "two-letter product outside B_2");
      const AlgebraElement ast = one_minus(*st);
      w.lhs = w.bound * delta - mul_direct(star(ast), ast, universe);
      for (int c = 0; c < count; c += 2) {
        Rational weight = 4;
        if (c == (s & ~1)) weight -= 2;
        if (c == (t & ~1)) weight -= 2;
        if (sgn(weight) > 0) w.squares.emplace_back(weight, one_minus(pos(c)));
      }
      AlgebraElement cross(universe);
      cross.add_term(0, 2);
      cross.add_term(pos(s ^ 1), -1);
      cross.add_term(pos(t), -1);
      if (!cross.is_zero()) w.squares.emplace_back(1, cross);
      close(w);
      out.push_back(std::move(w));
    }
  return out;
}

}  // namespace sosgap

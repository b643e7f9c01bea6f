#include "sosgap/group.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "sosgap/error.hpp"

namespace sosgap {

void GroupFamily::validate() const {
  if (rank < 2) fail(ErrorCode::InvalidFamily, "rank must be at least 2, got " + std::to_string(rank));
  if (rank > 100) fail(ErrorCode::InvalidFamily, "rank too large");
}

int GroupFamily::generator_count() const {
  return 2 * flavors() * rank * (rank - 1);
}

std::string GroupFamily::kind_name() const {
  return kind == FamilyKind::SpecialLinear ? "sl" : "saut";
}

std::string GroupFamily::name() const { return kind_name() + std::to_string(rank); }

FamilyKind GroupFamily::parse_kind(std::string_view s) {
  if (s == "sl" || s == "SL" || s == "SpecialLinear") return FamilyKind::SpecialLinear;
  if (s == "saut" || s == "SAut" || s == "SpecialAutFree") return FamilyKind::SpecialAutFree;
  fail(ErrorCode::InvalidFamily, "unknown family '" + std::string(s) + "'");
}

GroupFamily GroupFamily::parse(std::string_view name) {
  std::size_t k = 0;
  while (k < name.size() && !std::isdigit(static_cast<unsigned char>(name[k]))) ++k;
  if (k == name.size() || k == 0) fail(ErrorCode::InvalidFamily, "malformed family name '" + std::string(name) + "'");
  GroupFamily f;
  f.kind = parse_kind(name.substr(0, k));
  f.rank = 0;
  for (std::size_t i = k; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i])) || f.rank > 1000)
      fail(ErrorCode::InvalidFamily, "malformed family name '" + std::string(name) + "'");
    f.rank = f.rank * 10 + (name[i] - '0');
  }
  f.validate();
  return f;
}

std::string GeneratorDescriptor::to_string() const {
  std::string base;
  switch (flavor) {
    case Flavor::Elementary: base = "E"; break;
    case Flavor::RhoTransvection: base = "rho"; break;
    case Flavor::LambdaTransvection: base = "lambda"; break;
  }
  base += std::to_string(i + 1) + std::to_string(j + 1);
  if (sign == Sign::Minus) base += "^-1";
  return base;
}

void reduce_append(FreeWord& out, std::int8_t letter) {
  if (!out.empty() && out.back() == -letter)
    out.pop_back();
  else
    out.push_back(letter);
}

FreeWord reduce(const FreeWord& w) {
  FreeWord out;
  out.reserve(w.size());
  for (auto c : w) reduce_append(out, c);
  return out;
}

FreeWord invert_word(const FreeWord& w) {
  FreeWord out(w.rbegin(), w.rend());
  for (auto& c : out) c = static_cast<std::int8_t>(-c);
  return out;
}

GroupElement GroupElement::identity(const GroupFamily& f) {
  f.validate();
  GroupElement g;
  g.family_ = f;
  const int n = f.rank;
  if (f.kind == FamilyKind::SpecialLinear) {
    g.matrix_.assign(static_cast<std::size_t>(n * n), mpz_class(0));
    for (int k = 0; k < n; ++k) g.matrix_[static_cast<std::size_t>(k * n + k)] = 1;
  } else {
    g.images_.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) g.images_[static_cast<std::size_t>(k)] = {static_cast<std::int8_t>(k + 1)};
  }
  g.word_ = std::vector<std::uint32_t>{};
  return g;
}

GroupElement GroupElement::from_matrix(const GroupFamily& f, std::vector<mpz_class> row_major) {
  f.validate();
  require(f.kind == FamilyKind::SpecialLinear, ErrorCode::IncompatibleElements,
          "matrix given for a non-matrix family");
  require(row_major.size() == static_cast<std::size_t>(f.rank * f.rank), ErrorCode::InvalidArgument,
          "matrix has the wrong number of entries");
  GroupElement g;
  g.family_ = f;
  g.matrix_ = std::move(row_major);
  return g;
}

GroupElement GroupElement::from_images(const GroupFamily& f, std::vector<FreeWord> images) {
  f.validate();
  require(f.kind == FamilyKind::SpecialAutFree, ErrorCode::IncompatibleElements,
          "basis images given for a matrix family");
  require(images.size() == static_cast<std::size_t>(f.rank), ErrorCode::InvalidArgument,
          "wrong number of basis images");
  for (auto& w : images) {
    for (auto c : w)
      require(c != 0 && std::abs(c) <= f.rank, ErrorCode::InvalidArgument, "letter out of range");
    w = reduce(w);
  }
  GroupElement g;
  g.family_ = f;
  g.images_ = std::move(images);
  return g;
}

bool GroupElement::is_identity() const {
  const int n = family_.rank;
  if (family_.kind == FamilyKind::SpecialLinear) {
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (entry(r, c) != (r == c ? 1 : 0)) return false;
    return true;
  }
  for (int k = 0; k < n; ++k) {
    const auto& w = images_[static_cast<std::size_t>(k)];
    if (w.size() != 1 || w[0] != k + 1) return false;
  }
  return true;
}

std::string GroupElement::to_string() const {
  std::ostringstream os;
  const int n = family_.rank;
  if (family_.kind == FamilyKind::SpecialLinear) {
    os << "[";
    for (int r = 0; r < n; ++r) {
      os << (r ? "; " : "");
      for (int c = 0; c < n; ++c) os << (c ? " " : "") << entry(r, c).get_str();
    }
    os << "]";
    return os.str();
  }
  for (int k = 0; k < n; ++k) {
    os << (k ? ", " : "") << "a" << k + 1 << "->";
    const auto& w = images_[static_cast<std::size_t>(k)];
    if (w.empty()) os << "1";
    for (auto c : w) os << "a" << std::abs(c) << (c < 0 ? "'" : "");
  }
  return os.str();
}

std::vector<GeneratorDescriptor> generator_descriptors(const GroupFamily& f) {
  f.validate();
  std::vector<GeneratorDescriptor> out;
  out.reserve(static_cast<std::size_t>(f.generator_count()));
  for (int i = 0; i < f.rank; ++i)
    for (int j = 0; j < f.rank; ++j) {
      if (i == j) continue;
      for (int fl = 0; fl < f.flavors(); ++fl)
        for (int sg = 0; sg < 2; ++sg) {
          GeneratorDescriptor d;
          d.kind = f.kind;
          d.i = i;
          d.j = j;
          d.flavor = f.kind == FamilyKind::SpecialLinear
                         ? Flavor::Elementary
                         : (fl == 0 ? Flavor::RhoTransvection : Flavor::LambdaTransvection);
          d.sign = sg == 0 ? Sign::Plus : Sign::Minus;
          out.push_back(d);
        }
    }
  return out;
}

std::uint32_t generator_index(const GroupFamily& f, const GeneratorDescriptor& d) {
  require(d.kind == f.kind && d.i != d.j && d.i >= 0 && d.j >= 0 && d.i < f.rank && d.j < f.rank,
          ErrorCode::InvalidArgument, "generator descriptor does not belong to the family");
  const int jp = d.j - (d.j > d.i ? 1 : 0);
  int fl = 0;
  if (f.kind == FamilyKind::SpecialAutFree) {
    require(d.flavor != Flavor::Elementary, ErrorCode::InvalidArgument, "flavor mismatch");
    fl = d.flavor == Flavor::RhoTransvection ? 0 : 1;
  } else {
    require(d.flavor == Flavor::Elementary, ErrorCode::InvalidArgument, "flavor mismatch");
  }
  const int sg = d.sign == Sign::Plus ? 0 : 1;
  return static_cast<std::uint32_t>(((d.i * (f.rank - 1) + jp) * f.flavors() + fl) * 2 + sg);
}

static GeneratorDescriptor descriptor_at(const GroupFamily& f, std::uint32_t index) {
  require(index < static_cast<std::uint32_t>(f.generator_count()), ErrorCode::InvalidArgument,
          "generator index out of range");
  GeneratorDescriptor d;
  d.kind = f.kind;
  int k = static_cast<int>(index);
  d.sign = (k & 1) ? Sign::Minus : Sign::Plus;
  k >>= 1;
  const int fl = k % f.flavors();
  k /= f.flavors();
  d.i = k / (f.rank - 1);
  const int jp = k % (f.rank - 1);
  d.j = jp + (jp >= d.i ? 1 : 0);
  d.flavor = f.kind == FamilyKind::SpecialLinear
                 ? Flavor::Elementary
                 : (fl == 0 ? Flavor::RhoTransvection : Flavor::LambdaTransvection);
  return d;
}

GroupElement generator_element(const GroupFamily& f, std::uint32_t index) {
  const GeneratorDescriptor d = descriptor_at(f, index);
  GroupElement g = GroupElement::identity(f);
  const int n = f.rank;
  if (f.kind == FamilyKind::SpecialLinear) {
    std::vector<mpz_class> m = g.matrix();
    m[static_cast<std::size_t>(d.i * n + d.j)] = d.sign == Sign::Plus ? 1 : -1;
    g = GroupElement::from_matrix(f, std::move(m));
  } else {
    std::vector<FreeWord> im = g.images();
    const auto ai = static_cast<std::int8_t>(d.i + 1);
    auto aj = static_cast<std::int8_t>(d.j + 1);
    if (d.sign == Sign::Minus) aj = static_cast<std::int8_t>(-aj);
    im[static_cast<std::size_t>(d.i)] =
        d.flavor == Flavor::RhoTransvection ? FreeWord{ai, aj} : FreeWord{aj, ai};
    g = GroupElement::from_images(f, std::move(im));
  }
  g.set_word({index});
  return g;
}

std::vector<GroupElement> generator_elements(const GroupFamily& f) {
  f.validate();
  std::vector<GroupElement> out;
  for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(f.generator_count()); ++k)
    out.push_back(generator_element(f, k));
  return out;
}

std::uint32_t act_generator(const GroupFamily& f, const Permutation& sigma, std::uint32_t index) {
  require(sigma.size() == f.rank, ErrorCode::InvalidArgument, "permutation size mismatch");
  GeneratorDescriptor d = descriptor_at(f, index);
  d.i = sigma(d.i);
  d.j = sigma(d.j);
  return generator_index(f, d);
}

static void check_compatible(const GroupElement& g, const GroupElement& h) {
  if (!(g.family() == h.family()))
    fail(ErrorCode::IncompatibleElements,
         "cannot combine elements of " + g.family().name() + " and " + h.family().name());
}

GroupElement multiply(const GroupElement& g, const GroupElement& h) {
  check_compatible(g, h);
  const GroupFamily& f = g.family();
  const int n = f.rank;
  GroupElement out;
  if (f.kind == FamilyKind::SpecialLinear) {
    std::vector<mpz_class> m(static_cast<std::size_t>(n * n));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        mpz_class acc = 0;
        for (int k = 0; k < n; ++k) {
          const mpz_class& a = g.entry(r, k);
          if (sgn(a) == 0) continue;
          acc += a * h.entry(k, c);
        }
        m[static_cast<std::size_t>(r * n + c)] = std::move(acc);
      }
    out = GroupElement::from_matrix(f, std::move(m));
  } else {
    std::vector<FreeWord> inv_images(static_cast<std::size_t>(n));
    bool need_inv = false;
    for (const auto& w : h.images())
      for (auto c : w)
        if (c < 0) need_inv = true;
    if (need_inv)
      for (int k = 0; k < n; ++k)
        inv_images[static_cast<std::size_t>(k)] = invert_word(g.images()[static_cast<std::size_t>(k)]);
    std::vector<FreeWord> im(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      FreeWord& dst = im[static_cast<std::size_t>(k)];
      for (auto c : h.images()[static_cast<std::size_t>(k)]) {
        const auto idx = static_cast<std::size_t>(std::abs(c) - 1);
        const FreeWord& sub = c > 0 ? g.images()[idx] : inv_images[idx];
        for (auto x : sub) reduce_append(dst, x);
      }
    }
    out = GroupElement::from_images(f, std::move(im));
  }
  if (g.word() && h.word()) {
    std::vector<std::uint32_t> w = *g.word();
    w.insert(w.end(), h.word()->begin(), h.word()->end());
    out.set_word(std::move(w));
  }
  return out;
}

static std::vector<mpz_class> integer_inverse(const GroupElement& g) {
  const int n = g.family().rank;
  std::vector<mpq_class> a(static_cast<std::size_t>(n * 2 * n));
  auto at = [&](int r, int c) -> mpq_class& { return a[static_cast<std::size_t>(r * 2 * n + c)]; };
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      at(r, c) = g.entry(r, c);
      at(r, n + c) = r == c ? 1 : 0;
    }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && sgn(at(piv, col)) == 0) ++piv;
    if (piv == n) fail(ErrorCode::UnsupportedInversion, "singular matrix");
    if (piv != col)
      for (int c = 0; c < 2 * n; ++c) std::swap(at(piv, c), at(col, c));
    const mpq_class p = at(col, col);
    for (int c = 0; c < 2 * n; ++c) at(col, c) /= p;
    for (int r = 0; r < n; ++r) {
      if (r == col || sgn(at(r, col)) == 0) continue;
      const mpq_class fct = at(r, col);
      for (int c = 0; c < 2 * n; ++c) at(r, c) -= fct * at(col, c);
    }
  }
  std::vector<mpz_class> out(static_cast<std::size_t>(n * n));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const mpq_class& q = at(r, n + c);
      if (q.get_den() != 1) fail(ErrorCode::UnsupportedInversion, "matrix inverse is not integral");
      out[static_cast<std::size_t>(r * n + c)] = q.get_num();
    }
  return out;
}

GroupElement invert(const GroupElement& g) {
  const GroupFamily& f = g.family();
  if (f.kind == FamilyKind::SpecialLinear) {
    GroupElement out = GroupElement::from_matrix(f, integer_inverse(g));
    if (g.word()) {
      std::vector<std::uint32_t> w(g.word()->rbegin(), g.word()->rend());
      for (auto& k : w) k ^= 1u;
      out.set_word(std::move(w));
    }
    return out;
  }
  if (!g.word())
    fail(ErrorCode::UnsupportedInversion,
         "automorphism has no recorded generator word; inversion needs one");
  GroupElement out = GroupElement::identity(f);
  const auto& w = *g.word();
  for (auto it = w.rbegin(); it != w.rend(); ++it) out = multiply(out, generator_element(f, *it ^ 1u));
  return out;
}

GroupElement act(const Permutation& sigma, const GroupElement& g) {
  const GroupFamily& f = g.family();
  const int n = f.rank;
  require(sigma.size() == n, ErrorCode::InvalidArgument, "permutation size mismatch");
  GroupElement out;
  if (f.kind == FamilyKind::SpecialLinear) {
    std::vector<mpz_class> m(static_cast<std::size_t>(n * n));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m[static_cast<std::size_t>(sigma(r) * n + sigma(c))] = g.entry(r, c);
    out = GroupElement::from_matrix(f, std::move(m));
  } else {
    std::vector<FreeWord> im(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      FreeWord w = g.images()[static_cast<std::size_t>(k)];
      for (auto& c : w) {
        const auto v = static_cast<std::int8_t>(sigma(std::abs(c) - 1) + 1);
        c = c > 0 ? v : static_cast<std::int8_t>(-v);
      }
      im[static_cast<std::size_t>(sigma(k))] = std::move(w);
    }
    out = GroupElement::from_images(f, std::move(im));
  }
  if (g.word()) {
    std::vector<std::uint32_t> w = *g.word();
    for (auto& k : w) k = act_generator(f, sigma, k);
    out.set_word(std::move(w));
  }
  return out;
}

std::string canonical_key(const GroupElement& g) {
  const GroupFamily& f = g.family();
  std::string key;
  if (f.kind == FamilyKind::SpecialLinear) {
    for (std::size_t k = 0; k < g.matrix().size(); ++k) {
      if (k) key.push_back(',');
      key += g.matrix()[k].get_str();
    }
    return key;
  }
  for (const auto& w : g.images()) {
    const auto len = static_cast<std::uint32_t>(w.size());
    for (int s = 3; s >= 0; --s) key.push_back(static_cast<char>((len >> (8 * s)) & 0xff));
    for (auto c : w) key.push_back(static_cast<char>(c));
  }
  return key;
}

GroupElement element_from_key(const GroupFamily& f, std::string_view key) {
  f.validate();
  const auto n = static_cast<std::size_t>(f.rank);
  if (f.kind == FamilyKind::SpecialLinear) {
    std::vector<mpz_class> m;
    std::size_t start = 0;
    while (start <= key.size()) {
      std::size_t end = key.find(',', start);
      if (end == std::string_view::npos) end = key.size();
      mpz_class v;
      if (v.set_str(std::string(key.substr(start, end - start)), 10) != 0)
        fail(ErrorCode::Format, "malformed matrix key");
      m.push_back(std::move(v));
      start = end + 1;
    }
    if (m.size() != n * n) fail(ErrorCode::Format, "matrix key has the wrong number of entries");
    return GroupElement::from_matrix(f, std::move(m));
  }
  std::vector<FreeWord> im;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (pos + 4 > key.size()) fail(ErrorCode::Format, "truncated automorphism key");
    std::uint32_t len = 0;
    for (int s = 0; s < 4; ++s) len = (len << 8) | static_cast<unsigned char>(key[pos++]);
    if (pos + len > key.size()) fail(ErrorCode::Format, "truncated automorphism key");
    FreeWord w(len);
    for (std::uint32_t t = 0; t < len; ++t) w[t] = static_cast<std::int8_t>(key[pos++]);
    if (reduce(w) != w) fail(ErrorCode::Format, "automorphism key holds an unreduced word");
    im.push_back(std::move(w));
  }
  if (pos != key.size()) fail(ErrorCode::Format, "trailing bytes in automorphism key");
  return GroupElement::from_images(f, std::move(im));
}

bool same_element(const GroupElement& g, const GroupElement& h) {
  return g.family() == h.family() && canonical_key(g) == canonical_key(h);
}

}  // namespace sosgap

#include "sosgap/algebra.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sosgap/binary_io.hpp"
#include "sosgap/error.hpp"

namespace sosgap {

namespace {

void check_same(const BallPtr& a, const BallPtr& b) {
  if (!same_universe(a, b))
    fail(ErrorCode::MismatchedBalls, "elements live over different balls");
}

}  // namespace

bool same_universe(const BallPtr& a, const BallPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  return a->hash() == b->hash() && a->family() == b->family() && a->size() == b->size();
}

AlgebraElement AlgebraElement::basis(BallPtr ball, std::uint32_t index, const Rational& c) {
  require(ball && index < ball->size(), ErrorCode::SupportOverflow, "basis index outside the ball");
  AlgebraElement x(std::move(ball));
  x.add_term(index, c);
  return x;
}

Rational AlgebraElement::coefficient(std::uint32_t index) const {
  auto it = terms_.find(index);
  return it == terms_.end() ? Rational(0) : it->second;
}

int AlgebraElement::support_radius() const {
  int r = 0;
  for (const auto& [i, c] : terms_) r = std::max(r, static_cast<int>(ball_->word_length(i)));
  return r;
}

void AlgebraElement::add_term(std::uint32_t index, const Rational& c) {
  if (sgn(c) == 0) return;
  require(ball_ && index < ball_->size(), ErrorCode::SupportOverflow, "term index outside the ball");
  auto [it, inserted] = terms_.try_emplace(index, c);
  if (inserted) {
    it->second.canonicalize();
  } else {
    Rational k = c;
    k.canonicalize();
    it->second += k;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& y) {
  if (!ball_) ball_ = y.ball_;
  check_same(ball_, y.ball_);
  for (const auto& [i, c] : y.terms_) add_term(i, c);
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& y) {
  if (!ball_) ball_ = y.ball_;
  check_same(ball_, y.ball_);
  for (const auto& [i, c] : y.terms_) add_term(i, -c);
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(const Rational& c) {
  if (sgn(c) == 0) {
    terms_.clear();
    return *this;
  }
  Rational k = c;
  k.canonicalize();
  for (auto& [i, v] : terms_) v *= k;
  return *this;
}

bool operator==(const AlgebraElement& x, const AlgebraElement& y) {
  return same_universe(x.ball_, y.ball_) && x.terms_ == y.terms_;
}

AlgebraElement operator+(AlgebraElement x, const AlgebraElement& y) { return x += y; }
AlgebraElement operator-(AlgebraElement x, const AlgebraElement& y) { return x -= y; }
AlgebraElement operator*(const Rational& c, AlgebraElement x) { return x *= c; }

AlgebraElement add(const AlgebraElement& x, const AlgebraElement& y) { return x + y; }
AlgebraElement scale(const Rational& c, const AlgebraElement& x) { return c * x; }

AlgebraElement star(const AlgebraElement& x) {
  AlgebraElement out(x.ball());
  for (const auto& [i, c] : x.terms()) out.add_term(x.ball()->inverse(i), c);
  return out;
}

Rational augmentation(const AlgebraElement& x) {
  Rational s = 0;
  for (const auto& [i, c] : x.terms()) s += c;
  return s;
}

Rational l1_norm(const AlgebraElement& x) {
  Rational s = 0;
  for (const auto& [i, c] : x.terms()) s += abs(c);
  return s;
}

AlgebraElement act_algebra(const Permutation& sigma, const AlgebraElement& x) {
  AlgebraElement out(x.ball());
  if (x.is_zero()) return out;
  for (const auto& [i, c] : x.terms()) out.add_term(x.ball()->act_index(sigma, i), c);
  return out;
}

AlgebraElement embed(const AlgebraElement& x, const BallPtr& target) {
  if (same_universe(x.ball(), target)) {
    AlgebraElement out = x;
    return out;
  }
  require(x.ball()->family() == target->family(), ErrorCode::MismatchedBalls,
          "cannot embed across group families");
  AlgebraElement out(target);
  const bool prefix = target->size() >= x.ball()->size() && target->has_prefix(*x.ball());
  for (const auto& [i, c] : x.terms()) {
    if (prefix) {
      out.add_term(i, c);
      continue;
    }
    auto hit = target->find(x.ball()->key(i));
    if (!hit) fail(ErrorCode::SupportOverflow, "support does not fit in the target ball");
    out.add_term(*hit, c);
  }
  return out;
}

ProductTable::ProductTable(BallPtr source, BallPtr target, std::uint32_t dense_limit)
    : source_(std::move(source)), target_(std::move(target)) {
  require(source_ && target_, ErrorCode::InvalidArgument, "null ball");
  if (!target_->has_prefix(*source_))
    fail(ErrorCode::InconsistentBalls, "source ball is not a prefix of the target ball");
  n_ = source_->size();
  if (n_ <= dense_limit) {
    table_.resize(static_cast<std::size_t>(n_) * n_);
    std::vector<GroupElement> inverses;
    inverses.reserve(n_);
    for (std::uint32_t i = 0; i < n_; ++i) inverses.push_back(source_->element(source_->inverse(i)));
    for (std::uint32_t i = 0; i < n_; ++i)
      for (std::uint32_t j = 0; j < n_; ++j) {
        std::uint32_t v;
        if (i == 0)
          v = j;
        else if (j == 0)
          v = source_->inverse(i);
        else if (i == j)
          v = 0;
        else {
          auto hit = target_->find(multiply(inverses[i], source_->element(j)));
          if (!hit) fail(ErrorCode::InconsistentBalls, "product missing from the target ball");
          v = *hit;
        }
        table_[static_cast<std::size_t>(i) * n_ + j] = v;
      }
  }
}

std::uint32_t ProductTable::compute(std::uint32_t i, std::uint32_t j) const {
  auto hit = target_->find(multiply(source_->element(source_->inverse(i)), source_->element(j)));
  if (!hit) fail(ErrorCode::InconsistentBalls, "product missing from the target ball");
  return *hit;
}

std::uint32_t ProductTable::operator()(std::uint32_t i, std::uint32_t j) const {
  if (i >= n_ || j >= n_) fail(ErrorCode::SupportOverflow, "index outside the table domain");
  if (!table_.empty()) return table_[static_cast<std::size_t>(i) * n_ + j];
  return compute(i, j);
}

ProductTable build_product_table(BallPtr source, BallPtr target, std::uint32_t dense_limit) {
  return ProductTable(std::move(source), std::move(target), dense_limit);
}

AlgebraElement mul(const AlgebraElement& x, const AlgebraElement& y, const ProductTable& table) {
  for (const auto* e : {&x, &y}) {
    if (!same_universe(e->ball(), table.source()) && !same_universe(e->ball(), table.target()))
      fail(ErrorCode::MismatchedBalls, "factor does not live over the table's balls");
    if (!e->is_zero() && e->terms().rbegin()->first >= table.size())
      fail(ErrorCode::SupportOverflow, "factor support exceeds the table domain");
  }
  AlgebraElement out(table.target());
  for (const auto& [i, a] : x.terms())
    for (const auto& [j, b] : y.terms()) out.add_term(table.product(i, j), a * b);
  return out;
}

AlgebraElement mul_direct(const AlgebraElement& x, const AlgebraElement& y, const BallPtr& universe) {
  require(x.ball()->family() == universe->family() && y.ball()->family() == universe->family(),
          ErrorCode::MismatchedBalls, "factors and universe belong to different families");
  AlgebraElement out(universe);
  for (const auto& [i, a] : x.terms()) {
    const GroupElement& g = x.ball()->element(i);
    for (const auto& [j, b] : y.terms()) {
      auto hit = universe->find(multiply(g, y.ball()->element(j)));
      if (!hit) fail(ErrorCode::SupportOverflow, "product support exceeds the universe ball");
      out.add_term(*hit, a * b);
    }
  }
  return out;
}

std::string rational_string(const Rational& value) {
  Rational q = value;
  q.canonicalize();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const std::string& text) {
  std::string s = text;
  auto fail_parse = [&]() -> Rational { fail(ErrorCode::InvalidArgument, "not a rational number: '" + text + "'"); };
  if (s.empty()) return fail_parse();
  if (s.find('/') != std::string::npos) {
    Rational q;
    if (q.set_str(s, 10) != 0 || q.get_den() == 0) return fail_parse();
    q.canonicalize();
    return q;
  }
  long exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    try {
      std::size_t used = 0;
      exp10 = std::stol(s.substr(e + 1), &used);
      if (used != s.size() - e - 1) return fail_parse();
    } catch (const std::exception&) {
      return fail_parse();
    }
    s = s.substr(0, e);
  }
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s = s.substr(1);
  }
  std::string digits;
  bool seen_dot = false, any = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_dot) return fail_parse();
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      any = true;
      if (seen_dot) --exp10;
    } else {
      return fail_parse();
    }
  }
  if (!any) return fail_parse();
  if (exp10 > 100000 || exp10 < -100000) return fail_parse();
  mpz_class num(digits, 10);
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  Rational q = exp10 >= 0 ? Rational(num * pow10) : Rational(num, pow10);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

namespace {
constexpr const char* kElementMagic = "sosgap-element";
constexpr int kElementVersion = 1;
}  // namespace

void write_element(std::ostream& os, const AlgebraElement& x) {
  const Ball& b = *x.ball();
  os << kElementMagic << ' ' << kElementVersion << '\n';
  os << "ball " << io::hex64(b.hash()) << ' ' << b.family().name() << ' ' << b.radius() << ' '
     << b.size() << '\n';
  os << "terms " << x.support_size() << '\n';
  for (const auto& [i, c] : x.terms()) os << io::to_hex(b.key(i)) << ' ' << rational_string(c) << '\n';
}

AlgebraElement read_element(std::istream& is, const BallPtr& ball) {
  std::string magic, tag, hash, fam;
  int version = 0, radius = 0;
  std::uint64_t size = 0, count = 0;
  if (!(is >> magic >> version) || magic != kElementMagic)
    fail(ErrorCode::Format, "not an element file");
  if (version != kElementVersion) fail(ErrorCode::Format, "unsupported element file version");
  if (!(is >> tag >> hash >> fam >> radius >> size) || tag != "ball")
    fail(ErrorCode::Format, "malformed element header");
  if (hash != io::hex64(ball->hash()) || fam != ball->family().name() || radius != ball->radius() ||
      size != ball->size())
    fail(ErrorCode::MismatchedBalls, "element file was written against a different ball (" + fam +
                                         " radius " + std::to_string(radius) + ")");
  if (!(is >> tag >> count) || tag != "terms") fail(ErrorCode::Format, "malformed element header");
  AlgebraElement x(ball);
  std::uint32_t last = 0;
  for (std::uint64_t t = 0; t < count; ++t) {
    std::string keyhex, coeff;
    if (!(is >> keyhex >> coeff)) fail(ErrorCode::Format, "truncated element file");
    auto hit = ball->find(io::from_hex(keyhex));
    if (!hit) fail(ErrorCode::Format, "element term not present in the ball");
    if (t && *hit <= last) fail(ErrorCode::Format, "element terms are not sorted by ball index");
    last = *hit;
    Rational c = parse_rational(coeff);
    if (sgn(c) == 0) fail(ErrorCode::Format, "zero coefficient stored in element file");
    x.add_term(*hit, c);
  }
  return x;
}

void save_element_file(const AlgebraElement& x, const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  write_element(os, x);
  if (!os) fail(ErrorCode::Io, "write to " + path + " failed");
}

AlgebraElement load_element_file(const std::string& path, const BallPtr& ball) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::Io, "cannot open " + path);
  return read_element(is, ball);
}

}  // namespace sosgap

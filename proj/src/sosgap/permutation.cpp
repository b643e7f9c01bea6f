#include "sosgap/permutation.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "sosgap/error.hpp"

namespace sosgap {

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
  std::vector<char> seen(image_.size(), 0);
  for (int v : image_) {
    require(v >= 0 && static_cast<std::size_t>(v) < image_.size() && !seen[v],
            ErrorCode::InvalidArgument, "permutation image is not a bijection");
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> img(static_cast<std::size_t>(n));
  std::iota(img.begin(), img.end(), 0);
  return Permutation(std::move(img));
}

Permutation Permutation::cycle(int n, const std::vector<int>& one_based) {
  std::vector<int> img(static_cast<std::size_t>(n));
  std::iota(img.begin(), img.end(), 0);
  for (std::size_t k = 0; k < one_based.size(); ++k) {
    int from = one_based[k] - 1;
    int to = one_based[(k + 1) % one_based.size()] - 1;
    require(from >= 0 && from < n && to >= 0 && to < n, ErrorCode::InvalidArgument,
            "cycle entry out of range");
    img[static_cast<std::size_t>(from)] = to;
  }
  return Permutation(std::move(img));
}

bool Permutation::is_even() const {
  std::vector<char> seen(image_.size(), 0);
  int transpositions = 0;
  for (std::size_t s = 0; s < image_.size(); ++s) {
    if (seen[s]) continue;
    int len = 0;
    for (std::size_t k = s; !seen[k]; k = static_cast<std::size_t>(image_[k])) {
      seen[k] = 1;
      ++len;
    }
    transpositions += len - 1;
  }
  return transpositions % 2 == 0;
}

bool Permutation::is_identity() const {
  for (std::size_t k = 0; k < image_.size(); ++k)
    if (image_[k] != static_cast<int>(k)) return false;
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(image_.size());
  for (std::size_t k = 0; k < image_.size(); ++k)
    inv[static_cast<std::size_t>(image_[k])] = static_cast<int>(k);
  return Permutation(std::move(inv));
}

Permutation operator*(const Permutation& a, const Permutation& b) {
  require(a.size() == b.size(), ErrorCode::InvalidArgument,
          "composing permutations of different sizes");
  std::vector<int> img(b.image_.size());
  for (std::size_t k = 0; k < img.size(); ++k) img[k] = a(b(static_cast<int>(k)));
  return Permutation(std::move(img));
}

std::string Permutation::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < image_.size(); ++k) os << (k ? " " : "") << image_[k] + 1;
  return os.str();
}

std::vector<Permutation> alternating_group(int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "alternating group needs n >= 1");
  if (n > kMaxAlternatingRank)
    fail(ErrorCode::ResourceLimit, "exhaustive A_" + std::to_string(n) +
                                       " iteration exceeds the cap of n <= 8");
  std::vector<int> img(static_cast<std::size_t>(n));
  std::iota(img.begin(), img.end(), 0);
  std::vector<Permutation> out;
  do {
    Permutation p(img);
    if (p.is_even()) out.push_back(std::move(p));
  } while (std::next_permutation(img.begin(), img.end()));
  return out;
}

Edge::Edge(int a, int b) : i(std::min(a, b)), j(std::max(a, b)) {
  require(a != b, ErrorCode::InvalidArgument, "edge endpoints must differ");
}

std::string Edge::to_string() const {
  return "{" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "}";
}

EdgeRelation relation(const Edge& e, const Edge& f) {
  if (e == f) return EdgeRelation::Equal;
  if (e.i == f.i || e.i == f.j || e.j == f.i || e.j == f.j) return EdgeRelation::Adjacent;
  return EdgeRelation::Opposite;
}

std::vector<Edge> all_edges(int n) {
  std::vector<Edge> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

std::vector<Edge> adjacent_edges(const Edge& e, int n) {
  std::vector<Edge> out;
  for (const Edge& f : all_edges(n))
    if (relation(e, f) == EdgeRelation::Adjacent) out.push_back(f);
  return out;
}

std::vector<Edge> opposite_edges(const Edge& e, int n) {
  std::vector<Edge> out;
  for (const Edge& f : all_edges(n))
    if (relation(e, f) == EdgeRelation::Opposite) out.push_back(f);
  return out;
}

std::int64_t factorial(int n) {
  require(n >= 0 && n <= 20, ErrorCode::InvalidArgument, "factorial argument out of range");
  std::int64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return r;
}

std::int64_t hypersimplex_number(int n) {
  require(n >= 3, ErrorCode::InvalidArgument, "hypersimplex number needs n >= 3");
  return (n - 2) * factorial(n - 1) / 2;
}

}  // namespace sosgap

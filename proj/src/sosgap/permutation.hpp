#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sosgap {

// A bijection of {0, ..., n-1}. Printed and parsed 1-based in cycle-free
// image notation ("2 3 1" sends 1->2, 2->3, 3->1).
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> image);

  static Permutation identity(int n);
  // Cycle notation, 1-based: cycle(5, {1, 2, 3}) is (1 2 3) acting on 5 points.
  static Permutation cycle(int n, const std::vector<int>& one_based);

  int size() const { return static_cast<int>(image_.size()); }
  int operator()(int k) const { return image_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& image() const { return image_; }

  bool is_even() const;
  bool is_identity() const;
  Permutation inverse() const;

  // (a * b)(k) = a(b(k)).
  friend Permutation operator*(const Permutation& a, const Permutation& b);
  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

  std::string to_string() const;

 private:
  std::vector<int> image_;
};

// Every even permutation of n points in lexicographic image order.
// Exhaustive iteration is capped at n <= 8 (|A_8| = 20160).
std::vector<Permutation> alternating_group(int n);

inline constexpr int kMaxAlternatingRank = 8;

enum class EdgeRelation { Equal, Adjacent, Opposite };

// Unordered pair {i, j} of distinct 0-based vertices, stored with i < j.
struct Edge {
  int i = 0;
  int j = 1;

  Edge() = default;
  Edge(int a, int b);

  Edge mapped(const Permutation& sigma) const { return Edge(sigma(i), sigma(j)); }
  std::string to_string() const;  // 1-based "{1,2}"

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

EdgeRelation relation(const Edge& e, const Edge& f);

// All edges of the simplex on n vertices, lexicographic.
std::vector<Edge> all_edges(int n);
std::vector<Edge> adjacent_edges(const Edge& e, int n);
std::vector<Edge> opposite_edges(const Edge& e, int n);

std::int64_t factorial(int n);
std::int64_t binomial(int n, int k);
// (n-2)(n-1)!/2
std::int64_t hypersimplex_number(int n);

}  // namespace sosgap

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "sosgap/ball.hpp"

namespace sosgap {

using Rational = mpq_class;

// Finitely supported element of the real group algebra with exact rational
// coefficients, indexed by positions in a ball.
class AlgebraElement {
 public:
  AlgebraElement() = default;
  explicit AlgebraElement(BallPtr ball) : ball_(std::move(ball)) {}

  static AlgebraElement basis(BallPtr ball, std::uint32_t index, const Rational& c = 1);
  static AlgebraElement one(BallPtr ball) { return basis(std::move(ball), 0); }

  const BallPtr& ball() const { return ball_; }
  const std::map<std::uint32_t, Rational>& terms() const { return terms_; }
  Rational coefficient(std::uint32_t index) const;
  std::size_t support_size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  // Largest word length in the support; 0 for the zero element.
  int support_radius() const;

  void add_term(std::uint32_t index, const Rational& c);

  AlgebraElement& operator+=(const AlgebraElement& y);
  AlgebraElement& operator-=(const AlgebraElement& y);
  AlgebraElement& operator*=(const Rational& c);

  friend bool operator==(const AlgebraElement& x, const AlgebraElement& y);

 private:
  BallPtr ball_;
  std::map<std::uint32_t, Rational> terms_;
};

AlgebraElement operator+(AlgebraElement x, const AlgebraElement& y);
AlgebraElement operator-(AlgebraElement x, const AlgebraElement& y);
AlgebraElement operator*(const Rational& c, AlgebraElement x);

AlgebraElement add(const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement scale(const Rational& c, const AlgebraElement& x);
AlgebraElement star(const AlgebraElement& x);
Rational augmentation(const AlgebraElement& x);
Rational l1_norm(const AlgebraElement& x);
AlgebraElement act_algebra(const Permutation& sigma, const AlgebraElement& x);
// Re-index x into another ball of the same family by canonical key.
AlgebraElement embed(const AlgebraElement& x, const BallPtr& target);

bool same_universe(const BallPtr& a, const BallPtr& b);

// table(i, j) = index in the target ball of b_i^-1 b_j for b_i, b_j in the source ball.
class ProductTable {
 public:
  ProductTable(BallPtr source, BallPtr target, std::uint32_t dense_limit = 1u << 16);

  const BallPtr& source() const { return source_; }
  const BallPtr& target() const { return target_; }
  bool dense() const { return !table_.empty(); }
  std::uint32_t size() const { return n_; }

  std::uint32_t operator()(std::uint32_t i, std::uint32_t j) const;
  // Index of b_i b_j.
  std::uint32_t product(std::uint32_t i, std::uint32_t j) const {
    return (*this)(source_->inverse(i), j);
  }

 private:
  std::uint32_t compute(std::uint32_t i, std::uint32_t j) const;

  BallPtr source_;
  BallPtr target_;
  std::uint32_t n_ = 0;
  std::vector<std::uint32_t> table_;
};

ProductTable build_product_table(BallPtr source, BallPtr target,
                                 std::uint32_t dense_limit = 1u << 16);

// Convolution through the table; result lives in the table's target ball.
AlgebraElement mul(const AlgebraElement& x, const AlgebraElement& y, const ProductTable& table);
// Convolution by explicit group multiplication, looked up in universe.
AlgebraElement mul_direct(const AlgebraElement& x, const AlgebraElement& y, const BallPtr& universe);

void write_element(std::ostream& os, const AlgebraElement& x);
AlgebraElement read_element(std::istream& is, const BallPtr& ball);
void save_element_file(const AlgebraElement& x, const std::string& path);
AlgebraElement load_element_file(const std::string& path, const BallPtr& ball);

std::string rational_string(const Rational& q);
Rational parse_rational(const std::string& s);

}  // namespace sosgap

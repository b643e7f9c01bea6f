#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sosgap/permutation.hpp"

namespace sosgap {

enum class FamilyKind : std::uint8_t { SpecialLinear = 0, SpecialAutFree = 1 };

struct GroupFamily {
  FamilyKind kind = FamilyKind::SpecialLinear;
  int rank = 2;

  void validate() const;
  int generator_count() const;
  // Generators per ordered pair (i, j): 2 for SL, 4 for SAut.
  int flavors() const { return kind == FamilyKind::SpecialLinear ? 1 : 2; }
  std::string name() const;  // "sl3", "saut5"
  std::string kind_name() const;  // "sl" / "saut"

  static FamilyKind parse_kind(std::string_view s);
  static GroupFamily parse(std::string_view name);  // "sl3"

  friend bool operator==(const GroupFamily&, const GroupFamily&) = default;
};

enum class Flavor : std::uint8_t { Elementary, RhoTransvection, LambdaTransvection };
enum class Sign : std::uint8_t { Plus, Minus };

struct GeneratorDescriptor {
  FamilyKind kind = FamilyKind::SpecialLinear;
  int i = 0;  // 0-based
  int j = 1;
  Flavor flavor = Flavor::Elementary;
  Sign sign = Sign::Plus;

  Edge edge() const { return Edge(i, j); }
  std::string to_string() const;  // "E12", "rho12^-1"
  friend bool operator==(const GeneratorDescriptor&, const GeneratorDescriptor&) = default;
};

// Letters are 1-based: k+1 stands for a_{k+1}, -(k+1) for its inverse.
using FreeWord = std::vector<std::int8_t>;

void reduce_append(FreeWord& out, std::int8_t letter);
FreeWord reduce(const FreeWord& w);
FreeWord invert_word(const FreeWord& w);

class GroupElement {
 public:
  GroupElement() = default;

  static GroupElement identity(const GroupFamily& f);
  static GroupElement from_matrix(const GroupFamily& f, std::vector<mpz_class> row_major);
  static GroupElement from_images(const GroupFamily& f, std::vector<FreeWord> images);

  const GroupFamily& family() const { return family_; }
  const std::vector<mpz_class>& matrix() const { return matrix_; }
  const mpz_class& entry(int r, int c) const {
    return matrix_[static_cast<std::size_t>(r * family_.rank + c)];
  }
  const std::vector<FreeWord>& images() const { return images_; }

  // Generator indices whose product (left to right) is this element, when known.
  const std::optional<std::vector<std::uint32_t>>& word() const { return word_; }
  void set_word(std::vector<std::uint32_t> w) { word_ = std::move(w); }
  void clear_word() { word_.reset(); }

  bool is_identity() const;
  std::string to_string() const;

 private:
  GroupFamily family_;
  std::vector<mpz_class> matrix_;
  std::vector<FreeWord> images_;
  std::optional<std::vector<std::uint32_t>> word_;
};

// Ordered by i, then j, then flavor, then sign; index ^ 1 is the inverse.
std::vector<GeneratorDescriptor> generator_descriptors(const GroupFamily& f);
std::vector<GroupElement> generator_elements(const GroupFamily& f);
GroupElement generator_element(const GroupFamily& f, std::uint32_t index);
std::uint32_t generator_index(const GroupFamily& f, const GeneratorDescriptor& d);
std::uint32_t act_generator(const GroupFamily& f, const Permutation& sigma, std::uint32_t index);

// multiply(g, h) is g∘h for automorphisms: (gh)(a_k) = g(h(a_k)).
GroupElement multiply(const GroupElement& g, const GroupElement& h);
GroupElement invert(const GroupElement& g);
GroupElement act(const Permutation& sigma, const GroupElement& g);

std::string canonical_key(const GroupElement& g);
GroupElement element_from_key(const GroupFamily& f, std::string_view key);
bool same_element(const GroupElement& g, const GroupElement& h);

}  // namespace sosgap

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sosgap/group.hpp"
#include "sosgap/permutation.hpp"

namespace sosgap {

inline constexpr std::uint64_t kDefaultBallCap = 10'000'000;

// Elements of word length <= R, indexed by (word length, canonical key).
// Index 0 is the identity. Immutable after construction apart from the
// internally synchronized action-map cache.
class Ball {
 public:
  const GroupFamily& family() const { return family_; }
  int radius() const { return radius_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(keys_.size()); }

  const GroupElement& element(std::uint32_t i) const { return elements_.at(i); }
  const std::string& key(std::uint32_t i) const { return keys_.at(i); }
  std::uint32_t inverse(std::uint32_t i) const { return inv_.at(i); }
  std::uint32_t word_length(std::uint32_t i) const { return lengths_.at(i); }
  const std::vector<std::uint32_t>& inverse_map() const { return inv_; }
  const std::vector<std::uint32_t>& word_lengths() const { return lengths_; }

  std::optional<std::uint32_t> find(const std::string& key) const;
  std::optional<std::uint32_t> find(const GroupElement& g) const { return find(canonical_key(g)); }

  // Number of elements of word length <= r; B_r is exactly this prefix.
  std::uint32_t prefix_size(int r) const;
  std::vector<std::uint32_t> layer_sizes() const;

  // Ball index of generator k in the family's generator order.
  std::uint32_t generator_position(std::uint32_t k) const { return gen_pos_.at(k); }

  // Image of index i under sigma; throws ClosureError when it leaves the ball.
  std::uint32_t act_index(const Permutation& sigma, std::uint32_t i) const;
  // Full index permutation for sigma, cached.
  const std::vector<std::uint32_t>& action_map(const Permutation& sigma) const;

  // True when other's elements are exactly our first other.size() elements.
  bool has_prefix(const Ball& other) const;

  std::uint64_t hash() const { return hash_; }

  friend std::shared_ptr<const Ball> enumerate_ball(const GroupFamily&, int, std::uint64_t);
  friend std::shared_ptr<const Ball> load_ball(std::istream&);

 private:
  void finish();

  GroupFamily family_;
  int radius_ = 0;
  std::vector<GroupElement> elements_;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::uint32_t> inv_;
  std::vector<std::uint32_t> lengths_;
  std::vector<std::uint32_t> gen_pos_;
  std::uint64_t hash_ = 0;

  mutable std::mutex action_mutex_;
  mutable std::map<std::vector<int>, std::unique_ptr<std::vector<std::uint32_t>>> actions_;
};

using BallPtr = std::shared_ptr<const Ball>;

BallPtr enumerate_ball(const GroupFamily& family, int radius,
                       std::uint64_t cap = kDefaultBallCap);

void save_ball(const Ball& ball, std::ostream& os);
BallPtr load_ball(std::istream& is);
void save_ball_file(const Ball& ball, const std::string& path);
BallPtr load_ball_file(const std::string& path);

// Process-wide memo keyed by (family, radius). Larger cached balls are not
// reused for smaller radii since element files pin the exact ball.
BallPtr cached_ball(const GroupFamily& family, int radius, std::uint64_t cap = kDefaultBallCap);

}  // namespace sosgap

#include "sosgap/ball.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <tuple>

#include "sosgap/binary_io.hpp"
#include "sosgap/error.hpp"

namespace sosgap {

namespace {
constexpr char kBallMagic[8] = {'S', 'G', 'B', 'A', 'L', 'L', '\0', '\1'};
constexpr std::uint32_t kBallVersion = 1;
}  // namespace

std::optional<std::uint32_t> Ball::find(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t Ball::prefix_size(int r) const {
  if (r < 0) return 0;
  auto it = std::upper_bound(lengths_.begin(), lengths_.end(), static_cast<std::uint32_t>(r));
  return static_cast<std::uint32_t>(it - lengths_.begin());
}

std::vector<std::uint32_t> Ball::layer_sizes() const {
  std::vector<std::uint32_t> out(static_cast<std::size_t>(radius_ + 1), 0);
  for (auto l : lengths_) ++out[l];
  return out;
}

std::uint32_t Ball::act_index(const Permutation& sigma, std::uint32_t i) const {
  auto hit = find(canonical_key(act(sigma, element(i))));
  if (!hit)
    fail(ErrorCode::ClosureError, "ball " + family_.name() + " is not closed under the permutation " +
                                      sigma.to_string());
  return *hit;
}

const std::vector<std::uint32_t>& Ball::action_map(const Permutation& sigma) const {
  require(sigma.size() == family_.rank, ErrorCode::InvalidArgument, "permutation size mismatch");
  {
    std::lock_guard<std::mutex> lock(action_mutex_);
    auto it = actions_.find(sigma.image());
    if (it != actions_.end()) return *it->second;
  }
  auto map = std::make_unique<std::vector<std::uint32_t>>(size());
  for (std::uint32_t i = 0; i < size(); ++i) {
    const std::uint32_t j = act_index(sigma, i);
    if (lengths_[j] != lengths_[i])
      fail(ErrorCode::InternalInconsistency, "permutation action changed a word length");
    (*map)[i] = j;
  }
  std::lock_guard<std::mutex> lock(action_mutex_);
  auto [it, inserted] = actions_.emplace(sigma.image(), std::move(map));
  return *it->second;
}

bool Ball::has_prefix(const Ball& other) const {
  if (!(family_ == other.family_) || other.size() > size()) return false;
  if (this == &other) return true;
  for (std::uint32_t i = 0; i < other.size(); ++i)
    if (keys_[i] != other.keys_[i]) return false;
  return true;
}

void Ball::finish() {
  index_.clear();
  index_.reserve(keys_.size() * 2);
  for (std::uint32_t i = 0; i < size(); ++i) index_.emplace(keys_[i], i);

  if (inv_.empty()) {
    inv_.resize(size());
    for (std::uint32_t i = 0; i < size(); ++i) {
      auto hit = find(canonical_key(invert(elements_[i])));
      if (!hit) fail(ErrorCode::InternalInconsistency, "ball is not closed under inversion");
      inv_[i] = *hit;
    }
  }
  for (std::uint32_t i = 0; i < size(); ++i)
    if (inv_[i] >= size() || inv_[inv_[i]] != i || lengths_[inv_[i]] != lengths_[i])
      fail(ErrorCode::Format, "inverse map is not an involution preserving word length");

  gen_pos_.clear();
  if (radius_ >= 1)
    for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(family_.generator_count()); ++k) {
      auto hit = find(canonical_key(generator_element(family_, k)));
      if (!hit) fail(ErrorCode::InternalInconsistency, "generator missing from ball");
      gen_pos_.push_back(*hit);
    }

  io::Fnv1a h;
  h.update_u64(static_cast<std::uint64_t>(family_.kind));
  h.update_u64(static_cast<std::uint64_t>(family_.rank));
  h.update_u64(static_cast<std::uint64_t>(radius_));
  h.update_u64(size());
  for (const auto& k : keys_) {
    h.update_u64(k.size());
    h.update(k);
  }
  hash_ = h.digest();
}

BallPtr enumerate_ball(const GroupFamily& family, int radius, std::uint64_t cap) {
  family.validate();
  require(radius >= 0, ErrorCode::InvalidArgument, "radius must be nonnegative");
  require(cap >= 1, ErrorCode::InvalidArgument, "element cap must be positive");
  auto ball = std::make_shared<Ball>();
  ball->family_ = family;
  ball->radius_ = radius;

  const auto gens = generator_elements(family);
  std::unordered_map<std::string, std::uint32_t> seen;
  ball->elements_.push_back(GroupElement::identity(family));
  ball->keys_.push_back(canonical_key(ball->elements_[0]));
  ball->lengths_.push_back(0);
  seen.emplace(ball->keys_[0], 0);

  std::size_t layer_begin = 0;
  for (int r = 1; r <= radius; ++r) {
    const std::size_t layer_end = ball->elements_.size();
    std::vector<std::pair<std::string, GroupElement>> fresh;
    std::unordered_map<std::string, std::size_t> fresh_index;
    for (std::size_t p = layer_begin; p < layer_end; ++p) {
      for (std::uint32_t k = 0; k < gens.size(); ++k) {
        GroupElement g = multiply(ball->elements_[p], gens[k]);
        std::string key = canonical_key(g);
        if (seen.count(key) || fresh_index.count(key)) continue;
        fresh_index.emplace(key, fresh.size());
        fresh.emplace_back(std::move(key), std::move(g));
        if (layer_end + fresh.size() > cap)
          fail(ErrorCode::ResourceLimit,
               "ball of " + family.name() + " exceeds the cap of " + std::to_string(cap) +
                   " elements while building layer " + std::to_string(r));
      }
    }
    std::sort(fresh.begin(), fresh.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [key, g] : fresh) {
      seen.emplace(key, static_cast<std::uint32_t>(ball->keys_.size()));
      ball->keys_.push_back(std::move(key));
      ball->elements_.push_back(std::move(g));
      ball->lengths_.push_back(static_cast<std::uint32_t>(r));
    }
    layer_begin = layer_end;
  }
  ball->finish();
  return ball;
}

void save_ball(const Ball& ball, std::ostream& os) {
  os.write(kBallMagic, sizeof kBallMagic);
  io::put_u32(os, kBallVersion);
  io::put_u8(os, static_cast<std::uint8_t>(ball.family().kind));
  io::put_u32(os, static_cast<std::uint32_t>(ball.family().rank));
  io::put_u32(os, static_cast<std::uint32_t>(ball.radius()));
  io::put_u32(os, ball.size());
  for (std::uint32_t i = 0; i < ball.size(); ++i) {
    io::put_u32(os, ball.word_length(i));
    io::put_bytes(os, ball.key(i));
  }
  for (std::uint32_t i = 0; i < ball.size(); ++i) io::put_u32(os, ball.inverse(i));
}

BallPtr load_ball(std::istream& is) {
  char magic[sizeof kBallMagic];
  io::read_exact(is, magic, sizeof magic);
  if (!std::equal(magic, magic + sizeof magic, kBallMagic)) fail(ErrorCode::Format, "not a ball file");
  const std::uint32_t version = io::get_u32(is);
  if (version != kBallVersion) fail(ErrorCode::Format, "unsupported ball file version " + std::to_string(version));
  auto ball = std::make_shared<Ball>();
  const std::uint8_t kind = io::get_u8(is);
  if (kind > 1) fail(ErrorCode::Format, "unknown family kind in ball file");
  ball->family_.kind = static_cast<FamilyKind>(kind);
  ball->family_.rank = static_cast<int>(io::get_u32(is));
  ball->family_.validate();
  ball->radius_ = static_cast<int>(io::get_u32(is));
  const std::uint32_t count = io::get_u32(is);
  if (count == 0) fail(ErrorCode::Format, "empty ball file");
  ball->keys_.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = io::get_u32(is);
    if (len > static_cast<std::uint32_t>(ball->radius_) || (i && len < ball->lengths_.back()))
      fail(ErrorCode::Format, "word lengths out of order in ball file");
    ball->lengths_.push_back(len);
    ball->keys_.push_back(io::get_bytes(is, 1u << 20));
    ball->elements_.push_back(element_from_key(ball->family_, ball->keys_.back()));
  }
  if (!ball->elements_[0].is_identity() || ball->lengths_[0] != 0)
    fail(ErrorCode::Format, "ball file does not start with the identity");
  ball->elements_[0].set_word({});
  ball->inv_.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) ball->inv_[i] = io::get_u32(is);
  ball->finish();
  if (ball->index_.size() != count) fail(ErrorCode::Format, "duplicate keys in ball file");
  return ball;
}

void save_ball_file(const Ball& ball, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  save_ball(ball, os);
  if (!os) fail(ErrorCode::Io, "write to " + path + " failed");
}

BallPtr load_ball_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot open " + path);
  return load_ball(is);
}

BallPtr cached_ball(const GroupFamily& family, int radius, std::uint64_t cap) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, BallPtr> memo;
  const auto key = std::make_tuple(static_cast<int>(family.kind), family.rank, radius);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }
  BallPtr ball;
  std::string file;
  if (const char* dir = std::getenv("SOSGAP_CACHE_DIR"); dir && *dir) {
    file = (std::filesystem::path(dir) / (family.name() + "_r" + std::to_string(radius) + ".ball")).string();
    if (std::filesystem::exists(file)) {
      try {
        BallPtr loaded = load_ball_file(file);
        if (loaded->family() == family && loaded->radius() == radius) ball = loaded;
      } catch (const Error&) {
        ball.reset();
      }
    }
  }
  if (!ball) {
    ball = enumerate_ball(family, radius, cap);
    if (!file.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(std::filesystem::path(file).parent_path(), ec);
      const std::string tmp = file + ".tmp";
      try {
        save_ball_file(*ball, tmp);
        std::filesystem::rename(tmp, file, ec);
      } catch (const Error&) {
      }
    }
  }
  std::lock_guard<std::mutex> lock(mu);
  return memo.emplace(key, ball).first->second;
}

}  // namespace sosgap

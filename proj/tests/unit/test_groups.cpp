#include <array>
#include <set>
#include <sstream>

#include "doctest.h"
#include "sosgap/ball.hpp"
#include "sosgap/error.hpp"

using namespace sosgap;

namespace {

GroupFamily sl(int n) { return {FamilyKind::SpecialLinear, n}; }
GroupFamily saut(int n) { return {FamilyKind::SpecialAutFree, n}; }

GroupElement gen(const GroupFamily& f, int i, int j, Flavor fl, Sign s = Sign::Plus) {
  GeneratorDescriptor d{f.kind, i - 1, j - 1, fl, s};
  return generator_element(f, generator_index(f, d));
}

using Mat3 = std::array<long long, 9>;

Mat3 mul3(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k)
      for (int s = 0; s < 3; ++s) c[r * 3 + s] += a[r * 3 + k] * b[k * 3 + s];
  return c;
}

std::vector<Mat3> sl3_generators_i64() {
  std::vector<Mat3> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      for (int s : {1, -1}) {
        Mat3 m{1, 0, 0, 0, 1, 0, 0, 0, 1};
        m[i * 3 + j] = s;
        out.push_back(m);
      }
    }
  return out;
}

}  // namespace

TEST_CASE("generator counts") {
  CHECK(generator_elements(sl(3)).size() == 12);
  CHECK(generator_elements(saut(5)).size() == 80);
  CHECK(sl(4).generator_count() == 24);
  CHECK_THROWS_AS(generator_elements(sl(1)), Error);
  try {
    generator_elements(saut(1));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidFamily);
  }
}

TEST_CASE("generators are distinct, symmetric and nontrivial") {
  for (const auto& f : {sl(3), saut(3), sl(4), saut(4)}) {
    const auto g = generator_elements(f);
    std::set<std::string> keys;
    for (std::uint32_t k = 0; k < g.size(); ++k) {
      CHECK_FALSE(g[k].is_identity());
      keys.insert(canonical_key(g[k]));
      CHECK(multiply(g[k], g[k ^ 1u]).is_identity());
    }
    CHECK(keys.size() == g.size());
  }
}

TEST_CASE("multiply examples") {
  auto f = sl(3);
  auto e12 = gen(f, 1, 2, Flavor::Elementary);
  auto sq = multiply(e12, e12);
  CHECK(sq.entry(0, 1) == 2);
  CHECK(sq.entry(0, 0) == 1);
  CHECK(sq.entry(1, 1) == 1);
  CHECK(sq.entry(2, 2) == 1);

  auto a = saut(4);
  auto r12 = gen(a, 1, 2, Flavor::RhoTransvection);
  auto rr = multiply(r12, r12);
  CHECK(rr.images()[0] == FreeWord{1, 2, 2});
  CHECK(rr.images()[1] == FreeWord{2});
  auto r34 = gen(a, 3, 4, Flavor::RhoTransvection);
  CHECK(canonical_key(multiply(r12, r34)) == canonical_key(multiply(r34, r12)));

  CHECK_THROWS_AS(multiply(e12, r12), Error);
}

TEST_CASE("composition order") {
  // (rho12 ∘ lambda21)(a2) = rho12(a1 a2) = a1 a2 a2
  auto a = saut(3);
  auto r12 = gen(a, 1, 2, Flavor::RhoTransvection);
  auto l21 = gen(a, 2, 1, Flavor::LambdaTransvection);
  auto p = multiply(r12, l21);
  CHECK(p.images()[1] == FreeWord{1, 2, 2});
  CHECK(p.images()[0] == FreeWord{1, 2});
}

TEST_CASE("invert examples") {
  auto f = sl(3);
  CHECK(invert(GroupElement::identity(f)).is_identity());
  auto inv = invert(gen(f, 1, 2, Flavor::Elementary));
  CHECK(inv.entry(0, 1) == -1);
  CHECK(same_element(inv, gen(f, 1, 2, Flavor::Elementary, Sign::Minus)));

  auto a = saut(3);
  auto r = invert(gen(a, 1, 2, Flavor::RhoTransvection));
  CHECK(r.images()[0] == FreeWord{1, -2});
  GroupElement bare = GroupElement::from_images(a, {{1, 2}, {2}, {3}});
  try {
    invert(bare);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedInversion);
  }
}

TEST_CASE("act examples") {
  auto f = sl(3);
  auto c = Permutation::cycle(3, {1, 2, 3});
  CHECK(same_element(act(c, gen(f, 1, 2, Flavor::Elementary)), gen(f, 2, 3, Flavor::Elementary)));
  auto id = Permutation::identity(3);
  auto g = multiply(gen(f, 1, 2, Flavor::Elementary), gen(f, 3, 1, Flavor::Elementary, Sign::Minus));
  CHECK(same_element(act(id, g), g));

  auto a = saut(3);
  CHECK(same_element(act(c, gen(a, 1, 2, Flavor::RhoTransvection)), gen(a, 2, 3, Flavor::RhoTransvection)));
  CHECK(same_element(act(c, gen(a, 2, 1, Flavor::LambdaTransvection, Sign::Minus)),
                     gen(a, 3, 2, Flavor::LambdaTransvection, Sign::Minus)));
}

TEST_CASE("act is a homomorphism in both arguments") {
  for (const auto& f : {sl(4), saut(4)}) {
    const auto perms = alternating_group(4);
    const auto g = generator_elements(f);
    const auto x = multiply(multiply(g[3], g[17]), g[8]);
    const auto y = multiply(g[5], g[20]);
    for (const auto& s : perms)
      for (const auto& t : {perms[1], perms[7]}) {
        CHECK(same_element(act(s * t, x), act(s, act(t, x))));
      }
    for (const auto& s : perms)
      CHECK(same_element(act(s, multiply(x, y)), multiply(act(s, x), act(s, y))));
  }
}

TEST_CASE("canonical keys") {
  auto a = saut(2);
  auto g = GroupElement::from_images(a, {{1, -1, 2}, {2, 1}});
  auto h = GroupElement::from_images(a, {{2}, {2, 1}});
  CHECK(canonical_key(g) == canonical_key(h));
  auto f = sl(3);
  CHECK(canonical_key(gen(f, 1, 2, Flavor::Elementary)) != canonical_key(gen(f, 2, 1, Flavor::Elementary)));
  for (const auto& fam : {sl(3), saut(3)}) {
    for (const auto& e : generator_elements(fam)) {
      auto back = element_from_key(fam, canonical_key(e));
      CHECK(canonical_key(back) == canonical_key(e));
    }
  }
}

TEST_CASE("opposite-edge generators commute") {
  for (int n = 2; n <= 5; ++n)
    for (const auto& f : {sl(n), saut(n)}) {
      const auto d = generator_descriptors(f);
      const auto g = generator_elements(f);
      int pairs = 0;
      for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = 0; b < g.size(); ++b) {
          if (relation(d[a].edge(), d[b].edge()) != EdgeRelation::Opposite) continue;
          ++pairs;
          CHECK(canonical_key(multiply(g[a], g[b])) == canonical_key(multiply(g[b], g[a])));
        }
      if (n < 4) CHECK(pairs == 0);
    }
}

TEST_CASE("edge trichotomy") {
  for (int n = 2; n <= 7; ++n) {
    const auto edges = all_edges(n);
    for (const auto& e : edges) {
      CHECK(adjacent_edges(e, n).size() == static_cast<std::size_t>(2 * (n - 2)));
      CHECK(opposite_edges(e, n).size() == static_cast<std::size_t>((n - 2) * (n - 3) / 2));
      int eq = 0;
      for (const auto& f : edges) eq += relation(e, f) == EdgeRelation::Equal;
      CHECK(eq == 1);
    }
  }
}

TEST_CASE("alternating group") {
  CHECK(alternating_group(3).size() == 3);
  CHECK(alternating_group(5).size() == 60);
  CHECK(alternating_group(8).size() == 20160);
  CHECK_THROWS_AS(alternating_group(9), Error);
  for (const auto& p : alternating_group(4)) CHECK(p.is_even());
  CHECK(Permutation::cycle(3, {1, 2, 3}).is_even());
  CHECK_FALSE(Permutation::cycle(3, {1, 2}).is_even());
}

TEST_CASE("ball sizes") {
  auto f = sl(3);
  CHECK(enumerate_ball(f, 0)->size() == 1);
  CHECK(enumerate_ball(f, 1)->size() == 13);
  CHECK(enumerate_ball(f, 2)->size() == 121);
  CHECK(enumerate_ball(f, 3)->size() == 883);
  CHECK(enumerate_ball(f, 4)->size() == 5455);
}

TEST_CASE("second ball agrees with a fixed-width oracle") {
  const auto gens = sl3_generators_i64();
  std::set<Mat3> oracle{{1, 0, 0, 0, 1, 0, 0, 0, 1}};
  for (const auto& a : gens) {
    oracle.insert(a);
    for (const auto& b : gens) oracle.insert(mul3(a, b));
  }
  auto ball = enumerate_ball(sl(3), 2);
  REQUIRE(ball->size() == oracle.size());
  for (const auto& m : oracle) {
    std::vector<mpz_class> entries;
    for (long long v : m) entries.emplace_back(static_cast<long>(v));
    CHECK(ball->find(GroupElement::from_matrix(sl(3), entries)).has_value());
  }
}

TEST_CASE("ball invariants") {
  for (const auto& f : {sl(3), saut(3), sl(4)}) {
    auto ball = enumerate_ball(f, 2);
    CHECK(ball->element(0).is_identity());
    for (std::uint32_t i = 0; i < ball->size(); ++i) {
      CHECK(ball->inverse(ball->inverse(i)) == i);
      CHECK(ball->word_length(ball->inverse(i)) == ball->word_length(i));
      if (i) {
        CHECK(ball->word_length(i - 1) <= ball->word_length(i));
        if (ball->word_length(i - 1) == ball->word_length(i)) CHECK(ball->key(i - 1) < ball->key(i));
      }
    }
    for (const auto& s : alternating_group(f.rank)) {
      const auto& map = ball->action_map(s);
      std::set<std::uint32_t> image(map.begin(), map.end());
      CHECK(image.size() == ball->size());
    }
  }
}

TEST_CASE("smaller balls are prefixes") {
  auto b2 = enumerate_ball(saut(3), 2);
  auto b1 = enumerate_ball(saut(3), 1);
  CHECK(b2->has_prefix(*b1));
  CHECK(b2->prefix_size(1) == b1->size());
  CHECK(b1->size() == 25);
}

TEST_CASE("ball persistence round trip") {
  for (const auto& f : {sl(3), saut(3)}) {
    auto ball = enumerate_ball(f, 2);
    std::stringstream ss;
    save_ball(*ball, ss);
    const std::string bytes = ss.str();
    auto back = load_ball(ss);
    CHECK(back->hash() == ball->hash());
    CHECK(back->size() == ball->size());
    std::stringstream again;
    save_ball(*back, again);
    CHECK(again.str() == bytes);
  }
}

TEST_CASE("ball cap") {
  try {
    enumerate_ball(sl(3), 3, 500);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ResourceLimit);
    CHECK(std::string(e.what()).find("layer 3") != std::string::npos);
  }
}

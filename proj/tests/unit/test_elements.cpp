#include "doctest.h"
#include "sosgap/elements.hpp"
#include "sosgap/error.hpp"

using namespace sosgap;

namespace {

GroupFamily sl(int n) { return {FamilyKind::SpecialLinear, n}; }
GroupFamily saut(int n) { return {FamilyKind::SpecialAutFree, n}; }

}  // namespace

TEST_CASE("laplacian coefficients") {
  auto b = enumerate_ball(sl(3), 1);
  const auto d = laplacian(sl(3), 3, b);
  CHECK(d.value.coefficient(0) == 12);
  CHECK(augmentation(d.value) == 0);
  CHECK(d.value.support_radius() == 1);
  auto a = enumerate_ball(saut(5), 1);
  CHECK(laplacian(saut(5), 5, a).value.coefficient(0) == 80);
  CHECK_THROWS_AS(laplacian(sl(3), 3, enumerate_ball(sl(3), 0)), Error);
}

TEST_CASE("edge laplacians") {
  auto b = enumerate_ball(sl(3), 1);
  const auto d = edge_laplacian(sl(3), 3, Edge(0, 1), b).value;
  CHECK(d.coefficient(0) == 4);
  CHECK(d.support_size() == 5);
  auto a = enumerate_ball(saut(3), 1);
  CHECK(edge_laplacian(saut(3), 3, Edge(0, 1), a).value.coefficient(0) == 8);

  for (const auto& f : {sl(2), saut(2)}) {
    auto u = enumerate_ball(f, 1);
    CHECK(edge_laplacian(f, 2, Edge(0, 1), u).value == laplacian(f, 2, u).value);
  }
  CHECK_THROWS_AS(edge_laplacian(sl(3), 3, Edge(0, 3), b), Error);
}

TEST_CASE("square split at small rank") {
  for (const auto& f : {sl(3), sl(4), saut(3), saut(4)}) {
    auto u = enumerate_ball(f, 2);
    const auto parts = sq_adj_op(f, f.rank, u);
    const auto d = laplacian(f, f.rank, u).value;
    CHECK(parts.sq.value + parts.adj.value + parts.op.value == mul_direct(d, d, u));
    if (f.rank == 3) CHECK(parts.op.value.is_zero());
    for (const auto* p : {&parts.sq, &parts.adj, &parts.op}) {
      CHECK(augmentation(p->value) == 0);
      CHECK(star(p->value) == p->value);
    }
  }
}

TEST_CASE("X coefficients") {
  const auto c4 = x_coefficients(4);
  CHECK(c4.alpha == 30);
  CHECK(c4.beta == 33);
  CHECK(c4.gamma == 36);
  CHECK(hypersimplex_number(5) == 36);
  const auto c5 = x_coefficients(5);
  CHECK(c5.alpha == 36 * 35);
  CHECK(c5.beta == Rational(36) * (Rational(36) - Rational(2, 3)));
}

TEST_CASE("X double sum equals the closed form") {
  for (const auto& f : {sl(4), saut(4)}) {
    auto u = enumerate_ball(f, 2);
    const auto x = x_element(f, 4, u);
    CHECK(x.value == x_closed_form(f, 4, u).value);
    CHECK(star(x.value) == x.value);
    CHECK(symmetrize(x.value, 4) == Rational(12) * x.value);
  }
}

TEST_CASE("symmetrization examples") {
  auto u = enumerate_ball(sl(4), 2);
  const auto d3 = laplacian(sl(4), 3, u).value;
  CHECK(symmetrize(d3, 4) == Rational(6) * laplacian(sl(4), 4, u).value);
  const auto adj3 = sq_adj_op(sl(4), 3, u).adj.value;
  CHECK(symmetrize(adj3, 4) == Rational(3) * sq_adj_op(sl(4), 4, u).adj.value);
  const auto d4 = laplacian(sl(4), 4, u).value;
  CHECK(symmetrize(d4, 4) == Rational(12) * d4);
  CHECK_THROWS_AS(symmetrize(d3, 3), Error);
}

TEST_CASE("targets") {
  auto t = TargetDescriptor::parse("adj+3/2op");
  CHECK(t.kind == TargetDescriptor::Kind::AdjPlusKOp);
  CHECK(t.k == Rational(3, 2));
  CHECK(t.to_string() == "adj+3/2op");
  CHECK(TargetDescriptor::parse("adj+1.5op") == t);
  CHECK(TargetDescriptor::parse("adj").to_string() == "adj");
  CHECK(TargetDescriptor::parse("delta2").to_string() == "delta2");
  CHECK_THROWS_AS(TargetDescriptor::parse("foo"), Error);
  CHECK_THROWS_AS(TargetDescriptor::parse("adj+-1op"), Error);

  auto u = enumerate_ball(sl(4), 2);
  const auto parts = sq_adj_op(sl(4), 4, u);
  CHECK(build_target(TargetDescriptor::parse("adj+2op"), sl(4), u) ==
        parts.adj.value + Rational(2) * parts.op.value);
}

TEST_CASE("identity report for small ranks") {
  IdentityOptions opt;
  opt.n_max = 4;
  opt.m_max = 5;
  const auto report = verify_identities(sl(4), opt);
  CHECK(report.size() > 20);
  for (const auto& c : report) {
    INFO(c.id << " n=" << c.n << " m=" << c.m << " " << c.detail);
    CHECK(c.pass);
    CHECK(c.max_abs_deviation == 0);
  }
  bool saw_op = false;
  for (const auto& c : report) saw_op |= c.id == "op-symmetrization" && c.n == 4 && c.m == 5;
  CHECK(saw_op);
}

TEST_CASE("hypersimplex count") {
  for (int n = 3; n <= 7; ++n) CHECK(count_hypersimplex(n) == hypersimplex_number(n));
}

TEST_CASE("mismatch is reported with coefficients") {
  auto u = enumerate_ball(sl(3), 1);
  const auto d = laplacian(sl(3), 3, u).value;
  const auto c = compare_elements("probe", sl(3), 3, 3, d, Rational(2) * d);
  CHECK_FALSE(c.pass);
  CHECK(c.max_abs_deviation == 12);
  CHECK_FALSE(c.detail.empty());
}

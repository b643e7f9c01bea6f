#include "sosgap/elements.hpp"

#include <sstream>

#include "sosgap/binary_io.hpp"
#include "sosgap/error.hpp"

namespace sosgap {

namespace {

void check_universe(const GroupFamily& family, int n, const BallPtr& universe, int radius) {
  family.validate();
  require(universe != nullptr, ErrorCode::InvalidArgument, "null universe");
  require(universe->family().kind == family.kind, ErrorCode::MismatchedBalls,
          "universe belongs to a different family");
  require(n >= 2 && n <= universe->family().rank, ErrorCode::InvalidArgument,
          "element rank exceeds the universe rank");
  if (universe->radius() < radius)
    fail(ErrorCode::SupportOverflow, "universe radius " + std::to_string(universe->radius()) +
                                         " is too small, need " + std::to_string(radius));
}

// Ball positions of generators whose indices lie below n, with their descriptors.
std::vector<std::pair<std::uint32_t, GeneratorDescriptor>> sub_generators(int n, const BallPtr& universe) {
  const GroupFamily& uf = universe->family();
  std::vector<std::pair<std::uint32_t, GeneratorDescriptor>> out;
  const auto desc = generator_descriptors(uf);
  for (std::uint32_t k = 0; k < desc.size(); ++k)
    if (desc[k].i < n && desc[k].j < n) out.emplace_back(universe->generator_position(k), desc[k]);
  return out;
}

AlgebraElement one_minus(const BallPtr& universe, std::uint32_t index) {
  AlgebraElement x = AlgebraElement::one(universe);
  x.add_term(index, -1);
  return x;
}

StructuredElement wrap(ElementTag tag, const GroupFamily& family, int n, AlgebraElement value, int radius) {
  StructuredElement s;
  s.tag = tag;
  s.family = family;
  s.n = n;
  s.value = std::move(value);
  s.declared_radius = radius;
  return s;
}

std::string pretty(const Rational& q) {
  return q.get_den() == 1 ? q.get_num().get_str() : rational_string(q);
}

}  // namespace

StructuredElement laplacian(const GroupFamily& family, int n, const BallPtr& universe) {
  check_universe(family, n, universe, 1);
  AlgebraElement x(universe);
  const auto gens = sub_generators(n, universe);
  x.add_term(0, static_cast<long>(gens.size()));
  for (const auto& [pos, d] : gens) x.add_term(pos, -1);
  return wrap(ElementTag::Laplacian, family, n, std::move(x), 1);
}

StructuredElement edge_laplacian(const GroupFamily& family, int n, const Edge& e, const BallPtr& universe) {
  check_universe(family, n, universe, 1);
  require(e.i >= 0 && e.j < n, ErrorCode::InvalidArgument, "edge " + e.to_string() + " is not in the simplex");
  AlgebraElement x(universe);
  long count = 0;
  for (const auto& [pos, d] : sub_generators(n, universe))
    if (d.edge() == e) {
      x.add_term(pos, -1);
      ++count;
    }
  x.add_term(0, count);
  StructuredElement s = wrap(ElementTag::EdgeLaplacian, family, n, std::move(x), 1);
  s.edge = e;
  return s;
}

SqAdjOp sq_adj_op(const GroupFamily& family, int n, const BallPtr& universe) {
  check_universe(family, n, universe, 2);
  require(n >= 3, ErrorCode::InvalidArgument, "Sq/Adj/Op need n >= 3");
  const auto edges = all_edges(n);
  std::vector<AlgebraElement> de;
  for (const auto& e : edges) de.push_back(edge_laplacian(family, n, e, universe).value);
  AlgebraElement sq(universe), adj(universe), op(universe);
  for (std::size_t a = 0; a < edges.size(); ++a) {
    AlgebraElement adj_sum(universe), op_sum(universe);
    for (std::size_t b = 0; b < edges.size(); ++b) {
      switch (relation(edges[a], edges[b])) {
        case EdgeRelation::Equal: break;
        case EdgeRelation::Adjacent: adj_sum += de[b]; break;
        case EdgeRelation::Opposite: op_sum += de[b]; break;
      }
    }
    sq += mul_direct(de[a], de[a], universe);
    adj += mul_direct(de[a], adj_sum, universe);
    if (!op_sum.is_zero()) op += mul_direct(de[a], op_sum, universe);
  }
  return {wrap(ElementTag::Sq, family, n, std::move(sq), 2), wrap(ElementTag::Adj, family, n, std::move(adj), 2),
          wrap(ElementTag::Op, family, n, std::move(op), 2)};
}

XCoefficients x_coefficients(int n) {
  require(n >= 4, ErrorCode::InvalidArgument, "closed form coefficients need n >= 4");
  const Rational h = hypersimplex_number(n);
  XCoefficients c;
  c.alpha = h * (h - Rational(n - 2, n - 2));
  c.beta = h * (h - Rational(n - 3, n - 2));
  c.gamma = h * (h - Rational(n - 4, n - 2));
  c.alpha.canonicalize();
  c.beta.canonicalize();
  c.gamma.canonicalize();
  return c;
}

StructuredElement x_element(const GroupFamily& family, int n, const BallPtr& universe) {
  check_universe(family, n, universe, 2);
  require(n >= 3 && universe->family().rank == n, ErrorCode::InvalidArgument,
          "the X element is built in a universe of its own rank");
  const auto perms = alternating_group(n);
  const AlgebraElement base = laplacian(family, n - 1, universe).value;
  std::vector<AlgebraElement> images;
  images.reserve(perms.size());
  AlgebraElement total(universe);
  for (const auto& s : perms) {
    images.push_back(act_algebra(s, base));
    total += images.back();
  }
  AlgebraElement x(universe);
  for (const auto& img : images) x += mul_direct(img, total - img, universe);
  return wrap(ElementTag::X, family, n, std::move(x), 2);
}

StructuredElement x_closed_form(const GroupFamily& family, int n, const BallPtr& universe) {
  const XCoefficients c = x_coefficients(n);
  const SqAdjOp parts = sq_adj_op(family, n, universe);
  AlgebraElement x = c.alpha * parts.sq.value + c.beta * parts.adj.value + c.gamma * parts.op.value;
  return wrap(ElementTag::X, family, n, std::move(x), 2);
}

AlgebraElement symmetrize(const AlgebraElement& x, int m) {
  require(m >= 3, ErrorCode::InvalidArgument, "symmetrization needs m >= 3");
  require(x.ball()->family().rank == m, ErrorCode::InvalidArgument,
          "symmetrization rank must match the ball rank");
  if (m > kMaxAlternatingRank)
    fail(ErrorCode::ResourceLimit, "exhaustive symmetrization over A_" + std::to_string(m) +
                                       " exceeds the cap m <= 8");
  AlgebraElement out(x.ball());
  for (const auto& s : alternating_group(m)) out += act_algebra(s, x);
  return out;
}

AlgebraElement op_from_squares(const GroupFamily& family, int n, const BallPtr& universe) {
  check_universe(family, n, universe, 2);
  const auto gens = sub_generators(n, universe);
  AlgebraElement out(universe);
  for (const auto& [pt, dt] : gens)
    for (const auto& [ps, ds] : gens) {
      if (relation(dt.edge(), ds.edge()) != EdgeRelation::Opposite) continue;
      const AlgebraElement xi = mul_direct(one_minus(universe, pt), one_minus(universe, ps), universe);
      out += mul_direct(star(xi), xi, universe);
    }
  out *= Rational(1, 4);
  return out;
}

AlgebraElement laplacian_from_squares(const GroupFamily& family, int n, const BallPtr& universe) {
  check_universe(family, n, universe, 2);
  AlgebraElement out(universe);
  for (const auto& [pos, d] : sub_generators(n, universe)) {
    const AlgebraElement xi = one_minus(universe, pos);
    out += mul_direct(star(xi), xi, universe);
  }
  out *= Rational(1, 2);
  return out;
}

std::string TargetDescriptor::to_string() const {
  if (kind == Kind::DeltaSquared) return "delta2";
  if (sgn(k) == 0) return "adj";
  return "adj+" + pretty(k) + "op";
}

TargetDescriptor TargetDescriptor::parse(const std::string& text) {
  TargetDescriptor t;
  if (text == "delta2" || text == "delta^2") return t;
  t.kind = Kind::AdjPlusKOp;
  if (text == "adj") return t;
  const std::string pre = "adj+", post = "op";
  if (text.size() > pre.size() + post.size() && text.compare(0, pre.size(), pre) == 0 &&
      text.compare(text.size() - post.size(), post.size(), post) == 0) {
    t.k = parse_rational(text.substr(pre.size(), text.size() - pre.size() - post.size()));
    require(sgn(t.k) >= 0, ErrorCode::InvalidArgument, "target coefficient must be nonnegative");
    return t;
  }
  fail(ErrorCode::InvalidArgument, "unknown target '" + text + "' (expected delta2, adj or adj+<k>op)");
}

AlgebraElement build_target(const TargetDescriptor& target, const GroupFamily& family, const BallPtr& universe) {
  const int n = family.rank;
  check_universe(family, n, universe, 2);
  if (target.kind == TargetDescriptor::Kind::DeltaSquared) {
    const AlgebraElement d = laplacian(family, n, universe).value;
    return mul_direct(d, d, universe);
  }
  require(n >= 3, ErrorCode::InvalidArgument, "Adj targets need rank >= 3");
  const SqAdjOp parts = sq_adj_op(family, n, universe);
  return parts.adj.value + target.k * parts.op.value;
}

IdentityCheck compare_elements(const std::string& id, const GroupFamily& family, int n, int m,
                               const AlgebraElement& lhs, const AlgebraElement& rhs) {
  IdentityCheck c;
  c.id = id;
  c.family = family.kind_name();
  c.n = n;
  c.m = m;
  const AlgebraElement diff = lhs - rhs;
  c.pass = diff.is_zero();
  std::ostringstream detail;
  int shown = 0;
  for (const auto& [i, v] : diff.terms()) {
    if (abs(v) > c.max_abs_deviation) c.max_abs_deviation = abs(v);
    if (shown < 5) {
      detail << (shown ? "; " : "") << lhs.ball()->element(i).to_string() << ": "
             << pretty(lhs.coefficient(i)) << " vs " << pretty(rhs.coefficient(i));
      ++shown;
    }
  }
  c.detail = detail.str();
  return c;
}

std::int64_t count_hypersimplex(int n) {
  std::int64_t count = 0;
  for (const auto& s : alternating_group(n)) {
    bool has1 = false, has2 = false;
    for (int k = 0; k < n - 1; ++k) {
      has1 |= s(k) == 0;
      has2 |= s(k) == 1;
    }
    count += has1 && has2;
  }
  return count;
}

std::vector<IdentityCheck> verify_identities(const GroupFamily& family, const IdentityOptions& opt) {
  family.validate();
  require(opt.n_max >= 3, ErrorCode::InvalidArgument, "n_max must be at least 3");
  require(opt.n_max <= kMaxAlternatingRank && opt.m_max <= kMaxAlternatingRank, ErrorCode::ResourceLimit,
          "identity checks are capped at rank 8");
  std::vector<IdentityCheck> out;
  auto fam = [&](int r) { return GroupFamily{family.kind, r}; };

  for (int n = 3; n <= opt.n_max; ++n) {
    const GroupFamily f = fam(n);
    const BallPtr u = cached_ball(f, 2);
    const AlgebraElement delta = laplacian(f, n, u).value;

    AlgebraElement edge_sum(u);
    for (const auto& e : all_edges(n)) edge_sum += edge_laplacian(f, n, e, u).value;
    out.push_back(compare_elements("laplacian-edge-sum", f, n, n, delta, edge_sum));

    const AlgebraElement d12 = edge_laplacian(f, n, Edge(0, 1), u).value;
    out.push_back(compare_elements("laplacian-orbit-sum", f, n, n,
                                   Rational(factorial(n - 2)) * delta, symmetrize(d12, n)));
    out.push_back(compare_elements("laplacian-squares", f, n, n, delta, laplacian_from_squares(f, n, u)));

    const SqAdjOp parts = sq_adj_op(f, n, u);
    out.push_back(compare_elements("square-split", f, n, n, parts.sq.value + parts.adj.value + parts.op.value,
                                   mul_direct(delta, delta, u)));

    AlgebraElement sq_squares(u);
    for (const auto& e : all_edges(n)) {
      const AlgebraElement de = edge_laplacian(f, n, e, u).value;
      sq_squares += mul_direct(star(de), de, u);
    }
    out.push_back(compare_elements("sq-squares", f, n, n, parts.sq.value, sq_squares));
    out.push_back(compare_elements("op-squares", f, n, n, parts.op.value, op_from_squares(f, n, u)));

    for (const auto* p : {&parts.sq, &parts.adj, &parts.op}) {
      const char* name = p == &parts.sq ? "sq" : (p == &parts.adj ? "adj" : "op");
      IdentityCheck c = compare_elements(std::string(name) + "-star", f, n, n, star(p->value), p->value);
      if (sgn(augmentation(p->value)) != 0) {
        c.pass = false;
        c.detail += " augmentation " + pretty(augmentation(p->value));
      }
      out.push_back(std::move(c));
      out.push_back(compare_elements(std::string(name) + "-invariant", f, n, n,
                                     symmetrize(p->value, n),
                                     Rational(static_cast<long>(factorial(n) / 2)) * p->value));
    }
  }

  if (opt.symmetrization) {
    for (int m = 4; m <= opt.m_max; ++m) {
      const GroupFamily fm = fam(m);
      const BallPtr v = cached_ball(fm, 2);
      const AlgebraElement delta_m = laplacian(fm, m, v).value;
      const SqAdjOp parts_m = sq_adj_op(fm, m, v);
      for (int n = 3; n <= std::min(m, opt.n_max); ++n) {
        const AlgebraElement dn = laplacian(fm, n, v).value;
        out.push_back(compare_elements("laplacian-symmetrization", fm, n, m, symmetrize(dn, m),
                                       Rational(binomial(n, 2) * factorial(m - 2)) * delta_m));
        const SqAdjOp parts_n = sq_adj_op(fm, n, v);
        const Rational adj_c = Rational(n * (n - 1) * (n - 2) * factorial(m - 3), 2);
        out.push_back(compare_elements("adj-symmetrization", fm, n, m, symmetrize(parts_n.adj.value, m),
                                       adj_c * parts_m.adj.value));
        if (n >= 4) {
          const Rational op_c = 2 * binomial(n, 2) * binomial(n - 2, 2) * factorial(m - 4);
          out.push_back(compare_elements("op-symmetrization", fm, n, m, symmetrize(parts_n.op.value, m),
                                         op_c * parts_m.op.value));
        }
      }
    }
  }

  if (opt.x_identities) {
    const Rational lambda(1, 2);
    for (int n = 3; n <= std::min(opt.n_max, opt.x_n_max); ++n) {
      const GroupFamily f = fam(n);
      const BallPtr u = cached_ball(f, 2);
      const AlgebraElement delta = laplacian(f, n, u).value;
      const AlgebraElement prev = laplacian(f, n - 1, u).value;
      const Rational h = hypersimplex_number(n);
      const AlgebraElement x = x_element(f, n, u).value;
      const AlgebraElement inner = mul_direct(prev, prev, u) - lambda * h * prev;
      AlgebraElement rhs = symmetrize(inner, n) + x;
      rhs *= Rational(1) / (h * h);
      out.push_back(compare_elements("x-decomposition", f, n, n, mul_direct(delta, delta, u) - lambda * delta, rhs));
      if (n >= 4)
        out.push_back(compare_elements("x-closed-form", f, n, n, x, x_closed_form(f, n, u).value));
    }
  }

  for (int n = 3; n <= 7; ++n) {
    IdentityCheck c;
    c.id = "hypersimplex-count";
    c.family = family.kind_name();
    c.n = n;
    c.m = n;
    const std::int64_t counted = count_hypersimplex(n), formula = hypersimplex_number(n);
    c.pass = counted == formula;
    c.max_abs_deviation = Rational(static_cast<long>(counted > formula ? counted - formula : formula - counted));
    c.detail = std::to_string(counted) + " counted, " + std::to_string(formula) + " by formula";
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace sosgap

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sosgap/algebra.hpp"

namespace sosgap {

enum class ElementTag { Laplacian, EdgeLaplacian, Sq, Adj, Op, X, Target };

struct StructuredElement {
  ElementTag tag = ElementTag::Laplacian;
  GroupFamily family;
  int n = 0;
  std::optional<Edge> edge;
  AlgebraElement value;
  int declared_radius = 1;
};

// All constructors take the rank n of the subgroup the element is built for;
// the universe may belong to any rank m >= n of the same family, in which case
// only generators with both indices below n are used.

StructuredElement laplacian(const GroupFamily& family, int n, const BallPtr& universe);
StructuredElement edge_laplacian(const GroupFamily& family, int n, const Edge& e, const BallPtr& universe);

struct SqAdjOp {
  StructuredElement sq, adj, op;
};
SqAdjOp sq_adj_op(const GroupFamily& family, int n, const BallPtr& universe);

struct XCoefficients {
  Rational alpha, beta, gamma;
};
XCoefficients x_coefficients(int n);

// Defining double sum over the alternating group.
StructuredElement x_element(const GroupFamily& family, int n, const BallPtr& universe);
StructuredElement x_closed_form(const GroupFamily& family, int n, const BallPtr& universe);

// Sum over sigma in A_m of sigma(x); m must equal the rank of x's ball.
AlgebraElement symmetrize(const AlgebraElement& x, int m);

// 1/4 sum over opposite-edge generator pairs of ((1-t)(1-s))*((1-t)(1-s)).
AlgebraElement op_from_squares(const GroupFamily& family, int n, const BallPtr& universe);
// 1/2 sum over generators of (1-s)*(1-s).
AlgebraElement laplacian_from_squares(const GroupFamily& family, int n, const BallPtr& universe);

// Target y of a certificate: Delta^2 or Adj + k Op.
struct TargetDescriptor {
  enum class Kind { DeltaSquared, AdjPlusKOp } kind = Kind::DeltaSquared;
  Rational k = 0;

  std::string to_string() const;
  static TargetDescriptor parse(const std::string& text);
  friend bool operator==(const TargetDescriptor&, const TargetDescriptor&) = default;
};

AlgebraElement build_target(const TargetDescriptor& target, const GroupFamily& family, const BallPtr& universe);

struct IdentityCheck {
  std::string id;
  std::string family;
  int n = 0;
  int m = 0;
  bool pass = false;
  Rational max_abs_deviation = 0;
  std::string detail;
};

struct IdentityOptions {
  int n_max = 4;
  int m_max = 5;
  bool symmetrization = true;
  bool x_identities = true;
  // Largest n for which the X closed form is checked.
  int x_n_max = 5;
};

std::vector<IdentityCheck> verify_identities(const GroupFamily& family, const IdentityOptions& options);
IdentityCheck compare_elements(const std::string& id, const GroupFamily& family, int n, int m,
                               const AlgebraElement& lhs, const AlgebraElement& rhs);

// Number of sigma in A_n with {1,2} inside sigma({1..n-1}), by enumeration.
std::int64_t count_hypersimplex(int n);

}  // namespace sosgap

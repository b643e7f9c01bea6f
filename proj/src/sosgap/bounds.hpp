#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sosgap/algebra.hpp"

namespace sosgap {

// A known membership in the sums of squares cone of the rank-n group:
//   DeltaSquared:  Delta_n^2 - lambda Delta_n
//   AdjPlusKOp:    Adj_n + k Op_n - lambda Delta_n
struct BaseFact {
  enum class Kind { DeltaSquared, AdjPlusKOp };
  FamilyKind family = FamilyKind::SpecialLinear;
  int n = 3;
  Kind kind = Kind::AdjPlusKOp;
  Rational k = 0;
  Rational lambda = 0;
  int radius = 2;
  // "cert:<path>" for a local certificate, "cite:<label>" for a published constant.
  std::string provenance;

  void validate() const;
  std::string describe() const;
};

mpz_class hyper(int n);

struct GapResult {
  bool valid = false;
  Rational gap = 0;
  std::string reason;
};

GapResult method1(const BaseFact& base, int m);
GapResult method2(const Rational& lambda_prev, const Rational& mu, const Rational& k, int n);

std::int64_t generating_set_size(FamilyKind family, int m);

// q rounded down to the given number of decimals.
std::string decimal(const Rational& q, int digits);

// sqrt(2 gap / |S_m|) rounded down to 5 decimals, exactly.
Rational kazhdan_constant(const Rational& gap, FamilyKind family, int m);

struct BoundRow {
  FamilyKind family = FamilyKind::SpecialLinear;
  int m = 0;
  std::string method;  // "direct", "I", "II" or "-"
  bool valid = false;
  std::string reason;
  Rational gap = 0;
  Rational kappa = 0;
  int radius = 0;
  std::vector<std::size_t> bases;  // indices into the input list
};

std::vector<BoundRow> bound_table(const std::vector<BaseFact>& bases, const std::vector<int>& ms);

void write_table(std::ostream& os, const std::vector<BoundRow>& rows);
void write_rows_json(std::ostream& os, const std::vector<BoundRow>& rows);

// (|S| / gap) (log_gamma - log eps)
double pra_mixing_bound(std::int64_t generators, const Rational& gap, double log_gamma, double eps);

// One fact per line: family n kind k lambda R provenance. '#' starts a comment.
std::vector<BaseFact> parse_manifest(std::istream& is);
std::vector<BaseFact> load_manifest(const std::string& path);

// Checks every cert: provenance against its certificate header.
void check_provenance(const std::vector<BaseFact>& bases);

}  // namespace sosgap

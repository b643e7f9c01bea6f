#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sosgap/elements.hpp"
#include "sosgap/linalg.hpp"

namespace sosgap {

// 2 for R = 1, otherwise 4^ceil(log2 R).
Rational order_unit_bound(int radius);

// 4^ceil(log2 R) * |b|_1. b must be *-invariant, augmentation-free and
// supported in B_2R.
Rational epsilon_bound(const AlgebraElement& b, int radius);

// Rationalized square-root factors of a difference-basis Gram matrix.
std::vector<AlgebraElement> extract_vectors(const Matrix& q_difference, const BallPtr& basis, int bits = 48);

struct Residual {
  AlgebraElement b;
  Rational l1;
};

// b = y - lambda Delta - sum xi* xi, exact. Delta is the Laplacian of the
// universe's family and rank.
Residual residual(const AlgebraElement& y, const Rational& lambda, const std::vector<AlgebraElement>& xi,
                  const ProductTable& table);

// Same quantity through direct group multiplication, sharing no code with residual().
Residual residual_direct(const AlgebraElement& y, const Rational& lambda, const std::vector<AlgebraElement>& xi,
                         const BallPtr& basis, const BallPtr& universe);

struct Certificate {
  GroupFamily family;
  int radius = 0;
  TargetDescriptor target;
  Rational lambda = 0;
  std::vector<AlgebraElement> xi;
  AlgebraElement b;
  Rational b_l1 = 0;
  Rational epsilon = 0;
  bool valid = false;
  std::uint64_t config_hash = 0;
  std::string library_version;

  Rational certified_gap() const { return lambda - epsilon; }
  Rational shortfall() const { return valid ? Rational(0) : Rational(epsilon - lambda); }
  std::string statement() const;
};

Certificate certify(const TargetDescriptor& target, const AlgebraElement& y, const Rational& lambda,
                    std::vector<AlgebraElement> xi, const ProductTable& table);

void write_certificate(std::ostream& os, const Certificate& c);
void save_certificate(const Certificate& c, const std::string& path);

// Reads the header only; the vectors need balls, which read_certificate rebuilds.
struct CertificateHeader {
  GroupFamily family;
  int radius = 0;
  TargetDescriptor target;
  Rational lambda = 0, epsilon = 0, b_l1 = 0, certified_gap = 0;
  bool valid = false;
  std::uint64_t config_hash = 0;
  std::string library_version;
  std::size_t vectors = 0;
};
CertificateHeader read_certificate_header(std::istream& is);
Certificate read_certificate(std::istream& is, const BallPtr& basis, const BallPtr& universe);
Certificate load_certificate(const std::string& path, const BallPtr& basis, const BallPtr& universe);

struct VerificationReport {
  bool ok = false;
  std::vector<std::string> divergences;
  Certificate recomputed;
};

// Rebuilds both balls from scratch and recomputes b, |b|_1, epsilon and the
// verdict. independent selects direct multiplication over the product table.
VerificationReport verify_certificate(const std::string& path, bool independent = true);
VerificationReport verify_certificate(std::istream& is, bool independent = true);

// 2 Delta - (1-s)*(1-s) and 4 Delta - (1-st)*(1-st) written as weighted sums of
// squares supported in B_1, for all generators s, t of the rank-n group.
struct SquaresWitness {
  std::string label;
  int radius = 1;
  Rational bound;
  AlgebraElement lhs;
  std::vector<std::pair<Rational, AlgebraElement>> squares;
  bool exact = false;
};
std::vector<SquaresWitness> order_unit_witnesses(const GroupFamily& family);

}  // namespace sosgap

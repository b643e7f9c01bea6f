#pragma once

#include <cstddef>
#include <vector>

namespace sosgap {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : r_(rows), c_(cols), a_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }
  double* row(std::size_t i) { return a_.data() + i * c_; }
  const double* row(std::size_t i) const { return a_.data() + i * c_; }
  std::vector<double>& data() { return a_; }
  const std::vector<double>& data() const { return a_; }

  double frobenius() const;
  Matrix transpose() const;
  void symmetrize();

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<double> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
double frobenius_distance(const Matrix& a, const Matrix& b);

struct JacobiOptions {
  double tolerance = 1e-15;  // relative off-diagonal Frobenius norm
  int max_sweeps = 60;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
  int sweeps = 0;
};

// Cyclic threshold Jacobi. When a basis is supplied its columns seed the
// rotation (the input is first rotated into that basis).
EigenDecomposition jacobi_eigen(const Matrix& a, const Matrix* basis = nullptr,
                                const JacobiOptions& options = {});

// Nearest PSD matrix in Frobenius norm. basis, when given, warm-starts the
// eigensolver and receives the new eigenvectors.
Matrix project_psd(const Matrix& m, Matrix* basis = nullptr, const JacobiOptions& options = {});

void orthonormalize_columns(Matrix& v);

// Smallest eigenvalue estimate by power iteration on (shift I - M).
double min_eigenvalue_estimate(const Matrix& m, int iterations = 500);
// Gershgorin lower bound on the spectrum.
double gershgorin_lower_bound(const Matrix& m);

// Lower-triangular L with A = L L^T; false on a nonpositive pivot.
bool cholesky(const Matrix& a, Matrix& l);

class LuFactorization {
 public:
  explicit LuFactorization(Matrix a);
  std::vector<double> solve(const std::vector<double>& b) const;
  std::size_t size() const { return lu_.rows(); }
  // Smallest |pivot| / largest |pivot|.
  double pivot_ratio() const { return pivot_ratio_; }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  double pivot_ratio_ = 0.0;
};

}  // namespace sosgap

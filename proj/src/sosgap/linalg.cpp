#include "sosgap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sosgap/error.hpp"

namespace sosgap {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

Matrix Matrix::transpose() const {
  Matrix t(c_, r_);
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

void Matrix::symmetrize() {
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t j = i + 1; j < c_; ++j) {
      const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = v;
      (*this)(j, i) = v;
    }
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorCode::InvalidArgument, "matrix shapes do not match");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::InvalidArgument, "matrix shapes do not match");
  Matrix c = a;
  for (std::size_t k = 0; k < c.data().size(); ++k) c.data()[k] -= b.data()[k];
  return c;
}

double frobenius_distance(const Matrix& a, const Matrix& b) { return (a - b).frobenius(); }

namespace {

// B <- V^T A V with V stored column-wise as rows of vt (vt = V^T).
Matrix rotate_into(const Matrix& a, const Matrix& vt) {
  const std::size_t n = a.rows();
  Matrix tmp(n, n);  // tmp = V^T A
  for (std::size_t i = 0; i < n; ++i) {
    double* t = tmp.row(i);
    const double* v = vt.row(i);
    for (std::size_t k = 0; k < n; ++k) {
      const double vk = v[k];
      if (vk == 0.0) continue;
      const double* ak = a.row(k);
      for (std::size_t j = 0; j < n; ++j) t[j] += vk * ak[j];
    }
  }
  Matrix b(n, n);  // b = tmp V
  for (std::size_t i = 0; i < n; ++i) {
    const double* t = tmp.row(i);
    for (std::size_t j = i; j < n; ++j) {
      const double* v = vt.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += t[k] * v[k];
      b(i, j) = s;
      b(j, i) = s;
    }
  }
  return b;
}

}  // namespace

EigenDecomposition jacobi_eigen(const Matrix& a, const Matrix* basis, const JacobiOptions& opt) {
  const std::size_t n = a.rows();
  require(a.cols() == n, ErrorCode::InvalidArgument, "eigendecomposition needs a square matrix");
  EigenDecomposition out;
  if (n == 0) return out;

  // Rotations act on rows of vt (the eigenvectors), which keeps them contiguous.
  Matrix vt;
  Matrix b;
  if (basis) {
    require(basis->rows() == n && basis->cols() == n, ErrorCode::InvalidArgument, "warm-start basis has the wrong shape");
    vt = basis->transpose();
    b = rotate_into(a, vt);
  } else {
    vt = Matrix::identity(n);
    b = a;
    b.symmetrize();
  }

  double total = 0.0;
  for (double v : b.data()) total += v * v;
  const double scale2 = std::max(total, 1e-300);

  int sweep = 0;
  for (; sweep < opt.max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += b(p, q) * b(p, q);
    if (off <= opt.tolerance * opt.tolerance * scale2) break;
    const double threshold = sweep < 3 ? 0.2 * std::sqrt(off) / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double bpq = b(p, q);
        const double abs_pq = std::fabs(bpq);
        if (abs_pq == 0.0) continue;
        const double bpp = b(p, p), bqq = b(q, q);
        if (sweep > 3 && std::fabs(bpp) + 100.0 * abs_pq == std::fabs(bpp) &&
            std::fabs(bqq) + 100.0 * abs_pq == std::fabs(bqq)) {
          b(p, q) = 0.0;
          b(q, p) = 0.0;
          continue;
        }
        if (abs_pq <= threshold) continue;
        const double theta = 0.5 * (bqq - bpp) / bpq;
        double t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        b(p, p) = bpp - t * bpq;
        b(q, q) = bqq + t * bpq;
        b(p, q) = 0.0;
        b(q, p) = 0.0;
        double* rp = b.row(p);
        double* rq = b.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double bkp = rp[k], bkq = rq[k];
          const double np = bkp - s * (bkq + tau * bkp);
          const double nq = bkq + s * (bkp - tau * bkq);
          rp[k] = np;
          rq[k] = nq;
          b(k, p) = np;
          b(k, q) = nq;
        }
        double* vp = vt.row(p);
        double* vq = vt.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double x = vp[k], y = vq[k];
          vp[k] = x - s * (y + tau * x);
          vq[k] = y + s * (x - tau * y);
        }
      }
    }
  }
  if (sweep == opt.max_sweeps) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += b(p, q) * b(p, q);
    if (off > 1e-20 * scale2) {
      std::ostringstream os;
      os << "Jacobi eigensolver did not converge after " << sweep << " sweeps (relative off-diagonal "
         << std::sqrt(off / scale2) << ", Frobenius norm " << std::sqrt(total) << ")";
      fail(ErrorCode::NumericalFailure, os.str());
    }
  }
  out.sweeps = sweep;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return b(x, x) < b(y, y); });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = b(order[k], order[k]);
    const double* v = vt.row(order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v[i];
  }
  return out;
}

void orthonormalize_columns(Matrix& v) {
  const std::size_t n = v.rows(), m = v.cols();
  Matrix vt = v.transpose();
  for (std::size_t k = 0; k < m; ++k) {
    double* x = vt.row(k);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < k; ++j) {
        const double* y = vt.row(j);
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += x[i] * y[i];
        for (std::size_t i = 0; i < n; ++i) x[i] -= d * y[i];
      }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += x[i] * x[i];
    norm = std::sqrt(norm);
    if (norm < 1e-300) fail(ErrorCode::NumericalFailure, "basis lost rank during re-orthonormalization");
    for (std::size_t i = 0; i < n; ++i) x[i] /= norm;
  }
  v = vt.transpose();
}

Matrix project_psd(const Matrix& m, Matrix* basis, const JacobiOptions& options) {
  const std::size_t n = m.rows();
  const bool warm = basis && basis->rows() == n && basis->cols() == n;
  EigenDecomposition e = jacobi_eigen(m, warm ? basis : nullptr, options);
  Matrix out(n, n);
  // out = sum over positive eigenpairs of lambda v v^T
  Matrix vt = e.vectors.transpose();
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = e.values[k];
    if (lam <= 0.0) continue;
    const double* v = vt.row(k);
    for (std::size_t i = 0; i < n; ++i) {
      const double li = lam * v[i];
      if (li == 0.0) continue;
      double* oi = out.row(i);
      for (std::size_t j = i; j < n; ++j) oi[j] += li * v[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) out(i, j) = out(j, i);
  if (basis) *basis = std::move(e.vectors);
  return out;
}

double gershgorin_lower_bound(const Matrix& m) {
  double bound = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (j != i) r += std::fabs(m(i, j));
    const double b = m(i, i) - r;
    bound = i == 0 ? b : std::min(bound, b);
  }
  return bound;
}

double min_eigenvalue_estimate(const Matrix& m, int iterations) {
  const std::size_t n = m.rows();
  if (n == 0) return 0.0;
  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += std::fabs(m(i, j));
    shift = std::max(shift, r);
  }
  // Power iteration on shift I - M converges to shift - lambda_min.
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.001 * static_cast<double>(i % 7);
  double mu = 0.0;
  for (int it = 0; it < iterations; ++it) {
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) return shift;
    for (double& v : x) v /= norm;
    for (std::size_t i = 0; i < n; ++i) {
      double s = shift * x[i];
      const double* mi = m.row(i);
      for (std::size_t j = 0; j < n; ++j) s -= mi[j] * x[j];
      y[i] = s;
    }
    mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += x[i] * y[i];
    x.swap(y);
  }
  return shift - mu;
}

bool cholesky(const Matrix& a, Matrix& l) {
  const std::size_t n = a.rows();
  l = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    const double* lj = l.row(j);
    for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
    if (!(d > 0.0)) return false;
    const double djj = std::sqrt(d);
    l(j, j) = djj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      const double* li = l.row(i);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      l(i, j) = s / djj;
    }
  }
  return true;
}

LuFactorization::LuFactorization(Matrix a) : lu_(std::move(a)) {
  const std::size_t n = lu_.rows();
  require(lu_.cols() == n, ErrorCode::InvalidArgument, "LU needs a square matrix");
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), 0);
  double pmin = INFINITY, pmax = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(lu_(i, k)) > best) {
        best = std::fabs(lu_(i, k));
        piv = i;
      }
    if (best == 0.0) fail(ErrorCode::NumericalFailure, "singular matrix in LU factorization");
    if (piv != k) {
      std::swap_ranges(lu_.row(k), lu_.row(k) + n, lu_.row(piv));
      std::swap(perm_[k], perm_[piv]);
    }
    pmin = std::min(pmin, best);
    pmax = std::max(pmax, best);
    const double* rk = lu_.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      double* ri = lu_.row(i);
      const double f = ri[k] / rk[k];
      ri[k] = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= f * rk[j];
    }
  }
  pivot_ratio_ = n ? pmin / pmax : 1.0;
}

std::vector<double> LuFactorization::solve(const std::vector<double>& b) const {
  const std::size_t n = lu_.rows();
  require(b.size() == n, ErrorCode::InvalidArgument, "right-hand side has the wrong length");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    const double* ri = lu_.row(i);
    for (std::size_t j = 0; j < i; ++j) s -= ri[j] * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    const double* ri = lu_.row(i);
    for (std::size_t j = i + 1; j < n; ++j) s -= ri[j] * x[j];
    x[i] = s / ri[i];
  }
  return x;
}

}  // namespace sosgap

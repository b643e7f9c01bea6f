#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sosgap/algebra.hpp"
#include "sosgap/linalg.hpp"

namespace sosgap {

enum class LambdaMode : std::uint8_t { Fixed = 0, Maximize = 1 };

// Find Q >= 0 over the basis B_R with Q 1 = 0 and
//   sum_{b_i^-1 b_j = g} Q_ij = y_g - lambda Delta_g  for every g in B_2R.
// Constraints for g and g^-1 coincide (y and Q are symmetric) and are merged;
// the identity constraint follows from Q 1 = 0 and augmentation(y) = 0.
struct SosProblem {
  BallPtr basis;
  BallPtr universe;
  int radius = 0;
  AlgebraElement y;
  AlgebraElement delta;
  LambdaMode mode = LambdaMode::Maximize;
  Rational fixed_lambda = 0;

  std::uint32_t n = 0;                 // |B_R|
  std::vector<std::uint32_t> reps;     // universe index of each merged constraint
  std::vector<std::uint32_t> mult;     // 1 for involutions, else 2
  std::vector<std::uint32_t> row_ptr;  // CSR over constraints
  std::vector<std::uint32_t> pairs;    // i * n + j
  std::vector<std::int32_t> pair_class;  // n * n; -1 marks the identity
  std::vector<double> target_y;        // mult * y_c
  std::vector<double> target_delta;    // mult * Delta_c

  std::size_t dimension() const { return n ? n - 1 : 0; }
  std::size_t constraint_count() const { return reps.size(); }
  std::uint64_t fingerprint() const;
};

SosProblem build_problem(const AlgebraElement& y, const AlgebraElement& delta, const ProductTable& table,
                         LambdaMode mode, const Rational& fixed_lambda = 0);

enum class SolveStatus : std::uint8_t { Optimal = 0, Feasible = 1, IterLimit = 2, InfeasibleLikely = 3 };
std::string status_name(SolveStatus s);

// Complete iterate state; restoring it reproduces the remaining run exactly.
struct AdmmState {
  std::uint64_t iteration = 0;
  double rho = 1.0;
  double lambda = 0.0;
  Matrix z;
  Matrix u;
  Matrix basis;  // eigenvector warm start
};

struct SolverParams {
  std::uint64_t max_iters = 500000;
  double eps = 1e-9;
  double rho = 1.0;
  double alpha = 1.5;
  std::uint64_t adapt_interval = 100;
  std::uint64_t feasibility_interval = 50;
  std::uint64_t reorthonormalize_interval = 200;
  std::uint64_t log_interval = 1000;
  double wall_clock_limit = 0.0;  // seconds, 0 = none
  std::string checkpoint_path;
  std::uint64_t checkpoint_interval = 10000;
  bool resume = false;
  std::uint64_t config_hash = 0;
  std::function<void(const std::string&)> log;
};

struct SosSolution {
  Matrix q;  // over the difference basis {b_k - 1 : k >= 1}
  double lambda = 0.0;
  SolveStatus status = SolveStatus::IterLimit;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double constraint_residual = 0.0;  // max |A(Q) - (y - lambda Delta)| in floating point
  double min_eigenvalue = 0.0;
  std::uint64_t iterations = 0;
  double wall_time = 0.0;
  AdmmState state;
};

// Linear operator of the constraints restricted to {Q : Q 1 = 0}, with a
// cached factorization of its normal equations.
class ConstraintSystem {
 public:
  explicit ConstraintSystem(const SosProblem& p);

  std::vector<double> apply(const Matrix& x) const;               // A(X)
  Matrix adjoint(const std::vector<double>& w) const;             // P0 A^T(w) P0
  std::vector<double> normal(const std::vector<double>& w) const;  // A P0 A^T P0 (w)
  std::vector<double> solve_normal(const std::vector<double>& r) const;

 private:
  std::vector<double> woodbury(const std::vector<double>& r) const;

  const SosProblem* p_;
  std::vector<double> count_;
  Matrix rowsum_;  // constraints x n
  std::optional<LuFactorization> capacitance_;
};

SosSolution solve(const SosProblem& p, const SolverParams& params, const AdmmState* warm = nullptr);

// y - lambda Delta - sum_{ij} Q_ij b_i^-1 b_j evaluated in floating point, max abs entry.
double floating_residual(const SosProblem& p, const Matrix& q_difference, double lambda);

// Embed a difference-basis matrix into the full basis (Q 1 = 0).
Matrix full_from_difference(const Matrix& qd);
Matrix difference_from_full(const Matrix& q);

void save_checkpoint(const SosProblem& p, const AdmmState& s, const SolverParams& params, const std::string& path);
std::optional<AdmmState> load_checkpoint(const SosProblem& p, const std::string& path);

struct SolutionRecord {
  std::string family;  // "sl3"
  int radius = 0;
  std::string target;
  std::uint64_t config_hash = 0;
  std::string library_version;
  LambdaMode mode = LambdaMode::Maximize;
  Rational fixed_lambda = 0;
  std::vector<std::uint32_t> row_ptr, pairs, reps;
  std::vector<Rational> y, delta;  // per merged constraint, unscaled
  SosSolution solution;
};

SolutionRecord make_record(const SosProblem& p, const SosSolution& s, const std::string& target,
                           std::uint64_t config_hash);
void save_solution(const SolutionRecord& r, const std::string& path);
SolutionRecord load_solution(const std::string& path);

const char* library_version();

}  // namespace sosgap

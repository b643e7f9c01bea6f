#include "sosgap/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "sosgap/error.hpp"

namespace sosgap {

Rational round_down(double x, int digits) {
  require(std::isfinite(x), ErrorCode::NumericalFailure, "non-finite value");
  mpz_class scale = 1;
  for (int k = 0; k < digits; ++k) scale *= 10;
  Rational exact(x);
  exact *= scale;
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), exact.get_num_mpz_t(), exact.get_den_mpz_t());
  Rational r(f, scale);
  r.canonicalize();
  return r;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  cfg.family.validate();
  require(cfg.radius >= 1, ErrorCode::InvalidArgument, "radius must be positive");
  auto log = [&](const std::string& s) {
    if (cfg.solver.log) cfg.solver.log(s);
  };
  const BallPtr basis = cached_ball(cfg.family, cfg.radius, cfg.element_cap);
  const BallPtr universe = cached_ball(cfg.family, 2 * cfg.radius, cfg.element_cap);
  const ProductTable table = build_product_table(basis, universe);
  const AlgebraElement y = build_target(cfg.target, cfg.family, universe);
  const AlgebraElement delta = laplacian(cfg.family, cfg.family.rank, universe).value;
  {
    std::ostringstream os;
    os << cfg.family.name() << " radius " << cfg.radius << ": basis " << basis->size() << ", universe "
       << universe->size() << ", target " << cfg.target.to_string();
    log(os.str());
  }

  PipelineResult out;
  Rational lambda;
  const AdmmState* warm = nullptr;
  if (cfg.lambda) {
    lambda = *cfg.lambda;
  } else {
    const SosProblem probe = build_problem(y, delta, table, LambdaMode::Maximize);
    SolverParams params = cfg.solver;
    params.max_iters = std::min(cfg.probe_iters, cfg.solver.max_iters);
    params.checkpoint_path = cfg.solver.checkpoint_path.empty() ? "" : cfg.solver.checkpoint_path + ".probe";
    out.probe = solve(probe, params);
    lambda = round_down(out.probe->lambda, 6) - cfg.margin;
    if (sgn(lambda) < 0) lambda = 0;
    warm = &out.probe->state;
    log("probe: lambda " + std::to_string(out.probe->lambda) + " after " +
        std::to_string(out.probe->iterations) + " iterations; certifying lambda " + rational_string(lambda));
  }
  out.problem = build_problem(y, delta, table, LambdaMode::Fixed, lambda);
  out.solution = solve(out.problem, cfg.solver, warm);
  {
    std::ostringstream os;
    os << "solve: " << status_name(out.solution.status) << " after " << out.solution.iterations
       << " iterations, min eigenvalue " << out.solution.min_eigenvalue << ", constraint residual "
       << out.solution.constraint_residual;
    log(os.str());
  }
  auto xi = extract_vectors(out.solution.q, basis, cfg.bits);
  out.certificate = certify(cfg.target, y, lambda, std::move(xi), table);
  out.certificate.config_hash = cfg.solver.config_hash;
  log("certify: |b|_1 = " + rational_string(out.certificate.b_l1) + ", epsilon = " +
      rational_string(out.certificate.epsilon) + ", " + (out.certificate.valid ? "valid" : "invalid"));
  return out;
}

}  // namespace sosgap

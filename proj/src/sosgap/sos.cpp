#include "sosgap/sos.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sosgap/binary_io.hpp"
#include "sosgap/error.hpp"

namespace sosgap {

const char* library_version() { return "sosgap 1.0.0"; }

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::IterLimit: return "iteration-limit";
    case SolveStatus::InfeasibleLikely: return "infeasible-likely";
  }
  return "unknown";
}

std::uint64_t SosProblem::fingerprint() const {
  io::Fnv1a h;
  h.update_u64(basis->hash());
  h.update_u64(universe->hash());
  h.update_u64(static_cast<std::uint64_t>(mode));
  h.update(rational_string(fixed_lambda));
  for (std::size_t c = 0; c < reps.size(); ++c) {
    h.update_u64(reps[c]);
    h.update(rational_string(y.coefficient(reps[c])));
    h.update(rational_string(delta.coefficient(reps[c])));
  }
  return h.digest();
}

SosProblem build_problem(const AlgebraElement& y, const AlgebraElement& delta, const ProductTable& table,
                         LambdaMode mode, const Rational& fixed_lambda) {
  SosProblem p;
  p.basis = table.source();
  p.universe = table.target();
  p.radius = p.basis->radius();
  require(p.universe->radius() >= 2 * p.radius, ErrorCode::InconsistentBalls,
          "constraint universe must have radius at least 2R");
  p.mode = mode;
  p.fixed_lambda = fixed_lambda;
  p.y = embed(y, p.universe);
  p.delta = embed(delta, p.universe);
  if (!(star(p.y) == p.y)) fail(ErrorCode::InvalidArgument, "target element is not *-invariant");
  if (sgn(augmentation(p.y)) != 0) fail(ErrorCode::InvalidArgument, "target element has nonzero augmentation");
  if (!(star(p.delta) == p.delta) || sgn(augmentation(p.delta)) != 0)
    fail(ErrorCode::InvalidArgument, "order unit must be *-invariant with zero augmentation");

  const std::uint32_t n = table.size();
  p.n = n;
  const Ball& u = *p.universe;
  std::vector<std::int32_t> class_of(u.size(), -2);
  std::vector<std::uint32_t> rep_of_pair(static_cast<std::size_t>(n) * n);
  std::vector<char> hit(u.size(), 0);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) {
      const std::uint32_t g = table(i, j);
      const std::uint32_t rep = std::min(g, u.inverse(g));
      rep_of_pair[static_cast<std::size_t>(i) * n + j] = rep;
      hit[rep] = 1;
    }
  for (std::uint32_t g = 1; g < u.size(); ++g) {
    if (!hit[g]) continue;
    class_of[g] = static_cast<std::int32_t>(p.reps.size());
    p.reps.push_back(g);
    p.mult.push_back(u.inverse(g) == g ? 1 : 2);
  }
  for (const auto* e : {&p.y, &p.delta})
    for (const auto& [g, c] : e->terms())
      if (!hit[std::min(g, u.inverse(g))])
        fail(ErrorCode::SupportOverflow, "target support exceeds the products of the basis ball");

  const std::size_t classes = p.reps.size();
  p.pair_class.assign(static_cast<std::size_t>(n) * n, -1);
  std::vector<std::uint32_t> counts(classes, 0);
  for (std::size_t k = 0; k < rep_of_pair.size(); ++k) {
    const std::uint32_t rep = rep_of_pair[k];
    if (rep == 0) continue;
    p.pair_class[k] = class_of[rep];
    ++counts[static_cast<std::size_t>(class_of[rep])];
  }
  p.row_ptr.assign(classes + 1, 0);
  for (std::size_t c = 0; c < classes; ++c) p.row_ptr[c + 1] = p.row_ptr[c] + counts[c];
  p.pairs.resize(p.row_ptr.back());
  std::vector<std::uint32_t> fill(p.row_ptr.begin(), p.row_ptr.end() - 1);
  for (std::size_t k = 0; k < p.pair_class.size(); ++k)
    if (p.pair_class[k] >= 0) p.pairs[fill[static_cast<std::size_t>(p.pair_class[k])]++] = static_cast<std::uint32_t>(k);

  p.target_y.resize(classes);
  p.target_delta.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    p.target_y[c] = p.mult[c] * p.y.coefficient(p.reps[c]).get_d();
    p.target_delta[c] = p.mult[c] * p.delta.coefficient(p.reps[c]).get_d();
  }
  return p;
}

ConstraintSystem::ConstraintSystem(const SosProblem& p) : p_(&p) {
  const std::size_t classes = p.constraint_count(), n = p.n;
  require(classes > 0 && n > 1, ErrorCode::InvalidArgument, "empty constraint system");
  count_.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) count_[c] = p.row_ptr[c + 1] - p.row_ptr[c];
  rowsum_ = Matrix(classes, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::int32_t c = p.pair_class[i * n + j];
      if (c >= 0) rowsum_(static_cast<std::size_t>(c), i) += 1.0;
    }
  // M = D + U S U^T with U = [rowsum | count], S = diag(-2/n, ..., 1/n^2).
  const double nd = static_cast<double>(n);
  Matrix k(n + 1, n + 1);
  for (std::size_t c = 0; c < classes; ++c) {
    const double* r = rowsum_.row(c);
    const double inv = 1.0 / count_[c];
    for (std::size_t a = 0; a < n; ++a) {
      if (r[a] == 0.0) continue;
      const double ra = r[a] * inv;
      double* ka = k.row(a);
      for (std::size_t b = 0; b < n; ++b) ka[b] += ra * r[b];
      ka[n] += r[a];
    }
    k(n, n) += count_[c];
  }
  for (std::size_t a = 0; a < n; ++a) {
    k(n, a) = k(a, n);
    k(a, a) += -nd / 2.0;
  }
  k(n, n) += nd * nd;
  capacitance_.emplace(std::move(k));

  std::vector<double> probe(classes);
  for (std::size_t c = 0; c < classes; ++c) probe[c] = 1.0 + 0.1 * static_cast<double>(c % 7);
  const auto x = solve_normal(probe);
  const auto back = normal(x);
  double err = 0.0, norm = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    err += (back[c] - probe[c]) * (back[c] - probe[c]);
    norm += probe[c] * probe[c];
  }
  if (!(std::sqrt(err) <= 1e-6 * std::sqrt(norm))) {
    std::ostringstream os;
    os << "constraint normal equations are singular or ill-conditioned (relative solve error "
       << std::sqrt(err / norm) << ", capacitance pivot ratio " << capacitance_->pivot_ratio() << ")";
    fail(ErrorCode::NumericalFailure, os.str());
  }
}

std::vector<double> ConstraintSystem::apply(const Matrix& x) const {
  const std::size_t n = p_->n;
  std::vector<double> out(p_->constraint_count(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row(i);
    const std::int32_t* ci = p_->pair_class.data() + i * n;
    for (std::size_t j = 0; j < n; ++j)
      if (ci[j] >= 0) out[static_cast<std::size_t>(ci[j])] += xi[j];
  }
  return out;
}

Matrix ConstraintSystem::adjoint(const std::vector<double>& w) const {
  const std::size_t n = p_->n;
  Matrix e(n, n);
  std::vector<double> rowmean(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double* ei = e.row(i);
    const std::int32_t* ci = p_->pair_class.data() + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = ci[j] >= 0 ? w[static_cast<std::size_t>(ci[j])] : 0.0;
      ei[j] = v;
      s += v;
    }
    rowmean[i] = s / static_cast<double>(n);
    total += s;
  }
  const double mean = total / static_cast<double>(n * n);
  // The mask is symmetric, so column means equal row means.
  for (std::size_t i = 0; i < n; ++i) {
    double* ei = e.row(i);
    for (std::size_t j = 0; j < n; ++j) ei[j] += mean - rowmean[i] - rowmean[j];
  }
  return e;
}

std::vector<double> ConstraintSystem::normal(const std::vector<double>& w) const { return apply(adjoint(w)); }

std::vector<double> ConstraintSystem::woodbury(const std::vector<double>& r) const {
  const std::size_t classes = count_.size(), n = p_->n;
  std::vector<double> t(classes);
  for (std::size_t c = 0; c < classes; ++c) t[c] = r[c] / count_[c];
  std::vector<double> s(n + 1, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    const double tc = t[c];
    if (tc == 0.0) continue;
    const double* rc = rowsum_.row(c);
    for (std::size_t a = 0; a < n; ++a) s[a] += rc[a] * tc;
    s[n] += count_[c] * tc;
  }
  const auto z = capacitance_->solve(s);
  std::vector<double> out(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    const double* rc = rowsum_.row(c);
    double acc = count_[c] * z[n];
    for (std::size_t a = 0; a < n; ++a) acc += rc[a] * z[a];
    out[c] = t[c] - acc / count_[c];
  }
  return out;
}

std::vector<double> ConstraintSystem::solve_normal(const std::vector<double>& r) const {
  auto x = woodbury(r);
  const auto back = normal(x);
  std::vector<double> res(r.size());
  for (std::size_t c = 0; c < r.size(); ++c) res[c] = r[c] - back[c];
  const auto dx = woodbury(res);
  for (std::size_t c = 0; c < r.size(); ++c) x[c] += dx[c];
  return x;
}

Matrix full_from_difference(const Matrix& qd) {
  const std::size_t m = qd.rows(), n = m + 1;
  Matrix q(n, n);
  double total = 0.0;
  std::vector<double> rows(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      q(i + 1, j + 1) = qd(i, j);
      rows[i] += qd(i, j);
    }
    total += rows[i];
  }
  q(0, 0) = total;
  for (std::size_t i = 0; i < m; ++i) {
    q(0, i + 1) = -rows[i];
    q(i + 1, 0) = -rows[i];
  }
  return q;
}

Matrix difference_from_full(const Matrix& q) {
  const std::size_t m = q.rows() - 1;
  Matrix qd(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) qd(i, j) = q(i + 1, j + 1);
  return qd;
}

double floating_residual(const SosProblem& p, const Matrix& qd, double lambda) {
  const Matrix q = full_from_difference(qd);
  const std::size_t n = p.n;
  std::vector<double> acc(p.constraint_count(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::int32_t c = p.pair_class[i * n + j];
      if (c >= 0) acc[static_cast<std::size_t>(c)] += q(i, j);
    }
  double worst = 0.0;
  for (std::size_t c = 0; c < acc.size(); ++c)
    worst = std::max(worst, std::fabs(acc[c] - (p.target_y[c] - lambda * p.target_delta[c])) / p.mult[c]);
  return worst;
}

namespace {

constexpr char kCheckpointMagic[8] = {'S', 'G', 'C', 'K', 'P', 'T', '\0', '\1'};
constexpr char kSolutionMagic[8] = {'S', 'G', 'S', 'O', 'L', 'N', '\0', '\1'};
constexpr std::uint32_t kFileVersion = 1;

void put_matrix(std::ostream& os, const Matrix& m) {
  io::put_u32(os, static_cast<std::uint32_t>(m.rows()));
  io::put_u32(os, static_cast<std::uint32_t>(m.cols()));
  for (double v : m.data()) io::put_f64(os, v);
}

Matrix get_matrix(std::istream& is) {
  const std::uint32_t r = io::get_u32(is), c = io::get_u32(is);
  if (static_cast<std::uint64_t>(r) * c > (1ull << 28)) fail(ErrorCode::Format, "matrix too large");
  Matrix m(r, c);
  for (double& v : m.data()) v = io::get_f64(is);
  return m;
}

void put_u32s(std::ostream& os, const std::vector<std::uint32_t>& v) {
  io::put_u64(os, v.size());
  for (auto x : v) io::put_u32(os, x);
}

std::vector<std::uint32_t> get_u32s(std::istream& is) {
  const std::uint64_t n = io::get_u64(is);
  if (n > (1ull << 32)) fail(ErrorCode::Format, "array too large");
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = io::get_u32(is);
  return v;
}

void write_atomically(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) fail(ErrorCode::Io, "cannot open " + tmp + " for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) fail(ErrorCode::Io, "write to " + tmp + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::Io, "cannot move " + tmp + " into place: " + ec.message());
}

}  // namespace

void save_checkpoint(const SosProblem& p, const AdmmState& s, const SolverParams& params, const std::string& path) {
  std::ostringstream os(std::ios::binary);
  os.write(kCheckpointMagic, sizeof kCheckpointMagic);
  io::put_u32(os, kFileVersion);
  io::put_bytes(os, library_version());
  io::put_u64(os, params.config_hash);
  io::put_u64(os, p.fingerprint());
  io::put_u64(os, s.iteration);
  io::put_f64(os, s.rho);
  io::put_f64(os, s.lambda);
  put_matrix(os, s.z);
  put_matrix(os, s.u);
  put_matrix(os, s.basis);
  write_atomically(path, os.str());
}

std::optional<AdmmState> load_checkpoint(const SosProblem& p, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[sizeof kCheckpointMagic];
  io::read_exact(is, magic, sizeof magic);
  if (!std::equal(magic, magic + sizeof magic, kCheckpointMagic)) fail(ErrorCode::Format, "not a checkpoint file");
  if (io::get_u32(is) != kFileVersion) fail(ErrorCode::Format, "unsupported checkpoint version");
  io::get_bytes(is, 256);
  io::get_u64(is);
  if (io::get_u64(is) != p.fingerprint())
    fail(ErrorCode::Format, "checkpoint " + path + " belongs to a different problem");
  AdmmState s;
  s.iteration = io::get_u64(is);
  s.rho = io::get_f64(is);
  s.lambda = io::get_f64(is);
  s.z = get_matrix(is);
  s.u = get_matrix(is);
  s.basis = get_matrix(is);
  if (s.z.rows() != p.n || s.u.rows() != p.n || s.basis.rows() != p.n)
    fail(ErrorCode::Format, "checkpoint dimensions do not match the problem");
  return s;
}

SosSolution solve(const SosProblem& p, const SolverParams& params, const AdmmState* warm) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = p.n;
  require(n >= 2, ErrorCode::InvalidArgument, "basis too small for a decomposition");
  require(params.alpha > 0.0 && params.alpha < 2.0 && params.rho > 0.0, ErrorCode::InvalidArgument,
          "invalid solver parameters");
  auto log = [&](const std::string& s) {
    if (params.log) params.log(s);
  };

  const ConstraintSystem cs(p);
  const std::vector<double>& b = p.target_y;
  const std::vector<double>& d = p.target_delta;
  const std::vector<double> minv_d = cs.solve_normal(d);
  double d_minv_d = 0.0;
  for (std::size_t c = 0; c < d.size(); ++c) d_minv_d += d[c] * minv_d[c];
  const bool maximize = p.mode == LambdaMode::Maximize;
  if (maximize && !(d_minv_d > 0.0)) fail(ErrorCode::NumericalFailure, "order unit is degenerate for the constraints");

  AdmmState s;
  bool resumed = false;
  if (params.resume && !params.checkpoint_path.empty()) {
    if (auto loaded = load_checkpoint(p, params.checkpoint_path)) {
      s = std::move(*loaded);
      resumed = true;
      log("resumed from checkpoint at iteration " + std::to_string(s.iteration));
    }
  }
  if (!resumed) {
    if (warm && warm->z.rows() == n) {
      s = *warm;
      s.iteration = 0;
    } else {
      s.z = Matrix(n, n);
      s.u = Matrix(n, n);
      s.basis = Matrix::identity(n);
      s.rho = params.rho;
    }
  }
  if (!maximize) s.lambda = p.fixed_lambda.get_d();

  SosSolution out;
  Matrix x(n, n);
  double rp = INFINITY, rd = INFINITY;
  SolveStatus status = SolveStatus::IterLimit;
  bool have_x = false;
  const double alpha = params.alpha;

  while (s.iteration < params.max_iters) {
    Matrix v = s.z - s.u;
    std::vector<double> r = cs.apply(v);
    for (std::size_t c = 0; c < r.size(); ++c) r[c] -= b[c];
    const std::vector<double> r0 = cs.solve_normal(r);
    if (maximize) {
      double dr = 0.0;
      for (std::size_t c = 0; c < d.size(); ++c) dr += d[c] * r0[c];
      s.lambda = (1.0 / s.rho - dr) / d_minv_d;
    }
    std::vector<double> q(r0.size());
    for (std::size_t c = 0; c < q.size(); ++c) q[c] = r0[c] + s.lambda * minv_d[c];
    const Matrix corr = cs.adjoint(q);
    x = v - corr;
    have_x = true;

    Matrix w(n, n);
    for (std::size_t k = 0; k < w.data().size(); ++k)
      w.data()[k] = alpha * x.data()[k] + (1.0 - alpha) * s.z.data()[k] + s.u.data()[k];
    w.symmetrize();
    {
      // Keep the iterate on the face Q 1 = 0 despite rounding drift.
      std::vector<double> mean(n, 0.0);
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += w(i, j);
        mean[i] = acc / static_cast<double>(n);
        total += acc;
      }
      total /= static_cast<double>(n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w(i, j) += total - mean[i] - mean[j];
    }
    if (params.reorthonormalize_interval && s.iteration % params.reorthonormalize_interval == 0)
      orthonormalize_columns(s.basis);
    Matrix z_new = project_psd(w, &s.basis);
    s.u = w - z_new;
    rp = frobenius_distance(x, z_new);
    rd = s.rho * frobenius_distance(z_new, s.z);
    s.z = std::move(z_new);
    ++s.iteration;

    if (params.adapt_interval && s.iteration % params.adapt_interval == 0) {
      if (rp > 10.0 * rd) {
        s.rho *= 2.0;
        for (double& e : s.u.data()) e /= 2.0;
      } else if (rd > 10.0 * rp) {
        s.rho /= 2.0;
        for (double& e : s.u.data()) e *= 2.0;
      }
    }
    if (params.log_interval && s.iteration % params.log_interval == 0) {
      std::ostringstream os;
      os << "iter " << s.iteration << " lambda " << s.lambda << " primal " << rp << " dual " << rd << " rho "
         << s.rho;
      log(os.str());
    }
    if (!params.checkpoint_path.empty() && params.checkpoint_interval &&
        s.iteration % params.checkpoint_interval == 0)
      save_checkpoint(p, s, params, params.checkpoint_path);

    if (!maximize && params.feasibility_interval && s.iteration % params.feasibility_interval == 0) {
      Matrix l;
      if (cholesky(difference_from_full(x), l) && floating_residual(p, difference_from_full(x), s.lambda) <= 1e-9) {
        status = SolveStatus::Optimal;
        break;
      }
    }
    const double xnorm = std::max(1.0, x.frobenius());
    const double unorm = std::max(1.0, s.rho * s.u.frobenius());
    if (rp <= params.eps * xnorm && rd <= params.eps * unorm) {
      status = SolveStatus::Optimal;
      break;
    }
    if (params.wall_clock_limit > 0.0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > params.wall_clock_limit) {
      log("wall-clock limit reached at iteration " + std::to_string(s.iteration));
      break;
    }
  }
  if (!have_x) {
    // Budget already spent (e.g. resumed at the end): recover X from the state.
    Matrix v = s.z - s.u;
    std::vector<double> r = cs.apply(v);
    for (std::size_t c = 0; c < r.size(); ++c) r[c] -= b[c];
    const std::vector<double> r0 = cs.solve_normal(r);
    std::vector<double> q(r0.size());
    for (std::size_t c = 0; c < q.size(); ++c) q[c] = r0[c] + s.lambda * minv_d[c];
    x = v - cs.adjoint(q);
  }
  if (!params.checkpoint_path.empty()) save_checkpoint(p, s, params, params.checkpoint_path);

  out.q = difference_from_full(x);
  out.q.symmetrize();
  out.lambda = s.lambda;
  out.primal_residual = rp;
  out.dual_residual = rd;
  out.iterations = s.iteration;
  out.constraint_residual = floating_residual(p, out.q, out.lambda);
  out.min_eigenvalue = jacobi_eigen(out.q).values.front();
  if (status == SolveStatus::IterLimit) {
    const double scale = std::max(1.0, out.q.frobenius());
    if (out.min_eigenvalue > 0.0 && out.constraint_residual <= 1e-9 * scale)
      status = SolveStatus::Feasible;
    else if (!maximize && out.min_eigenvalue < -1e-3 * scale)
      status = SolveStatus::InfeasibleLikely;
  }
  out.status = status;
  out.state = std::move(s);
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

SolutionRecord make_record(const SosProblem& p, const SosSolution& s, const std::string& target,
                           std::uint64_t config_hash) {
  SolutionRecord r;
  r.family = p.basis->family().name();
  r.radius = p.radius;
  r.target = target;
  r.config_hash = config_hash;
  r.library_version = library_version();
  r.mode = p.mode;
  r.fixed_lambda = p.fixed_lambda;
  r.row_ptr = p.row_ptr;
  r.pairs = p.pairs;
  r.reps = p.reps;
  for (auto g : p.reps) {
    r.y.push_back(p.y.coefficient(g));
    r.delta.push_back(p.delta.coefficient(g));
  }
  r.solution = s;
  return r;
}

void save_solution(const SolutionRecord& r, const std::string& path) {
  std::ostringstream os(std::ios::binary);
  os.write(kSolutionMagic, sizeof kSolutionMagic);
  io::put_u32(os, kFileVersion);
  io::put_bytes(os, r.library_version);
  io::put_u64(os, r.config_hash);
  io::put_bytes(os, r.family);
  io::put_u32(os, static_cast<std::uint32_t>(r.radius));
  io::put_bytes(os, r.target);
  io::put_u8(os, static_cast<std::uint8_t>(r.mode));
  io::put_bytes(os, rational_string(r.fixed_lambda));
  put_u32s(os, r.row_ptr);
  put_u32s(os, r.pairs);
  put_u32s(os, r.reps);
  io::put_u64(os, r.y.size());
  for (std::size_t c = 0; c < r.y.size(); ++c) {
    io::put_bytes(os, r.y[c].get_num().get_str());
    io::put_bytes(os, r.y[c].get_den().get_str());
    io::put_bytes(os, r.delta[c].get_num().get_str());
    io::put_bytes(os, r.delta[c].get_den().get_str());
  }
  const SosSolution& s = r.solution;
  put_matrix(os, s.q);
  io::put_f64(os, s.lambda);
  io::put_u64(os, s.iterations);
  io::put_u8(os, static_cast<std::uint8_t>(s.status));
  io::put_f64(os, s.primal_residual);
  io::put_f64(os, s.dual_residual);
  io::put_f64(os, s.constraint_residual);
  io::put_f64(os, s.min_eigenvalue);
  io::put_f64(os, s.state.rho);
  put_matrix(os, s.state.z);
  put_matrix(os, s.state.u);
  put_matrix(os, s.state.basis);
  write_atomically(path, os.str());
}

SolutionRecord load_solution(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot open " + path);
  char magic[sizeof kSolutionMagic];
  io::read_exact(is, magic, sizeof magic);
  if (!std::equal(magic, magic + sizeof magic, kSolutionMagic)) fail(ErrorCode::Format, "not a solution file");
  if (io::get_u32(is) != kFileVersion) fail(ErrorCode::Format, "unsupported solution file version");
  SolutionRecord r;
  r.library_version = io::get_bytes(is, 256);
  r.config_hash = io::get_u64(is);
  r.family = io::get_bytes(is, 64);
  r.radius = static_cast<int>(io::get_u32(is));
  r.target = io::get_bytes(is, 256);
  const std::uint8_t mode = io::get_u8(is);
  if (mode > 1) fail(ErrorCode::Format, "bad mode in solution file");
  r.mode = static_cast<LambdaMode>(mode);
  r.fixed_lambda = parse_rational(io::get_bytes(is, 4096));
  r.row_ptr = get_u32s(is);
  r.pairs = get_u32s(is);
  r.reps = get_u32s(is);
  const std::uint64_t classes = io::get_u64(is);
  if (classes != r.reps.size()) fail(ErrorCode::Format, "solution file constraint count mismatch");
  for (std::uint64_t c = 0; c < classes; ++c) {
    mpz_class yn(io::get_bytes(is, 4096)), yd(io::get_bytes(is, 4096));
    mpz_class dn(io::get_bytes(is, 4096)), dd(io::get_bytes(is, 4096));
    if (yd == 0 || dd == 0) fail(ErrorCode::Format, "zero denominator in solution file");
    Rational y(yn, yd), dl(dn, dd);
    y.canonicalize();
    dl.canonicalize();
    r.y.push_back(y);
    r.delta.push_back(dl);
  }
  SosSolution& s = r.solution;
  s.q = get_matrix(is);
  s.lambda = io::get_f64(is);
  s.iterations = io::get_u64(is);
  const std::uint8_t st = io::get_u8(is);
  if (st > 3) fail(ErrorCode::Format, "bad status in solution file");
  s.status = static_cast<SolveStatus>(st);
  s.primal_residual = io::get_f64(is);
  s.dual_residual = io::get_f64(is);
  s.constraint_residual = io::get_f64(is);
  s.min_eigenvalue = io::get_f64(is);
  s.state.rho = io::get_f64(is);
  s.state.z = get_matrix(is);
  s.state.u = get_matrix(is);
  s.state.basis = get_matrix(is);
  s.state.iteration = s.iterations;
  s.state.lambda = s.lambda;
  return r;
}

}  // namespace sosgap

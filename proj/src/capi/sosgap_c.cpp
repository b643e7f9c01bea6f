#include "sosgap/sosgap.h"

#include <cstring>
#include <fstream>
#include <functional>
#include <mutex>
#include <new>
#include <sstream>

#include "sosgap/bounds.hpp"
#include "sosgap/certify.hpp"
#include "sosgap/error.hpp"
#include "sosgap/pipeline.hpp"

using namespace sosgap;

struct sosgap_ball {
  BallPtr ball;
};
struct sosgap_element {
  AlgebraElement x;
};
struct sosgap_certificate {
  Certificate c;
};

namespace {

thread_local std::string last_error;

std::mutex log_mutex;
sosgap_log_fn log_fn = nullptr;
void* log_user = nullptr;
int thread_count = 1;

void emit(const std::string& line) {
  std::lock_guard<std::mutex> lock(log_mutex);
  if (log_fn) log_fn(line.c_str(), log_user);
}

template <class F>
sosgap_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<sosgap_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SOSGAP_E_RESOURCE_LIMIT;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SOSGAP_E_UNKNOWN;
  }
}

sosgap_status copy_out(const std::string& s, char* buf, size_t len, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || len < s.size() + 1) {
    last_error = "output buffer too small";
    return SOSGAP_E_BUFFER_TOO_SMALL;
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return SOSGAP_OK;
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

GroupFamily family_of(const char* family, int rank) {
  need(family, "family");
  GroupFamily f{GroupFamily::parse_kind(family), rank};
  f.validate();
  return f;
}

SolverParams solver_params(const sosgap_options& o) {
  SolverParams p;
  p.max_iters = o.max_iters;
  p.eps = o.eps;
  p.rho = o.rho;
  p.wall_clock_limit = o.wall_clock_limit;
  p.log_interval = o.log_interval;
  p.checkpoint_path = o.checkpoint ? o.checkpoint : "";
  p.checkpoint_interval = o.checkpoint_interval;
  p.resume = o.resume != 0;
  p.config_hash = o.config_hash;
  p.log = emit;
  return p;
}

void fill_report(sosgap_solve_report* r, const SosProblem& p, const SosSolution& s) {
  if (!r) return;
  r->lambda = s.lambda;
  r->status = static_cast<int>(s.status);
  r->primal_residual = s.primal_residual;
  r->dual_residual = s.dual_residual;
  r->constraint_residual = s.constraint_residual;
  r->min_eigenvalue = s.min_eigenvalue;
  r->iterations = s.iterations;
  r->wall_time = s.wall_time;
  r->dimension = static_cast<uint32_t>(p.dimension());
  r->constraints = static_cast<uint32_t>(p.constraint_count());
}

std::uint64_t cap_of(uint64_t cap) { return cap ? cap : kDefaultBallCap; }

}  // namespace

extern "C" {

const char* sosgap_version(void) { return library_version(); }

const char* sosgap_last_error(void) { return last_error.c_str(); }

const char* sosgap_status_name(sosgap_status s) {
  switch (s) {
    case SOSGAP_OK: return "ok";
    case SOSGAP_E_INVALID_ARGUMENT: return "invalid-argument";
    case SOSGAP_E_INVALID_FAMILY: return "invalid-family";
    case SOSGAP_E_INCOMPATIBLE_ELEMENTS: return "incompatible-elements";
    case SOSGAP_E_UNSUPPORTED_INVERSION: return "unsupported-inversion";
    case SOSGAP_E_RESOURCE_LIMIT: return "resource-limit";
    case SOSGAP_E_MISMATCHED_BALLS: return "mismatched-balls";
    case SOSGAP_E_SUPPORT_OVERFLOW: return "support-overflow";
    case SOSGAP_E_INCONSISTENT_BALLS: return "inconsistent-balls";
    case SOSGAP_E_CLOSURE: return "closure-error";
    case SOSGAP_E_NUMERICAL_FAILURE: return "numerical-failure";
    case SOSGAP_E_CERTIFICATE_SCOPE: return "certificate-scope";
    case SOSGAP_E_MALFORMED_RESIDUAL: return "malformed-residual";
    case SOSGAP_E_INTERNAL: return "internal-inconsistency";
    case SOSGAP_E_IO: return "io-error";
    case SOSGAP_E_FORMAT: return "format-error";
    case SOSGAP_E_BUFFER_TOO_SMALL: return "buffer-too-small";
    case SOSGAP_E_UNKNOWN: return "unknown-error";
  }
  return "unknown-error";
}

void sosgap_set_log(sosgap_log_fn fn, void* user) {
  std::lock_guard<std::mutex> lock(log_mutex);
  log_fn = fn;
  log_user = user;
}

void sosgap_set_threads(int threads) { thread_count = threads > 0 ? threads : 1; }
int sosgap_threads(void) { return thread_count; }

sosgap_status sosgap_ball_create(const char* family, int rank, int radius, uint64_t cap, sosgap_ball** out) {
  return guarded([&] {
    need(out, "out");
    require(radius >= 0, ErrorCode::InvalidArgument, "radius must be nonnegative");
    const GroupFamily f = family_of(family, rank);
    *out = new sosgap_ball{cached_ball(f, radius, cap_of(cap))};
    return SOSGAP_OK;
  });
}

sosgap_status sosgap_ball_load(const char* path, sosgap_ball** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new sosgap_ball{load_ball_file(path)};
    return SOSGAP_OK;
  });
}

sosgap_status sosgap_ball_save(const sosgap_ball* ball, const char* path) {
  return guarded([&] {
    need(ball, "ball");
    need(path, "path");
    save_ball_file(*ball->ball, path);
    return SOSGAP_OK;
  });
}

void sosgap_ball_free(sosgap_ball* ball) { delete ball; }
uint32_t sosgap_ball_size(const sosgap_ball* ball) { return ball ? ball->ball->size() : 0; }
int sosgap_ball_radius(const sosgap_ball* ball) { return ball ? ball->ball->radius() : -1; }
uint64_t sosgap_ball_hash(const sosgap_ball* ball) { return ball ? ball->ball->hash() : 0; }

sosgap_status sosgap_ball_layers(const sosgap_ball* ball, uint32_t* sizes, size_t capacity, size_t* count) {
  return guarded([&] {
    need(ball, "ball");
    const auto layers = ball->ball->layer_sizes();
    if (count) *count = layers.size();
    if (!sizes || capacity < layers.size()) {
      last_error = "output buffer too small";
      return SOSGAP_E_BUFFER_TOO_SMALL;
    }
    std::copy(layers.begin(), layers.end(), sizes);
    return SOSGAP_OK;
  });
}

sosgap_status sosgap_element_build(const sosgap_ball* universe, const char* which, int n, const char* k,
                                   sosgap_element** out) {
  return guarded([&] {
    need(universe, "universe");
    need(which, "which");
    need(out, "out");
    const BallPtr& u = universe->ball;
    const GroupFamily& f = u->family();
    const std::string w = which;
    AlgebraElement x;
    if (w == "delta") {
      x = laplacian(f, n, u).value;
    } else if (w == "sq" || w == "adj" || w == "op") {
      const SqAdjOp parts = sq_adj_op(f, n, u);
      x = w == "sq" ? parts.sq.value : w == "adj" ? parts.adj.value : parts.op.value;
    } else if (w == "x") {
      x = x_element(f, n, u).value;
    } else if (w == "adj_plus_k_op") {
      need(k, "k");
      const SqAdjOp parts = sq_adj_op(f, n, u);
      x = parts.adj.value + parse_rational(k) * parts.op.value;
    } else {
      fail(ErrorCode::InvalidArgument, "unknown element '" + w + "' (delta, sq, adj, op, x, adj_plus_k_op)");
    }
    *out = new sosgap_element{std::move(x)};
    return SOSGAP_OK;
  });
}

sosgap_status sosgap_element_mul(const sosgap_element* a, const sosgap_element* b, const sosgap_ball* universe,
                                 sosgap_element** out) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(universe, "universe");
    need(out, "out");
    *out = new sosgap_element{mul_direct(a->x, b->x, universe->ball)};
    return SOSGAP_OK;
  });
}

sosgap_status sosgap_element_load(const char* path, const sosgap_ball* ball, sosgap_element** out) {
  return guarded([&] {
    need(path, "path");
    need(ball, "ball");
    need(out, "out");
    *out = new sosgap_element{load_element_file(path, ball->ball)};
    return SOSGAP_OK;
  });
}

sosgap_status sosgap_element_save(const sosgap_element* x, const char* path) {
  return guarded([&] {
    need(x, "element");
    need(path, "path");
    save_element_file(x->x, path);
    return SOSGAP_OK;
  });
}

void sosgap_element_free(sosgap_element* x) { delete x; }
size_t sosgap_element_support(const sosgap_element* x) { return x ? x->x.support_size() : 0; }

sosgap_status sosgap_element_equal(const sosgap_element* a, const sosgap_element* b, int* equal) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(equal, "equal");
    *equal = a->x == b->x ? 1 : 0;
    return SOSGAP_OK;
  });
}

sosgap_status sosgap_element_describe(const sosgap_element* x, char* buf, size_t len, size_t* needed) {
  return guarded([&] {
    need(x, "element");
    const AlgebraElement& e = x->x;
    const int rank = e.ball()->family().rank;
    bool invariant = true;
    if (rank <= kMaxAlternatingRank)
      for (const auto& sigma : alternating_group(rank)) {
        if (!(act_algebra(sigma, e) == e)) {
          invariant = false;
          break;
        }
      }
    std::ostringstream os;
    os << "support=" << e.support_size() << '\n'
       << "augmentation=" << rational_string(augmentation(e)) << '\n'
       << "l1=" << rational_string(l1_norm(e)) << '\n'
       << "star_invariant=" << (star(e) == e ? 1 : 0) << '\n'
       << "alternating_invariant=" << (rank <= kMaxAlternatingRank ? (invariant ? "1" : "0") : "unchecked") << '\n'
       << "radius=" << e.support_radius() << '\n';
    return copy_out(os.str(), buf, len, needed);
  });
}

sosgap_status sosgap_verify_identities(const char* family, int n_max, int m_max, int symmetrization,
                                       int x_identities, char* buf, size_t len, size_t* needed, int* failures) {
  return guarded([&] {
    const GroupFamily f = family_of(family, std::max(3, std::max(n_max, m_max)));
    IdentityOptions o;
    o.n_max = n_max;
    o.m_max = m_max;
    o.symmetrization = symmetrization != 0;
    o.x_identities = x_identities != 0;
    o.x_n_max = std::min(n_max, 5);
    const auto rows = verify_identities(f, o);
    std::ostringstream os;
    int bad = 0;
    for (const auto& r : rows) {
      bad += r.pass ? 0 : 1;
      os << (r.pass ? "PASS " : "FAIL ") << r.id << ' ' << r.family << " n=" << r.n << " m=" << r.m;
      if (!r.pass) os << " max_dev=" << rational_string(r.max_abs_deviation) << " " << r.detail;
      os << '\n';
    }
    if (failures) *failures = bad;
    return copy_out(os.str(), buf, len, needed);
  });
}

sosgap_status sosgap_order_unit_witnesses(const char* family, int rank, int* total, int* exact) {
  return guarded([&] {
    const auto ws = order_unit_witnesses(family_of(family, rank));
    int good = 0;
    for (const auto& w : ws) good += w.exact ? 1 : 0;
    if (total) *total = static_cast<int>(ws.size());
    if (exact) *exact = good;
    return SOSGAP_OK;
  });
}

void sosgap_options_init(sosgap_options* o) {
  if (!o) return;
  const SolverParams d;
  const PipelineConfig c;
  o->family = "sl";
  o->rank = 3;
  o->radius = 2;
  o->target = "delta2";
  o->lambda = nullptr;
  o->max_iters = d.max_iters;
  o->probe_iters = c.probe_iters;
  o->margin = "0.005";
  o->eps = d.eps;
  o->rho = d.rho;
  o->wall_clock_limit = d.wall_clock_limit;
  o->log_interval = d.log_interval;
  o->checkpoint = nullptr;
  o->checkpoint_interval = d.checkpoint_interval;
  o->resume = 0;
  o->bits = c.bits;
  o->element_cap = c.element_cap;
  o->config_hash = 0;
}

const char* sosgap_solve_status_name(int status) {
  if (status < 0 || status > 3) return "unknown";
  static const std::string names[] = {status_name(SolveStatus::Optimal), status_name(SolveStatus::Feasible),
                                      status_name(SolveStatus::IterLimit),
                                      status_name(SolveStatus::InfeasibleLikely)};
  return names[status].c_str();
}

sosgap_status sosgap_solve(const sosgap_options* o, const char* solution_path, sosgap_solve_report* report) {
  return guarded([&] {
    need(o, "options");
    need(solution_path, "solution path");
    const GroupFamily f = family_of(o->family, o->rank);
    require(o->radius >= 1, ErrorCode::InvalidArgument, "radius must be positive");
    const TargetDescriptor target = TargetDescriptor::parse(o->target ? o->target : "delta2");
    const BallPtr basis = cached_ball(f, o->radius, cap_of(o->element_cap));
    const BallPtr universe = cached_ball(f, 2 * o->radius, cap_of(o->element_cap));
    const ProductTable table = build_product_table(basis, universe);
    const AlgebraElement y = build_target(target, f, universe);
    const AlgebraElement delta = laplacian(f, f.rank, universe).value;
    const bool fixed = o->lambda != nullptr;
    const SosProblem p = build_problem(y, delta, table, fixed ? LambdaMode::Fixed : LambdaMode::Maximize,
                                       fixed ? parse_rational(o->lambda) : Rational(0));
    emit(f.name() + " radius " + std::to_string(o->radius) + ": dimension " + std::to_string(p.dimension()) +
         ", constraints " + std::to_string(p.constraint_count()));
    const SosSolution s = solve(p, solver_params(*o));
    save_solution(make_record(p, s, target.to_string(), o->config_hash), solution_path);
    fill_report(report, p, s);
    return SOSGAP_OK;
  });
}

sosgap_status sosgap_certify_solution(const char* solution_path, const char* lambda, int bits, uint64_t config_hash,
                                      sosgap_certificate** out) {
  return guarded([&] {
    need(solution_path, "solution path");
    need(out, "out");
    const SolutionRecord rec = load_solution(solution_path);
    const GroupFamily f = GroupFamily::parse(rec.family);
    const TargetDescriptor target = TargetDescriptor::parse(rec.target);
    const BallPtr basis = cached_ball(f, rec.radius);
    const BallPtr universe = cached_ball(f, 2 * rec.radius);
    const ProductTable table = build_product_table(basis, universe);
    const AlgebraElement y = build_target(target, f, universe);
    const AlgebraElement delta = laplacian(f, f.rank, universe).value;
    const SosProblem p = build_problem(y, delta, table, rec.mode, rec.fixed_lambda);
    if (p.row_ptr != rec.row_ptr || p.pairs != rec.pairs || p.reps != rec.reps)
      fail(ErrorCode::Format, "solution file does not match the rebuilt constraint index");
    for (std::size_t c = 0; c < p.reps.size(); ++c)
      if (p.y.coefficient(p.reps[c]) != rec.y[c] || p.delta.coefficient(p.reps[c]) != rec.delta[c])
        fail(ErrorCode::Format, "solution file target coefficients differ from the rebuilt target");
    Rational lam;
    if (lambda)
      lam = parse_rational(lambda);
    else if (rec.mode == LambdaMode::Fixed)
      lam = rec.fixed_lambda;
    else
      lam = round_down(rec.solution.lambda, 6);
    auto xi = extract_vectors(rec.solution.q, basis, bits);
    Certificate c = certify(target, y, lam, std::move(xi), table);
    c.config_hash = config_hash;
    emit("certify: |b|_1 = " + rational_string(c.b_l1) + ", epsilon = " + rational_string(c.epsilon) + ", " +
         (c.valid ? "valid" : "invalid"));
    *out = new sosgap_certificate{std::move(c)};
    return SOSGAP_OK;
  });
}

sosgap_status sosgap_pipeline(const sosgap_options* o, sosgap_certificate** out, sosgap_solve_report* report) {
  return guarded([&] {
    need(o, "options");
    need(out, "out");
    PipelineConfig cfg;
    cfg.family = family_of(o->family, o->rank);
    cfg.radius = o->radius;
    cfg.target = TargetDescriptor::parse(o->target ? o->target : "delta2");
    cfg.solver = solver_params(*o);
    cfg.probe_iters = o->probe_iters;
    if (o->margin) cfg.margin = parse_rational(o->margin);
    if (o->lambda) cfg.lambda = parse_rational(o->lambda);
    cfg.bits = o->bits;
    cfg.element_cap = cap_of(o->element_cap);
    PipelineResult r = run_pipeline(cfg);
    fill_report(report, r.problem, r.solution);
    *out = new sosgap_certificate{std::move(r.certificate)};
    return SOSGAP_OK;
  });
}

void sosgap_certificate_free(sosgap_certificate* c) { delete c; }
int sosgap_certificate_valid(const sosgap_certificate* c) { return c && c->c.valid ? 1 : 0; }
double sosgap_certificate_gap(const sosgap_certificate* c) { return c ? c->c.certified_gap().get_d() : 0.0; }

sosgap_status sosgap_certificate_field(const sosgap_certificate* c, const char* field, char* buf, size_t len,
                                       size_t* needed) {
  return guarded([&] {
    need(c, "certificate");
    need(field, "field");
    const std::string f = field;
    std::string v;
    if (f == "lambda") v = rational_string(c->c.lambda);
    else if (f == "epsilon") v = rational_string(c->c.epsilon);
    else if (f == "b_l1") v = rational_string(c->c.b_l1);
    else if (f == "certified_gap") v = rational_string(c->c.certified_gap());
    else if (f == "statement") v = c->c.statement();
    else if (f == "target") v = c->c.target.to_string();
    else if (f == "family") v = c->c.family.name();
    else fail(ErrorCode::InvalidArgument, "unknown certificate field '" + f + "'");
    return copy_out(v, buf, len, needed);
  });
}

sosgap_status sosgap_certificate_save(const sosgap_certificate* c, const char* path) {
  return guarded([&] {
    need(c, "certificate");
    need(path, "path");
    save_certificate(c->c, path);
    return SOSGAP_OK;
  });
}

sosgap_status sosgap_certificate_load(const char* path, sosgap_certificate** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    std::ifstream is(path);
    if (!is) fail(ErrorCode::Io, std::string("cannot open ") + path);
    const CertificateHeader h = read_certificate_header(is);
    is.seekg(0);
    const BallPtr basis = cached_ball(h.family, h.radius);
    const BallPtr universe = cached_ball(h.family, 2 * h.radius);
    *out = new sosgap_certificate{read_certificate(is, basis, universe)};
    return SOSGAP_OK;
  });
}

sosgap_status sosgap_verify_certificate(const char* path, int independent, int* ok, char* buf, size_t len,
                                        size_t* needed) {
  return guarded([&] {
    need(path, "path");
    need(ok, "ok");
    const VerificationReport rep = verify_certificate(std::string(path), independent != 0);
    *ok = rep.ok ? 1 : 0;
    std::string text;
    for (const auto& d : rep.divergences) text += d + "\n";
    if (!buf && len == 0) {
      if (needed) *needed = text.size() + 1;
      return SOSGAP_OK;
    }
    return copy_out(text, buf, len, needed);
  });
}

sosgap_status sosgap_order_unit_bound(int radius, char* buf, size_t len, size_t* needed) {
  return guarded([&] { return copy_out(order_unit_bound(radius).get_num().get_str(), buf, len, needed); });
}

sosgap_status sosgap_epsilon_bound(const sosgap_element* b, int radius, char* buf, size_t len, size_t* needed) {
  return guarded([&] {
    need(b, "residual");
    return copy_out(rational_string(epsilon_bound(b->x, radius)), buf, len, needed);
  });
}

sosgap_status sosgap_kazhdan_constant(const char* gap, const char* family, int m, char* buf, size_t len,
                                      size_t* needed) {
  return guarded([&] {
    need(gap, "gap");
    need(family, "family");
    const Rational k = kazhdan_constant(parse_rational(gap), GroupFamily::parse_kind(family), m);
    return copy_out(decimal(k, 5), buf, len, needed);
  });
}

sosgap_status sosgap_bounds(const char* manifest_path, int m_min, int m_max, int json, int check_certificates,
                            char* buf, size_t len, size_t* needed) {
  return guarded([&] {
    need(manifest_path, "manifest path");
    require(m_min >= 2 && m_max >= m_min - 1, ErrorCode::InvalidArgument, "invalid rank range");
    const auto bases = load_manifest(manifest_path);
    require(!bases.empty(), ErrorCode::InvalidArgument, "manifest lists no bases");
    if (check_certificates) check_provenance(bases);
    std::vector<int> ms;
    for (int m = m_min; m <= m_max; ++m) ms.push_back(m);
    const auto rows = bound_table(bases, ms);
    std::ostringstream os;
    if (json)
      write_rows_json(os, rows);
    else
      write_table(os, rows);
    return copy_out(os.str(), buf, len, needed);
  });
}

sosgap_status sosgap_mixing_bound(uint64_t generators, const char* gap, double log_gamma, double eps, double* out) {
  return guarded([&] {
    need(gap, "gap");
    need(out, "out");
    *out = pra_mixing_bound(static_cast<std::int64_t>(generators), parse_rational(gap), log_gamma, eps);
    return SOSGAP_OK;
  });
}

}  // extern "C"

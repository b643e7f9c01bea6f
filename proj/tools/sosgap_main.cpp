#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sosgap/sosgap.h"

namespace {

enum Exit { kOk = 0, kFailure = 1, kInvalidCertificate = 2, kResource = 3, kUsage = 4 };

int verbosity = 1;

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

void log_line(const char* level, const std::string& msg) {
  if (verbosity == 0 && std::string(level) != "error") return;
  std::cerr << timestamp() << ' ' << level << ' ' << msg << '\n';
}

void library_log(const char* line, void*) {
  if (verbosity >= 1) log_line("info", line);
}

struct Failure {
  sosgap_status status;
  std::string message;
};

void check(sosgap_status s, const std::string& what) {
  if (s != SOSGAP_OK) throw Failure{s, what + ": " + sosgap_last_error()};
}

int exit_code(sosgap_status s) {
  switch (s) {
    case SOSGAP_E_INVALID_ARGUMENT:
    case SOSGAP_E_INVALID_FAMILY: return kUsage;
    case SOSGAP_E_RESOURCE_LIMIT: return kResource;
    default: return kFailure;
  }
}

// Calls f(buf, len, needed) until the buffer is large enough.
template <class F>
std::string fetch(const std::string& what, F f) {
  std::vector<char> buf(1 << 16);
  size_t needed = 0;
  sosgap_status s = f(buf.data(), buf.size(), &needed);
  if (s == SOSGAP_E_BUFFER_TOO_SMALL) {
    buf.resize(needed);
    s = f(buf.data(), buf.size(), &needed);
  }
  check(s, what);
  return std::string(buf.data());
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct ProblemFlags {
  std::string family = "sl";
  int rank = 3;
  int radius = 2;
  std::string target = "delta2";
  std::string lambda;
  std::uint64_t max_iters = 0;
  std::uint64_t probe_iters = 0;
  std::string margin = "0.005";
  double eps = 0;
  double rho = 0;
  double wall_clock = 0;
  std::uint64_t log_interval = 0;
  std::string checkpoint;
  std::uint64_t checkpoint_interval = 0;
  bool resume = false;
  int bits = 48;
  std::uint64_t cap = 0;
};

void add_problem_flags(CLI::App* app, ProblemFlags& f, bool pipeline) {
  sosgap_options d;
  sosgap_options_init(&d);
  f.max_iters = d.max_iters;
  f.probe_iters = d.probe_iters;
  f.eps = d.eps;
  f.rho = d.rho;
  f.wall_clock = d.wall_clock_limit;
  f.log_interval = d.log_interval;
  f.checkpoint_interval = d.checkpoint_interval;
  f.bits = d.bits;
  f.cap = d.element_cap;
  app->add_option("--family", f.family, "sl or saut")->capture_default_str();
  app->add_option("--rank", f.rank, "rank n")->capture_default_str();
  app->add_option("--radius", f.radius, "support radius R of the decomposition")->capture_default_str();
  app->add_option("--target", f.target, "delta2, adj or adj+<k>op")->capture_default_str();
  app->add_option("--lambda", f.lambda, pipeline ? "certify this lambda instead of probing" : "fixed lambda (default: maximize)");
  app->add_option("--max-iters", f.max_iters, "solver iteration cap")->capture_default_str();
  app->add_option("--eps", f.eps, "primal/dual residual tolerance")->capture_default_str();
  app->add_option("--rho", f.rho, "initial penalty")->capture_default_str();
  app->add_option("--wall-clock", f.wall_clock, "solver wall-clock cap in seconds (0 = none)")->capture_default_str();
  app->add_option("--log-interval", f.log_interval, "iterations between progress lines")->capture_default_str();
  app->add_option("--checkpoint", f.checkpoint, "checkpoint file");
  app->add_option("--checkpoint-interval", f.checkpoint_interval)->capture_default_str();
  app->add_flag("--resume", f.resume, "continue from the checkpoint file");
  app->add_option("--element-cap", f.cap, "ball element cap")->capture_default_str();
  if (pipeline) {
    app->add_option("--probe-iters", f.probe_iters, "iterations of the lambda probe")->capture_default_str();
    app->add_option("--margin", f.margin, "distance below the probe value")->capture_default_str();
    app->add_option("--bits", f.bits, "denominator bits of the rationalized vectors")->capture_default_str();
  }
}

sosgap_options to_options(const ProblemFlags& f, std::uint64_t config_hash) {
  sosgap_options o;
  sosgap_options_init(&o);
  o.family = f.family.c_str();
  o.rank = f.rank;
  o.radius = f.radius;
  o.target = f.target.c_str();
  o.lambda = f.lambda.empty() ? nullptr : f.lambda.c_str();
  o.max_iters = f.max_iters;
  o.probe_iters = f.probe_iters;
  o.margin = f.margin.c_str();
  o.eps = f.eps;
  o.rho = f.rho;
  o.wall_clock_limit = f.wall_clock;
  o.log_interval = f.log_interval;
  o.checkpoint = f.checkpoint.empty() ? nullptr : f.checkpoint.c_str();
  o.checkpoint_interval = f.checkpoint_interval;
  o.resume = f.resume ? 1 : 0;
  o.bits = f.bits;
  o.element_cap = f.cap;
  o.config_hash = config_hash;
  return o;
}

void log_report(const sosgap_solve_report& r) {
  std::ostringstream os;
  os << "solver " << sosgap_solve_status_name(r.status) << ": lambda " << r.lambda << ", iterations " << r.iterations
     << ", primal " << r.primal_residual << ", dual " << r.dual_residual << ", constraint residual "
     << r.constraint_residual << ", min eigenvalue " << r.min_eigenvalue << ", " << r.wall_time << " s";
  log_line("info", os.str());
}

std::string cert_field(const sosgap_certificate* c, const char* name) {
  return fetch(name, [&](char* b, size_t l, size_t* n) { return sosgap_certificate_field(c, name, b, l, n); });
}

void print_certificate(const sosgap_certificate* c, const std::string& path) {
  std::cout << "certificate " << path << '\n'
            << "  valid          " << (sosgap_certificate_valid(c) ? "true" : "false") << '\n'
            << "  lambda         " << cert_field(c, "lambda") << '\n'
            << "  |b|_1          " << cert_field(c, "b_l1") << '\n'
            << "  epsilon        " << cert_field(c, "epsilon") << '\n'
            << "  certified gap  " << cert_field(c, "certified_gap") << " (" << sosgap_certificate_gap(c) << ")\n"
            << "  statement      " << cert_field(c, "statement") << '\n';
}

using CertPtr = std::unique_ptr<sosgap_certificate, decltype(&sosgap_certificate_free)>;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sum of squares certificates of spectral gaps for SL_n(Z) and SAut(F_n)"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file");
  int threads = 1;
  bool quiet = false, verbose = false;
  std::string out_dir = ".";
  std::string write_config;
  app.add_option("--threads", threads, "data-parallel width")->capture_default_str();
  app.add_flag("-q,--quiet", quiet, "only errors on stderr");
  app.add_flag("-v,--verbose", verbose, "more progress output");
  app.add_option("--out-dir", out_dir, "directory for artifacts")->capture_default_str();
  app.add_option("--write-config", write_config, "write the effective configuration to this file and continue")
      ->configurable(false);

  // ball
  auto* ball = app.add_subcommand("ball", "enumerate a word-metric ball");
  std::string b_family = "sl", b_out;
  int b_rank = 3, b_radius = 2;
  std::uint64_t b_cap = 0;
  ball->add_option("--family", b_family)->capture_default_str();
  ball->add_option("--rank", b_rank)->capture_default_str();
  ball->add_option("--radius", b_radius)->capture_default_str();
  ball->add_option("--element-cap", b_cap, "0 selects the default");
  ball->add_option("--out", b_out, "ball file (default <out-dir>/<family><rank>-r<R>.ball)");

  // element
  auto* element = app.add_subcommand("element", "build a group ring element");
  std::string e_family = "sl", e_which = "delta", e_k = "0", e_out;
  int e_rank = 3, e_radius = 2, e_n = 0;
  element->add_option("--family", e_family)->capture_default_str();
  element->add_option("--rank", e_rank)->capture_default_str();
  element->add_option("--radius", e_radius, "radius of the ball the element lives in")->capture_default_str();
  element->add_option("--which", e_which, "delta, sq, adj, op, x, adj_plus_k_op")->capture_default_str();
  element->add_option("--k", e_k, "Op coefficient for adj_plus_k_op")->capture_default_str();
  element->add_option("--n", e_n, "rank the element is built for (default: --rank)");
  element->add_option("--out", e_out, "element file");

  // verify-identities
  auto* ident = app.add_subcommand("verify-identities", "check the exact identity suite");
  std::string i_family = "sl";
  int i_n = 4, i_m = 5;
  bool i_no_sym = false, i_no_x = false;
  ident->add_option("--family", i_family)->capture_default_str();
  ident->add_option("--n-max", i_n)->capture_default_str();
  ident->add_option("--m-max", i_m)->capture_default_str();
  ident->add_flag("--no-symmetrization", i_no_sym);
  ident->add_flag("--no-x", i_no_x);

  // solve
  auto* solve = app.add_subcommand("solve", "solve the decomposition problem numerically");
  ProblemFlags s_flags;
  std::string s_out;
  add_problem_flags(solve, s_flags, false);
  solve->add_option("--out", s_out, "solution file (default <out-dir>/<family><rank>-<target>-r<R>.sol)");

  // certify
  auto* certify = app.add_subcommand("certify", "rationalize a solution and certify it exactly");
  std::string c_in, c_target, c_lambda, c_out;
  int c_bits = 48;
  certify->add_option("--in", c_in, "solution file")->required();
  certify->add_option("--target", c_target, "expected target descriptor");
  certify->add_option("--lambda", c_lambda, "nominal lambda (default: from the solution)");
  certify->add_option("--bits", c_bits)->capture_default_str();
  certify->add_option("--out", c_out, "certificate file (default: solution path with .cert)");

  // verify-cert
  auto* vcert = app.add_subcommand("verify-cert", "re-check a certificate from scratch");
  std::string v_in;
  bool v_table = false;
  vcert->add_option("--in", v_in, "certificate file")->required();
  vcert->add_flag("--use-table", v_table, "recompute through the product table instead of direct multiplication");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "propagate base facts to bound tables");
  std::string bd_manifest, bd_out;
  int bd_min = 3, bd_max = 10;
  bool bd_json = false, bd_check = false;
  std::uint64_t mix_gens = 0;
  std::string mix_gap;
  double mix_log_gamma = 0, mix_eps = 0.01;
  bounds->add_option("--manifest", bd_manifest, "base fact manifest");
  bounds->add_option("--m-min", bd_min)->capture_default_str();
  bounds->add_option("--m-max", bd_max)->capture_default_str();
  bounds->add_flag("--json", bd_json, "machine-readable rows");
  bounds->add_flag("--check-certs", bd_check, "verify cert: provenance against certificate headers");
  bounds->add_option("--out", bd_out, "also write the report to this file");
  bounds->add_option("--mixing-generators", mix_gens, "|S| for the product replacement mixing bound");
  bounds->add_option("--mixing-gap", mix_gap, "spectral gap for the mixing bound");
  bounds->add_option("--mixing-log-gamma", mix_log_gamma, "log of the group size");
  bounds->add_option("--mixing-eps", mix_eps, "total variation target")->capture_default_str();

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "solve, certify and tabulate bounds");
  ProblemFlags p_flags;
  int p_m_max = 10;
  std::string p_manifest;
  add_problem_flags(pipeline, p_flags, true);
  pipeline->add_option("--m-max", p_m_max, "largest rank in the bound table")->capture_default_str();
  pipeline->add_option("--manifest", p_manifest, "extra base facts for the bound table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  verbosity = quiet ? 0 : (verbose ? 2 : 1);
  sosgap_set_log(library_log, nullptr);
  if (threads < 1) {
    log_line("error", "--threads must be positive");
    return kUsage;
  }
  sosgap_set_threads(threads);
  if (const char* cache = std::getenv("SOSGAP_CACHE_DIR")) log_line("info", std::string("ball cache ") + cache);

  const std::string config_text = app.config_to_str(true, false);
  const std::uint64_t config_hash = fnv1a(app.get_subcommands().front()->config_to_str(true, false));
  if (!write_config.empty()) {
    std::ofstream os(write_config);
    os << config_text;
    if (!os) {
      log_line("error", "cannot write " + write_config);
      return kFailure;
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    log_line("error", "cannot create output directory " + out_dir + ": " + ec.message());
    return kUsage;
  }
  auto in_out_dir = [&](const std::string& name) { return (std::filesystem::path(out_dir) / name).string(); };
  log_line("info", std::string(sosgap_version()) + ", config " + hex64(config_hash));

  try {
    if (ball->parsed()) {
      sosgap_ball* b = nullptr;
      check(sosgap_ball_create(b_family.c_str(), b_rank, b_radius, b_cap, &b), "ball");
      std::unique_ptr<sosgap_ball, decltype(&sosgap_ball_free)> hold(b, sosgap_ball_free);
      if (b_out.empty()) b_out = in_out_dir(b_family + std::to_string(b_rank) + "-r" + std::to_string(b_radius) + ".ball");
      check(sosgap_ball_save(b, b_out.c_str()), "save ball");
      size_t count = 0;
      sosgap_ball_layers(b, nullptr, 0, &count);
      std::vector<uint32_t> layers(count);
      check(sosgap_ball_layers(b, layers.data(), layers.size(), &count), "layers");
      std::ostringstream os;
      for (size_t r = 0; r < count; ++r) os << (r ? " " : "") << layers[r];
      log_line("info", "layer sizes " + os.str());
      std::cout << b_out << ": " << sosgap_ball_size(b) << " elements, hash " << hex64(sosgap_ball_hash(b)) << '\n';
      return kOk;
    }

    if (element->parsed()) {
      sosgap_ball* b = nullptr;
      check(sosgap_ball_create(e_family.c_str(), e_rank, e_radius, 0, &b), "ball");
      std::unique_ptr<sosgap_ball, decltype(&sosgap_ball_free)> hold(b, sosgap_ball_free);
      sosgap_element* x = nullptr;
      check(sosgap_element_build(b, e_which.c_str(), e_n ? e_n : e_rank, e_k.c_str(), &x), "element");
      std::unique_ptr<sosgap_element, decltype(&sosgap_element_free)> hx(x, sosgap_element_free);
      if (e_out.empty()) e_out = in_out_dir(e_family + std::to_string(e_rank) + "-" + e_which + ".elem");
      check(sosgap_element_save(x, e_out.c_str()), "save element");
      const std::string desc =
          fetch("describe", [&](char* buf, size_t l, size_t* n) { return sosgap_element_describe(x, buf, l, n); });
      std::istringstream lines(desc);
      for (std::string line; std::getline(lines, line);) log_line("info", line);
      std::cout << e_out << '\n' << desc;
      return kOk;
    }

    if (ident->parsed()) {
      int failures = 0;
      const std::string text = fetch("verify-identities", [&](char* buf, size_t l, size_t* n) {
        return sosgap_verify_identities(i_family.c_str(), i_n, i_m, i_no_sym ? 0 : 1, i_no_x ? 0 : 1, buf, l, n,
                                        &failures);
      });
      std::cout << text;
      log_line(failures ? "error" : "info", std::to_string(failures) + " failing checks");
      return failures ? kFailure : kOk;
    }

    if (solve->parsed()) {
      const sosgap_options o = to_options(s_flags, config_hash);
      if (s_out.empty())
        s_out = in_out_dir(s_flags.family + std::to_string(s_flags.rank) + "-" + s_flags.target + "-r" +
                           std::to_string(s_flags.radius) + ".sol");
      sosgap_solve_report r{};
      check(sosgap_solve(&o, s_out.c_str(), &r), "solve");
      log_report(r);
      std::cout << s_out << ": " << sosgap_solve_status_name(r.status) << ", lambda " << r.lambda << ", dimension "
                << r.dimension << ", constraints " << r.constraints << '\n';
      return kOk;
    }

    if (certify->parsed()) {
      sosgap_certificate* c = nullptr;
      check(sosgap_certify_solution(c_in.c_str(), c_lambda.empty() ? nullptr : c_lambda.c_str(), c_bits,
                                    config_hash, &c),
            "certify");
      CertPtr hold(c, sosgap_certificate_free);
      if (!c_target.empty() && cert_field(c, "target") != c_target) {
        log_line("error", "solution target is " + cert_field(c, "target") + ", not " + c_target);
        return kUsage;
      }
      if (c_out.empty()) c_out = std::filesystem::path(c_in).replace_extension(".cert").string();
      check(sosgap_certificate_save(c, c_out.c_str()), "save certificate");
      print_certificate(c, c_out);
      return sosgap_certificate_valid(c) ? kOk : kInvalidCertificate;
    }

    if (vcert->parsed()) {
      int ok = 0;
      const std::string text = fetch("verify-cert", [&](char* buf, size_t l, size_t* n) {
        return sosgap_verify_certificate(v_in.c_str(), v_table ? 0 : 1, &ok, buf, l, n);
      });
      std::cout << v_in << ": " << (ok ? "verified" : "REJECTED") << '\n' << text;
      return ok ? kOk : kInvalidCertificate;
    }

    if (bounds->parsed()) {
      if (!mix_gap.empty()) {
        double t = 0;
        check(sosgap_mixing_bound(mix_gens, mix_gap.c_str(), mix_log_gamma, mix_eps, &t), "mixing bound");
        std::cout << "mixing steps " << t << '\n';
        if (bd_manifest.empty()) return kOk;
      }
      if (bd_manifest.empty()) {
        log_line("error", "bounds needs --manifest or --mixing-gap");
        return kUsage;
      }
      const std::string text = fetch("bounds", [&](char* buf, size_t l, size_t* n) {
        return sosgap_bounds(bd_manifest.c_str(), bd_min, bd_max, bd_json ? 1 : 0, bd_check ? 1 : 0, buf, l, n);
      });
      std::cout << text;
      if (!bd_out.empty()) {
        std::ofstream os(bd_out);
        os << text;
      }
      return kOk;
    }

    if (pipeline->parsed()) {
      const sosgap_options o = to_options(p_flags, config_hash);
      const std::string stem = in_out_dir(p_flags.family + std::to_string(p_flags.rank) + "-" + p_flags.target + "-r" +
                                          std::to_string(p_flags.radius));
      sosgap_certificate* c = nullptr;
      sosgap_solve_report r{};
      check(sosgap_pipeline(&o, &c, &r), "pipeline");
      CertPtr hold(c, sosgap_certificate_free);
      log_report(r);
      const std::string cert_path = stem + ".cert";
      check(sosgap_certificate_save(c, cert_path.c_str()), "save certificate");
      print_certificate(c, cert_path);
      if (!sosgap_certificate_valid(c)) return kInvalidCertificate;
      const std::string gap = cert_field(c, "certified_gap");
      if (gap.rfind('-', 0) == 0 || gap == "0/1") {
        log_line("info", "certified gap is not positive; no bound table");
        return kOk;
      }
      std::ostringstream manifest;
      if (!p_manifest.empty()) {
        std::ifstream is(p_manifest);
        if (!is) {
          log_line("error", "cannot open " + p_manifest);
          return kUsage;
        }
        manifest << is.rdbuf() << '\n';
      }
      const bool delta = p_flags.target == "delta2" || p_flags.target == "delta^2";
      std::string k = "0";
      if (!delta && p_flags.target != "adj") k = p_flags.target.substr(4, p_flags.target.size() - 6);
      manifest << p_flags.family << ' ' << p_flags.rank << ' ' << (delta ? "delta2" : "adj+kop") << ' ' << k << ' '
               << gap << ' ' << std::max(2, p_flags.radius) << " cert:" << cert_path << '\n';
      const std::string manifest_path = stem + ".manifest";
      {
        std::ofstream os(manifest_path);
        os << manifest.str();
      }
      const std::string table = fetch("bounds", [&](char* buf, size_t l, size_t* n) {
        return sosgap_bounds(manifest_path.c_str(), p_flags.rank, std::max(p_flags.rank, p_m_max), 0, 1, buf, l, n);
      });
      const std::string json = fetch("bounds", [&](char* buf, size_t l, size_t* n) {
        return sosgap_bounds(manifest_path.c_str(), p_flags.rank, std::max(p_flags.rank, p_m_max), 1, 1, buf, l, n);
      });
      std::ofstream(stem + ".bounds.txt") << table;
      std::ofstream(stem + ".bounds.json") << json;
      std::cout << table;
      return kOk;
    }
  } catch (const Failure& f) {
    log_line("error", f.message);
    return exit_code(f.status);
  }
  return kUsage;
}

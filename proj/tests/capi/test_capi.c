#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "sosgap/sosgap.h"

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: CHECK(%s) failed (last error: %s)\n", \
              __FILE__, __LINE__, #cond, sosgap_last_error());       \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static int log_lines = 0;
static void count_log(const char* line, void* user) {
  (void)line;
  ++*(int*)user;
}

static char tmp_path[512];
static const char* temp(const char* name) {
  const char* dir = getenv("TMPDIR");
  snprintf(tmp_path, sizeof tmp_path, "%s/sosgap_capi_%s", dir ? dir : "/tmp", name);
  return tmp_path;
}

static void balls(void) {
  sosgap_ball* b = NULL;
  uint32_t layers[8];
  size_t count = 0;
  CHECK(sosgap_ball_create("sl", 3, 2, 0, &b) == SOSGAP_OK);
  CHECK(sosgap_ball_size(b) == 121);
  CHECK(sosgap_ball_radius(b) == 2);
  CHECK(sosgap_ball_layers(b, NULL, 0, &count) == SOSGAP_E_BUFFER_TOO_SMALL && count == 3);
  CHECK(sosgap_ball_layers(b, layers, 8, &count) == SOSGAP_OK);
  CHECK(layers[0] == 1 && layers[1] == 12 && layers[2] == 108);

  char path[512];
  strcpy(path, temp("sl3.ball"));
  CHECK(sosgap_ball_save(b, path) == SOSGAP_OK);
  sosgap_ball* c = NULL;
  CHECK(sosgap_ball_load(path, &c) == SOSGAP_OK);
  CHECK(c && sosgap_ball_hash(c) == sosgap_ball_hash(b));
  sosgap_ball_free(c);
  sosgap_ball_free(b);
  remove(path);

  CHECK(sosgap_ball_create("saut", 3, 1, 0, &b) == SOSGAP_OK);
  CHECK(sosgap_ball_size(b) == 25);
  sosgap_ball_free(b);

  b = NULL;
  CHECK(sosgap_ball_create("sl", 1, 2, 0, &b) == SOSGAP_E_INVALID_FAMILY);
  CHECK(b == NULL);
  CHECK(strlen(sosgap_last_error()) > 0);
  CHECK(sosgap_ball_create("gl", 3, 2, 0, &b) != SOSGAP_OK);
  CHECK(sosgap_ball_create("sl", 3, 4, 100, &b) == SOSGAP_E_RESOURCE_LIMIT);
  CHECK(sosgap_ball_create("sl", 3, 2, 0, NULL) == SOSGAP_E_INVALID_ARGUMENT);
  CHECK(strcmp(sosgap_status_name(SOSGAP_E_RESOURCE_LIMIT), "") != 0);
}

static void elements(void) {
  sosgap_ball* b = NULL;
  sosgap_ball* small = NULL;
  sosgap_element *delta = NULL, *sq = NULL, *adj = NULL, *op = NULL, *x = NULL, *loaded = NULL, *d2 = NULL;
  CHECK(sosgap_ball_create("saut", 4, 2, 0, &b) == SOSGAP_OK);
  CHECK(sosgap_element_build(b, "delta", 4, NULL, &delta) == SOSGAP_OK);
  CHECK(sosgap_element_build(b, "sq", 4, NULL, &sq) == SOSGAP_OK);
  CHECK(sosgap_element_build(b, "adj", 4, NULL, &adj) == SOSGAP_OK);
  CHECK(sosgap_element_build(b, "op", 4, NULL, &op) == SOSGAP_OK);
  CHECK(sosgap_element_build(b, "adj_plus_k_op", 4, "3/2", &x) == SOSGAP_OK);
  CHECK(sosgap_element_support(delta) == 49);
  CHECK(sosgap_element_support(op) > 0);
  CHECK(sosgap_element_build(b, "nonsense", 4, NULL, &loaded) == SOSGAP_E_INVALID_ARGUMENT);

  char buf[512];
  size_t needed = 0;
  CHECK(sosgap_element_describe(delta, buf, 4, &needed) == SOSGAP_E_BUFFER_TOO_SMALL);
  CHECK(needed > 4);
  CHECK(sosgap_element_describe(delta, buf, sizeof buf, &needed) == SOSGAP_OK);
  CHECK(strstr(buf, "augmentation=0/1") != NULL);
  CHECK(strstr(buf, "star_invariant=1") != NULL);
  CHECK(strstr(buf, "radius=1") != NULL);

  char path[512];
  strcpy(path, temp("adj.elem"));
  CHECK(sosgap_element_save(x, path) == SOSGAP_OK);
  CHECK(sosgap_element_load(path, b, &loaded) == SOSGAP_OK);
  int equal = 0;
  CHECK(sosgap_element_equal(x, loaded, &equal) == SOSGAP_OK && equal == 1);
  CHECK(sosgap_element_equal(x, adj, &equal) == SOSGAP_OK && equal == 0);
  remove(path);

  CHECK(sosgap_element_mul(delta, delta, b, &d2) == SOSGAP_OK);
  CHECK(sosgap_element_support(d2) > sosgap_element_support(delta));

  CHECK(sosgap_ball_create("saut", 4, 1, 0, &small) == SOSGAP_OK);
  sosgap_element* bad = NULL;
  CHECK(sosgap_element_mul(delta, delta, small, &bad) != SOSGAP_OK);
  CHECK(bad == NULL);

  sosgap_element_free(delta);
  sosgap_element_free(sq);
  sosgap_element_free(adj);
  sosgap_element_free(op);
  sosgap_element_free(x);
  sosgap_element_free(loaded);
  sosgap_element_free(d2);
  sosgap_ball_free(small);
  sosgap_ball_free(b);
}

static void checks(void) {
  size_t needed = 0;
  int fails = -1;
  CHECK(sosgap_verify_identities("sl", 3, 4, 1, 1, NULL, 0, &needed, &fails) == SOSGAP_E_BUFFER_TOO_SMALL);
  CHECK(needed > 0);
  char* text = malloc(needed);
  CHECK(sosgap_verify_identities("sl", 3, 4, 1, 1, text, needed, &needed, &fails) == SOSGAP_OK);
  CHECK(fails == 0);
  free(text);

  int total = 0, exact = 0;
  CHECK(sosgap_order_unit_witnesses("sl", 3, &total, &exact) == SOSGAP_OK);
  CHECK(total == 12 + 144 && exact == total);

  char buf[128];
  const char* units[] = {"2", "4", "16", "16"};
  const int radii[] = {1, 2, 3, 4};
  for (int i = 0; i < 4; ++i) {
    CHECK(sosgap_order_unit_bound(radii[i], buf, sizeof buf, &needed) == SOSGAP_OK);
    CHECK(strcmp(buf, units[i]) == 0);
  }
  CHECK(sosgap_kazhdan_constant("1", "sl", 3, buf, sizeof buf, &needed) == SOSGAP_OK);
  CHECK(strcmp(buf, "0.40824") == 0);
  CHECK(sosgap_kazhdan_constant("abc", "sl", 3, buf, sizeof buf, &needed) == SOSGAP_E_INVALID_ARGUMENT);

  double t1 = 0, t2 = 0;
  CHECK(sosgap_mixing_bound(24, "1/10", 10.0, 0.01, &t1) == SOSGAP_OK);
  CHECK(sosgap_mixing_bound(24, "1/5", 10.0, 0.01, &t2) == SOSGAP_OK);
  CHECK(t1 > 0 && t1 > 1.99 * t2 && t1 < 2.01 * t2);
}

static void solve_and_certify(void) {
  sosgap_options o;
  sosgap_options_init(&o);
  o.family = "sl";
  o.rank = 2;
  o.radius = 1;
  o.lambda = "1/10";
  o.max_iters = 2000;
  o.config_hash = 42;

  char solution[512], cert[512];
  strcpy(solution, temp("sl2.sol"));
  sosgap_solve_report r;
  memset(&r, 0, sizeof r);
  CHECK(sosgap_solve(&o, solution, &r) == SOSGAP_OK);
  CHECK(r.dimension > 0 && r.constraints > 0);
  CHECK(r.iterations > 0);
  CHECK(strlen(sosgap_solve_status_name(r.status)) > 0);

  sosgap_certificate* c = NULL;
  CHECK(sosgap_certify_solution(solution, NULL, 40, 42, &c) == SOSGAP_OK);
  CHECK(c != NULL);
  if (!c) return;
  CHECK(sosgap_certificate_valid(c) == 0);
  char buf[4096];
  size_t needed = 0;
  CHECK(sosgap_certificate_field(c, "lambda", buf, sizeof buf, &needed) == SOSGAP_OK);
  CHECK(strcmp(buf, "1/10") == 0);
  CHECK(sosgap_certificate_field(c, "statement", buf, sizeof buf, &needed) == SOSGAP_OK);
  CHECK(strncmp(buf, "no claim", 8) == 0);
  CHECK(sosgap_certificate_field(c, "bogus", buf, sizeof buf, &needed) == SOSGAP_E_INVALID_ARGUMENT);

  strcpy(cert, temp("sl2.cert"));
  CHECK(sosgap_certificate_save(c, cert) == SOSGAP_OK);
  sosgap_certificate* d = NULL;
  CHECK(sosgap_certificate_load(cert, &d) == SOSGAP_OK);
  CHECK(d && sosgap_certificate_gap(d) == sosgap_certificate_gap(c));
  int ok = 1;
  CHECK(sosgap_verify_certificate(cert, 1, &ok, NULL, 0, &needed) == SOSGAP_OK);
  CHECK(ok == 0);

  sosgap_certificate_free(d);
  sosgap_certificate_free(c);
  remove(solution);
  remove(cert);

  o.rank = 1;
  CHECK(sosgap_solve(&o, solution, &r) == SOSGAP_E_INVALID_FAMILY);
  o.rank = 2;
  o.target = "adj+xop";
  CHECK(sosgap_solve(&o, solution, &r) == SOSGAP_E_INVALID_ARGUMENT);
}

int main(void) {
  printf("%s\n", sosgap_version());
  sosgap_set_log(count_log, &log_lines);
  sosgap_set_threads(2);
  CHECK(sosgap_threads() == 2);
  sosgap_set_threads(1);
  balls();
  elements();
  checks();
  solve_and_certify();
  CHECK(log_lines > 0);
  sosgap_set_log(NULL, NULL);
  if (failures) {
    printf("%d checks failed\n", failures);
    return 1;
  }
  printf("all checks passed\n");
  return 0;
}

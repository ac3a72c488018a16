#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "bohmdyn/bohmdyn.h"

namespace {

struct Model {
  bohmdyn_model* ptr = nullptr;
  explicit Model(const char* id) { REQUIRE(bohmdyn_model_create(id, &ptr) == BOHMDYN_OK); }
  ~Model() { bohmdyn_model_destroy(ptr); }
};

}  // namespace

TEST_CASE("model handles") {
  CHECK(std::string(bohmdyn_version()).size() > 0);
  Model hooke("hooke");
  bohmdyn_model_info info{};
  REQUIRE(bohmdyn_model_info_get(hooke.ptr, &info) == BOHMDYN_OK);
  CHECK(info.n == 2);
  CHECK(info.d == 3);
  CHECK(info.stationary == 1);
  CHECK(info.energy == 2.0);
  CHECK(info.real_valued == 1);

  char* label = nullptr;
  REQUIRE(bohmdyn_model_label(hooke.ptr, &label) == BOHMDYN_OK);
  CHECK(std::string(label) == "hooke");
  bohmdyn_string_free(label);

  bohmdyn_model* bad = nullptr;
  CHECK(bohmdyn_model_create("ho1d:n=99", &bad) == BOHMDYN_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(std::strlen(bohmdyn_last_error()) > 0);
  CHECK(bohmdyn_model_create(nullptr, &bad) == BOHMDYN_ERR_INVALID_ARGUMENT);
  bohmdyn_model_destroy(nullptr);
}

TEST_CASE("field evaluation") {
  Model ho("ho1d:n=0,omega=1");
  const double x0 = 0.0;
  double rho = 0.0;
  REQUIRE(bohmdyn_density(ho.ptr, &x0, 1, 0.0, &rho) == BOHMDYN_OK);
  CHECK(rho == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-14));
  double p = 0.0;
  REQUIRE(bohmdyn_pressure(ho.ptr, &x0, 1, 0.0, 0, &p) == BOHMDYN_OK);
  CHECK(p == doctest::Approx(0.282094791773878143).epsilon(1e-13));

  const double x = 1.3;
  double q = 0, ku = 0, comp = 0;
  REQUIRE(bohmdyn_quantum_potential(ho.ptr, &x, 1, 0.0, 1e-10, &q, &ku, &comp) == BOHMDYN_OK);
  CHECK(q == doctest::Approx(0.5 * (1.0 - x * x)).epsilon(1e-12));
  CHECK(ku + comp == doctest::Approx(q).epsilon(1e-12));

  bohmdyn_budget b{};
  REQUIRE(bohmdyn_energy_budget(ho.ptr, &x, 1, 0.0, 1, 1e-10, &b) == BOHMDYN_OK);
  CHECK(std::abs(b.residual) < 1e-12);

  double u = 0.0;
  REQUIRE(bohmdyn_velocity(ho.ptr, &x, 1, 0.0, BOHMDYN_MODE_AUGMENTED_PLUS, 1e-10, &u, 1) == BOHMDYN_OK);
  CHECK(u == doctest::Approx(-x).epsilon(1e-12));
  CHECK(bohmdyn_velocity(ho.ptr, &x, 1, 0.0, BOHMDYN_MODE_BOHM, 1e-10, &u, 2) == BOHMDYN_ERR_INVALID_ARGUMENT);

  const double pair[2] = {1.0, 2.0};
  CHECK(bohmdyn_density(ho.ptr, pair, 2, 0.0, &rho) == BOHMDYN_ERR_USAGE);

  Model h("hydrogen:1s,Z=1");
  const double origin[3] = {0, 0, 0};
  CHECK(bohmdyn_quantum_potential(h.ptr, origin, 3, 0.0, 1e-10, &q, &ku, &comp) == BOHMDYN_ERR_SINGULARITY);

  Model node("ho1d:n=1,omega=1");
  CHECK(bohmdyn_velocity(node.ptr, &x0, 1, 0.0, BOHMDYN_MODE_BOHM, 1e-10, &u, 1) == BOHMDYN_ERR_NODE);
}

TEST_CASE("trajectory endpoint") {
  Model ho("ho1d:n=0,omega=1");
  const double x = 1.0;
  double end = 0.0;
  bohmdyn_termination term = BOHMDYN_STEP_LIMIT;
  REQUIRE(bohmdyn_trajectory_end(ho.ptr, &x, 1, 0.0, 1.0, BOHMDYN_MODE_AUGMENTED_PLUS, 1e-3, &end, &term) == BOHMDYN_OK);
  CHECK(term == BOHMDYN_COMPLETED);
  CHECK(end == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));

  Model node("ho1d:n=1,omega=1");
  const double start = 0.5;
  REQUIRE(bohmdyn_trajectory_end(node.ptr, &start, 1, 0.0, 1.0, BOHMDYN_MODE_AUGMENTED_MINUS, 1e-3, &end, &term) ==
          BOHMDYN_OK);
  CHECK(term == BOHMDYN_NODE_ABORT);
}

TEST_CASE("job runner") {
  bohmdyn_job_request req{};
  req.command = "catalog";
  req.json = 1;
  int code = -1;
  char* report = nullptr;
  char* errors = nullptr;
  REQUIRE(bohmdyn_job_run(&req, &code, &report, &errors) == BOHMDYN_OK);
  CHECK(code == 0);
  CHECK(std::string(report).find("\"hooke\"") != std::string::npos);
  bohmdyn_string_free(report);
  bohmdyn_string_free(errors);

  req.command = "verify";
  req.state_id = "nonsense";
  REQUIRE(bohmdyn_job_run(&req, &code, &report, &errors) == BOHMDYN_OK);
  CHECK(code == 2);
  CHECK(std::string(errors).find("nonsense") != std::string::npos);
  bohmdyn_string_free(report);
  bohmdyn_string_free(errors);
}

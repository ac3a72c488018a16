#include <doctest.h>

#include <cmath>

#include "bohmdyn/errors.hpp"
#include "bohmdyn/fields.hpp"
#include "bohmdyn/probes.hpp"
#include "bohmdyn/states.hpp"

using namespace bohmdyn;

namespace {

ParticleConfig one(double x) { return ParticleConfig(1, 1, {x}); }

WavefunctionModel ho(int n) { return make_harmonic_oscillator_1d(n, 1.0); }

WavefunctionModel ho01() { return make_superposition({{1.0, ho(0)}, {1.0, ho(1)}}); }

}  // namespace

TEST_CASE("hydrogen 1s: frozen Bohm field, unit osmotic speed") {
  const auto s1 = make_hydrogenlike(HydrogenOrbital::s1, 1.0);
  const ParticleConfig c(1, 3, {0.3, -1.2, 2.0});
  const auto v = bohm_velocity(s1, c, 0.7, 0);
  for (double x : v) CHECK(x == 0.0);
  const auto up = osmotic_velocity(s1, c, 0.0, 0, Sign::plus);
  const auto um = osmotic_velocity(s1, c, 0.0, 0, Sign::minus);
  const double r = std::sqrt(0.09 + 1.44 + 4.0);
  for (int k = 0; k < 3; ++k) {
    CHECK(up[k] == doctest::Approx(-c.coords()[k] / r).epsilon(1e-14));
    CHECK(um[k] == -up[k]);
  }
}

TEST_CASE("oscillator field values") {
  const auto ho0 = ho(0);
  CHECK(osmotic_velocity(ho0, one(0.7), 0.0, 0, Sign::plus)[0] == doctest::Approx(-0.7).epsilon(1e-15));
  // Q = −½(x² − 1)
  CHECK(quantum_potential(ho0, one(0.5), 0.0) == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(pressure(ho0, one(0.0), 0.0, 0) == doctest::Approx(0.282094791773878143).epsilon(1e-14));
  CHECK(density(ho0, one(0.0), 3.0) == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-15));
}

TEST_CASE("Q equals kinetic_u plus compression") {
  for (const auto& m : {ho(0), ho(3), make_hydrogenlike(HydrogenOrbital::s2, 1.0), make_hookes_atom(), ho01(),
                        make_free_gaussian_packet(1.0, 2.0)}) {
    for (const auto& p : probe_points(m, 40, 1e-8, m.is_stationary() ? 0.0 : 2.0)) {
      const double q = quantum_potential(m, p.config, p.t);
      const auto parts = quantum_potential_decomposed(m, p.config, p.t);
      CHECK(std::abs(q - parts.kinetic_u - parts.compression) <= 1e-9 * (1.0 + std::abs(q)));
    }
  }
}

TEST_CASE("stationary budget closes on the eigenvalue") {
  const auto hooke = make_hookes_atom();
  for (const auto& p : probe_points(hooke, 40, 1e-8)) {
    const auto b = stationary_budget(hooke, p.config);
    CHECK(b.minus_dS_dt == 2.0);
    CHECK(std::abs(b.residual) <= 1e-8 * 3.0);
  }
  CHECK_THROWS_AS(stationary_budget(ho01(), one(0.1)), UsageError);
}

TEST_CASE("dynamic budget closes on -dS/dt") {
  for (const auto& m : {ho01(), make_free_gaussian_packet(1.0, 2.0)}) {
    for (const auto& p : probe_points(m, 40, 1e-8, 3.0)) {
      const auto b = energy_budget(m, p.config, p.t);
      CHECK(std::abs(b.residual) <= 1e-9 * b.magnitude());
      CHECK(b.total() - b.minus_dS_dt == doctest::Approx(b.residual));
    }
  }
}

TEST_CASE("continuity residual is at finite-difference level") {
  for (const auto& m : {ho01(), make_free_gaussian_packet(1.0, 2.0)}) {
    for (const auto& p : probe_points(m, 30, 1e-8, 3.0)) CHECK(std::abs(continuity_residual(m, p.config, p.t)) < 1e-10);
  }
  CHECK(continuity_residual(ho(2), one(0.4), 1.0) == 0.0);
}

TEST_CASE("nodes") {
  const auto ho1 = ho(1);
  CHECK_THROWS_AS(bohm_velocity(ho1, one(0.0), 0.0, 0), NodeError);
  CHECK_THROWS_AS(quantum_potential(ho1, one(1e-6), 0.0), NodeError);
  CHECK(std::isfinite(pressure(ho1, one(0.0), 0.0, 0)));
  const auto s = sample_fields(ho1, one(0.0), 0.0);
  CHECK(s.node_flag);
  CHECK_FALSE(s.v.has_value());
  CHECK(s.pressure.size() == 1);
  const auto loose = sample_fields(ho1, one(1e-3), 0.0, FieldOptions{1e-12});
  CHECK_FALSE(loose.node_flag);
  CHECK(loose.budget.has_value());
}

TEST_CASE("finite differences agree with the analytic jet") {
  const auto g = make_free_gaussian_packet(1.0, 2.0);
  const auto m = derivative_mismatch(g, one(0.6), 0.8, 1e-4);
  CHECK(m.gradient < 1e-7);
  CHECK(m.laplacian < 1e-6);
  CHECK(fd_gradient_error(g, one(0.6), 0.8, 0, 1e-3) < 1e-6);
  CHECK(fd_laplacian_error(g, one(0.6), 0.8, 0, 1e-3) < 1e-5);
  CHECK_THROWS_AS(fd_gradient(g, one(0.0), 0.0, 0, 0.0), UsageError);
  CHECK_THROWS_AS(fd_gradient(g, one(0.0), 0.0, 1, 1e-3), UsageError);
}

TEST_CASE("sample_fields reports every quantity off nodes") {
  const auto s = sample_fields(make_free_gaussian_packet(1.0, 2.0), one(0.5), 0.5);
  CHECK_FALSE(s.node_flag);
  REQUIRE(s.v.has_value());
  CHECK((*s.u_minus)[0] == -(*s.u_plus)[0]);
  CHECK((*s.grad_S)[0] == doctest::Approx((*s.v)[0]));
  CHECK(*s.Q == doctest::Approx(*s.kinetic_u + *s.compression));
  CHECK(s.budget->minus_dS_dt == doctest::Approx(-*s.dS_dt));
}

#include "bohmdyn/bohmdyn.h"

#include <cstring>
#include <string>

#include "bohmdyn/catalog.hpp"
#include "bohmdyn/dynamics.hpp"
#include "bohmdyn/errors.hpp"
#include "bohmdyn/fields.hpp"
#include "bohmdyn/jobs.hpp"
#include "bohmdyn/states.hpp"

struct bohmdyn_model {
  bohmdyn::WavefunctionModel model;
};

namespace {

thread_local std::string last_error;

bohmdyn_status fail(bohmdyn_status status, const std::string& message) {
  last_error = message;
  return status;
}

bohmdyn_status status_of(bohmdyn::ErrorKind kind) {
  switch (kind) {
    case bohmdyn::ErrorKind::domain: return BOHMDYN_ERR_DOMAIN;
    case bohmdyn::ErrorKind::singularity: return BOHMDYN_ERR_SINGULARITY;
    case bohmdyn::ErrorKind::node: return BOHMDYN_ERR_NODE;
    case bohmdyn::ErrorKind::usage: return BOHMDYN_ERR_USAGE;
    case bohmdyn::ErrorKind::config: return BOHMDYN_ERR_CONFIG;
    case bohmdyn::ErrorKind::io: return BOHMDYN_ERR_IO;
  }
  return BOHMDYN_ERR_INTERNAL;
}

template <class F>
bohmdyn_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return BOHMDYN_OK;
  } catch (const bohmdyn::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::exception& e) {
    return fail(BOHMDYN_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BOHMDYN_ERR_INTERNAL, "unknown error");
  }
}

char* duplicate(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bohmdyn::ParticleConfig make_config(const bohmdyn_model* model, const double* coords, size_t count) {
  const std::size_t m = model->model.particles() * model->model.dim();
  if (count != m) {
    throw bohmdyn::UsageError("expected " + std::to_string(m) + " coordinates, got " + std::to_string(count));
  }
  return model->model.make_config(std::vector<double>(coords, coords + count));
}

bohmdyn::VelocityMode to_mode(bohmdyn_velocity_mode mode) {
  switch (mode) {
    case BOHMDYN_MODE_BOHM: return bohmdyn::VelocityMode::bohm();
    case BOHMDYN_MODE_AUGMENTED_PLUS: return bohmdyn::VelocityMode::augmented(bohmdyn::Sign::plus);
    case BOHMDYN_MODE_AUGMENTED_MINUS: return bohmdyn::VelocityMode::augmented(bohmdyn::Sign::minus);
  }
  throw bohmdyn::UsageError("unknown velocity mode");
}

#define BOHMDYN_REQUIRE(cond) \
  if (!(cond)) return fail(BOHMDYN_ERR_INVALID_ARGUMENT, "invalid argument: " #cond)

}  // namespace

extern "C" {

const char* bohmdyn_version(void) { return "1.0.0"; }

const char* bohmdyn_last_error(void) { return last_error.c_str(); }

void bohmdyn_string_free(char* text) { delete[] text; }

bohmdyn_status bohmdyn_model_create(const char* state_id, bohmdyn_model** out) {
  BOHMDYN_REQUIRE(state_id && out);
  *out = nullptr;
  return guarded([&] { *out = new bohmdyn_model{bohmdyn::parse_state_id(state_id)}; });
}

void bohmdyn_model_destroy(bohmdyn_model* model) { delete model; }

bohmdyn_status bohmdyn_model_info_get(const bohmdyn_model* model, bohmdyn_model_info* out) {
  BOHMDYN_REQUIRE(model && out);
  const auto& m = model->model;
  out->n = m.particles();
  out->d = m.dim();
  out->mass = m.mass();
  out->hbar = m.hbar();
  out->stationary = m.is_stationary();
  out->energy = m.energy().value_or(0.0);
  out->real_valued = m.is_real_valued();
  out->normalizable = m.is_normalizable();
  last_error.clear();
  return BOHMDYN_OK;
}

bohmdyn_status bohmdyn_model_label(const bohmdyn_model* model, char** out) {
  BOHMDYN_REQUIRE(model && out);
  return guarded([&] { *out = duplicate(model->model.label()); });
}

bohmdyn_status bohmdyn_density(const bohmdyn_model* model, const double* coords, size_t count, double t,
                               double* out) {
  BOHMDYN_REQUIRE(model && coords && out);
  return guarded([&] { *out = bohmdyn::density(model->model, make_config(model, coords, count), t); });
}

bohmdyn_status bohmdyn_potential_energy(const bohmdyn_model* model, const double* coords, size_t count,
                                        double* out) {
  BOHMDYN_REQUIRE(model && coords && out);
  return guarded([&] { *out = bohmdyn::potential_energy(model->model, make_config(model, coords, count)); });
}

bohmdyn_status bohmdyn_pressure(const bohmdyn_model* model, const double* coords, size_t count, double t,
                                size_t particle, double* out) {
  BOHMDYN_REQUIRE(model && coords && out);
  return guarded([&] { *out = bohmdyn::pressure(model->model, make_config(model, coords, count), t, particle); });
}

bohmdyn_status bohmdyn_velocity(const bohmdyn_model* model, const double* coords, size_t count, double t,
                                bohmdyn_velocity_mode mode, double node_epsilon, double* out, size_t out_count) {
  BOHMDYN_REQUIRE(model && coords && out);
  BOHMDYN_REQUIRE(out_count == count);
  return guarded([&] {
    const auto v = bohmdyn::total_velocity(model->model, make_config(model, coords, count), t, to_mode(mode),
                                           bohmdyn::FieldOptions{node_epsilon});
    std::copy(v.begin(), v.end(), out);
  });
}

bohmdyn_status bohmdyn_quantum_potential(const bohmdyn_model* model, const double* coords, size_t count, double t,
                                         double node_epsilon, double* q, double* kinetic_u, double* compression) {
  BOHMDYN_REQUIRE(model && coords && q && kinetic_u && compression);
  return guarded([&] {
    const auto config = make_config(model, coords, count);
    const bohmdyn::FieldOptions options{node_epsilon};
    const double value = bohmdyn::quantum_potential(model->model, config, t, options);
    const auto parts = bohmdyn::quantum_potential_decomposed(model->model, config, t, options);
    *q = value;
    *kinetic_u = parts.kinetic_u;
    *compression = parts.compression;
  });
}

bohmdyn_status bohmdyn_energy_budget(const bohmdyn_model* model, const double* coords, size_t count, double t,
                                     int stationary, double node_epsilon, bohmdyn_budget* out) {
  BOHMDYN_REQUIRE(model && coords && out);
  return guarded([&] {
    const auto config = make_config(model, coords, count);
    const bohmdyn::FieldOptions options{node_epsilon};
    const auto b = stationary ? bohmdyn::stationary_budget(model->model, config, options)
                              : bohmdyn::energy_budget(model->model, config, t, options);
    *out = {b.kinetic_v, b.kinetic_u, b.compression, b.potential_U, b.minus_dS_dt, b.residual};
  });
}

bohmdyn_status bohmdyn_trajectory_end(const bohmdyn_model* model, const double* coords, size_t count, double t0,
                                      double t1, bohmdyn_velocity_mode mode, double dt, double* out,
                                      bohmdyn_termination* termination) {
  BOHMDYN_REQUIRE(model && coords && out && termination);
  return guarded([&] {
    bohmdyn::IntegratorSettings settings;
    settings.dt = dt;
    settings.record_budgets = false;
    const auto end = bohmdyn::advance(model->model, make_config(model, coords, count), t0, t1, to_mode(mode), settings);
    std::copy(end.config.coords().begin(), end.config.coords().end(), out);
    *termination = static_cast<bohmdyn_termination>(end.termination);
  });
}

bohmdyn_status bohmdyn_job_run(const bohmdyn_job_request* request, int* exit_code, char** report, char** errors) {
  BOHMDYN_REQUIRE(request && request->command && exit_code && report && errors);
  return guarded([&] {
    bohmdyn::JobRequest job;
    job.command = request->command;
    if (request->state_id) job.state_id = request->state_id;
    if (request->config_path) job.config_path = request->config_path;
    if (request->output_dir) job.output_dir = request->output_dir;
    if (request->has_seed) job.seed = request->seed;
    job.json = request->json != 0;
    const auto result = bohmdyn::run_job(job);
    *exit_code = result.exit_code;
    *report = duplicate(result.report);
    *errors = duplicate(result.errors);
  });
}

}  // extern "C"

#include "bohmdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "bohmdyn/errors.hpp"

namespace bohmdyn {

namespace {

struct StageField {
  std::vector<double> velocity;
  double osmotic_speed = 0.0;  // |u+| over the whole configuration
};

StageField evaluate_stage(const WavefunctionModel& model, const ParticleConfig& config, double t,
                          const VelocityMode& mode, double node_epsilon) {
  const auto jet = model.evaluate(config, t);
  const auto ld = detail::log_derivatives(jet, node_epsilon, model.label());
  const double scale = model.hbar() / model.mass();
  StageField f;
  f.velocity.resize(ld.grad.size());
  double u2 = 0.0;
  for (std::size_t j = 0; j < ld.grad.size(); ++j) {
    const double v = scale * ld.grad[j].imag();
    const double u = scale * ld.grad[j].real();
    u2 += u * u;
    switch (mode.kind()) {
      case VelocityMode::Kind::bohm:
        f.velocity[j] = v;
        break;
      case VelocityMode::Kind::augmented:
        f.velocity[j] = v + (*mode.sign() == Sign::plus ? u : -u);
        break;
    }
  }
  f.osmotic_speed = std::sqrt(u2);
  return f;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

enum class StepOutcome { accepted, rejected, node };

// One RK4 step of size h. Rejects when a stage is too fast or would jump
// across a node; reports `node` when a stage lands below node_epsilon.
StepOutcome rk4_step(const WavefunctionModel& model, ParticleConfig& x, double t, double h,
                     const VelocityMode& mode, const IntegratorSettings& s) {
  const std::size_t m = x.coords().size();
  std::vector<double> k[4];
  ParticleConfig stage = x;
  const double offsets[4] = {0.0, 0.5, 0.5, 1.0};
  for (int q = 0; q < 4; ++q) {
    if (q > 0) {
      for (std::size_t j = 0; j < m; ++j) stage.coords()[j] = x.coords()[j] + offsets[q] * h * k[q - 1][j];
    }
    StageField f;
    try {
      f = evaluate_stage(model, stage, t + offsets[q] * h, mode, s.node_epsilon);
    } catch (const NodeError&) {
      return StepOutcome::node;
    } catch (const SingularityError&) {
      return StepOutcome::node;
    }
    const double speed = norm(f.velocity);
    if (speed > s.speed_ceiling) return StepOutcome::rejected;
    // Υ/|∇Υ| = ħ/(2m|u|) estimates the distance to the nearest node.
    if (f.osmotic_speed > 0.0 &&
        h * speed > s.node_guard * model.hbar() / (2.0 * model.mass() * f.osmotic_speed)) {
      return StepOutcome::rejected;
    }
    k[q] = std::move(f.velocity);
  }
  for (std::size_t j = 0; j < m; ++j) {
    x.coords()[j] += h / 6.0 * (k[0][j] + 2.0 * k[1][j] + 2.0 * k[2][j] + k[3][j]);
  }
  return StepOutcome::accepted;
}

void validate(const IntegratorSettings& s, double t0, double t1) {
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) throw UsageError("integrator dt must be positive");
  if (s.max_steps < 1) throw UsageError("integrator max_steps must be at least 1");
  if (s.store_every < 1) throw UsageError("integrator store_every must be at least 1");
  if (!(s.speed_ceiling > 0.0)) throw UsageError("integrator speed_ceiling must be positive");
  if (!(s.node_epsilon >= 0.0)) throw UsageError("integrator node_epsilon must be non-negative");
  if (!(t1 > t0)) throw UsageError("integration needs t1 > t0");
}

// Drives rk4_step from t0 to t1; `on_step` sees every accepted step.
EndState drive(const WavefunctionModel& model, const ParticleConfig& x0, double t0, double t1,
               const VelocityMode& mode, const IntegratorSettings& s,
               const std::function<void(const ParticleConfig&, double, std::size_t, bool)>& on_step) {
  validate(s, t0, t1);
  if (mode.kind() == VelocityMode::Kind::augmented && !mode.sign()) throw UsageError("augmented mode needs a sign");
  // The start must be off nodes; this raises NodeError/SingularityError otherwise.
  evaluate_stage(model, x0, t0, mode, s.node_epsilon);

  EndState state{x0, t0, Termination::completed, 0};
  // Nominal grid t0 + k·dt; halved sub-steps refine within one grid interval.
  const auto total_steps = static_cast<std::size_t>(std::ceil((t1 - t0) / s.dt - 1e-9));
  for (std::size_t k = 0; k < total_steps; ++k) {
    const double target = k + 1 == total_steps ? t1 : t0 + static_cast<double>(k + 1) * s.dt;
    while (state.t < target) {
      if (state.steps >= s.max_steps) {
        state.termination = Termination::step_limit;
        return state;
      }
      double h = target - state.t;
      std::size_t halvings = 0;
      StepOutcome outcome;
      ParticleConfig trial = state.config;
      while (true) {
        trial = state.config;
        outcome = rk4_step(model, trial, state.t, h, mode, s);
        if (outcome == StepOutcome::accepted || halvings == s.max_halvings) break;
        h *= 0.5;
        ++halvings;
      }
      if (outcome != StepOutcome::accepted) {
        state.termination = Termination::node_abort;
        return state;
      }
      state.config = std::move(trial);
      state.t = halvings == 0 ? target : state.t + h;
      ++state.steps;
      if (on_step) on_step(state.config, state.t, state.steps, state.t == t1);
    }
  }
  return state;
}

}  // namespace

const char* to_string(Termination termination) {
  switch (termination) {
    case Termination::completed:
      return "completed";
    case Termination::node_abort:
      return "node_abort";
    case Termination::step_limit:
      return "step_limit";
  }
  return "unknown";
}

std::vector<double> total_velocity(const WavefunctionModel& model, const ParticleConfig& config, double t,
                                   const VelocityMode& mode, const FieldOptions& options) {
  if (mode.kind() == VelocityMode::Kind::augmented && !mode.sign()) throw UsageError("augmented mode needs a sign");
  return evaluate_stage(model, config, t, mode, options.node_epsilon).velocity;
}

Trajectory integrate_trajectory(const WavefunctionModel& model, const ParticleConfig& x0, double t0, double t1,
                                const VelocityMode& mode, const IntegratorSettings& settings) {
  Trajectory traj;
  if (model.is_stationary()) traj.reference_energy = model.energy();
  const FieldOptions options{settings.node_epsilon};

  auto record = [&](const ParticleConfig& x, double t) {
    TrajectoryPoint p;
    p.t = t;
    p.config = x;
    p.velocity = total_velocity(model, x, t, mode, options);
    if (settings.record_budgets) p.budget = energy_budget(model, x, t, options);
    traj.points.push_back(std::move(p));
  };

  validate(settings, t0, t1);
  record(x0, t0);
  const EndState end = drive(model, x0, t0, t1, mode, settings,
                             [&](const ParticleConfig& x, double t, std::size_t step, bool last) {
                               if (last || step % settings.store_every == 0) record(x, t);
                             });
  traj.termination = end.termination;
  if (end.termination != Termination::completed && traj.points.back().t != end.t) {
    // Keep the last good configuration so the abort point is visible.
    try {
      record(end.config, end.t);
    } catch (const Error&) {
    }
  }
  return traj;
}

EndState advance(const WavefunctionModel& model, const ParticleConfig& x0, double t0, double t1,
                 const VelocityMode& mode, const IntegratorSettings& settings) {
  return drive(model, x0, t0, t1, mode, settings, nullptr);
}

double budget_drift(const Trajectory& trajectory) {
  if (!trajectory.reference_energy) throw UsageError("budget_drift needs a trajectory of a stationary state");
  double drift = 0.0;
  for (const auto& p : trajectory.points) {
    if (!p.budget) throw UsageError("budget_drift needs trajectories recorded with budgets");
    drift = std::max(drift, std::abs(p.budget->total() - *trajectory.reference_energy));
  }
  return drift;
}

}  // namespace bohmdyn

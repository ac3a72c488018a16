#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bohmdyn/fields.hpp"
#include "bohmdyn/particle_config.hpp"
#include "bohmdyn/states.hpp"

namespace bohmdyn {

/// Which velocity field moves the particles: the Bohm field v_i, or the
/// augmented field v_i + u_i± with an explicit sign.
class VelocityMode {
 public:
  enum class Kind { bohm, augmented };

  static VelocityMode bohm() { return VelocityMode(Kind::bohm, std::nullopt); }
  static VelocityMode augmented(Sign sign) { return VelocityMode(Kind::augmented, sign); }

  Kind kind() const noexcept { return kind_; }
  std::optional<Sign> sign() const noexcept { return sign_; }

  bool operator==(const VelocityMode&) const = default;

 private:
  VelocityMode(Kind kind, std::optional<Sign> sign) : kind_(kind), sign_(sign) {}
  Kind kind_;
  std::optional<Sign> sign_;
};

enum class Scheme { rk4 };

struct IntegratorSettings {
  double dt = 1e-3;
  Scheme scheme = Scheme::rk4;
  double node_epsilon = 1e-10;
  std::size_t max_steps = 10'000'000;
  /// A step whose stage speeds exceed this is rejected and halved.
  double speed_ceiling = 1e3;
  /// A step is also rejected when it would move a particle further than this
  /// fraction of the node-distance estimate Υ/|∇Υ|.
  double node_guard = 0.25;
  std::size_t max_halvings = 20;
  std::size_t store_every = 1;
  bool record_budgets = true;
};

enum class Termination { completed, node_abort, step_limit };

struct TrajectoryPoint {
  double t = 0.0;
  ParticleConfig config;
  std::vector<double> velocity;  // n*d, particle-major
  std::optional<EnergyBudget> budget;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  Termination termination = Termination::completed;
  /// Ē of the integrated model, when it is stationary.
  std::optional<double> reference_energy;
};

/// Final state of a transport run that keeps no history.
struct EndState {
  ParticleConfig config;
  double t = 0.0;
  Termination termination = Termination::completed;
  std::size_t steps = 0;
};

/// bohm → v_i; augmented → v_i + u_i(sign). n*d entries, particle-major.
std::vector<double> total_velocity(const WavefunctionModel& model, const ParticleConfig& config, double t,
                                   const VelocityMode& mode, const FieldOptions& options = {});

/// Fixed-step RK4 of dx/dt = total_velocity from t0 to t1. Stops with
/// node_abort instead of evaluating a field at Υ < node_epsilon.
Trajectory integrate_trajectory(const WavefunctionModel& model, const ParticleConfig& x0, double t0, double t1,
                                const VelocityMode& mode, const IntegratorSettings& settings);

/// Same stepping as integrate_trajectory without storing the path.
EndState advance(const WavefunctionModel& model, const ParticleConfig& x0, double t0, double t1,
                 const VelocityMode& mode, const IntegratorSettings& settings);

/// max over stored points of |budget total − Ē|.
double budget_drift(const Trajectory& trajectory);

const char* to_string(Termination termination);

}  // namespace bohmdyn

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bohmdyn/particle_config.hpp"
#include "bohmdyn/states.hpp"

namespace bohmdyn {

enum class Sign { plus, minus };

struct FieldOptions {
  /// Below this density every Υ⁻¹-bearing quantity is a NodeError.
  double node_epsilon = 1e-10;
};

/// Term-by-term energy balance at one (x, t).
struct EnergyBudget {
  double kinetic_v = 0.0;    // Σ_i ½m v_i²
  double kinetic_u = 0.0;    // Σ_i ½m u_i²
  double compression = 0.0;  // Υ⁻¹ Σ_i P_i
  double potential_U = 0.0;
  double minus_dS_dt = 0.0;  // −∂S/∂t, or Ē for the stationary budget
  double residual = 0.0;     // total() − minus_dS_dt

  double total() const { return kinetic_v + kinetic_u + compression + potential_U; }
  /// Σ|terms|, the scale residual tolerances are measured against.
  double magnitude() const;
};

/// Every field quantity at one configuration and time. Members that need
/// Υ⁻¹ are empty when node_flag is set.
struct FieldSample {
  ParticleConfig config;
  double t = 0.0;
  double upsilon = 0.0;
  bool node_flag = false;
  std::vector<double> pressure;  // P_i, n entries; defined even at nodes

  // n*d entries, particle-major
  std::optional<std::vector<double>> grad_S;
  std::optional<std::vector<double>> v;
  std::optional<std::vector<double>> u_plus;
  std::optional<std::vector<double>> u_minus;
  std::optional<double> dS_dt;
  std::optional<double> Q;
  std::optional<double> kinetic_u;
  std::optional<double> compression;
  std::optional<EnergyBudget> budget;
};

struct QuantumPotentialParts {
  double kinetic_u = 0.0;
  double compression = 0.0;
};

/// Υ = |Ψ|².
double density(const WavefunctionModel& model, const ParticleConfig& config, double t);

/// u_i± = ±(ħ/m) Re(∇_iΨ/Ψ), i.e. ±(ħ/2m) ∇_iΥ/Υ.
std::vector<double> osmotic_velocity(const WavefunctionModel& model, const ParticleConfig& config, double t,
                                     std::size_t i, Sign sign, const FieldOptions& options = {});

/// v_i = ∇_iS/m = (ħ/m) Im(∇_iΨ/Ψ).
std::vector<double> bohm_velocity(const WavefunctionModel& model, const ParticleConfig& config, double t,
                                  std::size_t i, const FieldOptions& options = {});

/// P_i = −(ħ²/4m) ∇_i²Υ with ∇_i²Υ = 2Re(Ψ*∇_i²Ψ) + 2|∇_iΨ|². No division, so no node check.
double pressure(const WavefunctionModel& model, const ParticleConfig& config, double t, std::size_t i);

/// Q = −(ħ²/2m) Σ_i ∇_i²R / R with R = |Ψ|, assembled from Re(∇²Ψ/Ψ) + |Im(∇Ψ/Ψ)|².
double quantum_potential(const WavefunctionModel& model, const ParticleConfig& config, double t,
                         const FieldOptions& options = {});

/// (Σ_i ½m u_i², Υ⁻¹ Σ_i P_i), computed from the velocity and pressure fields
/// without going through Q.
QuantumPotentialParts quantum_potential_decomposed(const WavefunctionModel& model, const ParticleConfig& config,
                                                   double t, const FieldOptions& options = {});

/// Full dynamic budget with −∂S/∂t = −ħ Im(Ψ̇/Ψ).
EnergyBudget energy_budget(const WavefunctionModel& model, const ParticleConfig& config, double t,
                           const FieldOptions& options = {});

/// Budget of a stationary state against its exact Ē. UsageError otherwise.
EnergyBudget stationary_budget(const WavefunctionModel& model, const ParticleConfig& config,
                               const FieldOptions& options = {});

/// ∂Υ/∂t + Σ_i ∇_i·(Υ v_i). The divergence is a fourth-order central
/// difference of the analytic flux (ħ/m) Im(Ψ*∇_iΨ) at step h_fd.
double continuity_residual(const WavefunctionModel& model, const ParticleConfig& config, double t,
                           double h_fd = 1e-3);

FieldSample sample_fields(const WavefunctionModel& model, const ParticleConfig& config, double t,
                          const FieldOptions& options = {});

/// Central-difference ∇_iΨ at step h.
std::vector<Complex> fd_gradient(const WavefunctionModel& model, const ParticleConfig& config, double t,
                                 std::size_t i, double h);

/// Central-difference ∇_i²Ψ at step h.
Complex fd_laplacian(const WavefunctionModel& model, const ParticleConfig& config, double t, std::size_t i,
                     double h);

/// Richardson error estimates, |D(h) − D(h/2)| · 4/3, for the two stencils above.
double fd_gradient_error(const WavefunctionModel& model, const ParticleConfig& config, double t, std::size_t i,
                         double h);
double fd_laplacian_error(const WavefunctionModel& model, const ParticleConfig& config, double t, std::size_t i,
                          double h);

struct DerivativeMismatch {
  double gradient = 0.0;
  double laplacian = 0.0;
};

/// Largest mismatch over all particles between the analytic derivatives and
/// the central differences above, each as |fd − exact| / (|exact| + |Ψ|).
DerivativeMismatch derivative_mismatch(const WavefunctionModel& model, const ParticleConfig& config, double t,
                                       double h);

namespace detail {

/// Ratios ∇Ψ/Ψ, ∇²Ψ/Ψ and Ψ̇/Ψ from one jet; the global phase cancels.
struct LogDerivatives {
  double upsilon = 0.0;
  std::vector<Complex> grad;  // ∇_iΨ/Ψ, n*d entries
  std::vector<Complex> lap;   // ∇_i²Ψ/Ψ, n entries
  Complex rate;               // Ψ̇/Ψ
};

/// P_i from an already evaluated jet.
double pressure_from_jet(const WavefunctionJet& jet, std::size_t i, std::size_t d, double mass, double hbar);

/// Throws NodeError when Υ < node_epsilon.
LogDerivatives log_derivatives(const WavefunctionJet& jet, double node_epsilon, const std::string& label);

}  // namespace detail

}  // namespace bohmdyn

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bohmdyn/particle_config.hpp"

namespace bohmdyn {

using Complex = std::complex<double>;

/// Ψ and its derivatives at one (x, t).
///
/// Ψ = phase · value, where `phase` is unimodular and carries the global
/// e^{-iEt/ħ} factor of stationary states. Keeping it apart from the spatial
/// part lets ratios such as ∇Ψ/Ψ be formed from `value` alone, so a real
/// eigenfunction yields a Bohm velocity that is exactly zero instead of
/// rounding noise.
struct WavefunctionJet {
  Complex phase{1.0, 0.0};
  Complex value;
  std::vector<Complex> gradient;   // n*d entries, particle-major, ∇_i of `value`
  std::vector<Complex> laplacian;  // n entries, ∇_i² of `value`
  Complex phase_rate;              // d(log phase)/dt
  Complex value_rate;              // ∂value/∂t

  Complex psi() const { return phase * value; }
  Complex dpsi_dt() const { return phase * (phase_rate * value + value_rate); }
};

/// Closed-form evaluator behind a WavefunctionModel.
class WavefunctionKernel {
 public:
  virtual ~WavefunctionKernel() = default;

  virtual WavefunctionJet evaluate(std::span<const double> coords, double t) const = 0;

  /// Description of the offending particle or pair when `coords` lies on the
  /// kernel's singular set (cusps, Coulomb centres); empty otherwise.
  virtual std::string singular_point(std::span<const double> coords) const;
};

/// One-body external potential V plus the optional Coulomb pair repulsion.
struct PotentialSpec {
  std::function<double(std::span<const double>)> external;
  /// Pair term, each pair counted once: ½Σ_{i≠j} |r_i − r_j|⁻¹.
  bool pair_interaction = false;
  /// Identifies the potential; superpositions and products compare it.
  std::string description;
  /// True where `external` is singular (e.g. the Coulomb origin).
  std::function<bool(std::span<const double>)> singular;
};

/// How the quadrature module should lay out grids for this state.
enum class QuadratureGeometry {
  cartesian,     // tensor grid over every coordinate
  spherical,     // per-particle (r, cos θ, φ) grids, d == 3
  pair_relative  // two particles, rotation-invariant: centre-of-mass / relative radii
};

struct ModelTraits {
  std::size_t n = 1;
  std::size_t d = 1;
  double mass = 1.0;
  double hbar = 1.0;
  /// Exact eigenvalue Ē; present iff the state is stationary.
  std::optional<double> energy;
  /// Spatial part real up to the global phase.
  bool real_valued = false;
  bool normalizable = true;
  /// Exact ⟨T⟩ where a closed form is known (virial theorem).
  std::optional<double> kinetic_expectation;
  QuadratureGeometry geometry = QuadratureGeometry::cartesian;
  std::string label;
};

/// Immutable analytic n-particle wavefunction together with its potential.
/// Copies share the kernel; all members are safe to call concurrently.
class WavefunctionModel {
 public:
  WavefunctionModel(ModelTraits traits, PotentialSpec potential,
                    std::shared_ptr<const WavefunctionKernel> kernel);

  std::size_t particles() const noexcept { return traits_.n; }
  std::size_t dim() const noexcept { return traits_.d; }
  double mass() const noexcept { return traits_.mass; }
  double hbar() const noexcept { return traits_.hbar; }
  bool is_stationary() const noexcept { return traits_.energy.has_value(); }
  std::optional<double> energy() const noexcept { return traits_.energy; }
  bool is_real_valued() const noexcept { return traits_.real_valued; }
  bool is_normalizable() const noexcept { return traits_.normalizable; }
  const std::string& label() const noexcept { return traits_.label; }
  const ModelTraits& traits() const noexcept { return traits_; }
  const PotentialSpec& potential() const noexcept { return potential_; }
  const std::shared_ptr<const WavefunctionKernel>& kernel() const noexcept { return kernel_; }

  /// Throws SingularityError when `config` sits on the singular set, and
  /// DomainError when its shape does not match the model.
  void check_regular(const ParticleConfig& config) const;

  WavefunctionJet evaluate(const ParticleConfig& config, double t) const;

  Complex value(const ParticleConfig& config, double t) const;
  std::vector<Complex> gradient(const ParticleConfig& config, double t, std::size_t i) const;
  Complex laplacian(const ParticleConfig& config, double t, std::size_t i) const;
  Complex time_derivative(const ParticleConfig& config, double t) const;

  /// |Ψ|; independent of t for stationary states, bit for bit.
  double modulus(const ParticleConfig& config, double t) const;

  ParticleConfig make_config(std::vector<double> coords) const;

 private:
  void check_shape(const ParticleConfig& config) const;

  ModelTraits traits_;
  PotentialSpec potential_;
  std::shared_ptr<const WavefunctionKernel> kernel_;
};

enum class HydrogenOrbital { s1, s2, p2z };

/// Hermite–Gaussian eigenstate of V = ½mω²x². quantum_number ≤ 12.
WavefunctionModel make_harmonic_oscillator_1d(int quantum_number, double omega, double mass = 1.0,
                                              double hbar = 1.0);

struct SuperpositionTerm {
  Complex coefficient;
  WavefunctionModel model;
};

/// Σ c_k Ψ_k(x, t) over stationary bases sharing n, d, mass and potential;
/// coefficients renormalized to Σ|c_k|² = 1.
WavefunctionModel make_superposition(const std::vector<SuperpositionTerm>& terms);

/// Hydrogen-like orbital with nuclear charge Z; singular at the origin.
WavefunctionModel make_hydrogenlike(HydrogenOrbital orbital, double Z, double mass = 1.0,
                                    double hbar = 1.0);

/// Free spreading Gaussian with initial width sigma0 and mean momentum ħk0.
WavefunctionModel make_free_gaussian_packet(double sigma0, double k0, double mass = 1.0,
                                            double hbar = 1.0);

/// Two electrons in a harmonic well with ω = ½ (V = r²/8) and Coulomb
/// repulsion: Ψ ∝ (1 + r₁₂/2) e^{-(r₁² + r₂²)/4}, Ē = 2 hartree.
WavefunctionModel make_hookes_atom();

/// Ψ = Π_k Ψ_k(x_k, t) over one-particle factors, no pair interaction.
WavefunctionModel make_product_state(const std::vector<WavefunctionModel>& factors);

/// e^{i(kx − ħk²t/2m)} in 1D: stationary, complex, not normalizable.
WavefunctionModel make_plane_wave(double k, double mass = 1.0, double hbar = 1.0);

/// U(x) = Σ_i V(r_i) + ½Σ_{i≠j} |r_i − r_j|⁻¹ (pair term when enabled).
/// Throws SingularityError naming the offending particle or pair.
double potential_energy(const WavefunctionModel& model, const ParticleConfig& config);

namespace detail {

/// Normalized Hermite functions φ_0..φ_n at ξ, by three-term recurrence.
std::vector<double> hermite_functions(int n, double xi);

}  // namespace detail

}  // namespace bohmdyn

#include "bohmdyn/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "bohmdyn/errors.hpp"

namespace bohmdyn {

namespace {

// Ψ*·z / |Ψ|² keeps the imaginary part exactly zero when both are real.
Complex ratio(Complex numerator, Complex value, double norm) { return std::conj(value) * numerator / norm; }

std::vector<double> velocity_component(const detail::LogDerivatives& ld, std::size_t i, std::size_t d, double scale,
                                       bool imaginary) {
  std::vector<double> out(d);
  for (std::size_t k = 0; k < d; ++k) {
    const Complex g = ld.grad[i * d + k];
    out[k] = scale * (imaginary ? g.imag() : g.real());
  }
  return out;
}

double q_from_ratios(const detail::LogDerivatives& ld, std::size_t n, std::size_t d, double mass, double hbar) {
  // ∇²R/R = Re(∇²Ψ/Ψ) + |Im(∇Ψ/Ψ)|²
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double phase_grad2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) phase_grad2 += ld.grad[i * d + k].imag() * ld.grad[i * d + k].imag();
    sum += ld.lap[i].real() + phase_grad2;
  }
  return -hbar * hbar / (2.0 * mass) * sum;
}

QuantumPotentialParts parts_from_jet(const WavefunctionJet& jet, const detail::LogDerivatives& ld, std::size_t n,
                                     std::size_t d, double mass, double hbar) {
  QuantumPotentialParts parts;
  const double scale = hbar / mass;
  double pressure_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const double u = scale * ld.grad[i * d + k].real();
      parts.kinetic_u += 0.5 * mass * u * u;
    }
    pressure_sum += detail::pressure_from_jet(jet, i, d, mass, hbar);
  }
  parts.compression = pressure_sum / ld.upsilon;
  return parts;
}

double kinetic_v_from_ratios(const detail::LogDerivatives& ld, std::size_t n, std::size_t d, double mass,
                             double hbar) {
  const double scale = hbar / mass;
  double kv = 0.0;
  for (std::size_t j = 0; j < n * d; ++j) {
    const double v = scale * ld.grad[j].imag();
    kv += 0.5 * mass * v * v;
  }
  return kv;
}

EnergyBudget budget_from_jet(const WavefunctionModel& model, const ParticleConfig& config,
                             const WavefunctionJet& jet, const detail::LogDerivatives& ld) {
  const std::size_t n = model.particles(), d = model.dim();
  const auto parts = parts_from_jet(jet, ld, n, d, model.mass(), model.hbar());
  EnergyBudget b;
  b.kinetic_v = kinetic_v_from_ratios(ld, n, d, model.mass(), model.hbar());
  b.kinetic_u = parts.kinetic_u;
  b.compression = parts.compression;
  b.potential_U = potential_energy(model, config);
  b.minus_dS_dt = -model.hbar() * ld.rate.imag();
  b.residual = b.total() - b.minus_dS_dt;
  return b;
}

void check_particle(const WavefunctionModel& model, std::size_t i) {
  if (i >= model.particles()) {
    throw UsageError("particle index " + std::to_string(i) + " out of range for " + model.label());
  }
}

// Flux Υv_i = (ħ/m) Im(Ψ*∇_iΨ) for coordinate (i, k).
double flux(const WavefunctionJet& jet, std::size_t j, double scale) {
  return scale * (std::conj(jet.value) * jet.gradient[j]).imag();
}

}  // namespace

namespace detail {

double pressure_from_jet(const WavefunctionJet& jet, std::size_t i, std::size_t d, double mass, double hbar) {
  double grad2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) grad2 += std::norm(jet.gradient[i * d + k]);
  const double lap_upsilon = 2.0 * (std::conj(jet.value) * jet.laplacian[i]).real() + 2.0 * grad2;
  return -hbar * hbar / (4.0 * mass) * lap_upsilon;
}

LogDerivatives log_derivatives(const WavefunctionJet& jet, double node_epsilon, const std::string& label) {
  LogDerivatives ld;
  ld.upsilon = std::norm(jet.value);
  if (!(ld.upsilon >= node_epsilon) || ld.upsilon == 0.0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", ld.upsilon);
    throw NodeError(label + ": density " + buf + " below node epsilon");
  }
  ld.grad.reserve(jet.gradient.size());
  for (const auto& g : jet.gradient) ld.grad.push_back(ratio(g, jet.value, ld.upsilon));
  ld.lap.reserve(jet.laplacian.size());
  for (const auto& l : jet.laplacian) ld.lap.push_back(ratio(l, jet.value, ld.upsilon));
  ld.rate = jet.phase_rate + ratio(jet.value_rate, jet.value, ld.upsilon);
  return ld;
}

}  // namespace detail

double EnergyBudget::magnitude() const {
  return std::abs(kinetic_v) + std::abs(kinetic_u) + std::abs(compression) + std::abs(potential_U) +
         std::abs(minus_dS_dt);
}

double density(const WavefunctionModel& model, const ParticleConfig& config, double t) {
  return std::norm(model.evaluate(config, t).value);
}

std::vector<double> osmotic_velocity(const WavefunctionModel& model, const ParticleConfig& config, double t,
                                     std::size_t i, Sign sign, const FieldOptions& options) {
  check_particle(model, i);
  const auto ld = detail::log_derivatives(model.evaluate(config, t), options.node_epsilon, model.label());
  const double scale = (sign == Sign::plus ? 1.0 : -1.0) * model.hbar() / model.mass();
  return velocity_component(ld, i, model.dim(), scale, false);
}

std::vector<double> bohm_velocity(const WavefunctionModel& model, const ParticleConfig& config, double t,
                                  std::size_t i, const FieldOptions& options) {
  check_particle(model, i);
  const auto ld = detail::log_derivatives(model.evaluate(config, t), options.node_epsilon, model.label());
  return velocity_component(ld, i, model.dim(), model.hbar() / model.mass(), true);
}

double pressure(const WavefunctionModel& model, const ParticleConfig& config, double t, std::size_t i) {
  check_particle(model, i);
  return detail::pressure_from_jet(model.evaluate(config, t), i, model.dim(), model.mass(), model.hbar());
}

double quantum_potential(const WavefunctionModel& model, const ParticleConfig& config, double t,
                         const FieldOptions& options) {
  const auto ld = detail::log_derivatives(model.evaluate(config, t), options.node_epsilon, model.label());
  return q_from_ratios(ld, model.particles(), model.dim(), model.mass(), model.hbar());
}

QuantumPotentialParts quantum_potential_decomposed(const WavefunctionModel& model, const ParticleConfig& config,
                                                   double t, const FieldOptions& options) {
  const auto jet = model.evaluate(config, t);
  const auto ld = detail::log_derivatives(jet, options.node_epsilon, model.label());
  return parts_from_jet(jet, ld, model.particles(), model.dim(), model.mass(), model.hbar());
}

EnergyBudget energy_budget(const WavefunctionModel& model, const ParticleConfig& config, double t,
                           const FieldOptions& options) {
  const auto jet = model.evaluate(config, t);
  const auto ld = detail::log_derivatives(jet, options.node_epsilon, model.label());
  return budget_from_jet(model, config, jet, ld);
}

EnergyBudget stationary_budget(const WavefunctionModel& model, const ParticleConfig& config,
                               const FieldOptions& options) {
  if (!model.is_stationary()) throw UsageError("stationary_budget needs a stationary state, got " + model.label());
  auto b = energy_budget(model, config, 0.0, options);
  b.minus_dS_dt = *model.energy();
  b.residual = b.total() - b.minus_dS_dt;
  return b;
}

double continuity_residual(const WavefunctionModel& model, const ParticleConfig& config, double t, double h_fd) {
  if (!(h_fd > 0.0)) throw UsageError("continuity_residual needs h_fd > 0");
  const auto jet = model.evaluate(config, t);
  const double d_upsilon_dt =
      2.0 * (std::conj(jet.value) * (jet.phase_rate * jet.value + jet.value_rate)).real();

  const double scale = model.hbar() / model.mass();
  double divergence = 0.0;
  ParticleConfig shifted = config;
  auto coords = shifted.coords();
  for (std::size_t j = 0; j < coords.size(); ++j) {
    const double x = coords[j];
    double f[4];
    const double offsets[4] = {-2.0, -1.0, 1.0, 2.0};
    for (int s = 0; s < 4; ++s) {
      coords[j] = x + offsets[s] * h_fd;
      f[s] = flux(model.evaluate(shifted, t), j, scale);
    }
    coords[j] = x;
    divergence += (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h_fd);
  }
  return d_upsilon_dt + divergence;
}

FieldSample sample_fields(const WavefunctionModel& model, const ParticleConfig& config, double t,
                          const FieldOptions& options) {
  const std::size_t n = model.particles(), d = model.dim();
  const double mass = model.mass(), hbar = model.hbar();
  const auto jet = model.evaluate(config, t);

  FieldSample s;
  s.config = config;
  s.t = t;
  s.upsilon = std::norm(jet.value);
  for (std::size_t i = 0; i < n; ++i) s.pressure.push_back(detail::pressure_from_jet(jet, i, d, mass, hbar));
  s.node_flag = !(s.upsilon >= options.node_epsilon) || s.upsilon == 0.0;
  if (s.node_flag) return s;

  const auto ld = detail::log_derivatives(jet, options.node_epsilon, model.label());
  std::vector<double> grad_S(n * d), v(n * d), u_plus(n * d), u_minus(n * d);
  for (std::size_t j = 0; j < n * d; ++j) {
    grad_S[j] = hbar * ld.grad[j].imag();
    v[j] = grad_S[j] / mass;
    u_plus[j] = hbar / mass * ld.grad[j].real();
    u_minus[j] = -u_plus[j];
  }
  s.grad_S = std::move(grad_S);
  s.v = std::move(v);
  s.u_plus = std::move(u_plus);
  s.u_minus = std::move(u_minus);
  s.dS_dt = hbar * ld.rate.imag();
  s.Q = q_from_ratios(ld, n, d, mass, hbar);
  const auto parts = parts_from_jet(jet, ld, n, d, mass, hbar);
  s.kinetic_u = parts.kinetic_u;
  s.compression = parts.compression;
  s.budget = budget_from_jet(model, config, jet, ld);
  return s;
}

// ---------------------------------------------------------------------------

std::vector<Complex> fd_gradient(const WavefunctionModel& model, const ParticleConfig& config, double t,
                                 std::size_t i, double h) {
  check_particle(model, i);
  if (!(h > 0.0)) throw UsageError("finite-difference step must be positive");
  const std::size_t d = model.dim();
  std::vector<Complex> g(d);
  ParticleConfig shifted = config;
  for (std::size_t k = 0; k < d; ++k) {
    double& x = shifted.position(i)[k];
    const double x0 = x;
    x = x0 + h;
    const Complex fp = model.value(shifted, t);
    x = x0 - h;
    const Complex fm = model.value(shifted, t);
    x = x0;
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Complex fd_laplacian(const WavefunctionModel& model, const ParticleConfig& config, double t, std::size_t i,
                     double h) {
  check_particle(model, i);
  if (!(h > 0.0)) throw UsageError("finite-difference step must be positive");
  const Complex f0 = model.value(config, t);
  Complex sum;
  ParticleConfig shifted = config;
  for (std::size_t k = 0; k < model.dim(); ++k) {
    double& x = shifted.position(i)[k];
    const double x0 = x;
    x = x0 + h;
    const Complex fp = model.value(shifted, t);
    x = x0 - h;
    const Complex fm = model.value(shifted, t);
    x = x0;
    sum += (fp - 2.0 * f0 + fm) / (h * h);
  }
  return sum;
}

double fd_gradient_error(const WavefunctionModel& model, const ParticleConfig& config, double t, std::size_t i,
                         double h) {
  const auto coarse = fd_gradient(model, config, t, i, h);
  const auto fine = fd_gradient(model, config, t, i, 0.5 * h);
  double err2 = 0.0;
  for (std::size_t k = 0; k < coarse.size(); ++k) err2 += std::norm(coarse[k] - fine[k]);
  return 4.0 / 3.0 * std::sqrt(err2);
}

double fd_laplacian_error(const WavefunctionModel& model, const ParticleConfig& config, double t, std::size_t i,
                          double h) {
  return 4.0 / 3.0 * std::abs(fd_laplacian(model, config, t, i, h) - fd_laplacian(model, config, t, i, 0.5 * h));
}

DerivativeMismatch derivative_mismatch(const WavefunctionModel& model, const ParticleConfig& config, double t,
                                       double h) {
  const auto jet = model.evaluate(config, t);
  const double psi = std::abs(jet.value);
  const std::size_t d = model.dim();
  DerivativeMismatch out;
  for (std::size_t i = 0; i < model.particles(); ++i) {
    const auto fd = fd_gradient(model, config, t, i, h);
    double diff2 = 0.0, exact2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const Complex exact = jet.phase * jet.gradient[i * d + k];
      diff2 += std::norm(fd[k] - exact);
      exact2 += std::norm(exact);
    }
    out.gradient = std::max(out.gradient, std::sqrt(diff2) / (std::sqrt(exact2) + psi));
    const Complex exact_lap = jet.phase * jet.laplacian[i];
    out.laplacian = std::max(out.laplacian, std::abs(fd_laplacian(model, config, t, i, h) - exact_lap) /
                                                (std::abs(exact_lap) + psi));
  }
  return out;
}

}  // namespace bohmdyn

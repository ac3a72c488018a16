#include "bohmdyn/states.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

#include <gsl/gsl_integration.h>

#include "bohmdyn/errors.hpp"

namespace bohmdyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

// Distances below this are treated as coincident with a singular point.
constexpr double kSingularRadius = 1e-12;

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

double norm3(std::span<const double> r) { return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]); }

Complex stationary_phase(double energy, double hbar, double t) { return std::polar(1.0, -energy * t / hbar); }

// ---------------------------------------------------------------------------

class HarmonicOscillatorKernel final : public WavefunctionKernel {
 public:
  HarmonicOscillatorKernel(int n, double omega, double mass, double hbar)
      : n_(n), a_(mass * omega / hbar), energy_((n + 0.5) * hbar * omega), hbar_(hbar) {}

  WavefunctionJet evaluate(std::span<const double> coords, double t) const override {
    const double sqrt_a = std::sqrt(a_);
    const double xi = sqrt_a * coords[0];
    const auto phi = detail::hermite_functions(n_, xi);
    const double scale = std::sqrt(sqrt_a);

    const double r = scale * phi[n_];
    // φ_n' = −ξφ_n + √(2n) φ_{n−1}
    double dphi = -xi * phi[n_];
    if (n_ > 0) dphi += std::sqrt(2.0 * n_) * phi[n_ - 1];

    WavefunctionJet jet;
    jet.phase = stationary_phase(energy_, hbar_, t);
    jet.phase_rate = -kI * (energy_ / hbar_);
    jet.value = r;
    jet.gradient = {Complex(scale * sqrt_a * dphi)};
    // Hermite ODE: R'' = a(ξ² − (2n+1)) R
    jet.laplacian = {Complex(a_ * (xi * xi - (2.0 * n_ + 1.0)) * r)};
    return jet;
  }

 private:
  int n_;
  double a_;
  double energy_;
  double hbar_;
};

// ---------------------------------------------------------------------------

class HydrogenKernel final : public WavefunctionKernel {
 public:
  HydrogenKernel(HydrogenOrbital orbital, double a, double energy, double hbar)
      : orbital_(orbital), a_(a), energy_(energy), hbar_(hbar) {
    const double a3 = a * a * a;
    norm_ = orbital == HydrogenOrbital::s1 ? 1.0 / std::sqrt(kPi * a3) : 1.0 / std::sqrt(32.0 * kPi * a3);
  }

  WavefunctionJet evaluate(std::span<const double> coords, double t) const override {
    const double r = norm3(coords);
    const double rho = r / a_;
    WavefunctionJet jet;
    jet.phase = stationary_phase(energy_, hbar_, t);
    jet.phase_rate = -kI * (energy_ / hbar_);
    jet.gradient.resize(3);
    jet.laplacian.resize(1);

    double f = 0.0, df = 0.0, d2f = 0.0;
    switch (orbital_) {
      case HydrogenOrbital::s1: {
        f = norm_ * std::exp(-rho);
        df = -f / a_;
        d2f = f / (a_ * a_);
        break;
      }
      case HydrogenOrbital::s2: {
        const double e = norm_ * std::exp(-0.5 * rho);
        f = (2.0 - rho) * e;
        df = (rho - 4.0) / (2.0 * a_) * e;
        d2f = (6.0 - rho) / (4.0 * a_ * a_) * e;
        break;
      }
      case HydrogenOrbital::p2z: {
        // Ψ = z g(r): ∇Ψ = g ẑ + z g' r̂, ∇²Ψ = z (g'' + 4g'/r)
        const double g = norm_ / a_ * std::exp(-0.5 * rho);
        const double dg = -g / (2.0 * a_);
        const double d2g = g / (4.0 * a_ * a_);
        const double z = coords[2];
        jet.value = z * g;
        for (int k = 0; k < 3; ++k) jet.gradient[k] = z * dg * coords[k] / r;
        jet.gradient[2] += g;
        jet.laplacian[0] = z * (d2g + 4.0 * dg / r);
        return jet;
      }
    }
    jet.value = f;
    for (int k = 0; k < 3; ++k) jet.gradient[k] = df * coords[k] / r;
    jet.laplacian[0] = d2f + 2.0 * df / r;
    return jet;
  }

  std::string singular_point(std::span<const double> coords) const override {
    return norm3(coords) < kSingularRadius * a_ ? "particle 0 at the Coulomb centre" : "";
  }

 private:
  HydrogenOrbital orbital_;
  double a_;
  double energy_;
  double hbar_;
  double norm_;
};

// ---------------------------------------------------------------------------

class GaussianPacketKernel final : public WavefunctionKernel {
 public:
  GaussianPacketKernel(double sigma0, double k0, double mass, double hbar)
      : s2_(sigma0 * sigma0),
        k0_(k0),
        velocity_(hbar * k0 / mass),
        omega0_(hbar * k0 * k0 / (2.0 * mass)),
        alpha_rate_(kI * hbar / (2.0 * mass * sigma0 * sigma0)),
        amplitude_(std::pow(2.0 * kPi * sigma0 * sigma0, -0.25)) {}

  WavefunctionJet evaluate(std::span<const double> coords, double t) const override {
    const double x = coords[0];
    const Complex alpha = 1.0 + alpha_rate_ * t;
    const double xi = x - velocity_ * t;
    const Complex expo = -xi * xi / (4.0 * s2_ * alpha) + kI * (k0_ * x - omega0_ * t);
    const Complex value = amplitude_ / std::sqrt(alpha) * std::exp(expo);

    const Complex dlog = -xi / (2.0 * s2_ * alpha) + kI * k0_;
    const Complex d2log = -1.0 / (2.0 * s2_ * alpha);
    const Complex dlog_dt = -0.5 * alpha_rate_ / alpha + xi * velocity_ / (2.0 * s2_ * alpha) +
                            xi * xi * alpha_rate_ / (4.0 * s2_ * alpha * alpha) - kI * omega0_;

    WavefunctionJet jet;
    jet.value = value;
    jet.gradient = {dlog * value};
    jet.laplacian = {(d2log + dlog * dlog) * value};
    jet.value_rate = dlog_dt * value;
    return jet;
  }

 private:
  double s2_;
  double k0_;
  double velocity_;
  double omega0_;
  Complex alpha_rate_;
  double amplitude_;
};

// ---------------------------------------------------------------------------

double hooke_norm_integral() {
  // ∫|Ψ/N|² over ℝ⁶ in centre-of-mass / relative coordinates:
  // π^{3/2} · ∫₀^∞ (1 + r/2)² e^{−r²/4} 4πr² dr
  constexpr std::size_t kPoints = 96;
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(kPoints);
  double sum = 0.0;
  for (std::size_t k = 0; k < kPoints; ++k) {
    double r = 0.0, w = 0.0;
    gsl_integration_glfixed_point(0.0, 24.0, k, &r, &w, table);
    const double f = 1.0 + 0.5 * r;
    sum += w * f * f * std::exp(-0.25 * r * r) * 4.0 * kPi * r * r;
  }
  gsl_integration_glfixed_table_free(table);
  return std::pow(kPi, 1.5) * sum;
}

class HookeKernel final : public WavefunctionKernel {
 public:
  static constexpr double kEnergy = 2.0;

  HookeKernel() : norm_(1.0 / std::sqrt(hooke_norm_integral())) {}

  WavefunctionJet evaluate(std::span<const double> c, double t) const override {
    const double r1[3] = {c[0], c[1], c[2]};
    const double r2[3] = {c[3], c[4], c[5]};
    double d[3];
    double r12sq = 0.0, r1sq = 0.0, r2sq = 0.0;
    for (int k = 0; k < 3; ++k) {
      d[k] = r1[k] - r2[k];
      r12sq += d[k] * d[k];
      r1sq += r1[k] * r1[k];
      r2sq += r2[k] * r2[k];
    }
    const double r12 = std::sqrt(r12sq);
    const double f = 1.0 + 0.5 * r12;
    const double g = norm_ * std::exp(-0.25 * (r1sq + r2sq));

    double dhat_r1 = 0.0, dhat_r2 = 0.0;
    WavefunctionJet jet;
    jet.phase = stationary_phase(kEnergy, 1.0, t);
    jet.phase_rate = -kI * kEnergy;
    jet.value = f * g;
    jet.gradient.resize(6);
    for (int k = 0; k < 3; ++k) {
      const double dhat = d[k] / r12;
      dhat_r1 += dhat * r1[k];
      dhat_r2 += dhat * r2[k];
      jet.gradient[k] = g * (0.5 * dhat - 0.5 * f * r1[k]);
      jet.gradient[3 + k] = g * (-0.5 * dhat - 0.5 * f * r2[k]);
    }
    jet.laplacian = {Complex(g * (1.0 / r12 - 0.5 * dhat_r1 + f * (0.25 * r1sq - 1.5))),
                     Complex(g * (1.0 / r12 + 0.5 * dhat_r2 + f * (0.25 * r2sq - 1.5)))};
    return jet;
  }

  std::string singular_point(std::span<const double> c) const override {
    const double dx = c[0] - c[3], dy = c[1] - c[4], dz = c[2] - c[5];
    return std::sqrt(dx * dx + dy * dy + dz * dz) < kSingularRadius ? "pair (0,1) coincide" : "";
  }

 private:
  double norm_;
};

// ---------------------------------------------------------------------------

class SuperpositionKernel final : public WavefunctionKernel {
 public:
  SuperpositionKernel(std::vector<Complex> coefficients, std::vector<std::shared_ptr<const WavefunctionKernel>> bases)
      : coefficients_(std::move(coefficients)), bases_(std::move(bases)) {}

  WavefunctionJet evaluate(std::span<const double> coords, double t) const override {
    if (bases_.size() == 1) {
      WavefunctionJet jet = bases_[0]->evaluate(coords, t);
      jet.phase *= coefficients_[0];
      return jet;
    }
    WavefunctionJet sum;
    for (std::size_t k = 0; k < bases_.size(); ++k) {
      const WavefunctionJet jet = bases_[k]->evaluate(coords, t);
      const Complex c = coefficients_[k] * jet.phase;
      if (k == 0) {
        sum.gradient.assign(jet.gradient.size(), Complex{});
        sum.laplacian.assign(jet.laplacian.size(), Complex{});
      }
      sum.value += c * jet.value;
      for (std::size_t j = 0; j < jet.gradient.size(); ++j) sum.gradient[j] += c * jet.gradient[j];
      for (std::size_t j = 0; j < jet.laplacian.size(); ++j) sum.laplacian[j] += c * jet.laplacian[j];
      sum.value_rate += coefficients_[k] * jet.dpsi_dt();
    }
    return sum;
  }

  std::string singular_point(std::span<const double> coords) const override {
    for (const auto& b : bases_) {
      if (auto s = b->singular_point(coords); !s.empty()) return s;
    }
    return {};
  }

 private:
  std::vector<Complex> coefficients_;
  std::vector<std::shared_ptr<const WavefunctionKernel>> bases_;
};

// ---------------------------------------------------------------------------

class ProductKernel final : public WavefunctionKernel {
 public:
  ProductKernel(std::vector<std::shared_ptr<const WavefunctionKernel>> factors, std::size_t d)
      : factors_(std::move(factors)), d_(d) {}

  WavefunctionJet evaluate(std::span<const double> coords, double t) const override {
    const std::size_t n = factors_.size();
    std::vector<WavefunctionJet> jets;
    jets.reserve(n);
    for (std::size_t k = 0; k < n; ++k) jets.push_back(factors_[k]->evaluate(coords.subspan(k * d_, d_), t));

    // others[k] = Π_{j≠k} value_j via prefix/suffix products
    std::vector<Complex> prefix(n + 1, Complex{1.0, 0.0}), suffix(n + 1, Complex{1.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] * jets[k].value;
    for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] * jets[k].value;

    WavefunctionJet jet;
    jet.value = prefix[n];
    jet.gradient.resize(n * d_);
    jet.laplacian.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const Complex others = prefix[k] * suffix[k + 1];
      jet.phase *= jets[k].phase;
      jet.phase_rate += jets[k].phase_rate;
      for (std::size_t j = 0; j < d_; ++j) jet.gradient[k * d_ + j] = others * jets[k].gradient[j];
      jet.laplacian[k] = others * jets[k].laplacian[0];
      jet.value_rate += others * jets[k].value_rate;
    }
    return jet;
  }

  std::string singular_point(std::span<const double> coords) const override {
    for (std::size_t k = 0; k < factors_.size(); ++k) {
      if (!factors_[k]->singular_point(coords.subspan(k * d_, d_)).empty()) {
        return "particle " + std::to_string(k) + " at a singular point";
      }
    }
    return {};
  }

 private:
  std::vector<std::shared_ptr<const WavefunctionKernel>> factors_;
  std::size_t d_;
};

// ---------------------------------------------------------------------------

class PlaneWaveKernel final : public WavefunctionKernel {
 public:
  PlaneWaveKernel(double k, double energy, double hbar) : k_(k), energy_(energy), hbar_(hbar) {}

  WavefunctionJet evaluate(std::span<const double> coords, double t) const override {
    WavefunctionJet jet;
    jet.phase = stationary_phase(energy_, hbar_, t);
    jet.phase_rate = -kI * (energy_ / hbar_);
    jet.value = std::polar(1.0, k_ * coords[0]);
    jet.gradient = {kI * k_ * jet.value};
    jet.laplacian = {-k_ * k_ * jet.value};
    return jet;
  }

 private:
  double k_;
  double energy_;
  double hbar_;
};

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

PotentialSpec harmonic_potential(double omega, double mass) {
  const double c = 0.5 * mass * omega * omega;
  PotentialSpec p;
  p.external = [c](std::span<const double> r) {
    double s = 0.0;
    for (double x : r) s += x * x;
    return c * s;
  };
  p.description = "harmonic:k=" + format_number(2.0 * c);
  return p;
}

PotentialSpec free_potential() {
  PotentialSpec p;
  p.external = [](std::span<const double>) { return 0.0; };
  p.description = "free";
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string WavefunctionKernel::singular_point(std::span<const double>) const { return {}; }

namespace detail {

std::vector<double> hermite_functions(int n, double xi) {
  std::vector<double> phi(static_cast<std::size_t>(n) + 1);
  phi[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * xi * xi);
  if (n >= 1) phi[1] = std::sqrt(2.0) * xi * phi[0];
  for (int k = 2; k <= n; ++k) {
    phi[k] = std::sqrt(2.0 / k) * xi * phi[k - 1] - std::sqrt((k - 1.0) / k) * phi[k - 2];
  }
  return phi;
}

}  // namespace detail

WavefunctionModel::WavefunctionModel(ModelTraits traits, PotentialSpec potential,
                                     std::shared_ptr<const WavefunctionKernel> kernel)
    : traits_(std::move(traits)), potential_(std::move(potential)), kernel_(std::move(kernel)) {
  if (!kernel_) throw DomainError("wavefunction model requires a kernel");
  if (traits_.n == 0 || (traits_.d != 1 && traits_.d != 3)) throw DomainError("model needs n >= 1 and d in {1,3}");
}

void WavefunctionModel::check_shape(const ParticleConfig& config) const {
  if (config.particles() != traits_.n || config.dim() != traits_.d) {
    throw DomainError("configuration shape " + std::to_string(config.particles()) + "x" +
                      std::to_string(config.dim()) + " does not match model " + traits_.label);
  }
}

void WavefunctionModel::check_regular(const ParticleConfig& config) const {
  check_shape(config);
  if (auto s = kernel_->singular_point(config.coords()); !s.empty()) throw SingularityError(traits_.label + ": " + s);
  if (potential_.singular) {
    for (std::size_t i = 0; i < traits_.n; ++i) {
      if (potential_.singular(config.position(i))) {
        throw SingularityError(traits_.label + ": particle " + std::to_string(i) + " on a singular point of V");
      }
    }
  }
}

WavefunctionJet WavefunctionModel::evaluate(const ParticleConfig& config, double t) const {
  check_regular(config);
  return kernel_->evaluate(config.coords(), t);
}

Complex WavefunctionModel::value(const ParticleConfig& config, double t) const { return evaluate(config, t).psi(); }

std::vector<Complex> WavefunctionModel::gradient(const ParticleConfig& config, double t, std::size_t i) const {
  const auto jet = evaluate(config, t);
  std::vector<Complex> g(traits_.d);
  for (std::size_t k = 0; k < traits_.d; ++k) g[k] = jet.phase * jet.gradient[i * traits_.d + k];
  return g;
}

Complex WavefunctionModel::laplacian(const ParticleConfig& config, double t, std::size_t i) const {
  const auto jet = evaluate(config, t);
  return jet.phase * jet.laplacian.at(i);
}

Complex WavefunctionModel::time_derivative(const ParticleConfig& config, double t) const {
  return evaluate(config, t).dpsi_dt();
}

double WavefunctionModel::modulus(const ParticleConfig& config, double t) const {
  return std::abs(evaluate(config, t).value);
}

ParticleConfig WavefunctionModel::make_config(std::vector<double> coords) const {
  return ParticleConfig(traits_.n, traits_.d, std::move(coords));
}

// ---------------------------------------------------------------------------

WavefunctionModel make_harmonic_oscillator_1d(int quantum_number, double omega, double mass, double hbar) {
  if (quantum_number < 0 || quantum_number > 12) throw DomainError("harmonic oscillator quantum number must be in [0, 12]");
  require_positive(omega, "omega");
  require_positive(mass, "mass");
  require_positive(hbar, "hbar");
  ModelTraits traits;
  traits.n = 1;
  traits.d = 1;
  traits.mass = mass;
  traits.hbar = hbar;
  traits.energy = (quantum_number + 0.5) * hbar * omega;
  traits.kinetic_expectation = 0.5 * *traits.energy;
  traits.real_valued = true;
  traits.label = "ho1d:n=" + std::to_string(quantum_number) + ",omega=" + format_number(omega);
  return WavefunctionModel(std::move(traits), harmonic_potential(omega, mass),
                           std::make_shared<HarmonicOscillatorKernel>(quantum_number, omega, mass, hbar));
}

WavefunctionModel make_hydrogenlike(HydrogenOrbital orbital, double Z, double mass, double hbar) {
  require_positive(Z, "Z");
  require_positive(mass, "mass");
  require_positive(hbar, "hbar");
  const int principal = orbital == HydrogenOrbital::s1 ? 1 : 2;
  const double a = hbar * hbar / (mass * Z);
  const double energy = -mass * Z * Z / (2.0 * hbar * hbar * principal * principal);

  ModelTraits traits;
  traits.n = 1;
  traits.d = 3;
  traits.mass = mass;
  traits.hbar = hbar;
  traits.energy = energy;
  traits.kinetic_expectation = -energy;
  traits.real_valued = true;
  traits.geometry = QuadratureGeometry::spherical;
  static constexpr const char* names[] = {"1s", "2s", "2pz"};
  traits.label = std::string("hydrogen:") + names[static_cast<int>(orbital)] + ",Z=" + format_number(Z);

  PotentialSpec potential;
  potential.external = [Z](std::span<const double> r) { return -Z / norm3(r); };
  potential.singular = [a](std::span<const double> r) { return norm3(r) < kSingularRadius * a; };
  potential.description = "coulomb:Z=" + format_number(Z);
  return WavefunctionModel(std::move(traits), std::move(potential),
                           std::make_shared<HydrogenKernel>(orbital, a, energy, hbar));
}

WavefunctionModel make_free_gaussian_packet(double sigma0, double k0, double mass, double hbar) {
  require_positive(sigma0, "sigma0");
  require_positive(mass, "mass");
  require_positive(hbar, "hbar");
  if (!std::isfinite(k0)) throw DomainError("k0 must be finite");
  ModelTraits traits;
  traits.mass = mass;
  traits.hbar = hbar;
  traits.label = "gauss:sigma=" + format_number(sigma0) + ",k=" + format_number(k0);
  return WavefunctionModel(std::move(traits), free_potential(),
                           std::make_shared<GaussianPacketKernel>(sigma0, k0, mass, hbar));
}

WavefunctionModel make_hookes_atom() {
  static const auto kernel = std::make_shared<const HookeKernel>();
  ModelTraits traits;
  traits.n = 2;
  traits.d = 3;
  traits.energy = HookeKernel::kEnergy;
  traits.real_valued = true;
  traits.geometry = QuadratureGeometry::pair_relative;
  traits.label = "hooke";
  PotentialSpec potential = harmonic_potential(0.5, 1.0);
  potential.pair_interaction = true;
  return WavefunctionModel(std::move(traits), std::move(potential), kernel);
}

WavefunctionModel make_superposition(const std::vector<SuperpositionTerm>& terms) {
  if (terms.empty()) throw DomainError("superposition needs at least one term");
  const WavefunctionModel& first = terms.front().model;
  double norm2 = 0.0;
  for (const auto& term : terms) {
    const WavefunctionModel& m = term.model;
    if (!m.is_stationary()) throw DomainError("superposition bases must be stationary: " + m.label());
    if (m.particles() != first.particles() || m.dim() != first.dim() || m.mass() != first.mass() ||
        m.hbar() != first.hbar()) {
      throw DomainError("superposition bases must share n, d, mass and hbar");
    }
    if (m.potential().description != first.potential().description ||
        m.potential().pair_interaction != first.potential().pair_interaction) {
      throw DomainError("superposition bases must share the potential: " + m.potential().description + " vs " +
                        first.potential().description);
    }
    norm2 += std::norm(term.coefficient);
  }
  if (!(norm2 > 0.0)) throw DomainError("superposition coefficients are all zero");

  std::vector<Complex> coefficients;
  std::vector<std::shared_ptr<const WavefunctionKernel>> bases;
  std::string label = "super:";
  bool all_normalizable = true;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    // A single term keeps only its phase so the modulus matches the base exactly.
    const Complex c = terms.size() == 1 ? terms[k].coefficient / std::abs(terms[k].coefficient)
                                        : terms[k].coefficient / std::sqrt(norm2);
    coefficients.push_back(c);
    bases.push_back(terms[k].model.kernel());
    all_normalizable = all_normalizable && terms[k].model.is_normalizable();
    label += (k ? "+" : "") + terms[k].model.label();
  }

  ModelTraits traits = first.traits();
  traits.label = label;
  traits.normalizable = all_normalizable;
  if (terms.size() > 1) {
    traits.energy.reset();
    traits.kinetic_expectation.reset();
    traits.real_valued = false;
  }
  return WavefunctionModel(std::move(traits), first.potential(),
                           std::make_shared<SuperpositionKernel>(std::move(coefficients), std::move(bases)));
}

WavefunctionModel make_product_state(const std::vector<WavefunctionModel>& factors) {
  if (factors.empty()) throw DomainError("product state needs at least one factor");
  const WavefunctionModel& first = factors.front();
  if (factors.size() == 1) return first;

  ModelTraits traits;
  traits.n = factors.size();
  traits.d = first.dim();
  traits.mass = first.mass();
  traits.hbar = first.hbar();
  traits.real_valued = true;
  traits.normalizable = true;
  traits.geometry = first.dim() == 3 ? QuadratureGeometry::spherical : QuadratureGeometry::cartesian;
  double energy = 0.0, kinetic = 0.0;
  bool stationary = true, kinetic_known = true;
  std::vector<std::shared_ptr<const WavefunctionKernel>> kernels;
  traits.label = "product:";
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const WavefunctionModel& f = factors[k];
    if (f.particles() != 1) throw DomainError("product factors must be one-particle models");
    if (f.dim() != first.dim()) throw DomainError("product factors must share the spatial dimension");
    if (f.mass() != first.mass() || f.hbar() != first.hbar()) throw DomainError("product factors must share mass and hbar");
    if (f.potential().description != first.potential().description) {
      throw DomainError("product factors must share the one-body potential");
    }
    stationary = stationary && f.is_stationary();
    if (f.is_stationary()) energy += *f.energy();
    kinetic_known = kinetic_known && f.traits().kinetic_expectation.has_value();
    if (kinetic_known) kinetic += *f.traits().kinetic_expectation;
    traits.real_valued = traits.real_valued && f.is_real_valued();
    traits.normalizable = traits.normalizable && f.is_normalizable();
    kernels.push_back(f.kernel());
    traits.label += (k ? "+" : "") + f.label();
  }
  if (stationary) traits.energy = energy;
  if (stationary && kinetic_known) traits.kinetic_expectation = kinetic;

  PotentialSpec potential = first.potential();
  potential.pair_interaction = false;
  return WavefunctionModel(std::move(traits), std::move(potential),
                           std::make_shared<ProductKernel>(std::move(kernels), first.dim()));
}

WavefunctionModel make_plane_wave(double k, double mass, double hbar) {
  require_positive(mass, "mass");
  require_positive(hbar, "hbar");
  if (!std::isfinite(k)) throw DomainError("k must be finite");
  const double energy = hbar * hbar * k * k / (2.0 * mass);
  ModelTraits traits;
  traits.mass = mass;
  traits.hbar = hbar;
  traits.energy = energy;
  traits.normalizable = false;
  traits.label = "plane:k=" + format_number(k);
  return WavefunctionModel(std::move(traits), free_potential(), std::make_shared<PlaneWaveKernel>(k, energy, hbar));
}

double potential_energy(const WavefunctionModel& model, const ParticleConfig& config) {
  model.check_regular(config);
  const PotentialSpec& potential = model.potential();
  const std::size_t n = config.particles();
  double u = 0.0;
  for (std::size_t i = 0; i < n; ++i) u += potential.external(config.position(i));
  if (potential.pair_interaction) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double s = 0.0;
        const auto ri = config.position(i), rj = config.position(j);
        for (std::size_t k = 0; k < config.dim(); ++k) s += (ri[k] - rj[k]) * (ri[k] - rj[k]);
        const double rij = std::sqrt(s);
        if (rij < kSingularRadius) {
          throw SingularityError(model.label() + ": pair (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") coincide");
        }
        u += 1.0 / rij;
      }
    }
  }
  return u;
}

}  // namespace bohmdyn

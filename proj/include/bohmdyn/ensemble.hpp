#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bohmdyn/dynamics.hpp"
#include "bohmdyn/particle_config.hpp"
#include "bohmdyn/quadrature.hpp"
#include "bohmdyn/states.hpp"

namespace bohmdyn {

struct SamplerSettings {
  std::size_t n_samples = 10'000;
  std::size_t burn_in = 2'000;
  std::size_t thinning = 10;
  double proposal_sigma = 0.5;
  std::uint64_t seed = 1;
};

struct PassFlag {
  bool passed = false;
  double tolerance = 0.0;
};

struct EnsembleReport {
  std::optional<double> acceptance_rate;
  std::map<std::string, double> values;
  std::map<std::string, double> distances;
  std::map<std::string, PassFlag> pass_flags;
  std::vector<std::string> warnings;

  bool all_passed() const;
};

struct SampleChain {
  std::vector<ParticleConfig> samples;
  double acceptance_rate = 0.0;
};

/// Metropolis random walk targeting Υ(·, t). Bitwise reproducible for a
/// given seed. UsageError for non-normalizable models.
SampleChain run_sampler(const WavefunctionModel& model, double t, const SamplerSettings& settings);

std::vector<ParticleConfig> sample_density(const WavefunctionModel& model, double t,
                                           const SamplerSettings& settings);

/// ∫Υ over the quadrature domain.
EnsembleReport normalization_check(const WavefunctionModel& model, const QuadratureSpec& quad, double t = 0.0);

/// Compares −(ħ²/2m)Σ_i∫R∇_i²R with Σ_i ½m∫Υu_i² (and the closed-form ⟨T⟩
/// when known). Stationary real-valued states only.
EnsembleReport kinetic_expectation_check(const WavefunctionModel& model, const QuadratureSpec& quad);

/// |∫P_i| against ∫|P_i|. Stationary states only.
EnsembleReport pressure_integral_check(const WavefunctionModel& model, const QuadratureSpec& quad, std::size_t i);

struct EquivarianceOptions {
  std::size_t control_seeds = 20;
  double control_percentile = 0.95;
  /// Also transport the ensemble with v + u(sign) and report its distances.
  bool run_augmented = true;
  Sign augmented_sign = Sign::plus;
};

/// Samples Υ(·, t0), transports every sample with the Bohm flow to t1 and
/// compares each one-dimensional marginal with Υ(·, t1). The pass threshold
/// per marginal is the control_percentile of the KS statistics of
/// control_seeds fresh i.i.d. draws of the same size.
EnsembleReport equivariance_check(const WavefunctionModel& model, double t0, double t1,
                                  const SamplerSettings& sampler, const IntegratorSettings& integrator,
                                  const EquivarianceOptions& options = {});

/// Cumulative distribution of one coordinate's marginal of Υ(·, t), tabulated
/// on a fine grid. Supports up to three coordinates in total.
class MarginalDistribution {
 public:
  MarginalDistribution(const WavefunctionModel& model, double t, std::size_t coordinate, std::size_t grid = 4001);

  double cdf(double x) const;
  double quantile(double u) const;
  double lower() const { return grid_.front(); }
  double upper() const { return grid_.back(); }

 private:
  std::vector<double> grid_;
  std::vector<double> cumulative_;
};

/// One-sample Kolmogorov–Smirnov statistic sup|F_n − F|. Sorts `values`.
double ks_statistic(std::vector<double>& values, const MarginalDistribution& target);

struct HistogramDistance {
  double l1 = 0.0;
  double bin_width = 0.0;
  std::size_t bins = 0;
};

/// Σ|p̂_b − p_b| over Freedman–Diaconis bins spanning the sample, with the
/// target mass outside the span added.
HistogramDistance histogram_l1(std::vector<double> values, const MarginalDistribution& target);

/// Linear-interpolated percentile (q in [0, 1]).
double percentile(std::vector<double> values, double q);

}  // namespace bohmdyn

#include "bohmdyn/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "bohmdyn/errors.hpp"
#include "bohmdyn/fields.hpp"
#include "bohmdyn/probes.hpp"
#include "parallel.hpp"

namespace bohmdyn {

namespace {

double upsilon_or_zero(const WavefunctionModel& model, const ParticleConfig& config, double t) {
  try {
    return std::norm(model.evaluate(config, t).value);
  } catch (const SingularityError&) {
    return 0.0;
  }
}

std::string coordinate_key(const char* prefix, std::size_t k) { return std::string(prefix) + "_x" + std::to_string(k); }

void require_normalizable(const WavefunctionModel& model) {
  if (!model.is_normalizable()) throw UsageError(model.label() + " is not normalizable");
}

}  // namespace

bool EnsembleReport::all_passed() const {
  return std::all_of(pass_flags.begin(), pass_flags.end(), [](const auto& kv) { return kv.second.passed; });
}

// ---------------------------------------------------------------------------

SampleChain run_sampler(const WavefunctionModel& model, double t, const SamplerSettings& settings) {
  require_normalizable(model);
  if (settings.n_samples < 1 || settings.thinning < 1) throw UsageError("sampler needs n_samples, thinning >= 1");
  if (!(settings.proposal_sigma > 0.0)) throw UsageError("sampler proposal_sigma must be positive");

  std::mt19937_64 rng(settings.seed);
  std::normal_distribution<double> step(0.0, settings.proposal_sigma);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  ParticleConfig current = densest_point(model, t);
  double p_current = upsilon_or_zero(model, current, t);
  ParticleConfig proposal = current;
  const std::size_t m = current.coords().size();

  SampleChain chain;
  chain.samples.reserve(settings.n_samples);
  const std::size_t total = settings.burn_in + settings.n_samples * settings.thinning;
  std::size_t accepted = 0;
  for (std::size_t it = 0; it < total; ++it) {
    for (std::size_t k = 0; k < m; ++k) proposal.coords()[k] = current.coords()[k] + step(rng);
    const double p_proposal = upsilon_or_zero(model, proposal, t);
    const double u = uniform(rng);
    if (p_proposal >= p_current || u * p_current < p_proposal) {
      std::swap(current, proposal);
      p_current = p_proposal;
      ++accepted;
    }
    if (it >= settings.burn_in && (it - settings.burn_in + 1) % settings.thinning == 0) chain.samples.push_back(current);
  }
  chain.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(total);
  return chain;
}

std::vector<ParticleConfig> sample_density(const WavefunctionModel& model, double t, const SamplerSettings& settings) {
  return run_sampler(model, t, settings).samples;
}

// ---------------------------------------------------------------------------

EnsembleReport normalization_check(const WavefunctionModel& model, const QuadratureSpec& quad, double t) {
  require_normalizable(model);
  const auto sums = integrate(model, quad, t, 1, [](const WavefunctionJet& jet, const ParticleConfig&, std::span<double> out) {
    out[0] = std::norm(jet.value);
  });
  EnsembleReport report;
  report.values["integral"] = sums[0];
  constexpr double kTolerance = 1e-8;
  report.pass_flags["normalization"] = {std::abs(sums[0] - 1.0) <= kTolerance, kTolerance};
  return report;
}

EnsembleReport kinetic_expectation_check(const WavefunctionModel& model, const QuadratureSpec& quad) {
  if (!model.is_stationary() || !model.is_real_valued()) {
    throw UsageError("kinetic expectation check needs a stationary real-valued state, got " + model.label());
  }
  require_normalizable(model);
  const std::size_t n = model.particles(), d = model.dim();
  const double mass = model.mass(), hbar = model.hbar();
  const double scale = hbar / mass;

  const auto sums = integrate(model, quad, 0.0, 2, [&](const WavefunctionJet& jet, const ParticleConfig&, std::span<double> out) {
    const double upsilon = std::norm(jet.value);
    for (std::size_t i = 0; i < n; ++i) {
      out[0] += -hbar * hbar / (2.0 * mass) * (std::conj(jet.value) * jet.laplacian[i]).real();
      for (std::size_t k = 0; k < d; ++k) {
        const Complex g = jet.gradient[i * d + k];
        // Υu² = (ħ/m)² Re(Ψ*∇Ψ)²/Υ, continued by (ħ/m)²|∇Ψ|² where Υ vanishes.
        const double upsilon_u2 = upsilon > 0.0 ? scale * scale * std::pow((std::conj(jet.value) * g).real(), 2) / upsilon
                                                : scale * scale * std::norm(g);
        out[1] += 0.5 * mass * upsilon_u2;
      }
    }
  });

  EnsembleReport report;
  const double lhs = sums[0], rhs = sums[1];
  report.values["lhs"] = lhs;
  report.values["rhs"] = rhs;
  const double rel = std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
  report.values["relative_difference"] = rel;
  constexpr double kTolerance = 1e-6;
  report.pass_flags["kinetic_equality"] = {rel <= kTolerance, kTolerance};
  if (const auto exact = model.traits().kinetic_expectation) {
    report.values["analytic"] = *exact;
    const double rel_exact = std::max(std::abs(lhs - *exact), std::abs(rhs - *exact)) / std::abs(*exact);
    report.values["analytic_relative_difference"] = rel_exact;
    report.pass_flags["kinetic_analytic"] = {rel_exact <= kTolerance, kTolerance};
  }
  return report;
}

EnsembleReport pressure_integral_check(const WavefunctionModel& model, const QuadratureSpec& quad, std::size_t i) {
  if (!model.is_stationary()) throw UsageError("pressure integral check needs a stationary state, got " + model.label());
  require_normalizable(model);
  if (i >= model.particles()) throw UsageError("particle index out of range for " + model.label());
  const std::size_t d = model.dim();
  const double mass = model.mass(), hbar = model.hbar();
  const auto sums = integrate(model, quad, 0.0, 2, [&](const WavefunctionJet& jet, const ParticleConfig&, std::span<double> out) {
    const double p = detail::pressure_from_jet(jet, i, d, mass, hbar);
    out[0] = p;
    out[1] = std::abs(p);
  });
  EnsembleReport report;
  report.values["integral"] = sums[0];
  report.values["abs_integral"] = sums[1];
  const double tolerance = 1e-8 * sums[1];
  report.pass_flags["pressure_integral"] = {std::abs(sums[0]) <= tolerance, tolerance};
  return report;
}

// ---------------------------------------------------------------------------

MarginalDistribution::MarginalDistribution(const WavefunctionModel& model, double t, std::size_t coordinate,
                                           std::size_t grid) {
  require_normalizable(model);
  const std::size_t m = model.particles() * model.dim();
  if (coordinate >= m) throw UsageError("marginal coordinate out of range");
  if (m > 3) throw UsageError("marginal distributions support at most three coordinates");
  if (grid < 3) throw UsageError("marginal grid needs at least 3 points");

  const auto box = cartesian_extent(model, t);
  std::vector<std::size_t> others;
  for (std::size_t k = 0; k < m; ++k) {
    if (k != coordinate) others.push_back(k);
  }
  constexpr std::size_t kInnerPoints = 48;
  std::vector<std::vector<double>> nodes(others.size()), weights(others.size());
  for (std::size_t a = 0; a < others.size(); ++a) {
    rule_nodes(QuadratureRule::gauss_legendre, kInnerPoints, box[others[a]].lower, box[others[a]].upper, nodes[a],
               weights[a]);
  }
  std::size_t inner = 1;
  for (std::size_t a = 0; a < others.size(); ++a) inner *= kInnerPoints;

  const Interval span = box[coordinate];
  grid_.resize(grid);
  std::vector<double> marginal(grid);
  detail::parallel_for(grid, [&](std::size_t j) {
    const double x = span.lower + (span.upper - span.lower) * static_cast<double>(j) / static_cast<double>(grid - 1);
    grid_[j] = x;
    ParticleConfig config = model.make_config(std::vector<double>(m, 0.0));
    config.coords()[coordinate] = x;
    double sum = 0.0;
    for (std::size_t lin = 0; lin < inner; ++lin) {
      double w = 1.0;
      std::size_t rest = lin;
      for (std::size_t a = 0; a < others.size(); ++a) {
        const std::size_t idx = rest % kInnerPoints;
        rest /= kInnerPoints;
        config.coords()[others[a]] = nodes[a][idx];
        w *= weights[a][idx];
      }
      sum += w * upsilon_or_zero(model, config, t);
    }
    marginal[j] = sum;
  });

  cumulative_.assign(grid, 0.0);
  for (std::size_t j = 1; j < grid; ++j) {
    cumulative_[j] = cumulative_[j - 1] + 0.5 * (marginal[j] + marginal[j - 1]) * (grid_[j] - grid_[j - 1]);
  }
  const double total = cumulative_.back();
  if (!(total > 0.0)) throw UsageError("marginal of " + model.label() + " has no mass");
  for (double& c : cumulative_) c /= total;
}

double MarginalDistribution::cdf(double x) const {
  if (x <= grid_.front()) return 0.0;
  if (x >= grid_.back()) return 1.0;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - grid_.begin());
  const double f = (x - grid_[j - 1]) / (grid_[j] - grid_[j - 1]);
  return cumulative_[j - 1] + f * (cumulative_[j] - cumulative_[j - 1]);
}

double MarginalDistribution::quantile(double u) const {
  if (u <= 0.0) return grid_.front();
  if (u >= 1.0) return grid_.back();
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
  const std::size_t j = std::max<std::size_t>(1, static_cast<std::size_t>(it - cumulative_.begin()));
  const double span = cumulative_[j] - cumulative_[j - 1];
  const double f = span > 0.0 ? (u - cumulative_[j - 1]) / span : 0.0;
  return grid_[j - 1] + f * (grid_[j] - grid_[j - 1]);
}

double ks_statistic(std::vector<double>& values, const MarginalDistribution& target) {
  if (values.empty()) throw UsageError("KS statistic of an empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = target.cdf(values[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

HistogramDistance histogram_l1(std::vector<double> values, const MarginalDistribution& target) {
  if (values.size() < 2) throw UsageError("histogram distance needs at least two samples");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double iqr = percentile(values, 0.75) - percentile(values, 0.25);
  const double lo = values.front(), hi = values.back();
  HistogramDistance out;
  out.bin_width = 2.0 * iqr / std::cbrt(n);
  if (!(out.bin_width > 0.0)) out.bin_width = (hi - lo > 0.0) ? (hi - lo) : 1.0;
  out.bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / out.bin_width)));

  std::vector<double> counts(out.bins, 0.0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / out.bin_width);
    counts[std::min(b, out.bins - 1)] += 1.0;
  }
  double l1 = target.cdf(lo) + (1.0 - target.cdf(lo + out.bins * out.bin_width));
  for (std::size_t b = 0; b < out.bins; ++b) {
    const double a = lo + b * out.bin_width;
    const double p = target.cdf(a + out.bin_width) - target.cdf(a);
    l1 += std::abs(counts[b] / n - p);
  }
  out.l1 = l1;
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw UsageError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

// ---------------------------------------------------------------------------

namespace {

struct Transported {
  std::vector<ParticleConfig> finals;
  double abort_fraction = 0.0;
};

Transported transport(const WavefunctionModel& model, const std::vector<ParticleConfig>& start, double t0, double t1,
                      const VelocityMode& mode, const IntegratorSettings& integrator) {
  std::vector<EndState> ends(start.size());
  detail::parallel_for(start.size(), [&](std::size_t s) { ends[s] = advance(model, start[s], t0, t1, mode, integrator); });
  Transported out;
  std::size_t aborted = 0;
  for (auto& e : ends) {
    if (e.termination == Termination::completed) {
      out.finals.push_back(std::move(e.config));
    } else {
      ++aborted;
    }
  }
  out.abort_fraction = start.empty() ? 0.0 : static_cast<double>(aborted) / static_cast<double>(start.size());
  return out;
}

std::vector<double> column(const std::vector<ParticleConfig>& configs, std::size_t k) {
  std::vector<double> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(c.coords()[k]);
  return out;
}

}  // namespace

EnsembleReport equivariance_check(const WavefunctionModel& model, double t0, double t1,
                                  const SamplerSettings& sampler, const IntegratorSettings& integrator,
                                  const EquivarianceOptions& options) {
  require_normalizable(model);
  if (options.control_seeds < 2) throw UsageError("equivariance check needs at least two control seeds");

  EnsembleReport report;
  const SampleChain chain = run_sampler(model, t0, sampler);
  report.acceptance_rate = chain.acceptance_rate;
  report.values["n_samples"] = static_cast<double>(chain.samples.size());
  report.values["t0"] = t0;
  report.values["t1"] = t1;

  const Transported bohm = transport(model, chain.samples, t0, t1, VelocityMode::bohm(), integrator);
  report.values["node_abort_fraction"] = bohm.abort_fraction;
  if (bohm.abort_fraction > 0.01) {
    report.warnings.push_back("bohm transport: node_abort fraction " + std::to_string(bohm.abort_fraction) +
                              " exceeds 1%");
  }
  if (bohm.finals.empty()) throw UsageError("every transported sample aborted at a node");

  std::optional<Transported> augmented;
  if (options.run_augmented) {
    augmented = transport(model, chain.samples, t0, t1, VelocityMode::augmented(options.augmented_sign), integrator);
    report.values["augmented_node_abort_fraction"] = augmented->abort_fraction;
  }

  const std::size_t m = model.particles() * model.dim();
  for (std::size_t k = 0; k < m; ++k) {
    const MarginalDistribution start_target(model, t0, k);
    const MarginalDistribution end_target(model, t1, k);

    auto start_values = column(chain.samples, k);
    auto end_values = column(bohm.finals, k);
    report.distances[coordinate_key("ks_t0", k)] = ks_statistic(start_values, start_target);
    report.distances[coordinate_key("ks_t1", k)] = ks_statistic(end_values, end_target);
    report.distances[coordinate_key("l1_t0", k)] = histogram_l1(start_values, start_target).l1;
    const auto hist = histogram_l1(end_values, end_target);
    report.distances[coordinate_key("l1_t1", k)] = hist.l1;
    report.values[coordinate_key("fd_bin_width", k)] = hist.bin_width;

    if (augmented && augmented->finals.size() >= 2) {
      auto aug_values = column(augmented->finals, k);
      report.distances[coordinate_key("augmented_ks_t1", k)] = ks_statistic(aug_values, end_target);
      report.distances[coordinate_key("augmented_l1_t1", k)] = histogram_l1(aug_values, end_target).l1;
    }

    // i.i.d. controls of the same size calibrate the finite-N KS noise.
    std::vector<double> control_ks(options.control_seeds);
    const std::size_t size = bohm.finals.size();
    detail::parallel_for(options.control_seeds, [&](std::size_t c) {
      std::mt19937_64 rng(splitmix64(sampler.seed ^ (0xC0FFEEULL + 1000003ULL * (c + 1) + 7919ULL * k)));
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      std::vector<double> draws(size);
      for (double& x : draws) x = end_target.quantile(uniform(rng));
      control_ks[c] = ks_statistic(draws, end_target);
    });
    const double threshold = percentile(control_ks, options.control_percentile);
    report.values[coordinate_key("ks_threshold", k)] = threshold;
    report.values[coordinate_key("ks_control_median", k)] = percentile(control_ks, 0.5);
    report.pass_flags[coordinate_key("equivariance_ks", k)] = {
        report.distances[coordinate_key("ks_t1", k)] <= threshold, threshold};
  }
  return report;
}

}  // namespace bohmdyn

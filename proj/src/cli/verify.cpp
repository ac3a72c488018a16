#include "bohmdyn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "bohmdyn/ensemble.hpp"
#include "bohmdyn/errors.hpp"
#include "bohmdyn/fields.hpp"
#include "bohmdyn/probes.hpp"

namespace bohmdyn {

namespace {

constexpr double kFdStep = 1e-4;
constexpr double kMinDensity = 1e-8;

CheckResult not_applicable(std::string name, std::string why) {
  CheckResult c;
  c.name = std::move(name);
  c.note = std::move(why);
  return c;
}

CheckResult judged(std::string name, double worst, double tolerance) {
  CheckResult c;
  c.name = std::move(name);
  c.tolerance = tolerance;
  c.status = worst <= tolerance ? CheckStatus::pass : CheckStatus::fail;
  return c;
}

CheckResult from_report(std::string name, const EnsembleReport& report, const std::string& flag) {
  CheckResult c;
  c.name = std::move(name);
  const PassFlag& f = report.pass_flags.at(flag);
  c.tolerance = f.tolerance;
  c.status = f.passed ? CheckStatus::pass : CheckStatus::fail;
  c.values = report.values;
  return c;
}

}  // namespace

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_applicable: return "not-applicable";
  }
  return "unknown";
}

bool VerifyReport::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::fail; });
}

QuadratureSpec quadrature_from_config(const WavefunctionModel& model, double t, const QuadratureConfig& config) {
  QuadratureSpec spec = auto_quadrature(model, t, config.points_per_dim, config.tail_threshold);
  if (config.angular_points) spec.angular_points = *config.angular_points;
  spec.rule = config.rule == "trapezoid" ? QuadratureRule::trapezoid : QuadratureRule::gauss_legendre;
  validate(spec, model);
  return spec;
}

VerifyReport verify_state(const WavefunctionModel& model, const VerifyConfig& config,
                          const QuadratureConfig& quadrature) {
  VerifyReport report;
  report.state = model.label();
  const FieldOptions options{config.node_epsilon};
  const double t_max = model.is_stationary() ? 0.0 : config.t_max;
  const auto probes = probe_points(model, config.probes, kMinDensity, t_max);
  std::optional<QuadratureSpec> quad;
  if (model.is_normalizable()) quad = quadrature_from_config(model, 0.0, quadrature);

  {
    double grad = 0.0, lap = 0.0;
    for (const auto& p : probes) {
      const auto m = derivative_mismatch(model, p.config, p.t, kFdStep);
      grad = std::max(grad, m.gradient);
      lap = std::max(lap, m.laplacian);
    }
    auto c = judged("derivative_oracle", std::max(grad, lap), 1e-6);
    c.values = {{"max_gradient_error", grad}, {"max_laplacian_error", lap}, {"points", double(probes.size())},
                {"h", kFdStep}};
    report.checks.push_back(std::move(c));
  }

  {
    double worst = 0.0;
    for (const auto& p : probes) {
      const double q = quantum_potential(model, p.config, p.t, options);
      const auto parts = quantum_potential_decomposed(model, p.config, p.t, options);
      worst = std::max(worst, std::abs(q - (parts.kinetic_u + parts.compression)) / (1.0 + std::abs(q)));
    }
    auto c = judged("quantum_potential_decomposition", worst, 1e-9);
    c.values = {{"max_scaled_mismatch", worst}, {"points", double(probes.size())}};
    report.checks.push_back(std::move(c));
  }

  {
    double worst = 0.0;
    for (const auto& p : probes) {
      const auto b = energy_budget(model, p.config, p.t, options);
      worst = std::max(worst, std::abs(b.residual) / b.magnitude());
    }
    auto c = judged("energy_budget", worst, 1e-9);
    c.values = {{"max_relative_residual", worst}, {"points", double(probes.size())}};
    report.checks.push_back(std::move(c));
  }

  if (model.is_stationary()) {
    const double energy = *model.energy();
    double worst = 0.0;
    for (const auto& p : probes) {
      const auto b = stationary_budget(model, p.config, options);
      worst = std::max(worst, std::abs(b.residual) / (1.0 + std::abs(energy)));
    }
    auto c = judged("stationary_budget", worst, 1e-8);
    c.values = {{"max_scaled_residual", worst}, {"energy", energy}, {"points", double(probes.size())}};
    report.checks.push_back(std::move(c));
  } else {
    report.checks.push_back(not_applicable("stationary_budget", "state is not stationary"));
  }

  {
    double worst = 0.0;
    for (const auto& p : probes) worst = std::max(worst, std::abs(continuity_residual(model, p.config, p.t)));
    auto c = judged("continuity", worst, 1e-9);
    c.values = {{"max_abs_residual", worst}, {"points", double(probes.size())}};
    report.checks.push_back(std::move(c));
  }

  if (model.is_normalizable()) {
    report.checks.push_back(
        from_report("normalization", normalization_check(model, *quad),
                    "normalization"));
  } else {
    report.checks.push_back(not_applicable("normalization", "state is not normalizable"));
  }

  if (model.is_stationary() && model.is_real_valued() && model.is_normalizable()) {
    const auto k = kinetic_expectation_check(model, *quad);
    auto c = from_report("kinetic_expectation", k, "kinetic_equality");
    if (const auto it = k.pass_flags.find("kinetic_analytic"); it != k.pass_flags.end() && !it->second.passed) {
      c.status = CheckStatus::fail;
      c.note = "quadrature disagrees with the closed-form kinetic energy";
    }
    report.checks.push_back(std::move(c));
  } else {
    report.checks.push_back(not_applicable("kinetic_expectation", "needs a stationary, real-valued, normalizable state"));
  }

  for (std::size_t i = 0; i < model.particles(); ++i) {
    const std::string name = "pressure_integral_p" + std::to_string(i);
    if (model.is_stationary() && model.is_normalizable()) {
      report.checks.push_back(from_report(
          name, pressure_integral_check(model, *quad, i), "pressure_integral"));
    } else {
      report.checks.push_back(not_applicable(name, "needs a stationary, normalizable state"));
    }
  }
  return report;
}

}  // namespace bohmdyn

#pragma once

#include <map>
#include <string>
#include <vector>

#include "bohmdyn/quadrature.hpp"
#include "bohmdyn/run_config.hpp"
#include "bohmdyn/states.hpp"

namespace bohmdyn {

enum class CheckStatus { pass, fail, not_applicable };

const char* to_string(CheckStatus status);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::not_applicable;
  double tolerance = 0.0;
  std::map<std::string, double> values;
  std::string note;
};

struct VerifyReport {
  std::string state;
  std::vector<CheckResult> checks;

  /// No check failed; not-applicable checks do not count.
  bool passed() const;
};

/// Auto-sized quadrature for `model` at time t with the overrides in `config`.
QuadratureSpec quadrature_from_config(const WavefunctionModel& model, double t, const QuadratureConfig& config);

/// Runs the identity suite: derivative oracle, Q decomposition, energy
/// budgets, continuity, normalization, kinetic expectation and the pressure
/// integrals. Checks that need a stationary, real or normalizable state are
/// reported as not applicable elsewhere.
VerifyReport verify_state(const WavefunctionModel& model, const VerifyConfig& config,
                          const QuadratureConfig& quadrature);

}  // namespace bohmdyn

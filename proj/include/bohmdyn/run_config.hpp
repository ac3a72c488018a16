#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bohmdyn {

inline constexpr const char* kFormatVersion = "1";

struct FieldGridConfig {
  std::optional<std::vector<double>> start;
  std::optional<std::vector<double>> end;
  std::size_t points = 121;
  double t = 0.0;
  double node_epsilon = 1e-10;
};

struct TrajectoryConfig {
  std::vector<std::vector<double>> initial;
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 1e-3;
  std::string mode = "bohm";  // bohm | augmented+ | augmented-
  std::size_t store_every = 1;
  double node_epsilon = 1e-10;
  double speed_ceiling = 1e3;
  bool record_budgets = true;
};

struct EnsembleConfig {
  std::string check = "sample";  // sample | equivariance
  double t = 0.0;
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t n_samples = 10'000;
  std::size_t burn_in = 2'000;
  std::size_t thinning = 10;
  double proposal_sigma = 0.5;
  double dt = 1e-2;
  std::size_t control_seeds = 20;
  double control_percentile = 0.95;
  bool augmented = true;
  std::string augmented_sign = "+";
  bool write_samples = false;
};

struct QuadratureConfig {
  std::size_t points_per_dim = 0;  // 0: geometry default
  std::optional<std::size_t> angular_points;
  std::string rule = "gauss_legendre";
  double tail_threshold = 1e-12;
};

struct VerifyConfig {
  std::size_t probes = 100;
  double t_max = 2.0;
  double node_epsilon = 1e-10;
};

/// Parsed run configuration. Every section is optional; keys not listed in
/// the README are rejected.
struct RunConfig {
  std::string format_version = kFormatVersion;
  std::optional<std::string> state_id;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  FieldGridConfig fields;
  TrajectoryConfig traj;
  EnsembleConfig ensemble;
  QuadratureConfig quadrature;
  VerifyConfig verify;
};

/// Throws ConfigError with the offending line number.
RunConfig parse_run_config(const std::string& text);

/// Reads and parses a file; IoError when it cannot be read.
RunConfig load_run_config(const std::string& path);

}  // namespace bohmdyn

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bohmdyn {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfigError = 2, kExitDegenerate = 3 };

struct JobRequest {
  std::string command;  // catalog | fields | traj | verify | ensemble
  std::string state_id;  // overrides [run] state; "all" runs verify over the catalog
  std::string config_path;
  std::string output_dir;  // overrides [run] output_dir
  std::optional<std::uint64_t> seed;
  bool json = false;
};

struct JobResult {
  int exit_code = kExitOk;
  /// Text for stdout: a summary, or the JSON document when json is set.
  std::string report;
  /// Diagnostics for stderr.
  std::string errors;
  std::vector<std::string> files;
};

/// Runs one CLI command. Never throws: configuration and usage errors become
/// exit code 2 with the message in `errors`.
JobResult run_job(const JobRequest& request);

/// Round-trip decimal form with 17 significant digits.
std::string format_double(double x);

}  // namespace bohmdyn

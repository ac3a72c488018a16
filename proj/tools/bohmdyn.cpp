#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bohmdyn/bohmdyn.h"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool json = false;
  std::string state;
};

int run(const std::string& command, const Options& opts, bool has_seed) {
  bohmdyn_job_request request{};
  request.command = command.c_str();
  request.state_id = opts.state.empty() ? nullptr : opts.state.c_str();
  request.config_path = opts.config.empty() ? nullptr : opts.config.c_str();
  request.output_dir = opts.out.empty() ? nullptr : opts.out.c_str();
  request.seed = opts.seed;
  request.has_seed = has_seed;
  request.json = opts.json;

  int exit_code = 2;
  char* report = nullptr;
  char* errors = nullptr;
  if (bohmdyn_job_run(&request, &exit_code, &report, &errors) != BOHMDYN_OK) {
    std::cerr << "error: " << bohmdyn_last_error() << "\n";
    return 2;
  }
  std::cout << report;
  std::cerr << errors;
  bohmdyn_string_free(report);
  bohmdyn_string_free(errors);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bohmian trajectories, velocity fields and energy-budget checks for analytic wavefunctions"};
  app.footer(
      "State ids: name[:token][,key=value]*\n"
      "  ho1d:n=N,omega=W     hydrogen:1s|2s|2pz,Z=Z     hooke\n"
      "  gauss:sigma=S,k=K    super:ho0+ho1[,omega=W]    product:ho0+ho0 | 1s+1s\n"
      "  plane:k=K\n"
      "Unknown keys are errors. BOHMDYN_THREADS caps worker threads.\n"
      "Exit codes: 0 pass, 1 check failure, 2 config error, 3 degenerate input.");
  app.require_subcommand(1);

  Options opts;
  auto add_common = [&](CLI::App* sub, bool with_state) {
    sub->add_option("--config", opts.config, "Run configuration file");
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--seed", opts.seed, "Random seed");
    sub->add_flag("--json", opts.json, "Print JSON instead of text");
    if (with_state) sub->add_option("state", opts.state, "State id (overrides [run] state)");
  };

  auto* catalog = app.add_subcommand("catalog", "List catalog states with n, d, stationarity and energy");
  catalog->add_flag("--json", opts.json, "Print a JSON array");
  auto* fields = app.add_subcommand("fields", "Write field quantities along a grid line to fields.csv");
  add_common(fields, true);
  auto* traj = app.add_subcommand("traj", "Integrate trajectories, one CSV per initial condition");
  add_common(traj, true);
  auto* verify = app.add_subcommand("verify", "Run the identity suite for a state, or 'all' for the catalog");
  add_common(verify, true);
  bool all = false;
  verify->add_flag("--all", all, "Verify every catalog state");
  auto* ensemble = app.add_subcommand("ensemble", "Sample the density or run the equivariance check");
  add_common(ensemble, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto* sub : app.get_subcommands()) {
    if (sub == verify && all) opts.state = "all";
    const bool has_seed = sub->get_option_no_throw("--seed") && sub->get_option("--seed")->count() > 0;
    return run(sub->get_name(), opts, has_seed);
  }
  return 2;
}

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bohmdyn/catalog.hpp"
#include "bohmdyn/dynamics.hpp"
#include "bohmdyn/ensemble.hpp"
#include "bohmdyn/fields.hpp"
#include "bohmdyn/probes.hpp"
#include "bohmdyn/quadrature.hpp"

using namespace bohmdyn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0: no runtime bound
  std::function<Outcome()> run;
};

std::string fmt(const char* format, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, x);
  return buf;
}

const std::vector<std::string> kStationary = {"ho1d:n=0,omega=1", "ho1d:n=1,omega=1", "ho1d:n=2,omega=1",
                                              "ho1d:n=3,omega=1", "hydrogen:1s,Z=1",  "hydrogen:2s,Z=1",
                                              "hydrogen:2pz,Z=1", "hooke"};

Outcome decomposition() {
  double worst = 0.0;
  std::size_t points = 0;
  for (const auto& id : kStationary) {
    const auto model = parse_state_id(id);
    for (const auto& p : probe_points(model, 200, 1e-8)) {
      const double q = quantum_potential(model, p.config, p.t);
      const auto parts = quantum_potential_decomposed(model, p.config, p.t);
      worst = std::max(worst, std::abs(q - parts.kinetic_u - parts.compression) / (1.0 + std::abs(q)));
      ++points;
    }
  }
  return {worst <= 1e-9 && points == 200 * kStationary.size(),
          "points=" + std::to_string(points) + " max|Q-(Ku+C)|/(1+|Q|)=" + fmt("%.3e", worst) + " tol=1e-9"};
}

Outcome stationary_identity() {
  double worst = 0.0, hooke = 0.0;
  for (const auto& id : kStationary) {
    const auto model = parse_state_id(id);
    const double e = *model.energy();
    for (const auto& p : probe_points(model, 200, 1e-8)) {
      const double r = std::abs(stationary_budget(model, p.config).residual) / (1.0 + std::abs(e));
      worst = std::max(worst, r);
      if (id == "hooke") hooke = std::max(hooke, r);
    }
  }
  return {worst <= 1e-8, "max residual/(1+|E|)=" + fmt("%.3e", worst) + " hooke=" + fmt("%.3e", hooke) + " tol=1e-8"};
}

Outcome dynamic_identity() {
  double worst = 0.0;
  for (const std::string id : {"super:ho0+ho1", "gauss:sigma=1,k=2"}) {
    const auto model = parse_state_id(id);
    for (const auto& p : probe_points(model, 100, 1e-8, 2.0)) {
      const auto b = energy_budget(model, p.config, p.t);
      worst = std::max(worst, std::abs(b.residual) / b.magnitude());
    }
  }
  return {worst <= 1e-8, "max residual/sum|terms|=" + fmt("%.3e", worst) + " tol=1e-8"};
}

Outcome kinetic() {
  const std::vector<std::pair<std::string, double>> pins = {
      {"ho1d:n=0,omega=1", 0.25}, {"ho1d:n=2,omega=1", 1.25}, {"hydrogen:1s,Z=1", 0.5}};
  bool ok = true;
  std::string detail;
  for (const auto& [id, pin] : pins) {
    const auto model = parse_state_id(id);
    const auto r = kinetic_expectation_check(model, auto_quadrature(model, 0.0));
    const double lhs = r.values.at("lhs"), rhs = r.values.at("rhs");
    const double rel = r.values.at("relative_difference");
    const double pin_rel = std::abs(lhs - pin) / pin;
    ok = ok && rel <= 1e-6 && pin_rel <= 1e-6;
    detail += id + " lhs=" + fmt("%.12f", lhs) + " rhs=" + fmt("%.12f", rhs) + " rel=" + fmt("%.1e", rel) +
              " pin_rel=" + fmt("%.1e", pin_rel) + "; ";
  }
  return {ok, detail + "tol=1e-6"};
}

Outcome pressure_integral() {
  bool ok = true;
  std::string detail;
  for (const std::string id : {"ho1d:n=0,omega=1", "ho1d:n=1,omega=1", "hydrogen:1s,Z=1"}) {
    const auto model = parse_state_id(id);
    const auto r = pressure_integral_check(model, auto_quadrature(model, 0.0), 0);
    const double ratio = std::abs(r.values.at("integral")) / r.values.at("abs_integral");
    ok = ok && ratio <= 1e-8;
    detail += id + " |intP|/int|P|=" + fmt("%.2e", ratio) + "; ";
  }
  return {ok, detail + "tol=1e-8"};
}

Outcome hydrogen_speed() {
  const auto model = parse_state_id("hydrogen:1s,Z=1");
  double worst = 0.0;
  for (std::size_t k = 0; k < 50; ++k) {
    const double r = 0.1 + (6.0 - 0.1) * k / 49.0;
    // Quasi-random direction on the sphere.
    const double c = 2.0 * halton(k + 1, 0) - 1.0, phi = 2.0 * std::numbers::pi * halton(k + 1, 1);
    const double s = std::sqrt(1.0 - c * c);
    const auto config = model.make_config({r * s * std::cos(phi), r * s * std::sin(phi), r * c});
    const auto u = osmotic_velocity(model, config, 0.0, 0, Sign::plus);
    const double speed = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    worst = std::max(worst, std::abs(speed - 1.0));
  }
  return {worst <= 1e-9, "radii=50 max||u|-1|=" + fmt("%.3e", worst) + " tol=1e-9"};
}

Outcome trajectory() {
  const auto model = parse_state_id("ho1d:n=0,omega=1");
  const auto end_error = [&](double dt) {
    IntegratorSettings s;
    s.dt = dt;
    s.record_budgets = false;
    const auto end = advance(model, model.make_config({1.0}), 0.0, 1.0, VelocityMode::augmented(Sign::plus), s);
    return std::abs(end.config.coords()[0] - std::exp(-1.0));
  };
  const double pin = end_error(1e-3);
  std::vector<double> errors;
  for (double dt = 1e-2; dt > 1e-3; dt /= 2) errors.push_back(end_error(dt));
  double min_ratio = 1e300;
  std::string ratios;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    const double r = errors[k - 1] / errors[k];
    min_ratio = std::min(min_ratio, r);
    ratios += fmt("%.2f", r) + (k + 1 < errors.size() ? "," : "");
  }
  return {pin <= 1e-6 && min_ratio >= 8.0,
          "|x(1)-1/e| at dt=1e-3: " + fmt("%.2e", pin) + " (tol 1e-6); halving ratios " + ratios + " (min 8)"};
}

Outcome equivariance() {
  const auto model = parse_state_id("super:ho0+ho1");
  SamplerSettings sampler;
  sampler.n_samples = 50'000;
  sampler.seed = 1;
  IntegratorSettings integrator;
  integrator.dt = 1e-2;
  integrator.record_budgets = false;
  EquivarianceOptions options;
  options.run_augmented = false;
  const auto r = equivariance_check(model, 0.0, std::numbers::pi, sampler, integrator, options);
  const auto& flag = r.pass_flags.at("equivariance_ks_x0");
  return {flag.passed, "N=50000 ks_t1=" + fmt("%.5f", r.distances.at("ks_t1_x0")) +
                           " threshold(p95 of 20 controls)=" + fmt("%.5f", flag.tolerance) +
                           " l1_t1=" + fmt("%.4f", r.distances.at("l1_t1_x0")) +
                           " acceptance=" + fmt("%.3f", *r.acceptance_rate) +
                           " node_aborts=" + fmt("%.2e", r.values.at("node_abort_fraction"))};
}

Outcome derivative_oracle() {
  double grad = 0.0, lap = 0.0;
  std::size_t points = 0;
  for (const auto& id : catalog_ids()) {
    const auto model = parse_state_id(id);
    for (const auto& p : probe_points(model, 100, 1e-8, model.is_stationary() ? 0.0 : 2.0)) {
      const auto m = derivative_mismatch(model, p.config, p.t, 1e-4);
      grad = std::max(grad, m.gradient);
      lap = std::max(lap, m.laplacian);
      ++points;
    }
  }
  return {grad <= 1e-6 && lap <= 1e-6, "points=" + std::to_string(points) + " max grad err=" + fmt("%.2e", grad) +
                                           " max lap err=" + fmt("%.2e", lap) + " tol=1e-6 h=1e-4"};
}

// ---------------------------------------------------------------------------

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(BOHMDYN_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string csv_schema(const fs::path& path) {
  std::string out, line;
  std::istringstream in(read_file(path));
  while (std::getline(in, line)) {
    if (line.rfind("# schema=", 0) == 0 || line.rfind("t,", 0) == 0) out += line + "\n";
  }
  return out;
}

std::string keys_of(const nlohmann::ordered_json& j) {
  std::string out;
  for (auto it = j.begin(); it != j.end(); ++it) out += (out.empty() ? "" : " ") + it.key();
  return out;
}

Outcome cli_contract() {
  const fs::path dir = fs::temp_directory_path() / "bohmdyn_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path golden = BOHMDYN_GOLDEN_DIR;
  const auto out = dir / "stdout.txt";
  const auto config = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << "[run]\nformat_version = 1\n" << text;
    return (dir / name).string();
  };

  const int verify_code = run_cli("verify --all --json --out " + (dir / "verify").string(), out);
  const auto verify = nlohmann::ordered_json::parse(read_file(dir / "verify" / "verify.json"));

  int golden_pass = 0, golden_total = 0;
  const auto compare = [&](bool same) { golden_total++, golden_pass += same; };
  compare(verify_code == 0 && "document: " + keys_of(verify) + "\nstate: " + keys_of(verify["states"][0]) +
                                      "\ncheck: " + keys_of(verify["states"][0]["checks"][0]) +
                                      "\nschema: " + verify["schema"].get<std::string>() + "\n" ==
                                  read_file(golden / "verify_schema.txt"));
  const auto grid = config("grid.ini", "[fields]\nstart = -3\nend = 3\npoints = 31\n");
  compare(run_cli("fields ho1d:n=0,omega=1 --config " + grid + " --out " + dir.string(), out) == 0 &&
          csv_schema(dir / "fields.csv") == read_file(golden / "fields_ho1d.txt"));
  compare(run_cli("fields hooke --out " + dir.string(), out) == 0 &&
          csv_schema(dir / "fields.csv") == read_file(golden / "fields_hooke.txt"));
  const auto traj = config("traj.ini", "[traj]\ninitial = 1\nmode = augmented+\n");
  compare(run_cli("traj ho1d:n=0,omega=1 --config " + traj + " --out " + dir.string(), out) == 0 &&
          csv_schema(dir / "traj_0.csv") == read_file(golden / "traj_ho1d.txt"));
  compare(run_cli("catalog --json", out) == 0 &&
          "entry: " + keys_of(nlohmann::ordered_json::parse(read_file(out))[0]) + "\n" ==
              read_file(golden / "catalog_schema.txt"));

  const auto ens = config("ensemble.ini", "[ensemble]\nn_samples = 5000\nwrite_samples = true\n");
  bool identical = true;
  for (const std::string check : {"sample", "equivariance"}) {
    const auto cfg = check == "sample" ? ens : config("eq.ini", "[ensemble]\ncheck = equivariance\nn_samples = 3000\n");
    const auto a = dir / (check + "_a"), b = dir / (check + "_b");
    run_cli("ensemble super:ho0+ho1 --seed 42 --config " + cfg + " --out " + a.string(), out);
    run_cli("ensemble super:ho0+ho1 --seed 42 --config " + cfg + " --out " + b.string(), out);
    const auto ja = read_file(a / "ensemble.json");
    identical = identical && !ja.empty() && ja == read_file(b / "ensemble.json");
    if (check == "sample") {
      identical = identical && read_file(a / "samples.csv") == read_file(b / "samples.csv");
    } else {
      const auto doc = nlohmann::ordered_json::parse(ja);
      compare("document: " + keys_of(doc) + "\npass_flag: " + keys_of(doc["pass_flags"]["equivariance_ks_x0"]) +
                  "\nschema: " + doc["schema"].get<std::string>() + "\n" ==
              read_file(golden / "ensemble_schema.txt"));
    }
  }
  return {verify_code == 0 && golden_pass == golden_total && identical,
          "verify --all exit=" + std::to_string(verify_code) + " (" + std::to_string(verify["states"].size()) +
              " states); golden " + std::to_string(golden_pass) + "/" + std::to_string(golden_total) +
              "; seeded ensemble reruns identical=" + (identical ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "quantum-potential decomposition", 5, decomposition},
      {2, "stationary energy identity", 5, stationary_identity},
      {3, "dynamic energy identity", 5, dynamic_identity},
      {4, "kinetic expectation equality", 30, kinetic},
      {5, "pressure integral", 10, pressure_integral},
      {6, "hydrogen 1s augmented speed", 1, hydrogen_speed},
      {7, "trajectory exactness", 1, trajectory},
      {8, "equivariance", 120, equivariance},
      {9, "derivative oracle", 5, derivative_oracle},
      {10, "CLI contract", 0, cli_contract},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds == 0 || seconds < c.budget_seconds;
    const bool passed = o.passed && in_time;
    failures += !passed;
    std::printf("%s #%d %s: %s; runtime %.2fs", passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), seconds);
    if (c.budget_seconds > 0) std::printf(" (limit %gs)", c.budget_seconds);
    std::printf("\n");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

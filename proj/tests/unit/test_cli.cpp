#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bohmdyn/catalog.hpp"
#include "bohmdyn/errors.hpp"
#include "bohmdyn/jobs.hpp"
#include "bohmdyn/run_config.hpp"
#include "cli_support.hpp"

using namespace bohmdyn;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

JobResult job(const std::string& command, const std::string& state, const std::string& config = "",
              const std::string& out = "", bool json = false) {
  JobRequest r;
  r.command = command;
  r.state_id = state;
  r.config_path = config;
  r.output_dir = out;
  r.json = json;
  return run_job(r);
}

std::vector<std::string> csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

long column(const std::vector<std::string>& header, const std::string& name) {
  return std::find(header.begin(), header.end(), name) - header.begin();
}

std::string golden(const std::string& name) { return testing::read_file(fs::path(BOHMDYN_GOLDEN_DIR) / name); }

/// The schema comment plus the column header row of a CSV file.
std::string csv_schema(const fs::path& path) {
  std::string out;
  for (const auto& line : testing::lines_of(testing::read_file(path))) {
    if (line.rfind("# schema=", 0) == 0 || line.rfind("t,", 0) == 0) out += line + "\n";
  }
  return out;
}

/// Data rows of a CSV written by the CLI, with the header as the first entry.
std::vector<std::vector<std::string>> csv_table(const fs::path& path) {
  std::vector<std::vector<std::string>> out;
  for (const auto& line : testing::lines_of(testing::read_file(path))) {
    if (!line.empty() && line[0] != '#') out.push_back(csv_row(line));
  }
  return out;
}

}  // namespace

TEST_CASE("state ids") {
  CHECK(*parse_state_id("ho1d:n=2,omega=1").energy() == 2.5);
  CHECK(parse_state_id("hydrogen:2pz,Z=1").label() == "hydrogen:2pz,Z=1");
  CHECK(parse_state_id("super:ho0+ho1").label() == "super:ho0+ho1");
  CHECK(parse_state_id("super:ho0+ho1,omega=2").label() == "super:ho0+ho1,omega=2");
  CHECK(parse_state_id("product:1s+1s").particles() == 2);
  CHECK(*parse_state_id("product:1s+1s").energy() == -1.0);
  CHECK(parse_state_id("ho1d").label() == "ho1d:n=0,omega=1");
  CHECK_FALSE(parse_state_id("plane:k=2").is_normalizable());
  for (const auto& id : catalog_ids()) CHECK(parse_state_id(id).label() == id);

  CHECK_THROWS_AS(parse_state_id("ho1d:n=2,omega=1,mass=2"), ConfigError);
  CHECK_THROWS_AS(parse_state_id("ho1d:n=13"), ConfigError);
  CHECK_THROWS_AS(parse_state_id("ho1d:n=1.5"), ConfigError);
  CHECK_THROWS_AS(parse_state_id("ho1d:omega=abc"), ConfigError);
  CHECK_THROWS_AS(parse_state_id("ho1d:omega=-1"), ConfigError);
  CHECK_THROWS_AS(parse_state_id("hydrogen:3d"), ConfigError);
  CHECK_THROWS_AS(parse_state_id("hooke:Z=1"), ConfigError);
  CHECK_THROWS_AS(parse_state_id("super:ho0+2s"), ConfigError);
  CHECK_THROWS_AS(parse_state_id("super:ho0++ho1"), ConfigError);
  CHECK_THROWS_AS(parse_state_id("helium"), ConfigError);
}

TEST_CASE("run config parsing is strict") {
  const auto c = parse_run_config(
      "# comment\n[run]\nformat_version = 1\nstate = hooke\nseed = 9\n\n[traj]\ninitial = 1, 2; 3, 4\nmode = "
      "augmented-\n[ensemble]\ncheck = equivariance\naugmented = false\n[quadrature]\nrule = trapezoid\n");
  CHECK(*c.state_id == "hooke");
  CHECK(*c.seed == 9);
  CHECK(c.traj.initial.size() == 2);
  CHECK(c.traj.initial[1][1] == 4.0);
  CHECK(c.traj.mode == "augmented-");
  CHECK_FALSE(c.ensemble.augmented);
  CHECK(c.quadrature.rule == "trapezoid");

  const std::string head = "[run]\nformat_version = 1\n";
  CHECK_THROWS_AS(parse_run_config("[run]\nstate = hooke\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[run]\nformat_version = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(head + "[mystery]\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(head + "[traj]\nspeed = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(head + "[traj]\ndt = 0.1\ndt = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(head + "[traj]\ndt = -0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(head + "[traj]\nmode = sideways\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(head + "[fields]\npoints = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("format_version = 1\n"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config(head + "[fields]\nstart = 1, x\n"), doctest::Contains("line 4"), ConfigError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/run.ini"), IoError);
}

TEST_CASE("catalog command") {
  const auto text = job("catalog", "");
  CHECK(text.exit_code == 0);
  bool hooke = false, hydrogen = false;
  for (const auto& line : testing::lines_of(text.report)) {
    if (line.rfind("hooke ", 0) == 0) hooke = line.find("E=2.0") != std::string::npos;
    if (line.rfind("hydrogen:1s,Z=1 ", 0) == 0) hydrogen = line.find("E=-0.5") != std::string::npos;
  }
  CHECK(hooke);
  CHECK(hydrogen);

  const auto doc = ordered_json::parse(job("catalog", "", "", "", true).report);
  REQUIRE(doc.is_array());
  CHECK(doc.size() == catalog_ids().size());
  CHECK("entry: " + testing::keys_of(doc[0]) + "\n" == golden("catalog_schema.txt"));
}

TEST_CASE("verify command") {
  const auto ho = ordered_json::parse(job("verify", "ho1d:n=0,omega=1", "", "", true).report);
  bool kinetic = false;
  for (const auto& c : ho["states"][0]["checks"]) {
    CHECK(c["status"] == "pass");
    if (c["name"] == "kinetic_expectation") {
      kinetic = true;
      CHECK(c["values"]["lhs"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
      CHECK(c["values"]["rhs"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
    }
  }
  CHECK(kinetic);

  const auto gauss = job("verify", "gauss:sigma=1,k=2", "", "", true);
  CHECK(gauss.exit_code == 0);
  const auto doc = ordered_json::parse(gauss.report);
  int skipped = 0;
  for (const auto& c : doc["states"][0]["checks"]) {
    if (c["status"] == "not-applicable") {
      CHECK(c["tolerance"].is_null());
      ++skipped;
    }
  }
  CHECK(skipped >= 2);

  const std::string schema = "document: " + testing::keys_of(doc) + "\nstate: " + testing::keys_of(doc["states"][0]) +
                             "\ncheck: " + testing::keys_of(doc["states"][0]["checks"][0]) +
                             "\nschema: " + doc["schema"].get<std::string>() + "\n";
  CHECK(schema == golden("verify_schema.txt"));
  CHECK(job("verify", "hooke").exit_code == 0);
}

TEST_CASE("fields command") {
  const auto dir = testing::scratch("fields");
  const auto cfg = testing::write_config(
      dir, "[run]\nformat_version = 1\nstate = hydrogen:1s,Z=1\n[fields]\nstart = 0.1, 0, 0\nend = 5, 0, 0\npoints = 100\n");
  REQUIRE(job("fields", "", cfg.string(), dir.string()).exit_code == 0);
  const auto h = csv_table(dir / "fields.csv");
  REQUIRE(h.size() == 101);
  const auto speed = column(h[0], "u_speed");
  for (std::size_t k = 1; k < h.size(); ++k) CHECK(std::stod(h[k][speed]) == doctest::Approx(1.0).epsilon(1e-12));

  const auto ho_cfg = testing::write_config(dir, "[run]\nformat_version = 1\n[fields]\nstart = -3\nend = 3\npoints = 61\n");
  REQUIRE(job("fields", "ho1d:n=0,omega=1", ho_cfg.string(), dir.string()).exit_code == 0);
  CHECK(csv_schema(dir / "fields.csv") == golden("fields_ho1d.txt"));
  const auto ho = csv_table(dir / "fields.csv");
  const auto residual = column(ho[0], "residual");
  for (std::size_t k = 1; k < ho.size(); ++k) CHECK(std::abs(std::stod(ho[k][residual])) <= 1e-9);

  REQUIRE(job("fields", "ho1d:n=1,omega=1", ho_cfg.string(), dir.string()).exit_code == 0);
  const auto node = csv_table(dir / "fields.csv");
  const auto flag = column(node[0], "node_flag");
  const auto v = column(node[0], "v_x0");
  int nodes = 0;
  for (std::size_t k = 1; k < node.size(); ++k) {
    const bool at_origin = std::abs(std::stod(node[k][1])) < 1e-12;
    CHECK((node[k][flag] == "1") == at_origin);
    if (at_origin) {
      CHECK(node[k][v].empty());
      ++nodes;
    }
  }
  CHECK(nodes == 1);

  REQUIRE(job("fields", "hooke", "", dir.string()).exit_code == 0);
  CHECK(csv_schema(dir / "fields.csv") == golden("fields_hooke.txt"));

  const auto far = testing::write_config(dir, "[run]\nformat_version = 1\n[fields]\nstart = 20\nend = 30\npoints = 11\n");
  CHECK(job("fields", "ho1d:n=3,omega=1", far.string(), dir.string()).exit_code == kExitDegenerate);
  const auto bad = testing::write_config(dir, "[run]\nformat_version = 1\n[fields]\nstart = 1, 2\n");
  CHECK(job("fields", "ho1d:n=3,omega=1", bad.string(), dir.string()).exit_code == kExitConfigError);
}

TEST_CASE("traj command") {
  const auto dir = testing::scratch("traj");
  const auto cfg = testing::write_config(
      dir, "[run]\nformat_version = 1\n[traj]\ninitial = 1; -0.5\nt1 = 1\nmode = augmented+\nstore_every = 100\n");
  const auto r = job("traj", "ho1d:n=0,omega=1", cfg.string(), dir.string(), true);
  REQUIRE(r.exit_code == 0);
  CHECK(r.files.size() == 2);
  CHECK(csv_schema(dir / "traj_0.csv") == golden("traj_ho1d.txt"));
  const auto lines = testing::lines_of(testing::read_file(dir / "traj_0.csv"));
  CHECK(lines.back() == "# termination=completed");
  CHECK(std::stod(csv_row(lines[lines.size() - 2])[1]) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  const auto summary = ordered_json::parse(r.report);
  CHECK(summary["trajectories"][1]["final"][0].get<double>() == doctest::Approx(-0.5 * std::exp(-1.0)).epsilon(1e-9));

  const auto node = testing::write_config(dir, "[run]\nformat_version = 1\n[traj]\ninitial = 0.5\nmode = augmented-\n");
  REQUIRE(job("traj", "ho1d:n=1,omega=1", node.string(), dir.string()).exit_code == 0);
  CHECK(testing::lines_of(testing::read_file(dir / "traj_0.csv")).back() == "# termination=node_abort");

  // Real stationary state: Bohm velocity vanishes, the particle stays put.
  const auto frozen = testing::write_config(dir, "[run]\nformat_version = 1\n[traj]\ninitial = 0.3, 0.4, -1.2\nt1 = 5\n");
  REQUIRE(job("traj", "hydrogen:1s,Z=1", frozen.string(), dir.string()).exit_code == 0);
  const auto h = csv_table(dir / "traj_0.csv");
  CHECK(std::stod(h.back()[1]) == 0.3);
  CHECK(std::stod(h.back()[3]) == -1.2);

  CHECK(job("traj", "ho1d:n=0,omega=1", "", dir.string()).exit_code == kExitConfigError);
  const auto singular = testing::write_config(dir, "[run]\nformat_version = 1\n[traj]\ninitial = 0, 0, 0\n");
  CHECK(job("traj", "hydrogen:1s,Z=1", singular.string(), dir.string()).exit_code == kExitConfigError);
}

TEST_CASE("ensemble command") {
  const auto dir = testing::scratch("ensemble");
  const auto cfg = testing::write_config(
      dir, "[run]\nformat_version = 1\nstate = ho1d:n=1,omega=1\nseed = 5\n[ensemble]\nn_samples = 3000\nwrite_samples = true\n");
  REQUIRE(job("ensemble", "", cfg.string(), (dir / "a").string()).exit_code == 0);
  REQUIRE(job("ensemble", "", cfg.string(), (dir / "b").string()).exit_code == 0);
  CHECK(testing::read_file(dir / "a" / "ensemble.json") == testing::read_file(dir / "b" / "ensemble.json"));
  CHECK(testing::read_file(dir / "a" / "samples.csv") == testing::read_file(dir / "b" / "samples.csv"));

  const auto doc = ordered_json::parse(testing::read_file(dir / "a" / "ensemble.json"));
  CHECK(doc["seed"] == 5);

  JobRequest r;
  r.command = "ensemble";
  r.config_path = cfg.string();
  r.output_dir = (dir / "c").string();
  r.seed = 6;
  REQUIRE(run_job(r).exit_code == 0);
  const auto other = ordered_json::parse(testing::read_file(dir / "c" / "ensemble.json"));
  CHECK(other["seed"] == 6);
  CHECK(other["values"] != doc["values"]);

  const auto eq = testing::write_config(
      dir, "[run]\nformat_version = 1\n[ensemble]\ncheck = equivariance\nn_samples = 2000\nt1 = 1\naugmented = false\n");
  CHECK(job("ensemble", "gauss:sigma=1,k=2", eq.string(), dir.string()).exit_code == 0);
  const auto edoc = ordered_json::parse(testing::read_file(dir / "ensemble.json"));
  const std::string schema = "document: " + testing::keys_of(edoc) +
                             "\npass_flag: " + testing::keys_of(edoc["pass_flags"]["equivariance_ks_x0"]) +
                             "\nschema: " + edoc["schema"].get<std::string>() + "\n";
  CHECK(schema == golden("ensemble_schema.txt"));
  CHECK(job("ensemble", "plane:k=1", "", dir.string()).exit_code == kExitConfigError);
}

TEST_CASE("CLI exit codes") {
  const auto dir = testing::scratch("cli");
  const auto out = dir / "stdout.txt";
  CHECK(testing::run_cli("catalog", out) == 0);
  CHECK(testing::read_file(out).find("hooke") != std::string::npos);
  CHECK(testing::run_cli("catalog --json", out) == 0);
  CHECK(ordered_json::parse(testing::read_file(out)).is_array());
  CHECK(testing::run_cli("verify ho1d:n=1,omega=1", out) == 0);
  CHECK(testing::run_cli("verify 'ho1d:n=1,omega=1,bogus=2'", out) == 2);
  CHECK(testing::read_file(out).find("bogus") != std::string::npos);
  CHECK(testing::run_cli("", out) == 2);
  CHECK(testing::run_cli("frobnicate", out) == 2);
  CHECK(testing::run_cli("verify --config " + (dir / "missing.ini").string(), out) == 2);
  const auto far = testing::write_config(dir, "[run]\nformat_version = 1\n[fields]\nstart = 20\nend = 30\npoints = 11\n");
  CHECK(testing::run_cli("fields ho1d:n=3,omega=1 --config " + far.string() + " --out " + dir.string(), out) == 3);
  CHECK(testing::run_cli("--help", out) == 0);
}

#include "bohmdyn/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "bohmdyn/errors.hpp"

namespace bohmdyn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class LineError {
 public:
  explicit LineError(std::size_t line) : line_(line) {}
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

 private:
  std::size_t line_;
};

double to_double(const std::string& s, const LineError& at) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
    at.fail("'" + s + "' is not a finite number");
  }
  return x;
}

std::uint64_t to_u64(const std::string& s, const LineError& at) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) at.fail("'" + s + "' is not a non-negative integer");
  return x;
}

std::size_t to_positive(const std::string& s, const LineError& at) {
  const auto x = to_u64(s, at);
  if (x == 0) at.fail("value must be positive");
  return static_cast<std::size_t>(x);
}

bool to_bool(const std::string& s, const LineError& at) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  at.fail("'" + s + "' is not a boolean");
}

std::vector<double> to_list(const std::string& s, const LineError& at) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(to_double(trim(item), at));
  if (out.empty()) at.fail("empty coordinate list");
  return out;
}

double to_positive_double(const std::string& s, const LineError& at) {
  const double x = to_double(s, at);
  if (!(x > 0.0)) at.fail("value must be positive");
  return x;
}

std::string one_of(const std::string& s, std::initializer_list<const char*> allowed, const LineError& at) {
  for (const char* a : allowed) {
    if (s == a) return s;
  }
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  at.fail("'" + s + "' is not one of " + list);
}

using Setter = std::function<void(RunConfig&, const std::string&, const LineError&)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"run",
       {{"format_version", [](RunConfig& c, const std::string& v, const LineError&) { c.format_version = v; }},
        {"state", [](RunConfig& c, const std::string& v, const LineError&) { c.state_id = v; }},
        {"output_dir", [](RunConfig& c, const std::string& v, const LineError&) { c.output_dir = v; }},
        {"seed", [](RunConfig& c, const std::string& v, const LineError& at) { c.seed = to_u64(v, at); }}}},
      {"fields",
       {{"start", [](RunConfig& c, const std::string& v, const LineError& at) { c.fields.start = to_list(v, at); }},
        {"end", [](RunConfig& c, const std::string& v, const LineError& at) { c.fields.end = to_list(v, at); }},
        {"points", [](RunConfig& c, const std::string& v, const LineError& at) { c.fields.points = to_positive(v, at); }},
        {"t", [](RunConfig& c, const std::string& v, const LineError& at) { c.fields.t = to_double(v, at); }},
        {"node_epsilon",
         [](RunConfig& c, const std::string& v, const LineError& at) { c.fields.node_epsilon = to_positive_double(v, at); }}}},
      {"traj",
       {{"initial",
         [](RunConfig& c, const std::string& v, const LineError& at) {
           std::stringstream in(v);
           std::string item;
           c.traj.initial.clear();
           while (std::getline(in, item, ';')) c.traj.initial.push_back(to_list(trim(item), at));
           if (c.traj.initial.empty()) at.fail("no initial conditions");
         }},
        {"t0", [](RunConfig& c, const std::string& v, const LineError& at) { c.traj.t0 = to_double(v, at); }},
        {"t1", [](RunConfig& c, const std::string& v, const LineError& at) { c.traj.t1 = to_double(v, at); }},
        {"dt", [](RunConfig& c, const std::string& v, const LineError& at) { c.traj.dt = to_positive_double(v, at); }},
        {"mode",
         [](RunConfig& c, const std::string& v, const LineError& at) {
           c.traj.mode = one_of(v, {"bohm", "augmented+", "augmented-"}, at);
         }},
        {"store_every",
         [](RunConfig& c, const std::string& v, const LineError& at) { c.traj.store_every = to_positive(v, at); }},
        {"node_epsilon",
         [](RunConfig& c, const std::string& v, const LineError& at) { c.traj.node_epsilon = to_positive_double(v, at); }},
        {"speed_ceiling",
         [](RunConfig& c, const std::string& v, const LineError& at) { c.traj.speed_ceiling = to_positive_double(v, at); }},
        {"record_budgets",
         [](RunConfig& c, const std::string& v, const LineError& at) { c.traj.record_budgets = to_bool(v, at); }}}},
      {"ensemble",
       {{"check",
         [](RunConfig& c, const std::string& v, const LineError& at) {
           c.ensemble.check = one_of(v, {"sample", "equivariance"}, at);
         }},
        {"t", [](RunConfig& c, const std::string& v, const LineError& at) { c.ensemble.t = to_double(v, at); }},
        {"t0", [](RunConfig& c, const std::string& v, const LineError& at) { c.ensemble.t0 = to_double(v, at); }},
        {"t1", [](RunConfig& c, const std::string& v, const LineError& at) { c.ensemble.t1 = to_double(v, at); }},
        {"n_samples",
         [](RunConfig& c, const std::string& v, const LineError& at) { c.ensemble.n_samples = to_positive(v, at); }},
        {"burn_in",
         [](RunConfig& c, const std::string& v, const LineError& at) {
           c.ensemble.burn_in = static_cast<std::size_t>(to_u64(v, at));
         }},
        {"thinning",
         [](RunConfig& c, const std::string& v, const LineError& at) { c.ensemble.thinning = to_positive(v, at); }},
        {"proposal_sigma",
         [](RunConfig& c, const std::string& v, const LineError& at) {
           c.ensemble.proposal_sigma = to_positive_double(v, at);
         }},
        {"dt", [](RunConfig& c, const std::string& v, const LineError& at) { c.ensemble.dt = to_positive_double(v, at); }},
        {"control_seeds",
         [](RunConfig& c, const std::string& v, const LineError& at) {
           c.ensemble.control_seeds = to_positive(v, at);
           if (c.ensemble.control_seeds < 2) at.fail("control_seeds must be at least 2");
         }},
        {"control_percentile",
         [](RunConfig& c, const std::string& v, const LineError& at) {
           c.ensemble.control_percentile = to_double(v, at);
           if (c.ensemble.control_percentile < 0.0 || c.ensemble.control_percentile > 1.0) {
             at.fail("control_percentile must lie in [0, 1]");
           }
         }},
        {"augmented",
         [](RunConfig& c, const std::string& v, const LineError& at) { c.ensemble.augmented = to_bool(v, at); }},
        {"augmented_sign",
         [](RunConfig& c, const std::string& v, const LineError& at) {
           c.ensemble.augmented_sign = one_of(v, {"+", "-"}, at);
         }},
        {"write_samples",
         [](RunConfig& c, const std::string& v, const LineError& at) { c.ensemble.write_samples = to_bool(v, at); }}}},
      {"quadrature",
       {{"points_per_dim",
         [](RunConfig& c, const std::string& v, const LineError& at) { c.quadrature.points_per_dim = to_positive(v, at); }},
        {"angular_points",
         [](RunConfig& c, const std::string& v, const LineError& at) { c.quadrature.angular_points = to_positive(v, at); }},
        {"rule",
         [](RunConfig& c, const std::string& v, const LineError& at) {
           c.quadrature.rule = one_of(v, {"gauss_legendre", "trapezoid"}, at);
         }},
        {"tail_threshold",
         [](RunConfig& c, const std::string& v, const LineError& at) {
           c.quadrature.tail_threshold = to_positive_double(v, at);
         }}}},
      {"verify",
       {{"probes", [](RunConfig& c, const std::string& v, const LineError& at) { c.verify.probes = to_positive(v, at); }},
        {"t_max", [](RunConfig& c, const std::string& v, const LineError& at) { c.verify.t_max = to_double(v, at); }},
        {"node_epsilon",
         [](RunConfig& c, const std::string& v, const LineError& at) {
           c.verify.node_epsilon = to_positive_double(v, at);
         }}}},
  };
  return table;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string raw, section;
  std::set<std::string> seen;
  bool version_given = false;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const LineError at(line_no);
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') at.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().count(section)) at.fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) at.fail("expected key = value");
    if (section.empty()) at.fail("key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& keys = schema().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) at.fail("unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(section + "." + key).second) at.fail("duplicate key '" + key + "' in [" + section + "]");
    it->second(config, value, at);
    if (section == "run" && key == "format_version") version_given = true;
  }
  if (!version_given) throw ConfigError("config is missing [run] format_version");
  if (config.format_version != kFormatVersion) {
    throw ConfigError("config format_version " + config.format_version + " is not supported (expected " +
                      kFormatVersion + ")");
  }
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_run_config(buffer.str());
}

}  // namespace bohmdyn

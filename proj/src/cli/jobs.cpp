#include "bohmdyn/jobs.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bohmdyn/catalog.hpp"
#include "bohmdyn/dynamics.hpp"
#include "bohmdyn/ensemble.hpp"
#include "bohmdyn/errors.hpp"
#include "bohmdyn/fields.hpp"
#include "bohmdyn/run_config.hpp"
#include "bohmdyn/verify.hpp"

namespace bohmdyn {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

struct Context {
  RunConfig config;
  std::string state_id;
  std::optional<fs::path> out;
  std::uint64_t seed = 1;
  bool json = false;
};

void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write " + tmp.string());
    file << content;
    file.flush();
    if (!file) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

/// Shortest representation that still reads as a real number ("2.0", "-0.5").
std::string display_number(double x) {
  std::string s = json(x).dump();
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::vector<std::string> coordinate_names(const WavefunctionModel& model, const std::string& prefix) {
  static const char* axes[] = {"x", "y", "z"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < model.particles(); ++i) {
    for (std::size_t k = 0; k < model.dim(); ++k) out.push_back(prefix + axes[k] + std::to_string(i));
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) out += (k ? "," : "") + items[k];
  return out;
}

void append(std::vector<std::string>& row, const std::vector<double>& values) {
  for (double v : values) row.push_back(format_double(v));
}

void append_blank(std::vector<std::string>& row, std::size_t count) { row.insert(row.end(), count, ""); }

fs::path output_path(const Context& ctx, const std::string& name) { return ctx.out.value_or(fs::path(".")) / name; }

std::string csv_preamble(const std::string& schema, const WavefunctionModel& model) {
  return "# schema=bohmdyn." + schema + "/" + kFormatVersion + "\n# state=" + model.label() + "\n";
}

// ---------------------------------------------------------------------------

JobResult catalog_job(const Context& ctx) {
  JobResult result;
  json entries = json::array();
  std::ostringstream text;
  for (const auto& id : catalog_ids()) {
    const WavefunctionModel model = parse_state_id(id);
    json e;
    e["id"] = id;
    e["n"] = model.particles();
    e["d"] = model.dim();
    e["stationary"] = model.is_stationary();
    e["energy"] = model.energy() ? json(*model.energy()) : json(nullptr);
    e["real_valued"] = model.is_real_valued();
    e["normalizable"] = model.is_normalizable();
    entries.push_back(e);
    char line[160];
    std::snprintf(line, sizeof line, "%-20s n=%zu d=%zu stationary=%s E=%s\n", id.c_str(), model.particles(),
                  model.dim(), model.is_stationary() ? "yes" : "no",
                  model.energy() ? display_number(*model.energy()).c_str() : "-");
    text << line;
  }
  result.report = ctx.json ? entries.dump(2) + "\n" : text.str();
  return result;
}

// ---------------------------------------------------------------------------

JobResult fields_job(const Context& ctx, const WavefunctionModel& model) {
  const FieldGridConfig& grid = ctx.config.fields;
  const std::size_t m = model.particles() * model.dim();
  std::vector<double> start(m, 0.0), end(m, 0.0);
  start[0] = -3.0;
  end[0] = 3.0;
  if (grid.start) start = *grid.start;
  if (grid.end) end = *grid.end;
  if (start.size() != m || end.size() != m) {
    throw ConfigError("[fields] start and end need " + std::to_string(m) + " coordinates for " + model.label());
  }

  const std::size_t n = model.particles();
  const std::vector<std::string> coords = coordinate_names(model, "");
  std::vector<std::string> header = {"t"};
  header.insert(header.end(), coords.begin(), coords.end());
  header.insert(header.end(), {"upsilon", "node_flag", "singular_flag"});
  for (const auto& c : coordinate_names(model, "v_")) header.push_back(c);
  for (const auto& c : coordinate_names(model, "u_")) header.push_back(c);
  for (std::size_t i = 0; i < n; ++i) header.push_back("P" + std::to_string(i));
  header.insert(header.end(), {"Q", "kinetic_u", "compression", "kinetic_v", "potential_U", "minus_dS_dt",
                               "budget_total", "residual", "u_speed"});

  std::ostringstream csv;
  csv << csv_preamble("fields", model);
  csv << "# t=" << format_double(grid.t) << " node_epsilon=" << format_double(grid.node_epsilon) << "\n";
  csv << "# columns: t time; x..z particle coordinates; upsilon density; node_flag 1 where upsilon < node_epsilon "
         "(velocity, Q and budget cells empty); singular_flag 1 on a singular point (all field cells empty); "
         "v_ Bohm velocity; u_ osmotic velocity u+; P pressure per particle; Q quantum potential; kinetic_u and "
         "compression its two parts; kinetic_v, potential_U, minus_dS_dt, budget_total and residual the energy "
         "budget; u_speed |u+| over all coordinates\n";
  csv << join(header) << "\n";

  const FieldOptions options{grid.node_epsilon};
  std::size_t flagged = 0, nodes = 0, singular = 0;
  const std::size_t tail = 2 * m + n + 9;
  for (std::size_t j = 0; j < grid.points; ++j) {
    const double f = grid.points == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(grid.points - 1);
    std::vector<double> x(m);
    for (std::size_t k = 0; k < m; ++k) x[k] = start[k] + f * (end[k] - start[k]);
    const ParticleConfig config = model.make_config(x);

    std::vector<std::string> row = {format_double(grid.t)};
    append(row, x);
    FieldSample s;
    try {
      s = sample_fields(model, config, grid.t, options);
    } catch (const SingularityError&) {
      row.insert(row.end(), {"", "0", "1"});
      append_blank(row, tail);
      csv << join(row) << "\n";
      ++singular;
      ++flagged;
      continue;
    }
    row.insert(row.end(), {format_double(s.upsilon), s.node_flag ? "1" : "0", "0"});
    if (s.node_flag) {
      ++nodes;
      ++flagged;
      append_blank(row, 2 * m);
      append(row, s.pressure);
      append_blank(row, 9);
    } else {
      append(row, *s.v);
      append(row, *s.u_plus);
      append(row, s.pressure);
      const EnergyBudget& b = *s.budget;
      double u2 = 0.0;
      for (double u : *s.u_plus) u2 += u * u;
      append(row, {*s.Q, *s.kinetic_u, *s.compression, b.kinetic_v, b.potential_U, b.minus_dS_dt, b.total(),
                   b.residual, std::sqrt(u2)});
    }
    csv << join(row) << "\n";
  }

  JobResult result;
  const fs::path path = output_path(ctx, "fields.csv");
  write_atomic(path, csv.str());
  result.files.push_back(path.string());
  const bool degenerate = static_cast<double>(flagged) > 0.9 * static_cast<double>(grid.points);
  if (degenerate) result.exit_code = kExitDegenerate;

  json summary;
  summary["schema"] = std::string("bohmdyn.fields-summary/") + kFormatVersion;
  summary["state"] = model.label();
  summary["file"] = path.string();
  summary["rows"] = grid.points;
  summary["node_rows"] = nodes;
  summary["singular_rows"] = singular;
  summary["degenerate"] = degenerate;
  std::ostringstream text;
  text << "wrote " << path.string() << " (" << grid.points << " rows, " << nodes << " node rows, " << singular
       << " singular rows)\n";
  if (degenerate) text << "grid is node-dominated: more than 90% of rows flagged\n";
  result.report = ctx.json ? summary.dump(2) + "\n" : text.str();
  return result;
}

// ---------------------------------------------------------------------------

VelocityMode parse_mode(const std::string& mode) {
  if (mode == "bohm") return VelocityMode::bohm();
  if (mode == "augmented+") return VelocityMode::augmented(Sign::plus);
  if (mode == "augmented-") return VelocityMode::augmented(Sign::minus);
  throw ConfigError("unknown velocity mode '" + mode + "'");
}

JobResult traj_job(const Context& ctx, const WavefunctionModel& model) {
  const TrajectoryConfig& cfg = ctx.config.traj;
  if (cfg.initial.empty()) throw ConfigError("traj needs [traj] initial = x,y,...; x,y,...");
  const std::size_t m = model.particles() * model.dim();
  const VelocityMode mode = parse_mode(cfg.mode);
  IntegratorSettings settings;
  settings.dt = cfg.dt;
  settings.node_epsilon = cfg.node_epsilon;
  settings.speed_ceiling = cfg.speed_ceiling;
  settings.store_every = cfg.store_every;
  settings.record_budgets = cfg.record_budgets;

  std::vector<std::string> header = {"t"};
  for (const auto& c : coordinate_names(model, "")) header.push_back(c);
  for (const auto& c : coordinate_names(model, "vel_")) header.push_back(c);
  header.insert(header.end(), {"budget_total", "budget_residual"});

  JobResult result;
  json files = json::array();
  std::ostringstream text;
  for (std::size_t k = 0; k < cfg.initial.size(); ++k) {
    if (cfg.initial[k].size() != m) {
      throw ConfigError("[traj] initial condition " + std::to_string(k) + " needs " + std::to_string(m) +
                        " coordinates");
    }
    ParticleConfig x0 = model.make_config(cfg.initial[k]);
    try {
      model.check_regular(x0);
    } catch (const SingularityError& e) {
      throw ConfigError(std::string("[traj] initial condition on a singular point: ") + e.what());
    }
    const Trajectory traj = integrate_trajectory(model, x0, cfg.t0, cfg.t1, mode, settings);

    std::ostringstream csv;
    csv << csv_preamble("traj", model);
    csv << "# mode=" << cfg.mode << " dt=" << format_double(cfg.dt) << " t0=" << format_double(cfg.t0)
        << " t1=" << format_double(cfg.t1) << "\n";
    csv << "# columns: t time; x..z coordinates; vel_ total velocity of the mode; budget_total "
           "kinetic_v + kinetic_u + compression + potential_U; budget_residual budget_total - (-dS/dt)\n";
    csv << join(header) << "\n";
    for (const auto& p : traj.points) {
      std::vector<std::string> row = {format_double(p.t)};
      append(row, std::vector<double>(p.config.coords().begin(), p.config.coords().end()));
      append(row, p.velocity);
      if (p.budget) {
        append(row, {p.budget->total(), p.budget->residual});
      } else {
        append_blank(row, 2);
      }
      csv << join(row) << "\n";
    }
    csv << "# termination=" << to_string(traj.termination) << "\n";

    const fs::path path = output_path(ctx, "traj_" + std::to_string(k) + ".csv");
    write_atomic(path, csv.str());
    result.files.push_back(path.string());
    const auto& last = traj.points.back();
    json f;
    f["file"] = path.string();
    f["termination"] = to_string(traj.termination);
    f["t_final"] = last.t;
    f["final"] = std::vector<double>(last.config.coords().begin(), last.config.coords().end());
    files.push_back(f);
    text << "wrote " << path.string() << " (" << traj.points.size() << " points, " << to_string(traj.termination)
         << " at t=" << format_double(last.t) << ")\n";
  }
  json summary;
  summary["schema"] = std::string("bohmdyn.traj-summary/") + kFormatVersion;
  summary["state"] = model.label();
  summary["mode"] = cfg.mode;
  summary["trajectories"] = files;
  result.report = ctx.json ? summary.dump(2) + "\n" : text.str();
  return result;
}

// ---------------------------------------------------------------------------

json check_json(const CheckResult& c) {
  json j;
  j["name"] = c.name;
  j["status"] = to_string(c.status);
  j["tolerance"] = c.status == CheckStatus::not_applicable ? json(nullptr) : json(c.tolerance);
  j["values"] = json::object();
  for (const auto& [k, v] : c.values) j["values"][k] = v;
  j["note"] = c.note;
  return j;
}

JobResult verify_job(const Context& ctx) {
  std::vector<std::string> ids;
  if (ctx.state_id == "all") {
    ids = catalog_ids();
  } else {
    ids.push_back(ctx.state_id);
  }
  std::vector<WavefunctionModel> models;
  for (const auto& id : ids) models.push_back(parse_state_id(id));

  json states = json::array();
  std::ostringstream text;
  bool all_passed = true;
  for (const auto& model : models) {
    const VerifyReport report = verify_state(model, ctx.config.verify, ctx.config.quadrature);
    all_passed = all_passed && report.passed();
    json s;
    s["state"] = report.state;
    s["passed"] = report.passed();
    s["checks"] = json::array();
    text << report.state << ": " << (report.passed() ? "PASS" : "FAIL") << "\n";
    for (const auto& c : report.checks) {
      s["checks"].push_back(check_json(c));
      text << "  " << c.name << ": " << to_string(c.status);
      if (c.status != CheckStatus::not_applicable) text << " (tolerance " << display_number(c.tolerance) << ")";
      if (!c.note.empty()) text << " - " << c.note;
      text << "\n";
    }
    states.push_back(s);
  }

  json doc;
  doc["schema"] = std::string("bohmdyn.verify/") + kFormatVersion;
  doc["format_version"] = kFormatVersion;
  doc["passed"] = all_passed;
  doc["states"] = states;

  JobResult result;
  result.exit_code = all_passed ? kExitOk : kExitCheckFailed;
  if (ctx.out) {
    const fs::path path = output_path(ctx, "verify.json");
    write_atomic(path, doc.dump(2) + "\n");
    result.files.push_back(path.string());
  }
  result.report = ctx.json ? doc.dump(2) + "\n" : text.str();
  return result;
}

// ---------------------------------------------------------------------------

JobResult ensemble_job(const Context& ctx, const WavefunctionModel& model) {
  const EnsembleConfig& cfg = ctx.config.ensemble;
  SamplerSettings sampler;
  sampler.n_samples = cfg.n_samples;
  sampler.burn_in = cfg.burn_in;
  sampler.thinning = cfg.thinning;
  sampler.proposal_sigma = cfg.proposal_sigma;
  sampler.seed = ctx.seed;

  json doc;
  doc["schema"] = std::string("bohmdyn.ensemble/") + kFormatVersion;
  doc["format_version"] = kFormatVersion;
  doc["state"] = model.label();
  doc["check"] = cfg.check;
  doc["seed"] = ctx.seed;
  json settings;
  settings["n_samples"] = cfg.n_samples;
  settings["burn_in"] = cfg.burn_in;
  settings["thinning"] = cfg.thinning;
  settings["proposal_sigma"] = cfg.proposal_sigma;

  EnsembleReport report;
  std::vector<ParticleConfig> samples;
  if (cfg.check == "sample") {
    settings["t"] = cfg.t;
    SampleChain chain = run_sampler(model, cfg.t, sampler);
    report.acceptance_rate = chain.acceptance_rate;
    const std::size_t m = model.particles() * model.dim();
    const double count = static_cast<double>(chain.samples.size());
    for (std::size_t k = 0; k < m; ++k) {
      double mean = 0.0, var = 0.0;
      for (const auto& s : chain.samples) mean += s.coords()[k];
      mean /= count;
      for (const auto& s : chain.samples) var += (s.coords()[k] - mean) * (s.coords()[k] - mean);
      report.values["mean_x" + std::to_string(k)] = mean;
      report.values["variance_x" + std::to_string(k)] = var / (count - 1.0);
    }
    if (model.dim() == 3) {
      for (std::size_t i = 0; i < model.particles(); ++i) {
        double r = 0.0;
        for (const auto& s : chain.samples) {
          const auto p = s.position(i);
          r += std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        }
        report.values["mean_r" + std::to_string(i)] = r / count;
      }
    }
    report.values["n_samples"] = count;
    if (chain.acceptance_rate < 0.3 || chain.acceptance_rate > 0.6) {
      report.warnings.push_back("acceptance rate " + format_double(chain.acceptance_rate) +
                                " outside the 0.3-0.6 target; consider adjusting proposal_sigma");
    }
    samples = std::move(chain.samples);
  } else {
    settings["t0"] = cfg.t0;
    settings["t1"] = cfg.t1;
    settings["dt"] = cfg.dt;
    settings["control_seeds"] = cfg.control_seeds;
    settings["control_percentile"] = cfg.control_percentile;
    settings["augmented"] = cfg.augmented;
    settings["augmented_sign"] = cfg.augmented_sign;
    IntegratorSettings integrator;
    integrator.dt = cfg.dt;
    integrator.record_budgets = false;
    EquivarianceOptions options;
    options.control_seeds = cfg.control_seeds;
    options.control_percentile = cfg.control_percentile;
    options.run_augmented = cfg.augmented;
    options.augmented_sign = cfg.augmented_sign == "-" ? Sign::minus : Sign::plus;
    report = equivariance_check(model, cfg.t0, cfg.t1, sampler, integrator, options);
    if (cfg.write_samples) samples = run_sampler(model, cfg.t0, sampler).samples;
  }
  doc["settings"] = settings;
  doc["acceptance_rate"] = report.acceptance_rate ? json(*report.acceptance_rate) : json(nullptr);
  doc["values"] = json::object();
  for (const auto& [k, v] : report.values) doc["values"][k] = v;
  doc["distances"] = json::object();
  for (const auto& [k, v] : report.distances) doc["distances"][k] = v;
  doc["pass_flags"] = json::object();
  for (const auto& [k, f] : report.pass_flags) doc["pass_flags"][k] = {{"passed", f.passed}, {"tolerance", f.tolerance}};
  doc["warnings"] = report.warnings;
  doc["passed"] = report.all_passed();

  JobResult result;
  result.exit_code = report.all_passed() ? kExitOk : kExitCheckFailed;
  const fs::path path = output_path(ctx, "ensemble.json");
  write_atomic(path, doc.dump(2) + "\n");
  result.files.push_back(path.string());

  if (cfg.write_samples) {
    std::ostringstream csv;
    csv << csv_preamble("samples", model);
    csv << "# seed=" << ctx.seed << "\n";
    std::vector<std::string> header = {"index"};
    for (const auto& c : coordinate_names(model, "")) header.push_back(c);
    csv << join(header) << "\n";
    for (std::size_t s = 0; s < samples.size(); ++s) {
      std::vector<std::string> row = {std::to_string(s)};
      append(row, std::vector<double>(samples[s].coords().begin(), samples[s].coords().end()));
      csv << join(row) << "\n";
    }
    const fs::path sample_path = output_path(ctx, "samples.csv");
    write_atomic(sample_path, csv.str());
    result.files.push_back(sample_path.string());
  }

  std::ostringstream text;
  text << "wrote " << path.string() << " (seed " << ctx.seed << ")\n";
  for (const auto& [k, f] : report.pass_flags) {
    text << "  " << k << ": " << (f.passed ? "pass" : "fail") << " (tolerance " << display_number(f.tolerance) << ")\n";
  }
  for (const auto& w : report.warnings) text << "  warning: " << w << "\n";
  result.report = ctx.json ? doc.dump(2) + "\n" : text.str();
  return result;
}

JobResult dispatch(const JobRequest& request) {
  Context ctx;
  if (!request.config_path.empty()) ctx.config = load_run_config(request.config_path);
  ctx.json = request.json;
  ctx.seed = request.seed.value_or(ctx.config.seed.value_or(1));
  if (!request.output_dir.empty()) {
    ctx.out = request.output_dir;
  } else if (ctx.config.output_dir) {
    ctx.out = *ctx.config.output_dir;
  }

  if (request.command == "catalog") return catalog_job(ctx);

  ctx.state_id = !request.state_id.empty() ? request.state_id : ctx.config.state_id.value_or("");
  if (ctx.state_id.empty()) throw ConfigError(request.command + " needs a state id (argument or [run] state)");
  if (request.command == "verify") return verify_job(ctx);

  const WavefunctionModel model = parse_state_id(ctx.state_id);
  if (request.command == "fields") return fields_job(ctx, model);
  if (request.command == "traj") return traj_job(ctx, model);
  if (request.command == "ensemble") return ensemble_job(ctx, model);
  throw ConfigError("unknown command '" + request.command + "'");
}

}  // namespace

JobResult run_job(const JobRequest& request) {
  try {
    return dispatch(request);
  } catch (const std::exception& e) {
    JobResult result;
    result.exit_code = kExitConfigError;
    result.errors = std::string("error: ") + e.what() + "\n";
    return result;
  }
}

}  // namespace bohmdyn

#include "bohmdyn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <gsl/gsl_integration.h>

#include "bohmdyn/errors.hpp"
#include "bohmdyn/probes.hpp"
#include "parallel.hpp"

namespace bohmdyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kScanStep = 0.01;
constexpr double kScanReach = 60.0;
constexpr double kPadding = 1.2;

// Υ at a configuration, or −1 when it sits on the singular set.
double upsilon_or_skip(const WavefunctionModel& model, const ParticleConfig& config, double t) {
  try {
    return std::norm(model.evaluate(config, t).value);
  } catch (const SingularityError&) {
    return -1.0;
  }
}

struct Axis {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Axis make_axis(QuadratureRule rule, std::size_t points, double a, double b) {
  Axis axis;
  rule_nodes(rule, points, a, b, axis.nodes, axis.weights);
  return axis;
}

Axis periodic_axis(std::size_t points) {
  Axis axis;
  for (std::size_t k = 0; k < points; ++k) {
    axis.nodes.push_back(2.0 * kPi * (k + 0.5) / points);
    axis.weights.push_back(2.0 * kPi / points);
  }
  return axis;
}

// Maps a node of the product grid to a configuration and Jacobian factor.
struct Layout {
  std::vector<Axis> axes;
  std::function<double(std::span<const double>, std::span<double>)> map;  // returns Jacobian
};

Layout make_layout(const WavefunctionModel& model, const QuadratureSpec& spec) {
  Layout layout;
  const std::size_t n = model.particles();
  switch (spec.geometry) {
    case QuadratureGeometry::cartesian: {
      for (const auto& iv : spec.box) layout.axes.push_back(make_axis(spec.rule, spec.points_per_dim, iv.lower, iv.upper));
      layout.map = [](std::span<const double> q, std::span<double> x) {
        std::copy(q.begin(), q.end(), x.begin());
        return 1.0;
      };
      break;
    }
    case QuadratureGeometry::spherical: {
      for (std::size_t p = 0; p < n; ++p) {
        layout.axes.push_back(make_axis(spec.rule, spec.points_per_dim, spec.box[p].lower, spec.box[p].upper));
        layout.axes.push_back(make_axis(QuadratureRule::gauss_legendre, spec.angular_points, -1.0, 1.0));
        layout.axes.push_back(periodic_axis(2 * spec.angular_points));
      }
      layout.map = [n](std::span<const double> q, std::span<double> x) {
        double jac = 1.0;
        for (std::size_t p = 0; p < n; ++p) {
          const double r = q[3 * p], mu = q[3 * p + 1], phi = q[3 * p + 2];
          const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
          x[3 * p] = r * s * std::cos(phi);
          x[3 * p + 1] = r * s * std::sin(phi);
          x[3 * p + 2] = r * mu;
          jac *= r * r;
        }
        return jac;
      };
      break;
    }
    case QuadratureGeometry::pair_relative: {
      // r₁ = R ẑ + r/2, r₂ = R ẑ − r/2 with r at angle acos(μ) to ẑ; the
      // integrand must be invariant under joint rotations.
      layout.axes.push_back(make_axis(spec.rule, spec.points_per_dim, spec.box[0].lower, spec.box[0].upper));
      layout.axes.push_back(make_axis(spec.rule, spec.points_per_dim, spec.box[1].lower, spec.box[1].upper));
      layout.axes.push_back(make_axis(QuadratureRule::gauss_legendre, spec.angular_points, -1.0, 1.0));
      layout.map = [](std::span<const double> q, std::span<double> x) {
        const double R = q[0], r = q[1], mu = q[2];
        const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        const double hx = 0.5 * r * s, hz = 0.5 * r * mu;
        x[0] = hx;
        x[1] = 0.0;
        x[2] = R + hz;
        x[3] = -hx;
        x[4] = 0.0;
        x[5] = R - hz;
        return 8.0 * kPi * kPi * R * R * r * r;
      };
      break;
    }
  }
  return layout;
}

// Furthest distance along `direction` from `origin` where Υ ≥ threshold·peak.
// Scans once and returns the raw samples so callers can share the peak.
std::vector<double> scan_ray(const WavefunctionModel& model, double t, const std::vector<double>& origin,
                             std::span<const double> direction, std::size_t steps) {
  std::vector<double> values(steps + 1);
  std::vector<double> coords = origin;
  ParticleConfig config = model.make_config(coords);
  for (std::size_t s = 0; s <= steps; ++s) {
    for (std::size_t k = 0; k < coords.size(); ++k) config.coords()[k] = origin[k] + s * kScanStep * direction[k];
    values[s] = upsilon_or_skip(model, config, t);
  }
  return values;
}

double furthest_above(const std::vector<double>& values, double cutoff) {
  for (std::size_t s = values.size(); s-- > 0;) {
    if (values[s] >= cutoff) return static_cast<double>(s) * kScanStep;
  }
  return 0.0;
}

}  // namespace

void rule_nodes(QuadratureRule rule, std::size_t points, double a, double b, std::vector<double>& nodes,
                std::vector<double>& weights) {
  nodes.resize(points);
  weights.resize(points);
  if (rule == QuadratureRule::gauss_legendre) {
    gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(points);
    for (std::size_t k = 0; k < points; ++k) gsl_integration_glfixed_point(a, b, k, &nodes[k], &weights[k], table);
    gsl_integration_glfixed_table_free(table);
    return;
  }
  const double h = (b - a) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    nodes[k] = a + h * static_cast<double>(k);
    weights[k] = (k == 0 || k + 1 == points) ? 0.5 * h : h;
  }
}

void validate(const QuadratureSpec& spec, const WavefunctionModel& model) {
  std::size_t expected = 0;
  switch (spec.geometry) {
    case QuadratureGeometry::cartesian:
      expected = model.particles() * model.dim();
      break;
    case QuadratureGeometry::spherical:
      if (model.dim() != 3) throw UsageError("spherical quadrature needs d = 3");
      expected = model.particles();
      break;
    case QuadratureGeometry::pair_relative:
      if (model.dim() != 3 || model.particles() != 2) throw UsageError("pair_relative quadrature needs two 3D particles");
      expected = 2;
      break;
  }
  if (spec.box.size() != expected) {
    throw UsageError("quadrature box needs " + std::to_string(expected) + " intervals, got " +
                     std::to_string(spec.box.size()));
  }
  for (const auto& iv : spec.box) {
    if (!std::isfinite(iv.lower) || !std::isfinite(iv.upper) || !(iv.lower < iv.upper)) {
      throw UsageError("quadrature intervals must be finite with lower < upper");
    }
  }
  if (spec.rule == QuadratureRule::gauss_legendre && spec.points_per_dim < 8) {
    throw UsageError("gauss_legendre quadrature needs at least 8 points per dimension");
  }
  if (spec.rule == QuadratureRule::trapezoid && spec.points_per_dim < 2) {
    throw UsageError("trapezoid quadrature needs at least 2 points per dimension");
  }
  if (spec.geometry != QuadratureGeometry::cartesian && spec.angular_points < 2) {
    throw UsageError("angular quadrature needs at least 2 points");
  }
}

ParticleConfig densest_point(const WavefunctionModel& model, double t) {
  const std::size_t m = model.particles() * model.dim();
  constexpr double kReach = 8.0;
  constexpr std::size_t kCandidates = 4096;
  std::vector<double> best(m, 0.0);
  double best_value = upsilon_or_skip(model, model.make_config(best), t);
  std::vector<double> coords(m);
  for (std::uint64_t idx = 1; idx <= kCandidates; ++idx) {
    for (std::size_t k = 0; k < m; ++k) coords[k] = kReach * (2.0 * halton(idx, k) - 1.0);
    const double v = upsilon_or_skip(model, model.make_config(coords), t);
    if (v > best_value) {
      best_value = v;
      best = coords;
    }
  }
  if (!(best_value > 0.0)) throw UsageError("could not locate any density for " + model.label());
  return model.make_config(best);
}

std::vector<Interval> cartesian_extent(const WavefunctionModel& model, double t, double tail_threshold) {
  const ParticleConfig ref = densest_point(model, t);
  const std::vector<double> origin(ref.coords().begin(), ref.coords().end());
  const std::size_t m = origin.size();
  const auto steps = static_cast<std::size_t>(kScanReach / kScanStep);

  std::vector<std::vector<double>> scans;
  double peak = upsilon_or_skip(model, ref, t);
  std::vector<double> dir(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (double sign : {-1.0, 1.0}) {
      std::fill(dir.begin(), dir.end(), 0.0);
      dir[k] = sign;
      scans.push_back(scan_ray(model, t, origin, dir, steps));
      peak = std::max(peak, *std::max_element(scans.back().begin(), scans.back().end()));
    }
  }
  std::vector<Interval> box(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double below = std::max(1.0, kPadding * furthest_above(scans[2 * k], tail_threshold * peak));
    const double above = std::max(1.0, kPadding * furthest_above(scans[2 * k + 1], tail_threshold * peak));
    box[k] = {origin[k] - below, origin[k] + above};
  }
  return box;
}

QuadratureSpec auto_quadrature(const WavefunctionModel& model, double t, std::size_t points_per_dim,
                               double tail_threshold) {
  QuadratureSpec spec;
  spec.geometry = model.traits().geometry;
  spec.tail_threshold = tail_threshold;
  const std::size_t n = model.particles();
  switch (spec.geometry) {
    case QuadratureGeometry::cartesian: {
      const std::size_t m = n * model.dim();
      spec.points_per_dim = points_per_dim ? points_per_dim : (m == 1 ? 128 : m == 2 ? 64 : 24);
      spec.box = cartesian_extent(model, t, tail_threshold);
      break;
    }
    case QuadratureGeometry::spherical: {
      spec.points_per_dim = points_per_dim ? points_per_dim : (n == 1 ? 96 : 32);
      spec.angular_points = n == 1 ? 12 : 6;
      const ParticleConfig ref = densest_point(model, t);
      const std::vector<double> base(ref.coords().begin(), ref.coords().end());
      const auto steps = static_cast<std::size_t>(kScanReach / kScanStep);
      static constexpr double kDirections[][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1},
                                                  {0, 0, -1}, {1, 1, 1}, {-1, 1, 1}, {1, -1, 1}, {1, 1, -1},
                                                  {-1, -1, 1}, {-1, 1, -1}, {1, -1, -1}, {-1, -1, -1}};
      std::vector<std::vector<std::vector<double>>> scans(n);
      double peak = upsilon_or_skip(model, ref, t);
      for (std::size_t p = 0; p < n; ++p) {
        std::vector<double> origin = base;
        for (std::size_t k = 0; k < 3; ++k) origin[3 * p + k] = 0.0;
        for (const auto& d : kDirections) {
          const double len = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
          std::vector<double> dir(base.size(), 0.0);
          for (std::size_t k = 0; k < 3; ++k) dir[3 * p + k] = d[k] / len;
          scans[p].push_back(scan_ray(model, t, origin, dir, steps));
          peak = std::max(peak, *std::max_element(scans[p].back().begin(), scans[p].back().end()));
        }
      }
      for (std::size_t p = 0; p < n; ++p) {
        double reach = 0.0;
        for (const auto& s : scans[p]) reach = std::max(reach, furthest_above(s, tail_threshold * peak));
        spec.box.push_back({0.0, std::max(1.0, kPadding * reach)});
      }
      break;
    }
    case QuadratureGeometry::pair_relative: {
      spec.points_per_dim = points_per_dim ? points_per_dim : 64;
      spec.angular_points = 12;
      constexpr double kStepR = 0.1, kStepr = 0.2;
      constexpr std::size_t kSteps = 400;
      std::vector<double> values(kSteps * kSteps);
      double peak = 0.0;
      std::vector<double> coords(6, 0.0);
      ParticleConfig config = model.make_config(coords);
      const double mu = 0.5, s = std::sqrt(1.0 - mu * mu);
      for (std::size_t a = 0; a < kSteps; ++a) {
        for (std::size_t b = 0; b < kSteps; ++b) {
          const double R = a * kStepR, r = b * kStepr + 0.5 * kStepr;
          auto c = config.coords();
          c[0] = 0.5 * r * s;
          c[1] = 0.0;
          c[2] = R + 0.5 * r * mu;
          c[3] = -0.5 * r * s;
          c[4] = 0.0;
          c[5] = R - 0.5 * r * mu;
          values[a * kSteps + b] = upsilon_or_skip(model, config, t);
          peak = std::max(peak, values[a * kSteps + b]);
        }
      }
      double reach_R = 0.0, reach_r = 0.0;
      for (std::size_t a = 0; a < kSteps; ++a) {
        for (std::size_t b = 0; b < kSteps; ++b) {
          if (values[a * kSteps + b] >= tail_threshold * peak) {
            reach_R = std::max(reach_R, a * kStepR);
            reach_r = std::max(reach_r, b * kStepr + 0.5 * kStepr);
          }
        }
      }
      spec.box = {{0.0, std::max(1.0, kPadding * reach_R)}, {0.0, std::max(1.0, kPadding * reach_r)}};
      break;
    }
  }
  return spec;
}

std::vector<double> integrate(const WavefunctionModel& model, const QuadratureSpec& spec, double t,
                              std::size_t outputs, const Integrand& integrand) {
  validate(spec, model);
  const Layout layout = make_layout(model, spec);
  const std::size_t dims = layout.axes.size();
  const std::size_t m = model.particles() * model.dim();
  const std::size_t outer = layout.axes[0].nodes.size();
  std::size_t inner = 1;
  for (std::size_t a = 1; a < dims; ++a) inner *= layout.axes[a].nodes.size();

  // One partial sum per outer node, combined in order for thread-count
  // independent results.
  std::vector<std::vector<double>> partial(outer, std::vector<double>(outputs, 0.0));
  detail::parallel_for(outer, [&](std::size_t i0) {
    std::vector<double> q(dims), x(m), values(outputs);
    ParticleConfig config = model.make_config(std::vector<double>(m, 0.0));
    std::vector<std::size_t> idx(dims, 0);
    idx[0] = i0;
    for (std::size_t lin = 0; lin < inner; ++lin) {
      std::size_t rest = lin;
      double weight = layout.axes[0].weights[i0];
      q[0] = layout.axes[0].nodes[i0];
      for (std::size_t a = dims; a-- > 1;) {
        const std::size_t len = layout.axes[a].nodes.size();
        idx[a] = rest % len;
        rest /= len;
        q[a] = layout.axes[a].nodes[idx[a]];
        weight *= layout.axes[a].weights[idx[a]];
      }
      weight *= layout.map(q, x);
      std::copy(x.begin(), x.end(), config.coords().begin());
      WavefunctionJet jet;
      try {
        jet = model.evaluate(config, t);
      } catch (const SingularityError&) {
        continue;
      }
      std::fill(values.begin(), values.end(), 0.0);
      integrand(jet, config, values);
      for (std::size_t o = 0; o < outputs; ++o) partial[i0][o] += weight * values[o];
    }
  });
  std::vector<double> total(outputs, 0.0);
  for (const auto& p : partial) {
    for (std::size_t o = 0; o < outputs; ++o) total[o] += p[o];
  }
  return total;
}

}  // namespace bohmdyn

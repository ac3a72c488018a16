#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bohmdyn/particle_config.hpp"
#include "bohmdyn/states.hpp"

namespace bohmdyn {

enum class QuadratureRule { gauss_legendre, trapezoid };

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Truncated-domain product quadrature.
///
/// The meaning of `box` follows the geometry: one interval per coordinate
/// (cartesian), one radial interval per particle (spherical), or the
/// centre-of-mass and relative radii (pair_relative). Angular directions
/// always use `angular_points` Gauss–Legendre nodes in cos θ and twice as
/// many uniform nodes in φ.
struct QuadratureSpec {
  QuadratureGeometry geometry = QuadratureGeometry::cartesian;
  std::vector<Interval> box;
  std::size_t points_per_dim = 64;
  std::size_t angular_points = 12;
  QuadratureRule rule = QuadratureRule::gauss_legendre;
  /// Auto-sizing stops where Υ drops below this fraction of its maximum.
  double tail_threshold = 1e-12;
};

/// Throws UsageError on non-finite or empty intervals, or fewer than 8
/// Gauss–Legendre points.
void validate(const QuadratureSpec& spec, const WavefunctionModel& model);

/// Box sized where Υ(·, t) falls below tail_threshold·max, padded 20%.
/// points_per_dim == 0 picks a default for the model's geometry.
QuadratureSpec auto_quadrature(const WavefunctionModel& model, double t, std::size_t points_per_dim = 0,
                               double tail_threshold = 1e-12);

/// Per-coordinate bounding box of the same tail criterion in Cartesian
/// coordinates, regardless of the model's quadrature geometry.
std::vector<Interval> cartesian_extent(const WavefunctionModel& model, double t, double tail_threshold = 1e-12);

/// Configuration of largest density found by a quasi-random search.
ParticleConfig densest_point(const WavefunctionModel& model, double t);

/// Integrand writes `outputs` values for one node; they are summed with the
/// quadrature weights. Nodes on the singular set are skipped (measure zero).
using Integrand = std::function<void(const WavefunctionJet&, const ParticleConfig&, std::span<double>)>;

std::vector<double> integrate(const WavefunctionModel& model, const QuadratureSpec& spec, double t,
                              std::size_t outputs, const Integrand& integrand);

/// Nodes and weights of a one-dimensional rule on [a, b].
void rule_nodes(QuadratureRule rule, std::size_t points, double a, double b, std::vector<double>& nodes,
                std::vector<double>& weights);

}  // namespace bohmdyn

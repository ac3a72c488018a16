#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "bohmdyn/particle_config.hpp"
#include "bohmdyn/states.hpp"

namespace bohmdyn {

/// Radical-inverse (Halton) coordinate `dimension` of point `index`, in [0, 1).
double halton(std::uint64_t index, std::size_t dimension);

struct ProbePoint {
  ParticleConfig config;
  double t = 0.0;
};

/// Quasi-random (config, t) points inside the model's Cartesian extent at
/// t = 0, keeping only regular points with Υ ≥ min_density. Times are spread
/// over [0, t_max]; t_max == 0 gives t = 0 everywhere.
std::vector<ProbePoint> probe_points(const WavefunctionModel& model, std::size_t count, double min_density,
                                     double t_max = 0.0, std::uint64_t offset = 1);

/// SplitMix64 step, used to derive independent seeds from one base seed.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace bohmdyn

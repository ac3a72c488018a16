#include "bohmdyn/probes.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "bohmdyn/errors.hpp"
#include "bohmdyn/fields.hpp"
#include "bohmdyn/quadrature.hpp"

namespace bohmdyn {

namespace {

constexpr std::array<unsigned, 16> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

double halton(std::uint64_t index, std::size_t dimension) {
  const unsigned base = kPrimes.at(dimension);
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<ProbePoint> probe_points(const WavefunctionModel& model, std::size_t count, double min_density,
                                     double t_max, std::uint64_t offset) {
  auto box = cartesian_extent(model, 0.0);
  if (t_max > 0.0 && !model.is_stationary()) {
    const auto later = cartesian_extent(model, t_max);
    for (std::size_t k = 0; k < box.size(); ++k) {
      box[k].lower = std::min(box[k].lower, later[k].lower);
      box[k].upper = std::max(box[k].upper, later[k].upper);
    }
  }
  const std::size_t m = box.size();
  std::vector<ProbePoint> out;
  out.reserve(count);
  // Give up after a generous number of draws so a sparse state cannot spin forever.
  const std::uint64_t limit = offset + 1000 * count + 10000;
  for (std::uint64_t idx = offset; out.size() < count && idx < limit; ++idx) {
    std::vector<double> coords(m);
    for (std::size_t k = 0; k < m; ++k) coords[k] = box[k].lower + (box[k].upper - box[k].lower) * halton(idx, k);
    const double t = t_max > 0.0 ? t_max * halton(idx, m) : 0.0;
    ParticleConfig config = model.make_config(std::move(coords));
    try {
      if (density(model, config, t) >= min_density) out.push_back({std::move(config), t});
    } catch (const SingularityError&) {
    }
  }
  if (out.size() < count) throw UsageError("could not place enough probe points for " + model.label());
  return out;
}

}  // namespace bohmdyn

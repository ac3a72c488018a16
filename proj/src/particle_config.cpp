#include "bohmdyn/particle_config.hpp"

#include <cmath>
#include <string>

#include "bohmdyn/errors.hpp"

namespace bohmdyn {

ParticleConfig::ParticleConfig(std::size_t n, std::size_t d, std::vector<double> coords, std::vector<int> spins)
    : n_(n), d_(d), coords_(std::move(coords)), spins_(std::move(spins)) {
  if (coords_.size() != n_ * d_) {
    throw DomainError("configuration expects " + std::to_string(n_ * d_) + " coordinates, got " +
                      std::to_string(coords_.size()));
  }
  for (double x : coords_) {
    if (!std::isfinite(x)) throw DomainError("configuration coordinates must be finite");
  }
  if (spins_.empty()) spins_.assign(n_, 1);
  if (spins_.size() != n_) throw DomainError("one spin label per particle is required");
  for (int s : spins_) {
    if (s != 1 && s != -1) throw DomainError("spin labels must be +1 or -1");
  }
}

}  // namespace bohmdyn

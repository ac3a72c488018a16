#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bohmdyn {

/// Positions of n particles in d dimensions, stored particle-major, plus the
/// spin labels. Spins are inert parameters: nothing in the library reads them
/// except serialization.
class ParticleConfig {
 public:
  ParticleConfig() = default;

  /// Throws DomainError unless coords.size() == n*d, every coordinate is
  /// finite and every spin is ±1. An empty spin list means all +1.
  ParticleConfig(std::size_t n, std::size_t d, std::vector<double> coords,
                 std::vector<int> spins = {});

  std::size_t particles() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }

  std::span<const double> position(std::size_t i) const { return {coords_.data() + i * d_, d_}; }
  std::span<double> position(std::size_t i) { return {coords_.data() + i * d_, d_}; }

  std::span<const double> coords() const noexcept { return coords_; }
  std::span<double> coords() noexcept { return coords_; }
  std::span<const int> spins() const noexcept { return spins_; }

  bool operator==(const ParticleConfig&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> coords_;
  std::vector<int> spins_;
};

}  // namespace bohmdyn

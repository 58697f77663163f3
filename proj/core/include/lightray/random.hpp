#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace lightray {

/// Counter-based generator: draw i is splitmix64(seed + i * golden_gamma), so
/// every stream is reproducible from (seed, counter) alone.
///
/// Normal deviates use the Box-Muller transform on two consecutive uniforms in
/// (0, 1); both outputs of a pair are used before advancing.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) : seed_(seed), counter_(counter) {}

  std::uint64_t next_u64();
  /// Uniform in the open interval (0, 1).
  double uniform();
  double normal();

  Eigen::VectorXd normal_vector(Eigen::Index n);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace lightray

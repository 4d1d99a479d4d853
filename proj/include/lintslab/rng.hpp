#pragma once

#include <cstdint>
#include <Eigen/Dense>

namespace lintslab {

// splitmix64 output mixer (Steele, Lea & Flood 2014). Used both to expand a
// seed into generator state and to derive independent child seeds.
std::uint64_t splitmix64_mix(std::uint64_t z);

// Child seed #index of a base seed: the index-th output of the splitmix64
// sequence started at `base`. O(1), documented in run summaries so results
// can be reproduced stream by stream.
std::uint64_t split_seed(std::uint64_t base, std::uint64_t index);

// Deterministic value-type random stream: xoshiro256++ seeded via splitmix64,
// normals by the AS241 inverse-CDF applied to one uniform each. No internal
// caching, so copying a stream copies its exact future and the draw count per
// operation is fixed (one uniform per normal).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform01();

  double uniform(double lo, double hi);

  // Standard normal via the inverse CDF of uniform01().
  double normal();

  // n independent standard normals, drawn in index order.
  Eigen::VectorXd normals(Eigen::Index n);

 private:
  std::uint64_t s_[4];
};

}  // namespace lintslab

#include "lintslab/rng.hpp"

#include "lintslab/errors.hpp"
#include "lintslab/stats.hpp"

namespace lintslab {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64_mix(base + (index + 1) * kGolden);
}

RandomStream::RandomStream(std::uint64_t seed) {
  // Expand the seed with splitmix64; guarantees a nonzero xoshiro state.
  std::uint64_t z = seed;
  for (auto& word : s_) {
    z += kGolden;
    word = splitmix64_mix(z);
  }
}

std::uint64_t RandomStream::next_u64() {
  // xoshiro256++ (Blackman & Vigna).
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RandomStream::uniform01() {
  // 53-bit mantissa, offset by half a step: strictly inside (0, 1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
  if (!(lo < hi)) throw InvalidParamError("uniform: empty interval");
  return lo + (hi - lo) * uniform01();
}

double RandomStream::normal() {
  return norm_quantile(uniform01());
}

Eigen::VectorXd RandomStream::normals(Eigen::Index n) {
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal();
  return z;
}

}  // namespace lintslab

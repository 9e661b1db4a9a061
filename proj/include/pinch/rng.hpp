#pragma once

#include <cmath>
#include <cstdint>

namespace pinch::rng {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based splittable stream: (seed, index) fully determines the
// sequence, so trial loops give identical results in any execution order
// and trial counts can grow without perturbing earlier trials.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index)
      : state_(mix64(seed ^ 0x9E3779B97F4A7C15ull) ^
               mix64(index * 0xD1B54A32D192ED03ull + 1)) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // standard normal; consumes exactly two draws per call
  double gaussian() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.2831853071795864769 * u2);
  }

  // inclusive on both ends
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() %
                                 static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace pinch::rng

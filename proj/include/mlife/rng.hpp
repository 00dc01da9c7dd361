#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mlife {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// One deterministic stream per (seed, index) pair so parallel path generation
// is schedule-independent.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream * 0xD2B74407B1CE6E93ULL + 1))) {}

  void set_antithetic(bool on) { antithetic_ = on; }

  // strictly inside (0,1)
  double uniform() {
    double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    return antithetic_ ? 1.0 - u : u;
  }

  double exponential() { return -std::log(uniform()); }

 private:
  std::mt19937_64 engine_;
  bool antithetic_ = false;
};

}  // namespace mlife

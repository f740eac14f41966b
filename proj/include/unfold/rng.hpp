#pragma once

#include <cmath>
#include <cstdint>

namespace unfold {

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter). Replaying a seed reproduces a problem exactly,
// independent of draw order or threading.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : base_(mix64(seed ^ mix64(stream ^ 0x5851f42d4c957f2dULL))) {}

  // uniform on (0, 1]
  double uniform(std::uint64_t counter) const {
    const std::uint64_t bits = mix64(base_ ^ mix64(counter + 1));
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; consumes counters 2k and 2k+1
  double normal(std::uint64_t k) const {
    const double u1 = uniform(2 * k);
    const double u2 = uniform(2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t base_;
};

}  // namespace unfold

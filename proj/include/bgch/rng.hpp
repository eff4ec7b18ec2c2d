#pragma once

#include <cstdint>

namespace bgch {

// splitmix64 stream. Counter-based seeding lets us derive independent,
// reproducible streams per (step, node, view) without shared RNG state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // standard normal via Box-Muller
  double next_normal();

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    SplitMix64 g(a ^ (b * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    return g.next_u64();
  }

 private:
  std::uint64_t state_;
  bool have_spare_{false};
  double spare_{0.0};
};

}  // namespace bgch

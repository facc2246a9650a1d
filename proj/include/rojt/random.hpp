// Deterministic random stream.
//
// Everything here is pinned down to the bit so that a seed reproduces the
// same stream on every platform:
//   - the engine is std::mt19937_64, whose output sequence the standard
//     fixes exactly;
//   - uniforms are (x >> 11) * 2^-53, the top 53 bits of the engine word,
//     giving a value in [0, 1);
//   - gaussians come from a hand-rolled Box-Muller: u1 = 1 - uniform01()
//     (in (0, 1], keeping the log finite), u2 = uniform01(),
//     r = sqrt(-2 ln u1), returns r cos(2 pi u2) first and caches
//     r sin(2 pi u2) as the next draw.
// std::normal_distribution and friends are deliberately avoided: their
// algorithms differ between standard libraries.
//
// Sub-seeds for independent streams are derived by the splitmix64 finalizer
// on master + (index + 1) * 0x9e3779b97f4a7c15, so stream k of a run is a
// pure function of the master seed and k.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace rojt {

// splitmix64 output function (Steele, Lea, Flood 2014)
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_subseed(std::uint64_t master, std::uint64_t index) {
  return splitmix64_mix(master + (index + 1) * 0x9e3779b97f4a7c15ull);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed_used() const { return seed_; }

  // [0, 1), 53-bit resolution
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rojt

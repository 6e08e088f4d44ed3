#pragma once

// Seedable random streams. Each (seed, stream) pair gets its own Mersenne
// Twister engine so that simulated targets draw independently and adding a
// target never perturbs the others.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace boxkf {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class RandomStream
{
public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  RandomStream(std::uint64_t seed, std::uint64_t stream)
  : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)))
  {
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; always consumes exactly two engine outputs.
  double normal() noexcept
  {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace boxkf

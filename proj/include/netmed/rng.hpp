#pragma once

#include <cstdint>
#include <random>

namespace netmed {

// Per-chain random source. The engine is std::mt19937_64; uniforms take the
// top 53 bits of one engine output so Bernoulli dyad draws are portable across
// standard libraries. Normal and gamma variates use the standard library
// distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  double normal() { return normal_(engine_); }
  double normal(double mean, double sd) { return mean + sd * normal_(engine_); }
  // Gamma with shape/rate parameterisation.
  double gamma(double shape, double rate);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

// Derives an independent child seed for a numbered stream (splitmix64 finaliser).
std::uint64_t split_seed(std::uint64_t root, std::uint64_t stream);

namespace streams {
inline constexpr std::uint64_t eigenmodel = 1;
inline constexpr std::uint64_t mediation = 2;
inline constexpr std::uint64_t total_effect = 3;
inline constexpr std::uint64_t simulation = 4;
}  // namespace streams

}  // namespace netmed

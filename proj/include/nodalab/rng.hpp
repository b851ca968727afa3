#pragma once

#include <cstdint>
#include <random>

namespace nodalab {

/// (base seed, stream index). Each replication owns one stream.
struct SeedSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// SplitMix64 finaliser, used only to derive engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31U);
}

/// The pinned generator: std::mt19937_64 seeded with
/// splitmix64(seed ^ splitmix64(stream)). Normal variates come from
/// std::normal_distribution<double> drawn from that engine.
class Rng {
 public:
  explicit Rng(SeedSpec s) : engine_(splitmix64(s.seed ^ splitmix64(s.stream))) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace nodalab

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace galaxy {

// splitmix64 finalizer; a bijection on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable seed for a structural path below a master seed. Order-sensitive, and
// the path length is folded in so {1} and {1, 0} differ.
inline std::uint64_t derive_seed(std::uint64_t master, std::span<const std::uint64_t> path) {
  std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc908ULL);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p));
  return mix64(h ^ path.size());
}

inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return derive_seed(master, std::span<const std::uint64_t>(path.begin(), path.size()));
}

// An explicitly passed random stream. No hidden global state anywhere in the
// library; every draw comes from one of these.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  void fill_normal(std::span<double> out) {
    for (double& x : out) x = normal_(engine_);
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Stream ids for the independent consumers of a master seed.
enum class StreamDomain : std::uint64_t {
  Centers = 1,
  Galaxy = 2,
  Type1 = 3,
  Type2 = 4,
  PairSample = 5,
  Empirical = 6,
};

}  // namespace galaxy

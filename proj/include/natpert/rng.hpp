#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace natpert::rng {

std::uint64_t fnv1a64(std::string_view bytes);

// splitmix64 finalizer; good enough to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x);

// Stream seed for (seed, key); equal inputs give equal streams regardless of
// evaluation order, which keeps parallel pipelines reproducible.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

// Deterministic across platforms: raw mt19937_64 output plus rejection
// sampling. std::uniform_int_distribution is implementation-defined and
// would break byte-identical reruns.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform in [0, n); n must be > 0.
  std::size_t index(std::size_t n);

  // Uniform in [0, 1).
  double unit();

  // k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 eng_;
};

}  // namespace natpert::rng

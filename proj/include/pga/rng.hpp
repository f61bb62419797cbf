#pragma once
#include <array>
#include <cstdint>
#include <random>

namespace pga {

// Derives an independent 128-bit stream key for run `run_index` of a
// Monte Carlo batch keyed by `master_seed`. Two rounds of splitmix64 over
// (master, index); the layout is fixed so other implementations can
// reproduce identical streams.
std::array<std::uint64_t, 2> split_seed(std::uint64_t master_seed, std::uint64_t run_index) noexcept;

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// Execution RNG. mt19937_64 seeded through std::seed_seq with the four
// 32-bit halves of a 128-bit key, low word first. Derived draws avoid the
// implementation-defined std distributions so results are bit-identical
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::array<std::uint64_t, 2> key);
  explicit Rng(std::uint64_t seed) : Rng(std::array<std::uint64_t, 2>{seed, 0}) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on (0, 1] with 53-bit resolution.
  double uniform_open_closed();
  // Uniform index in [0, n).
  std::uint64_t index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace pga

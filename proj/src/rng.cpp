#include "pga/rng.hpp"

#include <limits>

namespace pga {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::array<std::uint64_t, 2> split_seed(std::uint64_t master_seed, std::uint64_t run_index) noexcept {
  std::uint64_t state = master_seed;
  const std::uint64_t a = splitmix64(state);
  state = a ^ run_index;
  const std::uint64_t lo = splitmix64(state);
  const std::uint64_t hi = splitmix64(state);
  return {lo, hi};
}

namespace {
std::mt19937_64 make_engine(std::array<std::uint64_t, 2> key) {
  std::seed_seq seq{static_cast<std::uint32_t>(key[0]), static_cast<std::uint32_t>(key[0] >> 32),
                    static_cast<std::uint32_t>(key[1]), static_cast<std::uint32_t>(key[1] >> 32)};
  return std::mt19937_64(seq);
}
}  // namespace

Rng::Rng(std::array<std::uint64_t, 2> key) : engine_(make_engine(key)) {}

double Rng::uniform_open_closed() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t Rng::index(std::uint64_t n) {
  if (n <= 1) return 0;
  // Rejection sampling keeps the draw unbiased for any n.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace pga

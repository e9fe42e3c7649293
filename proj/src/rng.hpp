#pragma once

#include <cstdint>
#include <cstddef>

namespace erc {

// Named sub-streams split off a run's root seed. Each consumer of
// randomness owns one stream so that enabling or disabling a feature
// never shifts the draws seen by the others.
enum class RngStream : std::uint64_t {
  env = 1,          // reset noise / env-internal sampling
  policy = 2,       // action sampling while collecting
  buffer = 3,       // uniform replay draws
  mining = 4,       // dropout mask draws
  update = 5,       // fresh-action noise inside updates (SAC)
  init_policy = 6,  // parameter init, one stream per network
  init_value = 7,
  init_value2 = 8,
  init_disc = 9,
  eval = 10,        // evaluation episode seeds
};

// xoshiro256** seeded through splitmix64. Fixed algorithm, so a given
// (seed, stream) pair produces the same draws on every platform.
class Rng {
 public:
  Rng() : Rng(0, 0) {}
  Rng(std::uint64_t seed, std::uint64_t stream);
  Rng(std::uint64_t seed, RngStream stream)
      : Rng(seed, static_cast<std::uint64_t>(stream)) {}

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 bits of mantissa.
  double uniform();
  double uniform(double lo, double hi);
  // i in [0, n), unbiased (rejection on the tail range).
  std::uint64_t uniform_index(std::uint64_t n);
  // Standard normal via Box-Muller (no cached spare).
  double normal();

 private:
  std::uint64_t s_[4];
};

// One splitmix64 step; also handy for deriving child seeds.
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace erc

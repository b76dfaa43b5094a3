#pragma once

#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

namespace dfrc {

/// Deterministic, platform-independent random generator (xoshiro256++ core,
/// splitmix64 seeding). Standard-library distributions are avoided on purpose:
/// their output is implementation-defined and would break byte-reproducible
/// experiment reports.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double gaussian();
  /// Circularly symmetric complex normal with E|z|^2 = 1.
  std::complex<double> complex_gaussian();
  /// Single payload bit.
  int bit();
  std::vector<std::uint8_t> bits(std::size_t count);

 private:
  std::uint64_t state_[4];
  bool have_cached_ = false;
  double cached_ = 0.0;
};

/// Counter-keyed seed derivation: independent streams for (master, tag, counter)
/// triples, so any Monte Carlo trial is reproducible in isolation.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t counter);

}  // namespace dfrc

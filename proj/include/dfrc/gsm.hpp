#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dfrc {

/// An active-antenna selection: strictly increasing indices in [0, num_tx).
/// With fixed_endpoints the first and last array elements are always active,
/// which keeps the transmit aperture (and hence the virtual array) maximal.
struct AntennaPattern {
  std::vector<int> indices;
  bool fixed_endpoints = false;
};

class GsmError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// C(n, k) saturated at 2^63 so bit-width computations never overflow.
std::uint64_t binomial(int n, int k);

/// Number of distinct active-antenna selections.
std::uint64_t pattern_count(int num_tx, int num_active, bool fixed_endpoints);

/// Index bits carried per OFDM symbol: floor(log2(pattern_count)).
int bits_per_pattern(int num_tx, int num_active, bool fixed_endpoints);

/// Maps a B-bit integer to the combination of that lexicographic rank over the
/// selectable antennas. Injective on [0, 2^B).
AntennaPattern encode_pattern(std::uint64_t bits, int num_tx, int num_active,
                              bool fixed_endpoints);

/// Inverse of encode_pattern. Patterns whose rank is >= 2^B were never
/// produced by the encoder and raise GsmError rather than wrapping silently.
std::uint64_t decode_pattern(const AntennaPattern& pattern, int num_tx, int num_active);

void validate_pattern(const AntennaPattern& p, int num_tx, int num_active);

}  // namespace dfrc

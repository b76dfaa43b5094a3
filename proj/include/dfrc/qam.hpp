#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dfrc/types.hpp"

namespace dfrc {

class QamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

int bits_per_qam_symbol(int order);

/// Constellation point for a label, Gray-coded square QAM normalized to unit
/// average energy. The first half of the label bits selects the in-phase
/// level, the second half the quadrature level.
cxd qam_point(std::uint32_t label, int order);

/// All constellation points indexed by label.
std::vector<cxd> qam_constellation(int order);

/// Gray map of a bit stream to symbols. Bit count must divide evenly.
std::vector<cxd> map_qam(const BitVec& bits, int order);

/// Hard-decision nearest-point demap. Exact midpoints resolve to the
/// lexicographically smallest label among the nearest points.
BitVec demap_qam(const std::vector<cxd>& symbols, int order);

}  // namespace dfrc

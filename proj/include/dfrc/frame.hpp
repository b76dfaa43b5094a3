#pragma once

#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "dfrc/config.hpp"
#include "dfrc/gsm.hpp"
#include "dfrc/qam.hpp"

namespace dfrc {

/// One (subcarrier, owner antenna) exclusivity assignment.
struct PrivatePair {
  int subcarrier = 0;
  int antenna = 0;
};

/// The transmitted symbol tensor d_tx(antenna, subcarrier, symbol) together
/// with the per-symbol antenna pattern and private-subcarrier bookkeeping.
///
/// Payload bits fill slots in a fixed order: OFDM symbol index, then
/// subcarrier, then active antennas ascending, skipping slots blocked by a
/// private assignment. The receiver reconstructs the same order from the
/// decoded pattern, so the order is part of the wire contract.
class SymbolFrame {
 public:
  SymbolFrame(const SystemConfig& cfg, int private_period);

  const SystemConfig& config() const { return cfg_; }
  /// Private-map period M: subcarriers are reserved on symbols with
  /// mu % M == 0. Zero disables private subcarriers entirely.
  int private_period() const { return private_period_; }

  cxd& at(int antenna, int subcarrier, int symbol);
  const cxd& at(int antenna, int subcarrier, int symbol) const;

  const AntennaPattern& pattern(int symbol) const { return patterns.at(symbol); }
  const std::optional<std::vector<PrivatePair>>& private_map(int symbol) const {
    return private_maps.at(symbol);
  }
  bool has_private(int symbol) const { return private_maps.at(symbol).has_value(); }

  /// True when the slot carries no data because the subcarrier is private to
  /// another antenna.
  bool is_blocked(int antenna, int subcarrier, int symbol) const;

  // Filled by build_frame; open for tests and custom probing frames.
  std::vector<AntennaPattern> patterns;
  std::vector<std::optional<std::vector<PrivatePair>>> private_maps;
  BitVec payload_bits;
  BitVec index_bits;

 private:
  SystemConfig cfg_;
  int private_period_;
  std::vector<cxd> d_tx_;  // layout: ((symbol * N_s) + subcarrier) * N_t + antenna
};

class FrameError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pairs subcarrier j with the j-th smallest active antenna, j = 0..N_x-1.
std::vector<PrivatePair> assign_private(const AntennaPattern& pattern,
                                        const SystemConfig& cfg);

/// Payload bits consumed by a full frame at the given private period.
std::size_t payload_bit_count(const SystemConfig& cfg, int private_period);

/// Index bits consumed by a full frame (B per OFDM symbol).
std::size_t index_bit_count(const SystemConfig& cfg, bool fixed_endpoints);

/// Builds the transmit tensor from payload and antenna-index bit streams.
/// private_period M > 0 attaches a private map on symbols with mu % M == 0;
/// M == 0 never does. Throws FrameError on bit underrun.
SymbolFrame build_frame(const BitVec& payload_bits, const BitVec& index_bits,
                        const SystemConfig& cfg, bool fixed_endpoints,
                        int private_period);

/// Baseband transmit waveform of one antenna evaluated at the given instants.
/// Each OFDM symbol occupies [mu*T_p, (mu+1)*T_p) and its subcarrier phases
/// are referenced to the end of the cyclic prefix, so the first T_cp of the
/// symbol is the cyclic extension of its tail.
std::vector<cxd> synthesize_waveform(const SymbolFrame& frame, int antenna,
                                     const std::vector<double>& times);

/// Peak information rate in bits/s, optionally accounting for the data
/// symbols lost to private subcarriers in every OFDM symbol.
double bit_rate(const SystemConfig& cfg, bool with_private);

/// Debug dump of nonzero entries, columns: n,i,mu,re,im.
void dump_frame_csv(const SymbolFrame& frame, std::ostream& os);

}  // namespace dfrc

#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "dfrc/config.hpp"
#include "dfrc/frame.hpp"

namespace dfrc {

/// Received radar symbols d_rx(rx antenna, subcarrier, symbol).
class RadarCube {
 public:
  RadarCube(int num_rx, int num_subcarriers, int num_symbols);

  int num_rx() const { return num_rx_; }
  int num_subcarriers() const { return num_subcarriers_; }
  int num_symbols() const { return num_symbols_; }

  cxd& at(int m, int subcarrier, int symbol);
  const cxd& at(int m, int subcarrier, int symbol) const;

  std::vector<cxd>& data() { return data_; }
  const std::vector<cxd>& data() const { return data_; }

  std::optional<double> snr_db;  // set by add_noise

 private:
  int num_rx_, num_subcarriers_, num_symbols_;
  std::vector<cxd> data_;  // layout: ((symbol * N_s) + subcarrier) * N_r + m
};

class RadarSimError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Symbol-domain echo synthesis. Each target contributes
///   d_tx(n,i,mu) * e^{-j2pi (m d_r + n d_t) sin(theta) (f_c + i delta)/c}
///               * e^{-j2pi i delta 2R/c} * e^{+j2pi mu T_p f_d}
/// summed over active antennas, with unit reflectivity.
RadarCube simulate_rx(const SymbolFrame& frame, const std::vector<TargetSpec>& targets,
                      const SystemConfig& cfg);

/// Adds i.i.d. circularly symmetric complex Gaussian noise with variance
/// mean(|d_rx|^2) / 10^(snr_db/10). An infinite snr_db returns the cube
/// unchanged. Deterministic for a given seed.
RadarCube add_noise(const RadarCube& cube, double snr_db, std::uint64_t seed);

/// Time-domain cross-check path: samples the delayed, Doppler-shifted sum of
/// per-antenna transmit waveforms at rate N_s*delta, keeps each symbol's
/// useful window (the cyclic prefix is discarded) and applies an N_s-point
/// DFT. Delays act on the waveform and as carrier phase on the array
/// geometry; the per-target constant carrier phase of the range delay is
/// referenced out so the result is comparable with simulate_rx. Doppler
/// phase is referenced to the center of the first useful window.
/// Throws if any roundtrip delay exceeds the cyclic prefix.
RadarCube simulate_rx_timedomain(const SymbolFrame& frame,
                                 const std::vector<TargetSpec>& targets,
                                 const SystemConfig& cfg);

/// Debug dump, columns: m,i,mu,re,im.
void dump_cube_csv(const RadarCube& cube, std::ostream& os);

}  // namespace dfrc

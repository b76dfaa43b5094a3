#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "dfrc/config.hpp"
#include "dfrc/frame.hpp"
#include "dfrc/gsm.hpp"

namespace dfrc {

class CommError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Frequency response per subcarrier of the frequency-selective MIMO channel,
/// one N_c x N_t matrix per subcarrier.
struct CommChannel {
  std::vector<Eigen::MatrixXcd> h;
  int taps = 1;
  std::uint64_t seed = 0;
};

/// Received symbol matrix for one OFDM symbol: column i follows
/// Y_i = H_i A_i + N_i.
struct CommObservation {
  Eigen::MatrixXcd y;  // N_c x N_s
  double snr_db = 0.0;
  double noise_var = 0.0;  // per complex entry
  int symbol = 0;          // OFDM symbol index mu
};

struct DecodedFrame {
  AntennaPattern pattern_hat;
  std::vector<int> private_set_hat;   // subcarriers declared private
  Eigen::MatrixXcd symbols_hat;       // |pattern| x N_s, rows follow pattern order
  BitVec payload_bits_hat;
  BitVec index_bits_hat;
  bool pattern_decode_failed = false; // support was not a valid/encodable pattern
  bool fell_back_to_ssr = false;      // private path gave up on this symbol
};

/// Tap-domain Rayleigh channel: i.i.d. circularly symmetric Gaussian taps of
/// variance 1/L, transformed to per-subcarrier responses (unit average power).
CommChannel gen_channel(const SystemConfig& cfg, int taps, std::uint64_t seed);

/// Pushes one OFDM symbol of the frame through the channel and adds white
/// noise. The noise variance realizes the requested post-channel SNR: average
/// received signal power per antenna over occupied subcarriers divided by
/// 10^(snr/10). An all-zero frame uses a unit power reference so pure-noise
/// observations remain well-defined. snr_db = +inf disables noise.
CommObservation transmit(const SymbolFrame& frame, const CommChannel& channel, int symbol,
                         double snr_db, std::uint64_t seed);

/// Joint sparse recovery across all subcarriers (the antenna support is
/// common), per-subcarrier least squares on the recovered support, then
/// hard demap. Index bits decode from the support's combinadic rank.
DecodedFrame decode_ssr(const CommObservation& obs, const CommChannel& channel,
                        const SystemConfig& cfg, bool fixed_endpoints,
                        int private_period);

struct PrivateDecodeOptions {
  double gamma = 0.1;            // relative residual bound for "1-sparse"
  double noise_floor_mult = 1.5; // absolute bound: mult * sigma^2 * N_c
  double min_coef_snr = 40.0;    // trust a vote only this far above the noise
};

/// Private-subcarrier route: per-subcarrier pursuit flags 1-sparse columns,
/// their atoms vote for the active set, remaining subcarriers decode by least
/// squares restricted to the winners. Falls back to decode_ssr when the votes
/// do not identify N_x trustworthy antennas.
DecodedFrame decode_private(const CommObservation& obs, const CommChannel& channel,
                            const SystemConfig& cfg, bool fixed_endpoints,
                            int private_period, const PrivateDecodeOptions& opt = {});

/// Fraction of differing bits; throws on length mismatch.
double bit_error_rate(const BitVec& truth, const BitVec& estimate);

}  // namespace dfrc

#include "dfrc/frame.hpp"

#include <cmath>

namespace dfrc {

SymbolFrame::SymbolFrame(const SystemConfig& cfg, int private_period)
    : cfg_(cfg), private_period_(private_period) {
  const std::size_t total = static_cast<std::size_t>(cfg.num_symbols) *
                            cfg.num_subcarriers * cfg.num_tx;
  d_tx_.assign(total, cxd{0.0, 0.0});
  patterns.resize(cfg.num_symbols);
  private_maps.resize(cfg.num_symbols);
}

cxd& SymbolFrame::at(int antenna, int subcarrier, int symbol) {
  return d_tx_[(static_cast<std::size_t>(symbol) * cfg_.num_subcarriers + subcarrier) *
                   cfg_.num_tx +
               antenna];
}

const cxd& SymbolFrame::at(int antenna, int subcarrier, int symbol) const {
  return d_tx_[(static_cast<std::size_t>(symbol) * cfg_.num_subcarriers + subcarrier) *
                   cfg_.num_tx +
               antenna];
}

bool SymbolFrame::is_blocked(int antenna, int subcarrier, int symbol) const {
  const auto& pm = private_maps[symbol];
  if (!pm) return false;
  for (const auto& pair : *pm)
    if (pair.subcarrier == subcarrier) return pair.antenna != antenna;
  return false;
}

std::vector<PrivatePair> assign_private(const AntennaPattern& pattern,
                                        const SystemConfig& cfg) {
  validate_pattern(pattern, cfg.num_tx, cfg.num_active);
  std::vector<PrivatePair> map;
  map.reserve(pattern.indices.size());
  for (std::size_t j = 0; j < pattern.indices.size(); ++j)
    map.push_back({static_cast<int>(j), pattern.indices[j]});
  return map;
}

std::size_t payload_bit_count(const SystemConfig& cfg, int private_period) {
  const int bps = bits_per_qam_symbol(cfg.qam_order);
  const std::size_t per_shared = static_cast<std::size_t>(cfg.num_active) * cfg.num_subcarriers;
  const std::size_t loss = static_cast<std::size_t>(cfg.num_active) * (cfg.num_active - 1);
  std::size_t slots = 0;
  for (int mu = 0; mu < cfg.num_symbols; ++mu) {
    const bool priv = private_period > 0 && mu % private_period == 0;
    slots += per_shared - (priv ? loss : 0);
  }
  return slots * bps;
}

std::size_t index_bit_count(const SystemConfig& cfg, bool fixed_endpoints) {
  return static_cast<std::size_t>(cfg.num_symbols) *
         bits_per_pattern(cfg.num_tx, cfg.num_active, fixed_endpoints);
}

SymbolFrame build_frame(const BitVec& payload_bits, const BitVec& index_bits,
                        const SystemConfig& cfg, bool fixed_endpoints,
                        int private_period) {
  validate_config(cfg);
  const int bps = bits_per_qam_symbol(cfg.qam_order);
  const int b_idx = bits_per_pattern(cfg.num_tx, cfg.num_active, fixed_endpoints);
  if (index_bits.size() < static_cast<std::size_t>(cfg.num_symbols) * b_idx)
    throw FrameError("index bit underrun");

  SymbolFrame frame(cfg, private_period);
  std::size_t pay = 0;
  std::size_t idx = 0;
  for (int mu = 0; mu < cfg.num_symbols; ++mu) {
    std::uint64_t word = 0;
    for (int b = 0; b < b_idx; ++b) word = (word << 1) | index_bits[idx++];
    frame.patterns[mu] = encode_pattern(word, cfg.num_tx, cfg.num_active, fixed_endpoints);
    if (private_period > 0 && mu % private_period == 0)
      frame.private_maps[mu] = assign_private(frame.patterns[mu], cfg);

    for (int i = 0; i < cfg.num_subcarriers; ++i) {
      for (int n : frame.patterns[mu].indices) {
        if (frame.is_blocked(n, i, mu)) continue;
        if (pay + bps > payload_bits.size()) throw FrameError("payload bit underrun");
        std::uint32_t label = 0;
        for (int b = 0; b < bps; ++b) label = (label << 1) | payload_bits[pay++];
        frame.at(n, i, mu) = qam_point(label, cfg.qam_order);
      }
    }
  }
  frame.payload_bits.assign(payload_bits.begin(), payload_bits.begin() + pay);
  frame.index_bits.assign(index_bits.begin(), index_bits.begin() + idx);
  return frame;
}

std::vector<cxd> synthesize_waveform(const SymbolFrame& frame, int antenna,
                                     const std::vector<double>& times) {
  const SystemConfig& cfg = frame.config();
  std::vector<cxd> out(times.size(), cxd{0.0, 0.0});
  for (std::size_t s = 0; s < times.size(); ++s) {
    const double t = times[s];
    const int mu = static_cast<int>(std::floor(t / cfg.symbol_duration_s));
    if (mu < 0 || mu >= cfg.num_symbols) continue;
    const double local = t - mu * cfg.symbol_duration_s - cfg.cyclic_prefix_s;
    cxd acc{0.0, 0.0};
    for (int i = 0; i < cfg.num_subcarriers; ++i) {
      const cxd d = frame.at(antenna, i, mu);
      if (d == cxd{0.0, 0.0}) continue;
      acc += d * std::polar(1.0, 2.0 * M_PI * i * cfg.subcarrier_spacing_hz * local);
    }
    out[s] = acc;
  }
  return out;
}

double bit_rate(const SystemConfig& cfg, bool with_private) {
  const int bps = bits_per_qam_symbol(cfg.qam_order);
  const int b_idx = bits_per_pattern(cfg.num_tx, cfg.num_active, false);
  double bits = static_cast<double>(cfg.num_active) * cfg.num_subcarriers * bps + b_idx;
  if (with_private)
    bits -= static_cast<double>(cfg.num_active) * (cfg.num_active - 1) * bps;
  return bits / cfg.symbol_duration_s;
}

void dump_frame_csv(const SymbolFrame& frame, std::ostream& os) {
  const SystemConfig& cfg = frame.config();
  os << "n,i,mu,re,im\n";
  for (int mu = 0; mu < cfg.num_symbols; ++mu)
    for (int i = 0; i < cfg.num_subcarriers; ++i)
      for (int n : frame.pattern(mu).indices) {
        const cxd d = frame.at(n, i, mu);
        if (d == cxd{0.0, 0.0}) continue;
        os << n << ',' << i << ',' << mu << ',' << d.real() << ',' << d.imag() << '\n';
      }
}

}  // namespace dfrc

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dfrc/frame.hpp"
#include "dfrc/qam.hpp"
#include "dfrc/rng.hpp"
#include "dfrc/scenario.hpp"

using namespace dfrc;

namespace {

SystemConfig desk_cfg() {
  SystemConfig cfg = full_scale_system();
  cfg.num_subcarriers = 64;
  cfg.num_symbols = 4;
  cfg.num_tx = 16;
  cfg.num_active = 5;
  cfg.num_rx_radar = 16;
  return cfg;
}

SymbolFrame make_frame(const SystemConfig& cfg, bool fixed, int period,
                       std::uint64_t seed = 7) {
  Rng pay(derive_seed(seed, "pay", 0));
  Rng idx(derive_seed(seed, "idx", 0));
  return build_frame(pay.bits(payload_bit_count(cfg, period)),
                     idx.bits(index_bit_count(cfg, fixed)), cfg, fixed, period);
}

}  // namespace

TEST_CASE("16-QAM constellation") {
  const auto pts = qam_constellation(16);
  CHECK(pts[0].real() == doctest::Approx(-3.0 / std::sqrt(10.0)).epsilon(1e-15));
  CHECK(pts[0].imag() == doctest::Approx(-3.0 / std::sqrt(10.0)).epsilon(1e-15));
  double energy = 0.0;
  for (const auto& p : pts) energy += std::norm(p);
  CHECK(energy / 16.0 == doctest::Approx(1.0).epsilon(1e-12));
  // Gray property: adjacent levels differ in one bit on each axis.
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) {
      const double d = std::abs(pts[a] - pts[b]);
      if (a != b && d < 2.0 / std::sqrt(10.0) + 1e-9) {
        int diff = 0;
        for (int bit = 0; bit < 4; ++bit) diff += ((a ^ b) >> bit) & 1;
        CHECK(diff == 1);
      }
    }
}

TEST_CASE("map/demap round trip and decision regions") {
  Rng rng(11);
  const BitVec bits = rng.bits(4000);
  const auto syms = map_qam(bits, 16);
  CHECK(demap_qam(syms, 16) == bits);

  // noise below half the minimum distance never flips a decision
  const double half_min = 1.0 / std::sqrt(10.0);
  std::vector<cxd> noisy = syms;
  for (std::size_t k = 0; k < noisy.size(); ++k)
    noisy[k] += std::polar(0.98 * half_min, 2.0 * M_PI * rng.uniform());
  CHECK(demap_qam(noisy, 16) == bits);

  // declared midpoint tie rule
  const BitVec tie = demap_qam({cxd{0.0, 0.0}}, 16);
  CHECK(tie == BitVec{0, 1, 0, 1});

  CHECK_THROWS_AS(map_qam(BitVec{1, 0, 1}, 16), QamError);

  // 64-QAM sanity
  const BitVec b64 = rng.bits(600);
  CHECK(demap_qam(map_qam(b64, 64), 64) == b64);
}

TEST_CASE("private assignment pairs subcarriers with sorted antennas") {
  SystemConfig cfg = full_scale_system();
  AntennaPattern p;
  p.indices = {0, 3, 7, 12, 31};
  const auto map = assign_private(p, cfg);
  REQUIRE(map.size() == 5);
  for (int j = 0; j < 5; ++j) {
    CHECK(map[j].subcarrier == j);
    CHECK(map[j].antenna == p.indices[j]);
  }
  cfg.num_active = 2;
  AntennaPattern p2;
  p2.indices = {0, 31};
  const auto map2 = assign_private(p2, cfg);
  CHECK(map2.size() == 2);
  CHECK(map2[1].antenna == 31);
}

TEST_CASE("frame slot accounting") {
  // full-scale slot counts, no tensor allocation needed
  const SystemConfig full = full_scale_system();
  CHECK(payload_bit_count(full, 1) / full.num_symbols / 4 == 5100);
  CHECK(payload_bit_count(full, 0) / full.num_symbols / 4 == 5120);

  const SystemConfig cfg = desk_cfg();
  const SymbolFrame frame = make_frame(cfg, true, 1);
  for (int mu = 0; mu < cfg.num_symbols; ++mu) {
    int nonzero = 0;
    for (int i = 0; i < cfg.num_subcarriers; ++i)
      for (int n = 0; n < cfg.num_tx; ++n)
        if (frame.at(n, i, mu) != cxd{0.0, 0.0}) ++nonzero;
    CHECK(nonzero == cfg.num_active * cfg.num_subcarriers -
                         cfg.num_active * (cfg.num_active - 1));
  }

  const SymbolFrame no_priv = make_frame(cfg, true, 0);
  int nonzero = 0;
  for (int i = 0; i < cfg.num_subcarriers; ++i)
    for (int n = 0; n < cfg.num_tx; ++n)
      if (no_priv.at(n, i, 0) != cxd{0.0, 0.0}) ++nonzero;
  CHECK(nonzero == cfg.num_active * cfg.num_subcarriers);
}

TEST_CASE("frame invariants hold on a built frame") {
  const SystemConfig cfg = desk_cfg();
  const SymbolFrame frame = make_frame(cfg, true, 2);
  const auto pts = qam_constellation(cfg.qam_order);
  for (int mu = 0; mu < cfg.num_symbols; ++mu) {
    CHECK(frame.has_private(mu) == (mu % 2 == 0));
    const auto& active = frame.pattern(mu).indices;
    for (int i = 0; i < cfg.num_subcarriers; ++i)
      for (int n = 0; n < cfg.num_tx; ++n) {
        const cxd v = frame.at(n, i, mu);
        const bool is_active = std::find(active.begin(), active.end(), n) != active.end();
        if (!is_active || frame.is_blocked(n, i, mu)) {
          CHECK(v == cxd{0.0, 0.0});
        } else {
          double dmin = 1e9;
          for (const auto& p : pts) dmin = std::min(dmin, std::abs(v - p));
          CHECK(dmin < 1e-12);
        }
      }
  }
}

TEST_CASE("bits in equals bits recoverable") {
  const SystemConfig cfg = desk_cfg();
  const SymbolFrame frame = make_frame(cfg, false, 1);
  BitVec recovered;
  for (int mu = 0; mu < cfg.num_symbols; ++mu)
    for (int i = 0; i < cfg.num_subcarriers; ++i)
      for (int n : frame.pattern(mu).indices) {
        if (frame.is_blocked(n, i, mu)) continue;
        const BitVec b = demap_qam({frame.at(n, i, mu)}, cfg.qam_order);
        recovered.insert(recovered.end(), b.begin(), b.end());
      }
  CHECK(recovered == frame.payload_bits);
}

TEST_CASE("bit underrun raises") {
  const SystemConfig cfg = desk_cfg();
  Rng rng(3);
  const BitVec index = rng.bits(index_bit_count(cfg, true));
  const BitVec short_payload = rng.bits(payload_bit_count(cfg, 1) - 4);
  CHECK_THROWS_AS(build_frame(short_payload, index, cfg, true, 1), FrameError);
}

TEST_CASE("waveform synthesis matches the symbol tensor") {
  SystemConfig cfg = desk_cfg();
  cfg.num_subcarriers = 32;
  cfg.num_symbols = 2;
  const SymbolFrame frame = make_frame(cfg, true, 1);
  const int n = frame.pattern(0).indices[1];
  const int ns = cfg.num_subcarriers;

  // DC-only frame: constant over the first symbol
  SymbolFrame dc(cfg, 0);
  for (int mu = 0; mu < cfg.num_symbols; ++mu) dc.patterns[mu].indices = {n};
  dc.at(n, 0, 0) = cxd{1.0, 0.0};
  const auto w = synthesize_waveform(dc, n, {0.0, 1e-6, 5e-6, 12.4e-6});
  for (const auto& v : w) CHECK(std::abs(v - cxd{1.0, 0.0}) < 1e-12);

  // DFT over the useful window recovers the sent symbols
  std::vector<double> times(ns);
  for (int s = 0; s < ns; ++s)
    times[s] = cfg.cyclic_prefix_s + s / (ns * cfg.subcarrier_spacing_hz);
  const auto samples = synthesize_waveform(frame, n, times);
  double energy = 0.0, ref_energy = 0.0;
  for (int i = 0; i < ns; ++i) {
    cxd acc{0.0, 0.0};
    for (int s = 0; s < ns; ++s)
      acc += samples[s] * std::polar(1.0, -2.0 * M_PI * i * s / ns);
    CHECK(std::abs(acc / double(ns) - frame.at(n, i, 0)) < 1e-10);
    ref_energy += std::norm(frame.at(n, i, 0));
  }
  for (int s = 0; s < ns; ++s) energy += std::norm(samples[s]);
  CHECK(energy == doctest::Approx(ns * ref_energy).epsilon(1e-9));

  // cyclic prefix is the tail copy
  std::vector<double> cp_times = {1e-6, 1e-6 + 1.0 / cfg.subcarrier_spacing_hz};
  const auto cp = synthesize_waveform(frame, n, cp_times);
  CHECK(std::abs(cp[0] - cp[1]) < 1e-10);
}

TEST_CASE("frame debug dump") {
  SystemConfig cfg = desk_cfg();
  cfg.num_subcarriers = 8;
  cfg.num_symbols = 2;
  const SymbolFrame frame = make_frame(cfg, true, 1);
  std::ostringstream os;
  dump_frame_csv(frame, os);
  const std::string text = os.str();
  CHECK(text.rfind("n,i,mu,re,im\n", 0) == 0);
  const std::size_t rows = std::count(text.begin(), text.end(), '\n') - 1;
  CHECK(rows == 2 * (cfg.num_active * 8 - cfg.num_active * (cfg.num_active - 1)));
}

TEST_CASE("bit rates") {
  const SystemConfig full = full_scale_system();
  CHECK(bit_rate(full, false) == doctest::Approx(1.63976e9).epsilon(1e-12));
  // with private subcarriers: (5*1024*4 + 17 - 5*4*4) bits per 12.5 us
  CHECK(bit_rate(full, true) == doctest::Approx(1.63336e9).epsilon(1e-12));

  // no private loss with a single active antenna
  SystemConfig one = full;
  one.num_active = 1;
  CHECK(bit_rate(one, true) == bit_rate(one, false));

  // rate dominated by N_x * N_s * log2(order)
  SystemConfig twice = full;
  twice.num_subcarriers *= 2;
  CHECK(bit_rate(twice, false) / bit_rate(full, false) == doctest::Approx(2.0).epsilon(1e-3));
}

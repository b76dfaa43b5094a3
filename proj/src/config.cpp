#include "dfrc/config.hpp"

#include <cmath>
#include <string>

namespace dfrc {

const SystemConfig& validate_config(const SystemConfig& cfg) {
  const auto fail = [](const std::string& what) { throw ConfigError(what); };

  if (cfg.carrier_hz <= 0) fail("carrier frequency must be positive");
  if (cfg.subcarrier_spacing_hz <= 0) fail("subcarrier spacing must be positive");
  if (cfg.symbol_duration_s <= 0) fail("symbol duration must be positive");
  if (cfg.cyclic_prefix_s < 0) fail("cyclic prefix must be nonnegative");

  const double useful = cfg.symbol_duration_s - cfg.cyclic_prefix_s;
  const double inv_spacing = 1.0 / cfg.subcarrier_spacing_hz;
  if (std::abs(useful - inv_spacing) > 1e-9 * inv_spacing)
    fail("CP/symbol-duration mismatch: T_p - T_cp must equal 1/delta");

  if (cfg.num_active < 2) fail("N_x must be at least 2");
  if (cfg.num_active > cfg.num_tx) fail("N_x exceeds N_t");
  if (cfg.num_rx_radar < 1) fail("N_r must be at least 1");
  if (cfg.num_rx_comm < 1) fail("N_c must be at least 1");
  if (cfg.num_subcarriers < cfg.num_active) fail("N_s must be at least N_x");
  if (cfg.num_symbols < 1) fail("N_p must be at least 1");
  if (cfg.tx_spacing_wl <= 0) fail("transmit spacing must be positive");
  if (cfg.rx_spacing_wl <= 0) fail("receive spacing must be positive");
  if (cfg.wave_speed <= 0) fail("propagation speed must be positive");
  if (cfg.qam_order < 4 || (cfg.qam_order & (cfg.qam_order - 1)) != 0)
    fail("QAM order must be a power of two, at least 4");
  const int side = static_cast<int>(std::lround(std::sqrt(double(cfg.qam_order))));
  if (side * side != cfg.qam_order) fail("QAM order must be a perfect square");

  return cfg;
}

DerivedParams derive(const SystemConfig& cfg) {
  DerivedParams d;
  d.wavelength_m = cfg.wave_speed / cfg.carrier_hz;
  d.range_bin_m = cfg.wave_speed / (2.0 * cfg.num_subcarriers * cfg.subcarrier_spacing_hz);
  d.velocity_bin_mps =
      cfg.wave_speed / (2.0 * cfg.carrier_hz * cfg.num_symbols * cfg.symbol_duration_s);
  d.max_unambiguous_range_m = cfg.wave_speed / (2.0 * cfg.subcarrier_spacing_hz);
  d.coarse_sine_step = 1.0 / (cfg.num_rx_radar * cfg.rx_spacing_wl);
  return d;
}

double doppler_hz(const SystemConfig& cfg, double velocity_mps) {
  return 2.0 * velocity_mps * cfg.carrier_hz / cfg.wave_speed;
}

void validate_target(const TargetSpec& t, const SystemConfig& cfg) {
  if (!(std::abs(t.theta_deg) < 90.0))
    throw ConfigError("target angle must satisfy |theta| < 90 degrees");
  const double rmax = derive(cfg).max_unambiguous_range_m;
  if (t.range_m < 0 || t.range_m >= rmax)
    throw ConfigError("target range outside [0, max unambiguous range)");
}

}  // namespace dfrc

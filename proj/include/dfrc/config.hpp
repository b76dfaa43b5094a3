#pragma once

#include <stdexcept>

namespace dfrc {

/// All system-level parameters of the joint radar/communication link.
/// Antenna spacings are in multiples of the carrier wavelength.
struct SystemConfig {
  double carrier_hz = 24e9;         // f_c
  double subcarrier_spacing_hz = 1e5;
  double symbol_duration_s = 12.5e-6;   // full OFDM symbol, prefix included
  double cyclic_prefix_s = 2.5e-6;
  int num_subcarriers = 1024;
  int num_symbols = 256;            // OFDM symbols per frame
  int num_tx = 32;
  int num_active = 4;               // simultaneously transmitting antennas
  int num_rx_radar = 50;
  int num_rx_comm = 16;
  double tx_spacing_wl = 1.0;
  double rx_spacing_wl = 0.5;
  double wave_speed = 3.0e8;
  int qam_order = 16;
};

/// Quantities derived from a validated SystemConfig; every processing stage
/// reads bin widths from here rather than recomputing them.
struct DerivedParams {
  double wavelength_m = 0.0;
  double range_bin_m = 0.0;
  double velocity_bin_mps = 0.0;
  double max_unambiguous_range_m = 0.0;
  double coarse_sine_step = 0.0;  // sine-domain grid step of the receive array DFT
};

struct TargetSpec {
  double theta_deg = 0.0;
  double range_m = 0.0;
  double velocity_mps = 0.0;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Returns cfg unchanged iff every invariant holds; throws ConfigError naming
/// the first violated invariant otherwise.
const SystemConfig& validate_config(const SystemConfig& cfg);

DerivedParams derive(const SystemConfig& cfg);

/// Doppler shift of a target moving at v m/s (two-way).
double doppler_hz(const SystemConfig& cfg, double velocity_mps);

void validate_target(const TargetSpec& t, const SystemConfig& cfg);

constexpr double deg_to_rad(double d) { return d * 3.14159265358979323846 / 180.0; }
constexpr double rad_to_deg(double r) { return r * 180.0 / 3.14159265358979323846; }

}  // namespace dfrc

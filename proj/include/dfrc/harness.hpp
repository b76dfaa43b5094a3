#pragma once

#include <string>
#include <vector>

#include "dfrc/estimator.hpp"
#include "dfrc/scenario.hpp"

namespace dfrc {

struct BerRow {
  std::string method;
  int num_active = 0;
  double snr_db = 0.0;
  double payload_ber = 0.0;
  double index_ber = 0.0;
  int trials = 0;
};

struct RateRow {
  bool with_private = false;
  double bits_per_second = 0.0;
};

/// Everything a run produces; emit() serializes it. Reproducible bit-exactly
/// from (scenario hash, master seed).
struct RunReport {
  std::vector<TargetEstimate> coarse;
  std::vector<TargetEstimate> refined;
  std::vector<double> coarse_spectrum;    // per receive-array DFT bin
  std::vector<double> refined_spectrum;   // per angle-grid point
  std::vector<double> refined_grid_deg;
  std::vector<BerRow> ber_rows;
  std::vector<RateRow> rates;
  bool division_warning = false;
  std::string scenario_name;
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::string scenario_echo;
};

/// Builds a seeded frame, simulates the echo cube and runs the full
/// estimation pipeline.
RunReport run_radar(const Scenario& scenario);

/// Monte Carlo BER sweep over (decoder, N_x, SNR) cells with matched seeds:
/// trial t uses the same channel, payload and noise draws in every cell.
RunReport run_ber_sweep(const Scenario& scenario, int threads = 1);

/// Peak bit rates with and without private subcarriers.
RunReport run_rates(const Scenario& scenario);

/// Writes estimates.csv, ber.csv, rates.csv, spectrum_coarse.csv,
/// spectrum_refined.csv and run.json into out_dir (created if needed).
void emit(const RunReport& report, const std::string& out_dir);

}  // namespace dfrc

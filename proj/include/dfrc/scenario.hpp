#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dfrc/config.hpp"

namespace dfrc {

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CommScenario {
  std::vector<double> snr_list = {0, 5, 10, 15, 20};
  int trials = 200;
  std::vector<int> nx_list = {2, 5, 7};
  int taps = 8;
  std::vector<std::string> decoders = {"ssr", "private"};
};

/// One experiment description: system parameters, targets, sweep settings and
/// the master seed. Parsed from a sectioned key = value file.
struct Scenario {
  std::string name;
  SystemConfig system;
  bool fixed_endpoints = false;
  std::vector<TargetSpec> targets;
  std::optional<double> radar_snr_db;  // absent: noiseless
  CommScenario comm;
  int private_period = 1;  // M; 0 disables private subcarriers
  int grid_angles = 181;
  int virtual_snapshots = 1;
  std::string solver = "omp";  // omp | fista
  double omp_residual_tol = 0.15;
  int coarse_subcarrier = 0;
  int coarse_symbol = 0;
  double coarse_rel_threshold = 0.4;
  double detect_rel_threshold = 0.5;
  std::uint64_t master_seed = 1;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& name);

/// Canonical text form used for hashing and provenance echo.
std::string canonical_dump(const Scenario& s);

/// FNV-1a hash of the canonical dump, as hex.
std::string scenario_hash(const Scenario& s);

/// The full-scale system profile (24 GHz, 1024 subcarriers, 50-element
/// receive array).
SystemConfig full_scale_system();

}  // namespace dfrc

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "dfrc/config.hpp"
#include "dfrc/frame.hpp"
#include "dfrc/radar_sim.hpp"
#include "dfrc/sparse.hpp"

namespace dfrc {

class EstimatorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Magnitude spectrum of the receive-array DFT at one (subcarrier, symbol)
/// slice. Bin l maps to sin(theta) = l / (n_fft * d_r) wrapped into the
/// principal interval; bins mapping outside |sin| <= 1 are flagged invalid
/// (possible only for sub-half-wavelength sampling.. d_r < 0.5).
struct AngleSpectrum {
  std::vector<double> magnitudes;
  int n_fft = 0;
  double rx_spacing_wl = 0.5;
  bool alias_excluded = false;  // set when some bins were invalid

  /// Wrapped sine for a bin; false when the bin is outside the visible region.
  bool bin_sine(int l, double& sine) const;
};

struct CoarsePeak {
  int bin = 0;
  double sine = 0.0;
  double theta_deg = 0.0;
  double magnitude = 0.0;
};

struct TargetEstimate {
  double theta_deg = 0.0;
  double range_m = 0.0;
  double velocity_mps = 0.0;
  int angle_bin = 0;
  int range_bin_index = 0;    // l_q
  int doppler_bin_index = 0;  // p_q, signed into (-N_p/2, N_p/2]
  bool refined = false;
};

/// Transmit-separated snapshot over the private subcarriers, stacked all
/// receive elements for each active antenna (index = pos(n)*N_r + m).
struct VirtualSnapshot {
  Eigen::VectorXcd v;
  int symbol = 0;
};

/// Angle/range dictionary over the virtual array, unit-norm columns.
struct VirtualDictionary {
  Eigen::MatrixXcd atoms;
  std::vector<double> theta_deg;   // per column
  std::vector<double> range_m;     // per column
  double column_scale = 1.0;       // norm divided out of every column
};

struct RefinedAtom {
  double theta_deg = 0.0;
  double range_m = 0.0;
  double magnitude = 0.0;  // |coefficient|
};

struct DivideResult {
  Eigen::MatrixXcd d;       // N_s x N_p
  int masked = 0;           // entries zeroed because the reference was tiny
  bool ill_conditioned = false;  // more than 20% masked
};

AngleSpectrum angle_spectrum(const RadarCube& cube, const SystemConfig& cfg,
                             int subcarrier, int symbol, int n_fft = 0);

/// Receive-array DFT peaks at one (subcarrier, symbol) slice. Returns the
/// expected_k largest local maxima when given, otherwise all local maxima at
/// or above rel_threshold times the global maximum.
std::vector<CoarsePeak> coarse_angles(const RadarCube& cube, const SystemConfig& cfg,
                                      int subcarrier, int symbol,
                                      std::optional<int> expected_k = std::nullopt,
                                      double rel_threshold = 0.4, int n_fft = 0);

/// Steered sum over the receive array at one symbol, normalized by N_r,
/// evaluated for every subcarrier. With quantize_to_bin the spatial frequency
/// is rounded to the nearest DFT bin per subcarrier (it drifts with the
/// subcarrier frequency); otherwise the exact fractional frequency is used.
Eigen::VectorXcd extract_amplitudes(const RadarCube& cube, const SystemConfig& cfg,
                                    double sine, int symbol, bool quantize_to_bin,
                                    int n_fft = 0);

/// The transmit-side reference: sum of the known transmitted symbols under
/// the steering phases of the estimated angle.
Eigen::VectorXcd reference_amplitude(const SymbolFrame& frame, const SystemConfig& cfg,
                                     double sine, int symbol);

/// Element-wise division A / A_ref with masking of near-null references
/// (threshold 1e-6 times the median reference magnitude).
DivideResult divide_out(const Eigen::MatrixXcd& amplitudes,
                        const Eigen::MatrixXcd& reference);

/// N_s-point IDFT along subcarriers then N_p-point DFT along symbols,
/// magnitude. Peaks sit at (range bin, Doppler bin).
Eigen::MatrixXd range_doppler_map(const Eigen::MatrixXcd& d);

struct RangeDopplerPeak {
  int range_bin = 0;
  int doppler_bin_raw = 0;
  int doppler_bin = 0;  // signed
  double magnitude = 0.0;
};

/// Two-dimensional circular local maxima, top-`expected` or thresholded.
std::vector<RangeDopplerPeak> detect_targets(const Eigen::MatrixXd& map,
                                             std::optional<int> expected = std::nullopt,
                                             double rel_threshold = 0.5);

/// Forms the virtual-array snapshot from the private subcarriers of one
/// OFDM symbol. Throws when the symbol carries no private map.
VirtualSnapshot build_virtual(const RadarCube& cube, const SymbolFrame& frame, int symbol);

/// Dictionary columns [D(R) o a_t(theta)] (x) a_r(theta) restricted to active
/// antennas, over a uniform angle grid (default 181 points on [-90, 90]) and
/// the estimated ranges.
VirtualDictionary build_dictionary(const SystemConfig& cfg, const AntennaPattern& pattern,
                                   const std::vector<double>& ranges_m,
                                   int grid_angles = 181);

struct RefineOptions {
  std::optional<int> expected_k;
  bool use_fista = false;
  double omp_residual_tol = 0.15;  // relative to ||v||; off-grid targets leave
                                   // a model-mismatch floor well below this
  int omp_max_atoms = 0;           // 0: automatic cap
  double fista_lambda_rel = 0.05;  // lambda = rel * ||A^H v||_inf
};

/// Sparse recovery of the virtual snapshot over the dictionary; the support
/// provides the refined (angle, range) pairs.
std::vector<RefinedAtom> refine_angles(const VirtualSnapshot& snapshot,
                                       const VirtualDictionary& dict,
                                       const RefineOptions& options = {});

/// Joint-support variant over several snapshots (one per private-carrying
/// OFDM symbol). Greedy pursuit only; coefficient magnitudes are root mean
/// square across snapshots.
std::vector<RefinedAtom> refine_angles(const std::vector<VirtualSnapshot>& snapshots,
                                       const VirtualDictionary& dict,
                                       const RefineOptions& options = {});

struct PipelineOptions {
  int coarse_subcarrier = 0;
  int coarse_symbol = 0;
  int angle_n_fft = 0;  // 0: N_r
  std::optional<int> expected_targets;
  double coarse_rel_threshold = 0.4;
  double detect_rel_threshold = 0.5;
  int grid_angles = 181;
  int virtual_symbol = 0;
  int virtual_snapshots = 1;  // private-carrying symbols recovered jointly
  bool refine = true;
  double refine_coef_floor = 0.3;  // drop support atoms below this fraction of
                                   // the strongest coefficient
  RefineOptions refine_options;
};

struct PipelineResult {
  std::vector<TargetEstimate> coarse;
  std::vector<TargetEstimate> refined;
  AngleSpectrum coarse_spectrum;
  std::vector<double> refined_spectrum;  // |coefficient| per grid angle
  std::vector<double> refined_grid_deg;
  bool division_warning = false;
};

/// The full chain: coarse angles, data removal, range-Doppler detection,
/// virtual-array angle refinement, then range-Doppler re-estimation at the
/// refined angles.
PipelineResult run_pipeline(const RadarCube& cube, const SymbolFrame& frame,
                            const SystemConfig& cfg, const PipelineOptions& options = {});

}  // namespace dfrc

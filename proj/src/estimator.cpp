#include "dfrc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dfrc/fft.hpp"

namespace dfrc {

namespace {

double wrap_sine(double u, double period) {
  // principal interval [-period/2, period/2)
  u = std::fmod(u, period);
  if (u >= period / 2.0) u -= period;
  if (u < -period / 2.0) u += period;
  return u;
}

int wrap_bin(long l, int n) {
  long r = l % n;
  if (r < 0) r += n;
  return static_cast<int>(r);
}

struct Slice {
  const RadarCube& cube;
  int subcarrier;
  int symbol;
};

/// Steered sum over m with per-element phase step `step_rad`.
cxd steered_sum(const Slice& s, double step_rad) {
  const cxd w = std::polar(1.0, step_rad);
  cxd phase{1.0, 0.0};
  cxd acc{0.0, 0.0};
  for (int m = 0; m < s.cube.num_rx(); ++m) {
    acc += s.cube.at(m, s.subcarrier, s.symbol) * phase;
    phase *= w;
  }
  return acc;
}

}  // namespace

bool AngleSpectrum::bin_sine(int l, double& sine) const {
  const double period = 1.0 / rx_spacing_wl;
  const double u = wrap_sine(static_cast<double>(l) / (n_fft * rx_spacing_wl), period);
  sine = u;
  return std::abs(u) <= 1.0;
}

AngleSpectrum angle_spectrum(const RadarCube& cube, const SystemConfig& cfg,
                             int subcarrier, int symbol, int n_fft) {
  if (subcarrier < 0 || subcarrier >= cube.num_subcarriers() || symbol < 0 ||
      symbol >= cube.num_symbols())
    throw EstimatorError("angle_spectrum: slice out of range");
  AngleSpectrum spec;
  spec.n_fft = n_fft > 0 ? n_fft : cube.num_rx();
  spec.rx_spacing_wl = cfg.rx_spacing_wl;
  spec.magnitudes.resize(spec.n_fft);
  const Slice slice{cube, subcarrier, symbol};
  for (int l = 0; l < spec.n_fft; ++l) {
    spec.magnitudes[l] =
        std::abs(steered_sum(slice, 2.0 * M_PI * l / spec.n_fft)) / cube.num_rx();
    double sine;
    if (!spec.bin_sine(l, sine)) {
      spec.magnitudes[l] = 0.0;
      spec.alias_excluded = true;
    }
  }
  return spec;
}

std::vector<CoarsePeak> coarse_angles(const RadarCube& cube, const SystemConfig& cfg,
                                      int subcarrier, int symbol,
                                      std::optional<int> expected_k,
                                      double rel_threshold, int n_fft) {
  const AngleSpectrum spec = angle_spectrum(cube, cfg, subcarrier, symbol, n_fft);
  const int n = spec.n_fft;
  const double peak_mag =
      *std::max_element(spec.magnitudes.begin(), spec.magnitudes.end());
  std::vector<CoarsePeak> maxima;
  if (peak_mag <= 0.0) return maxima;

  for (int l = 0; l < n; ++l) {
    const double v = spec.magnitudes[l];
    const double prev = spec.magnitudes[wrap_bin(l - 1, n)];
    const double next = spec.magnitudes[wrap_bin(l + 1, n)];
    if (!(v > prev && v >= next)) continue;  // one point per plateau
    double sine;
    if (!spec.bin_sine(l, sine)) continue;
    maxima.push_back({l, sine, rad_to_deg(std::asin(sine)), v});
  }
  std::sort(maxima.begin(), maxima.end(),
            [](const CoarsePeak& a, const CoarsePeak& b) {
              return a.magnitude != b.magnitude ? a.magnitude > b.magnitude
                                                : a.bin < b.bin;
            });
  if (expected_k) {
    if (static_cast<int>(maxima.size()) > *expected_k) maxima.resize(*expected_k);
  } else {
    std::erase_if(maxima, [&](const CoarsePeak& p) {
      return p.magnitude < rel_threshold * peak_mag;
    });
  }
  std::sort(maxima.begin(), maxima.end(),
            [](const CoarsePeak& a, const CoarsePeak& b) { return a.bin < b.bin; });
  return maxima;
}

Eigen::VectorXcd extract_amplitudes(const RadarCube& cube, const SystemConfig& cfg,
                                    double sine, int symbol, bool quantize_to_bin,
                                    int n_fft) {
  const int ns = cube.num_subcarriers();
  const int nfft = n_fft > 0 ? n_fft : cube.num_rx();
  Eigen::VectorXcd out(ns);
  for (int i = 0; i < ns; ++i) {
    const double freq_ratio = 1.0 + i * cfg.subcarrier_spacing_hz / cfg.carrier_hz;
    double cycles = cfg.rx_spacing_wl * sine * freq_ratio;  // per element
    if (quantize_to_bin)
      cycles = static_cast<double>(std::lround(cycles * nfft)) / nfft;
    out[i] = steered_sum({cube, i, symbol}, 2.0 * M_PI * cycles) /
             static_cast<double>(cube.num_rx());
  }
  return out;
}

Eigen::VectorXcd reference_amplitude(const SymbolFrame& frame, const SystemConfig& cfg,
                                     double sine, int symbol) {
  const int ns = cfg.num_subcarriers;
  Eigen::VectorXcd out(ns);
  const auto& active = frame.pattern(symbol).indices;
  for (int i = 0; i < ns; ++i) {
    const double freq_ratio = 1.0 + i * cfg.subcarrier_spacing_hz / cfg.carrier_hz;
    const double step = -2.0 * M_PI * cfg.tx_spacing_wl * sine * freq_ratio;
    cxd acc{0.0, 0.0};
    for (int n : active) acc += frame.at(n, i, symbol) * std::polar(1.0, step * n);
    out[i] = acc;
  }
  return out;
}

DivideResult divide_out(const Eigen::MatrixXcd& amplitudes,
                        const Eigen::MatrixXcd& reference) {
  if (amplitudes.rows() != reference.rows() || amplitudes.cols() != reference.cols())
    throw EstimatorError("divide_out: shape mismatch");
  std::vector<double> mags(reference.size());
  for (Eigen::Index k = 0; k < reference.size(); ++k) mags[k] = std::abs(reference(k));
  std::vector<double> sorted = mags;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double eps = 1e-6 * sorted[sorted.size() / 2];

  DivideResult res;
  res.d.resize(amplitudes.rows(), amplitudes.cols());
  for (Eigen::Index k = 0; k < amplitudes.size(); ++k) {
    if (mags[k] <= eps) {
      res.d(k) = cxd{0.0, 0.0};
      ++res.masked;
    } else {
      res.d(k) = amplitudes(k) / reference(k);
    }
  }
  res.ill_conditioned = res.masked > amplitudes.size() / 5;
  return res;
}

Eigen::MatrixXd range_doppler_map(const Eigen::MatrixXcd& d) {
  const int ns = static_cast<int>(d.rows());
  const int np = static_cast<int>(d.cols());
  Eigen::MatrixXcd work(ns, np);
  std::vector<cxd> buf;
  buf.resize(ns);
  for (int mu = 0; mu < np; ++mu) {
    for (int i = 0; i < ns; ++i) buf[i] = d(i, mu);
    fft_backward(buf);
    for (int l = 0; l < ns; ++l) work(l, mu) = buf[l] / static_cast<double>(ns);
  }
  buf.resize(np);
  Eigen::MatrixXd map(ns, np);
  for (int l = 0; l < ns; ++l) {
    for (int mu = 0; mu < np; ++mu) buf[mu] = work(l, mu);
    fft_forward(buf);
    for (int p = 0; p < np; ++p) map(l, p) = std::abs(buf[p]);
  }
  return map;
}

std::vector<RangeDopplerPeak> detect_targets(const Eigen::MatrixXd& map,
                                             std::optional<int> expected,
                                             double rel_threshold) {
  const int ns = static_cast<int>(map.rows());
  const int np = static_cast<int>(map.cols());
  const double peak_mag = map.maxCoeff();
  std::vector<RangeDopplerPeak> out;
  if (peak_mag <= 0.0) return out;

  for (int l = 0; l < ns; ++l) {
    for (int p = 0; p < np; ++p) {
      const double v = map(l, p);
      // circular 4-neighborhood; strict on the predecessor side so plateaus
      // yield a single detection
      if (ns > 1) {
        if (!(v > map(wrap_bin(l - 1, ns), p) && v >= map(wrap_bin(l + 1, ns), p)))
          continue;
      }
      if (np > 1) {
        if (!(v > map(l, wrap_bin(p - 1, np)) && v >= map(l, wrap_bin(p + 1, np))))
          continue;
      }
      RangeDopplerPeak det;
      det.range_bin = l;
      det.doppler_bin_raw = p;
      det.doppler_bin = p > np / 2 ? p - np : p;
      det.magnitude = v;
      out.push_back(det);
    }
  }
  std::sort(out.begin(), out.end(), [](const RangeDopplerPeak& a, const RangeDopplerPeak& b) {
    if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
    return std::make_pair(a.range_bin, a.doppler_bin_raw) <
           std::make_pair(b.range_bin, b.doppler_bin_raw);
  });
  if (expected) {
    if (static_cast<int>(out.size()) > *expected) out.resize(*expected);
  } else {
    std::erase_if(out, [&](const RangeDopplerPeak& d) {
      return d.magnitude < rel_threshold * peak_mag;
    });
  }
  return out;
}

VirtualSnapshot build_virtual(const RadarCube& cube, const SymbolFrame& frame, int symbol) {
  const auto& pm = frame.private_map(symbol);
  if (!pm) throw EstimatorError("build_virtual: symbol carries no private map");
  const int nr = cube.num_rx();
  VirtualSnapshot snap;
  snap.symbol = symbol;
  snap.v.resize(static_cast<Eigen::Index>(pm->size()) * nr);
  for (std::size_t pos = 0; pos < pm->size(); ++pos) {
    const auto& pair = (*pm)[pos];
    const cxd tx = frame.at(pair.antenna, pair.subcarrier, symbol);
    if (tx == cxd{0.0, 0.0})
      throw EstimatorError("build_virtual: empty private slot");
    for (int m = 0; m < nr; ++m)
      snap.v[static_cast<Eigen::Index>(pos) * nr + m] =
          cube.at(m, pair.subcarrier, symbol) / tx;
  }
  return snap;
}

VirtualDictionary build_dictionary(const SystemConfig& cfg, const AntennaPattern& pattern,
                                   const std::vector<double>& ranges_m,
                                   int grid_angles) {
  if (ranges_m.empty()) throw EstimatorError("build_dictionary: no range estimates");
  const auto pairs = assign_private(pattern, cfg);
  const int nr = cfg.num_rx_radar;
  const int nx = static_cast<int>(pairs.size());
  const int rows = nx * nr;
  const int cols = grid_angles * static_cast<int>(ranges_m.size());

  VirtualDictionary dict;
  dict.atoms.resize(rows, cols);
  dict.theta_deg.resize(cols);
  dict.range_m.resize(cols);
  dict.column_scale = std::sqrt(static_cast<double>(rows));

  int col = 0;
  for (std::size_t j = 0; j < ranges_m.size(); ++j) {
    for (int a = 0; a < grid_angles; ++a) {
      const double theta =
          grid_angles == 1 ? 0.0 : -90.0 + 180.0 * a / (grid_angles - 1);
      const double sine = std::sin(deg_to_rad(theta));
      for (int pos = 0; pos < nx; ++pos) {
        const double tx_phase = -2.0 * M_PI * pairs[pos].antenna * cfg.tx_spacing_wl * sine;
        const double rng_phase = -2.0 * M_PI * pairs[pos].subcarrier *
                                 cfg.subcarrier_spacing_hz * 2.0 * ranges_m[j] /
                                 cfg.wave_speed;
        const cxd tx = std::polar(1.0 / dict.column_scale, tx_phase + rng_phase);
        for (int m = 0; m < nr; ++m)
          dict.atoms(static_cast<Eigen::Index>(pos) * nr + m, col) =
              tx * std::polar(1.0, -2.0 * M_PI * m * cfg.rx_spacing_wl * sine);
      }
      dict.theta_deg[col] = theta;
      dict.range_m[col] = ranges_m[j];
      ++col;
    }
  }
  return dict;
}

std::vector<RefinedAtom> refine_angles(const VirtualSnapshot& snapshot,
                                       const VirtualDictionary& dict,
                                       const RefineOptions& options) {
  return refine_angles(std::vector<VirtualSnapshot>{snapshot}, dict, options);
}

std::vector<RefinedAtom> refine_angles(const std::vector<VirtualSnapshot>& snapshots,
                                       const VirtualDictionary& dict,
                                       const RefineOptions& options) {
  if (snapshots.empty()) throw EstimatorError("refine_angles: no snapshots");
  SparseProblem problem;
  problem.dictionaries.push_back(dict.atoms);
  for (const auto& s : snapshots) problem.measurements.push_back(s.v);

  SparseSolution sol;
  if (options.use_fista) {
    if (snapshots.size() > 1)
      throw EstimatorError("refine_angles: basis pursuit takes a single snapshot");
    const double lam_max = (dict.atoms.adjoint() * snapshots[0].v).cwiseAbs().maxCoeff();
    problem.lambda = std::max(options.fista_lambda_rel * lam_max, 1e-12);
    sol = fista_bpdn(problem);
    if (!sol.converged)
      throw EstimatorError("refine_angles: basis-pursuit solver did not converge");
  } else {
    const int n_ranges = static_cast<int>(
        std::set<double>(dict.range_m.begin(), dict.range_m.end()).size());
    int cap = options.omp_max_atoms > 0 ? options.omp_max_atoms
                                        : std::max(8, 3 * n_ranges);
    if (options.expected_k) cap = *options.expected_k;
    problem.sparsity = cap;
    problem.residual_tol = options.expected_k ? 1e-12 : options.omp_residual_tol;
    sol = group_omp(problem);
  }

  std::vector<RefinedAtom> atoms;
  for (std::size_t j = 0; j < sol.support.size(); ++j) {
    const int col = sol.support[j];
    atoms.push_back({dict.theta_deg[col], dict.range_m[col],
                     std::sqrt(sol.coefficients.row(j).squaredNorm() /
                               sol.coefficients.cols())});
  }
  std::sort(atoms.begin(), atoms.end(), [](const RefinedAtom& a, const RefinedAtom& b) {
    return a.magnitude > b.magnitude;
  });
  return atoms;
}

namespace {

/// Data removal and range-Doppler detection at one steering angle.
std::vector<RangeDopplerPeak> detect_at_angle(const RadarCube& cube,
                                              const SymbolFrame& frame,
                                              const SystemConfig& cfg, double sine,
                                              bool quantize, const PipelineOptions& opt,
                                              bool* warn) {
  const int ns = cfg.num_subcarriers;
  const int np = cfg.num_symbols;
  Eigen::MatrixXcd amp(ns, np), ref(ns, np);
  for (int mu = 0; mu < np; ++mu) {
    amp.col(mu) = extract_amplitudes(cube, cfg, sine, mu, quantize, opt.angle_n_fft);
    ref.col(mu) = reference_amplitude(frame, cfg, sine, mu);
  }
  DivideResult div = divide_out(amp, ref);
  if (div.ill_conditioned && warn) *warn = true;
  const Eigen::MatrixXd map = range_doppler_map(div.d);
  return detect_targets(map, std::nullopt, opt.detect_rel_threshold);
}

TargetEstimate make_estimate(double theta_deg, int angle_bin,
                             const RangeDopplerPeak& det, const DerivedParams& dp,
                             bool refined) {
  TargetEstimate e;
  e.theta_deg = theta_deg;
  e.angle_bin = angle_bin;
  e.range_bin_index = det.range_bin;
  e.doppler_bin_index = det.doppler_bin;
  e.range_m = det.range_bin * dp.range_bin_m;
  e.velocity_mps = det.doppler_bin * dp.velocity_bin_mps;
  e.refined = refined;
  return e;
}

void sort_estimates(std::vector<TargetEstimate>& v) {
  std::sort(v.begin(), v.end(), [](const TargetEstimate& a, const TargetEstimate& b) {
    return std::make_tuple(a.theta_deg, a.range_m, a.velocity_mps) <
           std::make_tuple(b.theta_deg, b.range_m, b.velocity_mps);
  });
}

}  // namespace

PipelineResult run_pipeline(const RadarCube& cube, const SymbolFrame& frame,
                            const SystemConfig& cfg, const PipelineOptions& options) {
  const DerivedParams dp = derive(cfg);
  PipelineResult result;
  result.coarse_spectrum = angle_spectrum(cube, cfg, options.coarse_subcarrier,
                                          options.coarse_symbol, options.angle_n_fft);
  const auto peaks =
      coarse_angles(cube, cfg, options.coarse_subcarrier, options.coarse_symbol,
                    options.expected_targets, options.coarse_rel_threshold,
                    options.angle_n_fft);
  if (peaks.empty()) return result;

  for (const auto& peak : peaks) {
    const auto dets = detect_at_angle(cube, frame, cfg, peak.sine, true, options,
                                      &result.division_warning);
    for (const auto& det : dets)
      result.coarse.push_back(make_estimate(peak.theta_deg, peak.bin, det, dp, false));
  }
  sort_estimates(result.coarse);
  if (!options.refine || result.coarse.empty()) return result;

  // Unique range estimates feed the virtual-array dictionary.
  std::set<int> range_bins;
  for (const auto& e : result.coarse) range_bins.insert(e.range_bin_index);
  std::vector<double> ranges;
  for (int l : range_bins) ranges.push_back(l * dp.range_bin_m);

  int mu_v = options.virtual_symbol;
  if (!frame.has_private(mu_v)) {
    mu_v = -1;
    for (int mu = 0; mu < cfg.num_symbols; ++mu)
      if (frame.has_private(mu)) {
        mu_v = mu;
        break;
      }
  }
  if (mu_v < 0)
    throw EstimatorError("run_pipeline: refinement requires a private-subcarrier symbol");

  // Jointly recovered snapshots must share the antenna pattern, otherwise
  // their dictionaries differ; extra symbols with other patterns are skipped.
  std::vector<VirtualSnapshot> snaps;
  for (int mu = mu_v; mu < cfg.num_symbols &&
                      static_cast<int>(snaps.size()) < std::max(1, options.virtual_snapshots);
       ++mu)
    if (frame.has_private(mu) &&
        frame.pattern(mu).indices == frame.pattern(mu_v).indices)
      snaps.push_back(build_virtual(cube, frame, mu));

  const VirtualDictionary dict =
      build_dictionary(cfg, frame.pattern(mu_v), ranges, options.grid_angles);
  const auto atoms = refine_angles(snaps, dict, options.refine_options);

  result.refined_grid_deg.resize(options.grid_angles);
  result.refined_spectrum.assign(options.grid_angles, 0.0);
  for (int a = 0; a < options.grid_angles; ++a)
    result.refined_grid_deg[a] =
        options.grid_angles == 1 ? 0.0 : -90.0 + 180.0 * a / (options.grid_angles - 1);
  for (const auto& atom : atoms) {
    const auto it = std::lower_bound(result.refined_grid_deg.begin(),
                                     result.refined_grid_deg.end(), atom.theta_deg - 1e-9);
    const int idx = static_cast<int>(it - result.refined_grid_deg.begin());
    if (idx < options.grid_angles)
      result.refined_spectrum[idx] = std::max(result.refined_spectrum[idx], atom.magnitude);
  }

  // A target straddling the angle grid splits its energy over neighboring
  // atoms. Strongest-first absorption keeps one representative per cluster
  // while leaving targets two or more grid steps apart distinct; atoms far
  // below the strongest coefficient are residual mop-up, not targets.
  const double grid_step =
      options.grid_angles > 1 ? 180.0 / (options.grid_angles - 1) : 1.0;
  const double floor_mag =
      atoms.empty() ? 0.0 : options.refine_coef_floor * atoms.front().magnitude;
  std::set<double> unique_thetas;
  for (const auto& atom : atoms) {  // already sorted by magnitude, descending
    if (atom.magnitude < floor_mag) break;
    bool absorbed = false;
    for (double rep : unique_thetas)
      absorbed = absorbed || std::abs(atom.theta_deg - rep) <= 1.5 * grid_step;
    if (!absorbed) unique_thetas.insert(atom.theta_deg);
  }

  for (double theta : unique_thetas) {
    const double sine = std::sin(deg_to_rad(theta));
    const int nfft = options.angle_n_fft > 0 ? options.angle_n_fft : cfg.num_rx_radar;
    const int bin = wrap_bin(std::lround(sine * nfft * cfg.rx_spacing_wl), nfft);
    const auto dets = detect_at_angle(cube, frame, cfg, sine, false, options,
                                      &result.division_warning);
    for (const auto& det : dets)
      result.refined.push_back(make_estimate(theta, bin, det, dp, true));
  }
  sort_estimates(result.refined);
  return result;
}

}  // namespace dfrc

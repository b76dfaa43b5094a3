#include "dfrc/radar_sim.hpp"

#include <cmath>
#include <limits>

#include "dfrc/fft.hpp"
#include "dfrc/rng.hpp"

namespace dfrc {

RadarCube::RadarCube(int num_rx, int num_subcarriers, int num_symbols)
    : num_rx_(num_rx), num_subcarriers_(num_subcarriers), num_symbols_(num_symbols) {
  data_.assign(static_cast<std::size_t>(num_rx) * num_subcarriers * num_symbols,
               cxd{0.0, 0.0});
}

cxd& RadarCube::at(int m, int subcarrier, int symbol) {
  return data_[(static_cast<std::size_t>(symbol) * num_subcarriers_ + subcarrier) * num_rx_ +
               m];
}

const cxd& RadarCube::at(int m, int subcarrier, int symbol) const {
  return data_[(static_cast<std::size_t>(symbol) * num_subcarriers_ + subcarrier) * num_rx_ +
               m];
}

RadarCube simulate_rx(const SymbolFrame& frame, const std::vector<TargetSpec>& targets,
                      const SystemConfig& cfg) {
  if (targets.empty()) throw RadarSimError("target list is empty");
  if (frame.config().num_subcarriers != cfg.num_subcarriers ||
      frame.config().num_symbols != cfg.num_symbols || frame.config().num_tx != cfg.num_tx)
    throw RadarSimError("frame dimensions do not match the configuration");
  for (const auto& t : targets) validate_target(t, cfg);

  const int ns = cfg.num_subcarriers;
  const int np = cfg.num_symbols;
  const int nr = cfg.num_rx_radar;
  RadarCube cube(nr, ns, np);

  std::vector<cxd> tx_steer(static_cast<std::size_t>(ns) * cfg.num_tx);
  std::vector<cxd> rx_steer(static_cast<std::size_t>(ns) * nr);
  std::vector<cxd> range_phase(ns);
  std::vector<cxd> doppler_phase(np);

  for (const auto& target : targets) {
    const double sine = std::sin(deg_to_rad(target.theta_deg));
    const double fd = doppler_hz(cfg, target.velocity_mps);
    for (int i = 0; i < ns; ++i) {
      // (f_c + i*delta)/c times a spacing in wavelengths of lambda0
      const double freq_ratio = 1.0 + i * cfg.subcarrier_spacing_hz / cfg.carrier_hz;
      const double tx_step = -2.0 * M_PI * cfg.tx_spacing_wl * sine * freq_ratio;
      const double rx_step = -2.0 * M_PI * cfg.rx_spacing_wl * sine * freq_ratio;
      for (int n = 0; n < cfg.num_tx; ++n)
        tx_steer[static_cast<std::size_t>(i) * cfg.num_tx + n] = std::polar(1.0, tx_step * n);
      for (int m = 0; m < nr; ++m)
        rx_steer[static_cast<std::size_t>(i) * nr + m] = std::polar(1.0, rx_step * m);
      range_phase[i] = std::polar(1.0, -2.0 * M_PI * i * cfg.subcarrier_spacing_hz * 2.0 *
                                           target.range_m / cfg.wave_speed);
    }
    for (int mu = 0; mu < np; ++mu)
      doppler_phase[mu] = std::polar(1.0, 2.0 * M_PI * mu * cfg.symbol_duration_s * fd);

    for (int mu = 0; mu < np; ++mu) {
      const auto& active = frame.pattern(mu).indices;
      for (int i = 0; i < ns; ++i) {
        cxd aprime{0.0, 0.0};
        const cxd* w = &tx_steer[static_cast<std::size_t>(i) * cfg.num_tx];
        for (int n : active) aprime += frame.at(n, i, mu) * w[n];
        const cxd col = aprime * range_phase[i] * doppler_phase[mu];
        cxd* dst = &cube.at(0, i, mu);
        const cxd* rx = &rx_steer[static_cast<std::size_t>(i) * nr];
        for (int m = 0; m < nr; ++m) dst[m] += col * rx[m];
      }
    }
  }
  return cube;
}

RadarCube add_noise(const RadarCube& cube, double snr_db, std::uint64_t seed) {
  RadarCube out = cube;
  if (std::isinf(snr_db)) return out;
  if (std::isnan(snr_db)) throw RadarSimError("snr_db must be finite or +inf");

  double power = 0.0;
  for (const cxd& v : cube.data()) power += std::norm(v);
  power /= static_cast<double>(cube.data().size());
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));

  Rng rng(seed);
  for (cxd& v : out.data()) v += sigma * rng.complex_gaussian();
  out.snr_db = snr_db;
  return out;
}

RadarCube simulate_rx_timedomain(const SymbolFrame& frame,
                                 const std::vector<TargetSpec>& targets,
                                 const SystemConfig& cfg) {
  if (targets.empty()) throw RadarSimError("target list is empty");
  const int ns = cfg.num_subcarriers;
  const int np = cfg.num_symbols;
  const int nr = cfg.num_rx_radar;
  const double delta = cfg.subcarrier_spacing_hz;
  const double lambda0 = cfg.wave_speed / cfg.carrier_hz;
  const double useful = 1.0 / delta;

  // Largest geometric path extension across the arrays, in meters.
  const double aperture_m =
      ((cfg.num_tx - 1) * cfg.tx_spacing_wl + (nr - 1) * cfg.rx_spacing_wl) * lambda0;
  for (const auto& t : targets) {
    const double sine = std::sin(deg_to_rad(t.theta_deg));
    const double tau_max = (2.0 * t.range_m + std::max(0.0, aperture_m * sine)) /
                           cfg.wave_speed;
    const double tau_min = (2.0 * t.range_m + std::min(0.0, aperture_m * sine)) /
                           cfg.wave_speed;
    if (tau_max > cfg.cyclic_prefix_s)
      throw RadarSimError("roundtrip delay exceeds the cyclic prefix");
    if (tau_min < 0.0) throw RadarSimError("negative roundtrip delay");
  }

  RadarCube cube(nr, ns, np);
  std::vector<cxd> spectrum(ns), accum(ns);

  for (int m = 0; m < nr; ++m) {
    for (int mu = 0; mu < np; ++mu) {
      const auto& active = frame.pattern(mu).indices;
      std::fill(accum.begin(), accum.end(), cxd{0.0, 0.0});
      for (const auto& target : targets) {
        const double sine = std::sin(deg_to_rad(target.theta_deg));
        const double fd = doppler_hz(cfg, target.velocity_mps);
        std::fill(spectrum.begin(), spectrum.end(), cxd{0.0, 0.0});
        for (int n : active) {
          const double geo_m = (n * cfg.tx_spacing_wl + m * cfg.rx_spacing_wl) * lambda0 * sine;
          const double tau = (2.0 * target.range_m + geo_m) / cfg.wave_speed;
          // Range carrier phase is referenced out; the geometry keeps its
          // carrier phase, which is what encodes the angle.
          const cxd base = std::polar(1.0, -2.0 * M_PI * cfg.carrier_hz * geo_m /
                                               cfg.wave_speed);
          const cxd step = std::polar(1.0, -2.0 * M_PI * delta * tau);
          cxd w = base;
          for (int i = 0; i < ns; ++i) {
            spectrum[i] += frame.at(n, i, mu) * w;
            w *= step;
          }
        }
        // Useful-window samples are the inverse DFT of the delayed spectrum.
        fft_backward(spectrum);
        // Doppler referenced to the center of the first useful window.
        const double t0 = mu * cfg.symbol_duration_s - useful / 2.0;
        cxd dopp = std::polar(1.0, 2.0 * M_PI * fd * t0);
        const cxd dopp_step = std::polar(1.0, 2.0 * M_PI * fd / (ns * delta));
        for (int i = 0; i < ns; ++i) {
          accum[i] += spectrum[i] * dopp;
          dopp *= dopp_step;
        }
      }
      fft_forward(accum);
      for (int i = 0; i < ns; ++i) cube.at(m, i, mu) = accum[i] / static_cast<double>(ns);
    }
  }
  return cube;
}

void dump_cube_csv(const RadarCube& cube, std::ostream& os) {
  os << "m,i,mu,re,im\n";
  for (int mu = 0; mu < cube.num_symbols(); ++mu)
    for (int i = 0; i < cube.num_subcarriers(); ++i)
      for (int m = 0; m < cube.num_rx(); ++m) {
        const cxd v = cube.at(m, i, mu);
        os << m << ',' << i << ',' << mu << ',' << v.real() << ',' << v.imag() << '\n';
      }
}

}  // namespace dfrc

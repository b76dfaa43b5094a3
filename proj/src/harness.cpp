#include "dfrc/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dfrc/comm.hpp"
#include "dfrc/radar_sim.hpp"
#include "dfrc/rng.hpp"

namespace dfrc {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

RunReport report_stub(const Scenario& sc) {
  RunReport rep;
  rep.scenario_name = sc.name;
  rep.config_hash = scenario_hash(sc);
  rep.master_seed = sc.master_seed;
  rep.scenario_echo = canonical_dump(sc);
  return rep;
}

SymbolFrame seeded_frame(const SystemConfig& cfg, bool fixed_endpoints, int private_period,
                         std::uint64_t master, std::string_view tag, std::uint64_t counter) {
  Rng pay(derive_seed(master, std::string(tag) + "-payload", counter));
  Rng idx(derive_seed(master, std::string(tag) + "-index", counter));
  const BitVec payload = pay.bits(payload_bit_count(cfg, private_period));
  const BitVec index = idx.bits(index_bit_count(cfg, fixed_endpoints));
  return build_frame(payload, index, cfg, fixed_endpoints, private_period);
}

struct CellStat {
  long payload_errors = 0;
  long payload_bits = 0;
  long index_errors = 0;
  long index_bits = 0;
};

}  // namespace

RunReport run_radar(const Scenario& scenario) {
  const SystemConfig& cfg = validate_config(scenario.system);
  if (scenario.targets.empty())
    throw ScenarioError("radar run needs at least one target");
  RunReport rep = report_stub(scenario);

  const SymbolFrame frame = seeded_frame(cfg, scenario.fixed_endpoints,
                                         scenario.private_period, scenario.master_seed,
                                         "radar", 0);
  RadarCube cube = simulate_rx(frame, scenario.targets, cfg);
  if (scenario.radar_snr_db)
    cube = add_noise(cube, *scenario.radar_snr_db,
                     derive_seed(scenario.master_seed, "radar-noise", 0));

  PipelineOptions opt;
  opt.coarse_subcarrier = scenario.coarse_subcarrier;
  opt.coarse_symbol = scenario.coarse_symbol;
  opt.coarse_rel_threshold = scenario.coarse_rel_threshold;
  opt.detect_rel_threshold = scenario.detect_rel_threshold;
  opt.grid_angles = scenario.grid_angles;
  opt.virtual_snapshots = scenario.virtual_snapshots;
  opt.refine = scenario.private_period > 0;
  opt.refine_options.use_fista = scenario.solver == "fista";
  opt.refine_options.omp_residual_tol = scenario.omp_residual_tol;

  const PipelineResult res = run_pipeline(cube, frame, cfg, opt);
  rep.coarse = res.coarse;
  rep.refined = res.refined;
  rep.coarse_spectrum = res.coarse_spectrum.magnitudes;
  rep.refined_spectrum = res.refined_spectrum;
  rep.refined_grid_deg = res.refined_grid_deg;
  rep.division_warning = res.division_warning;
  return rep;
}

RunReport run_ber_sweep(const Scenario& scenario, int threads) {
  if (scenario.comm.trials < 1) throw ScenarioError("trials must be >= 1");
  if (scenario.comm.snr_list.empty()) throw ScenarioError("snr_list must not be empty");
  RunReport rep = report_stub(scenario);

  const int trials = scenario.comm.trials;
  const auto& decoders = scenario.comm.decoders;
  const auto& snrs = scenario.comm.snr_list;
  const auto& nxs = scenario.comm.nx_list;
  const int mu = 0;  // decoded OFDM symbol; carries the private map

  // stats[decoder][nx][snr][trial]
  const std::size_t cells = decoders.size() * nxs.size() * snrs.size();
  std::vector<CellStat> stats(cells * trials);
  const auto cell_of = [&](std::size_t d, std::size_t x, std::size_t s) {
    return (d * nxs.size() + x) * snrs.size() + s;
  };

  const auto run_trial = [&](int t) {
    for (std::size_t x = 0; x < nxs.size(); ++x) {
      SystemConfig cfg = scenario.system;
      cfg.num_active = nxs[x];
      validate_config(cfg);
      const SymbolFrame frame =
          seeded_frame(cfg, scenario.fixed_endpoints, scenario.private_period,
                       scenario.master_seed, "ber", static_cast<std::uint64_t>(t));
      const CommChannel channel =
          gen_channel(cfg, scenario.comm.taps,
                      derive_seed(scenario.master_seed, "channel", t));

      // Truth for symbol mu: the leading slice of the frame's bit streams.
      const int bps = bits_per_qam_symbol(cfg.qam_order);
      const bool hp = scenario.private_period > 0 && mu % scenario.private_period == 0;
      const std::size_t pay_len =
          (static_cast<std::size_t>(cfg.num_active) * cfg.num_subcarriers -
           (hp ? static_cast<std::size_t>(cfg.num_active) * (cfg.num_active - 1) : 0)) *
          bps;
      const std::size_t idx_len =
          bits_per_pattern(cfg.num_tx, cfg.num_active, scenario.fixed_endpoints);
      const BitVec pay_true(frame.payload_bits.begin(),
                            frame.payload_bits.begin() + pay_len);
      const BitVec idx_true(frame.index_bits.begin(),
                            frame.index_bits.begin() + idx_len);

      for (std::size_t s = 0; s < snrs.size(); ++s) {
        const CommObservation obs =
            transmit(frame, channel, mu, snrs[s],
                     derive_seed(scenario.master_seed, "noise", t));
        for (std::size_t d = 0; d < decoders.size(); ++d) {
          DecodedFrame dec;
          if (decoders[d] == "ssr")
            dec = decode_ssr(obs, channel, cfg, scenario.fixed_endpoints,
                             scenario.private_period);
          else if (decoders[d] == "private")
            dec = decode_private(obs, channel, cfg, scenario.fixed_endpoints,
                                 scenario.private_period);
          else
            throw ScenarioError("unknown decoder: " + decoders[d]);

          CellStat& st = stats[cell_of(d, x, s) * trials + t];
          st.payload_bits = static_cast<long>(pay_true.size());
          st.index_bits = static_cast<long>(idx_true.size());
          for (std::size_t k = 0; k < pay_true.size(); ++k)
            st.payload_errors += pay_true[k] != dec.payload_bits_hat.at(k);
          for (std::size_t k = 0; k < idx_true.size(); ++k)
            st.index_errors += idx_true[k] != dec.index_bits_hat.at(k);
        }
      }
    }
  };

  const int workers = std::max(1, threads);
  if (workers == 1) {
    for (int t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::future<void>> futs;
    for (int w = 0; w < workers; ++w)
      futs.push_back(std::async(std::launch::async, [&] {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) run_trial(t);
      }));
    for (auto& f : futs) f.get();
  }

  for (std::size_t d = 0; d < decoders.size(); ++d)
    for (std::size_t x = 0; x < nxs.size(); ++x)
      for (std::size_t s = 0; s < snrs.size(); ++s) {
        CellStat sum;
        for (int t = 0; t < trials; ++t) {
          const CellStat& st = stats[cell_of(d, x, s) * trials + t];
          sum.payload_errors += st.payload_errors;
          sum.payload_bits += st.payload_bits;
          sum.index_errors += st.index_errors;
          sum.index_bits += st.index_bits;
        }
        BerRow row;
        row.method = decoders[d];
        row.num_active = nxs[x];
        row.snr_db = snrs[s];
        row.trials = trials;
        row.payload_ber =
            sum.payload_bits ? double(sum.payload_errors) / sum.payload_bits : 0.0;
        row.index_ber = sum.index_bits ? double(sum.index_errors) / sum.index_bits : 0.0;
        rep.ber_rows.push_back(row);
      }
  return rep;
}

RunReport run_rates(const Scenario& scenario) {
  RunReport rep = report_stub(scenario);
  rep.rates.push_back({false, bit_rate(scenario.system, false)});
  rep.rates.push_back({true, bit_rate(scenario.system, true)});
  return rep;
}

void emit(const RunReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const auto open = [&](const std::string& file) {
    std::ofstream os(out_dir + "/" + file, std::ios::binary);
    if (!os) throw std::runtime_error("emit: cannot write " + out_dir + "/" + file);
    return os;
  };

  {
    auto os = open("estimates.csv");
    os << "theta_deg,R_m,v_mps,angle_bin,l_q,p_q,refined\n";
    const auto row = [&](const TargetEstimate& e) {
      os << fmt(e.theta_deg) << ',' << fmt(e.range_m) << ',' << fmt(e.velocity_mps) << ','
         << e.angle_bin << ',' << e.range_bin_index << ',' << e.doppler_bin_index << ','
         << (e.refined ? 1 : 0) << '\n';
    };
    for (const auto& e : report.coarse) row(e);
    for (const auto& e : report.refined) row(e);
  }
  {
    auto os = open("ber.csv");
    os << "method,N_x,snr_db,payload_ber,index_ber,trials\n";
    for (const auto& r : report.ber_rows)
      os << r.method << ',' << r.num_active << ',' << fmt(r.snr_db) << ','
         << fmt(r.payload_ber) << ',' << fmt(r.index_ber) << ',' << r.trials << '\n';
  }
  {
    auto os = open("rates.csv");
    os << "with_private,bits_per_second\n";
    for (const auto& r : report.rates)
      os << (r.with_private ? 1 : 0) << ',' << fmt(r.bits_per_second) << '\n';
  }
  {
    auto os = open("spectrum_coarse.csv");
    os << "bin,magnitude\n";
    for (std::size_t l = 0; l < report.coarse_spectrum.size(); ++l)
      os << l << ',' << fmt(report.coarse_spectrum[l]) << '\n';
  }
  {
    auto os = open("spectrum_refined.csv");
    os << "bin,magnitude\n";
    for (std::size_t a = 0; a < report.refined_spectrum.size(); ++a)
      os << a << ',' << fmt(report.refined_spectrum[a]) << '\n';
  }
  {
    nlohmann::json j;
    j["scenario"] = report.scenario_name;
    j["config_hash"] = report.config_hash;
    j["master_seed"] = report.master_seed;
    j["version"] = "1.0.0";
    j["division_warning"] = report.division_warning;
    j["config_echo"] = report.scenario_echo;
    auto os = open("run.json");
    os << j.dump(2) << '\n';
  }
}

}  // namespace dfrc

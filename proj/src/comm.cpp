#include "dfrc/comm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "dfrc/qam.hpp"
#include "dfrc/rng.hpp"
#include "dfrc/sparse.hpp"

namespace dfrc {

namespace {

bool symbol_has_private(int symbol, int private_period) {
  return private_period > 0 && symbol % private_period == 0;
}

/// Receiver-side mirror of the transmit slot order: subcarrier-major, active
/// antennas ascending, private slots carrying only their owner.
BitVec demap_payload(const Eigen::MatrixXcd& symbols_hat, const AntennaPattern& pattern,
                     const SystemConfig& cfg, bool has_private) {
  const int nx = static_cast<int>(pattern.indices.size());
  BitVec bits;
  std::vector<cxd> one(1);
  for (int i = 0; i < cfg.num_subcarriers; ++i) {
    for (int r = 0; r < nx; ++r) {
      if (has_private && i < nx && r != i) continue;  // blocked private slot
      one[0] = symbols_hat(r, i);
      const BitVec b = demap_qam(one, cfg.qam_order);
      bits.insert(bits.end(), b.begin(), b.end());
    }
  }
  return bits;
}

BitVec index_bits_of(const AntennaPattern& pattern, const SystemConfig& cfg,
                     bool fixed_endpoints, bool* failed) {
  const int b = bits_per_pattern(cfg.num_tx, cfg.num_active, fixed_endpoints);
  BitVec bits(b, 0);
  try {
    AntennaPattern p = pattern;
    p.fixed_endpoints = fixed_endpoints;
    const std::uint64_t word = decode_pattern(p, cfg.num_tx, cfg.num_active);
    for (int k = 0; k < b; ++k)
      bits[k] = static_cast<std::uint8_t>((word >> (b - 1 - k)) & 1u);
  } catch (const GsmError&) {
    *failed = true;  // unencodable support; bits stay zero
  }
  return bits;
}

}  // namespace

CommChannel gen_channel(const SystemConfig& cfg, int taps, std::uint64_t seed) {
  if (taps < 1 || taps > cfg.num_subcarriers)
    throw CommError("tap count must satisfy 1 <= L <= N_s");
  Rng rng(seed);
  const int nc = cfg.num_rx_comm;
  const int nt = cfg.num_tx;
  const int ns = cfg.num_subcarriers;
  const double scale = 1.0 / std::sqrt(static_cast<double>(taps));

  std::vector<Eigen::MatrixXcd> impulse(taps, Eigen::MatrixXcd(nc, nt));
  for (int r = 0; r < nc; ++r)
    for (int t = 0; t < nt; ++t)
      for (int l = 0; l < taps; ++l) impulse[l](r, t) = scale * rng.complex_gaussian();

  CommChannel ch;
  ch.taps = taps;
  ch.seed = seed;
  ch.h.assign(ns, Eigen::MatrixXcd::Zero(nc, nt));
  for (int i = 0; i < ns; ++i)
    for (int l = 0; l < taps; ++l)
      ch.h[i] += impulse[l] * std::polar(1.0, -2.0 * M_PI * i * l / ns);
  return ch;
}

CommObservation transmit(const SymbolFrame& frame, const CommChannel& channel, int symbol,
                         double snr_db, std::uint64_t seed) {
  const SystemConfig& cfg = frame.config();
  const int ns = cfg.num_subcarriers;
  const int nc = cfg.num_rx_comm;
  if (static_cast<int>(channel.h.size()) != ns || channel.h[0].rows() != nc ||
      channel.h[0].cols() != cfg.num_tx)
    throw CommError("channel dimensions do not match the configuration");

  CommObservation obs;
  obs.symbol = symbol;
  obs.snr_db = snr_db;
  obs.y.resize(nc, ns);

  double power = 0.0;
  int occupied = 0;
  Eigen::VectorXcd a(cfg.num_tx);
  for (int i = 0; i < ns; ++i) {
    bool any = false;
    for (int n = 0; n < cfg.num_tx; ++n) {
      a[n] = frame.at(n, i, symbol);
      any = any || a[n] != cxd{0.0, 0.0};
    }
    obs.y.col(i) = channel.h[i] * a;
    if (any) {
      power += obs.y.col(i).squaredNorm() / nc;
      ++occupied;
    }
  }
  power = occupied > 0 ? power / occupied : 1.0;

  if (!std::isinf(snr_db)) {
    obs.noise_var = power / std::pow(10.0, snr_db / 10.0);
    Rng rng(seed);
    const double sigma = std::sqrt(obs.noise_var);
    for (int i = 0; i < ns; ++i)
      for (int r = 0; r < nc; ++r) obs.y(r, i) += sigma * rng.complex_gaussian();
  }
  return obs;
}

DecodedFrame decode_ssr(const CommObservation& obs, const CommChannel& channel,
                        const SystemConfig& cfg, bool fixed_endpoints,
                        int private_period) {
  const int ns = cfg.num_subcarriers;
  SparseProblem problem;
  problem.dictionaries = channel.h;
  problem.measurements.reserve(ns);
  for (int i = 0; i < ns; ++i) problem.measurements.push_back(obs.y.col(i));
  problem.sparsity = cfg.num_active;
  const SparseSolution sol = group_omp(problem);

  DecodedFrame out;
  out.pattern_hat.indices = sol.support;
  out.pattern_hat.fixed_endpoints = fixed_endpoints;
  out.symbols_hat = Eigen::MatrixXcd::Zero(cfg.num_active, ns);
  const int found = static_cast<int>(sol.support.size());
  for (int i = 0; i < ns; ++i)
    for (int r = 0; r < found; ++r) out.symbols_hat(r, i) = sol.coefficients(r, i);

  out.index_bits_hat = index_bits_of(out.pattern_hat, cfg, fixed_endpoints,
                                     &out.pattern_decode_failed);
  const bool has_private = symbol_has_private(obs.symbol, private_period);
  if (found == cfg.num_active) {
    out.payload_bits_hat =
        demap_payload(out.symbols_hat, out.pattern_hat, cfg, has_private);
  } else {
    // degenerate support (all-zero observation); keep the stream length
    out.pattern_decode_failed = true;
    const std::size_t slots =
        static_cast<std::size_t>(cfg.num_active) * cfg.num_subcarriers -
        (has_private ? static_cast<std::size_t>(cfg.num_active) * (cfg.num_active - 1)
                     : 0);
    out.payload_bits_hat.assign(slots * bits_per_qam_symbol(cfg.qam_order), 0);
  }
  return out;
}

DecodedFrame decode_private(const CommObservation& obs, const CommChannel& channel,
                            const SystemConfig& cfg, bool fixed_endpoints,
                            int private_period, const PrivateDecodeOptions& opt) {
  const int ns = cfg.num_subcarriers;
  const int nc = cfg.num_rx_comm;
  const int nt = cfg.num_tx;
  const bool has_private = symbol_has_private(obs.symbol, private_period);

  struct Candidate {
    int votes = 0;
    double best_score = 0.0;  // correlation energy of the strongest vote
  };
  std::map<int, Candidate> votes;
  std::vector<int> private_set;

  for (int i = 0; i < ns; ++i) {
    const Eigen::VectorXcd y = obs.y.col(i);
    const double y2 = y.squaredNorm();
    if (y2 == 0.0) continue;
    int best = -1;
    double best_score = 0.0;
    for (int n = 0; n < nt; ++n) {
      const double h2 = channel.h[i].col(n).squaredNorm();
      if (h2 <= 0.0) continue;
      const double score = std::norm(channel.h[i].col(n).dot(y)) / h2;
      if (score > best_score) {
        best_score = score;
        best = n;
      }
    }
    if (best < 0) continue;
    // Single-atom least squares leaves ||y||^2 - score as residual energy.
    const double resid2 = std::max(0.0, y2 - best_score);
    const double thr2 = std::max(opt.gamma * opt.gamma * y2,
                                 opt.noise_floor_mult * obs.noise_var * nc);
    if (resid2 <= thr2) {
      private_set.push_back(i);
      auto& c = votes[best];
      ++c.votes;
      c.best_score = std::max(c.best_score, best_score);
    }
  }

  bool trusted = static_cast<int>(votes.size()) >= cfg.num_active;
  std::vector<int> selected;
  if (trusted) {
    std::vector<std::pair<int, Candidate>> ranked(votes.begin(), votes.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second.votes != b.second.votes) return a.second.votes > b.second.votes;
      if (a.second.best_score != b.second.best_score)
        return a.second.best_score > b.second.best_score;
      return a.first < b.first;
    });
    for (int k = 0; k < cfg.num_active; ++k) {
      selected.push_back(ranked[k].first);
      // A vote buried near the noise floor is not evidence.
      if (obs.noise_var > 0.0 &&
          ranked[k].second.best_score < opt.min_coef_snr * obs.noise_var)
        trusted = false;
    }
    std::sort(selected.begin(), selected.end());
  }

  if (!trusted) {
    DecodedFrame out = decode_ssr(obs, channel, cfg, fixed_endpoints, private_period);
    out.fell_back_to_ssr = true;
    out.private_set_hat = private_set;
    return out;
  }

  DecodedFrame out;
  out.private_set_hat = private_set;
  out.pattern_hat.indices = selected;
  out.pattern_hat.fixed_endpoints = fixed_endpoints;
  out.symbols_hat = Eigen::MatrixXcd::Zero(cfg.num_active, ns);

  Eigen::MatrixXcd sub(nc, cfg.num_active);
  for (int i = 0; i < ns; ++i) {
    if (has_private && i < cfg.num_active) {
      // Known-exclusive subcarrier: matched single-column fit for its owner.
      const int owner = selected[i];
      const double h2 = channel.h[i].col(owner).squaredNorm();
      if (h2 > 0.0)
        out.symbols_hat(i, i) = channel.h[i].col(owner).dot(obs.y.col(i)) / h2;
    } else {
      for (int r = 0; r < cfg.num_active; ++r) sub.col(r) = channel.h[i].col(selected[r]);
      out.symbols_hat.col(i) = sub.colPivHouseholderQr().solve(obs.y.col(i));
    }
  }

  out.index_bits_hat = index_bits_of(out.pattern_hat, cfg, fixed_endpoints,
                                     &out.pattern_decode_failed);
  out.payload_bits_hat = demap_payload(out.symbols_hat, out.pattern_hat, cfg, has_private);
  return out;
}

double bit_error_rate(const BitVec& truth, const BitVec& estimate) {
  if (truth.size() != estimate.size())
    throw CommError("bit stream length mismatch");
  if (truth.empty()) return 0.0;
  std::size_t errors = 0;
  for (std::size_t k = 0; k < truth.size(); ++k)
    if (truth[k] != estimate[k]) ++errors;
  return static_cast<double>(errors) / truth.size();
}

}  // namespace dfrc

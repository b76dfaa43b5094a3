#include "dfrc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dfrc {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

double parse_double(const std::string& v, const std::string& key) {
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ScenarioError("bad numeric value for '" + key + "': " + v);
  }
}

int parse_int(const std::string& v, const std::string& key) {
  const double d = parse_double(v, key);
  const int i = static_cast<int>(std::llround(d));
  if (std::abs(d - i) > 1e-9) throw ScenarioError("expected integer for '" + key + "'");
  return i;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ScenarioError("expected boolean for '" + key + "': " + v);
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& name) {
  Scenario sc;
  sc.name = name;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ScenarioError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string qual = section.empty() ? key : section + "." + key;

    if (qual == "system.f_c") sc.system.carrier_hz = parse_double(val, qual);
    else if (qual == "system.delta") sc.system.subcarrier_spacing_hz = parse_double(val, qual);
    else if (qual == "system.T_p") sc.system.symbol_duration_s = parse_double(val, qual);
    else if (qual == "system.T_cp") sc.system.cyclic_prefix_s = parse_double(val, qual);
    else if (qual == "system.N_s") sc.system.num_subcarriers = parse_int(val, qual);
    else if (qual == "system.N_p") sc.system.num_symbols = parse_int(val, qual);
    else if (qual == "system.N_t") sc.system.num_tx = parse_int(val, qual);
    else if (qual == "system.N_x") sc.system.num_active = parse_int(val, qual);
    else if (qual == "system.N_r") sc.system.num_rx_radar = parse_int(val, qual);
    else if (qual == "system.N_c") sc.system.num_rx_comm = parse_int(val, qual);
    else if (qual == "system.d_t") sc.system.tx_spacing_wl = parse_double(val, qual);
    else if (qual == "system.d_r") sc.system.rx_spacing_wl = parse_double(val, qual);
    else if (qual == "system.c") sc.system.wave_speed = parse_double(val, qual);
    else if (qual == "system.qam_order") sc.system.qam_order = parse_int(val, qual);
    else if (qual == "system.fixed_endpoints") sc.fixed_endpoints = parse_bool(val, qual);
    else if (qual == "targets.target") {
      const auto f = split_list(val);
      if (f.size() != 3)
        throw ScenarioError("target needs theta_deg, range_m, velocity_mps");
      sc.targets.push_back({parse_double(f[0], qual), parse_double(f[1], qual),
                            parse_double(f[2], qual)});
    } else if (qual == "radar.snr_db") {
      const double v = parse_double(val, qual);
      if (!std::isinf(v)) sc.radar_snr_db = v;
    } else if (qual == "radar.coarse_subcarrier") sc.coarse_subcarrier = parse_int(val, qual);
    else if (qual == "radar.coarse_symbol") sc.coarse_symbol = parse_int(val, qual);
    else if (qual == "radar.coarse_threshold") sc.coarse_rel_threshold = parse_double(val, qual);
    else if (qual == "radar.detect_threshold") sc.detect_rel_threshold = parse_double(val, qual);
    else if (qual == "radar.grid_size") sc.grid_angles = parse_int(val, qual);
    else if (qual == "radar.virtual_snapshots") sc.virtual_snapshots = parse_int(val, qual);
    else if (qual == "radar.private_period") sc.private_period = parse_int(val, qual);
    else if (qual == "radar.solver") sc.solver = val;
    else if (qual == "radar.omp_residual_tol") sc.omp_residual_tol = parse_double(val, qual);
    else if (qual == "comm.snr_list") {
      sc.comm.snr_list.clear();
      for (const auto& item : split_list(val))
        sc.comm.snr_list.push_back(parse_double(item, qual));
    } else if (qual == "comm.trials") sc.comm.trials = parse_int(val, qual);
    else if (qual == "comm.N_x_list") {
      sc.comm.nx_list.clear();
      for (const auto& item : split_list(val)) sc.comm.nx_list.push_back(parse_int(item, qual));
    } else if (qual == "comm.taps") sc.comm.taps = parse_int(val, qual);
    else if (qual == "comm.decoders") sc.comm.decoders = split_list(val);
    else if (qual == "run.master_seed")
      sc.master_seed = static_cast<std::uint64_t>(std::stoull(val));
    else
      throw ScenarioError("unknown key '" + qual + "'");
  }
  if (sc.solver != "omp" && sc.solver != "fista")
    throw ScenarioError("solver must be omp or fista");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string name = path;
  const auto slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  return parse_scenario(ss.str(), name);
}

std::string canonical_dump(const Scenario& s) {
  std::ostringstream os;
  os.precision(17);
  os << "[system]\n"
     << "f_c = " << s.system.carrier_hz << "\n"
     << "delta = " << s.system.subcarrier_spacing_hz << "\n"
     << "T_p = " << s.system.symbol_duration_s << "\n"
     << "T_cp = " << s.system.cyclic_prefix_s << "\n"
     << "N_s = " << s.system.num_subcarriers << "\n"
     << "N_p = " << s.system.num_symbols << "\n"
     << "N_t = " << s.system.num_tx << "\n"
     << "N_x = " << s.system.num_active << "\n"
     << "N_r = " << s.system.num_rx_radar << "\n"
     << "N_c = " << s.system.num_rx_comm << "\n"
     << "d_t = " << s.system.tx_spacing_wl << "\n"
     << "d_r = " << s.system.rx_spacing_wl << "\n"
     << "c = " << s.system.wave_speed << "\n"
     << "qam_order = " << s.system.qam_order << "\n"
     << "fixed_endpoints = " << (s.fixed_endpoints ? "true" : "false") << "\n";
  os << "[targets]\n";
  for (const auto& t : s.targets)
    os << "target = " << t.theta_deg << ", " << t.range_m << ", " << t.velocity_mps << "\n";
  os << "[radar]\n"
     << "snr_db = " << (s.radar_snr_db ? std::to_string(*s.radar_snr_db) : "inf") << "\n"
     << "coarse_subcarrier = " << s.coarse_subcarrier << "\n"
     << "coarse_symbol = " << s.coarse_symbol << "\n"
     << "coarse_threshold = " << s.coarse_rel_threshold << "\n"
     << "detect_threshold = " << s.detect_rel_threshold << "\n"
     << "grid_size = " << s.grid_angles << "\n"
     << "virtual_snapshots = " << s.virtual_snapshots << "\n"
     << "private_period = " << s.private_period << "\n"
     << "solver = " << s.solver << "\n"
     << "omp_residual_tol = " << s.omp_residual_tol << "\n";
  os << "[comm]\n" << "snr_list = ";
  for (std::size_t k = 0; k < s.comm.snr_list.size(); ++k)
    os << (k ? ", " : "") << s.comm.snr_list[k];
  os << "\ntrials = " << s.comm.trials << "\nN_x_list = ";
  for (std::size_t k = 0; k < s.comm.nx_list.size(); ++k)
    os << (k ? ", " : "") << s.comm.nx_list[k];
  os << "\ntaps = " << s.comm.taps << "\ndecoders = ";
  for (std::size_t k = 0; k < s.comm.decoders.size(); ++k)
    os << (k ? ", " : "") << s.comm.decoders[k];
  os << "\n[run]\nmaster_seed = " << s.master_seed << "\n";
  return os.str();
}

std::string scenario_hash(const Scenario& s) {
  const std::string dump = canonical_dump(s);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SystemConfig full_scale_system() {
  SystemConfig cfg;
  cfg.carrier_hz = 24e9;
  cfg.subcarrier_spacing_hz = 1e5;
  cfg.symbol_duration_s = 12.5e-6;
  cfg.cyclic_prefix_s = 2.5e-6;
  cfg.num_subcarriers = 1024;
  cfg.num_symbols = 256;
  cfg.num_tx = 32;
  cfg.num_active = 5;
  cfg.num_rx_radar = 50;
  cfg.num_rx_comm = 16;
  cfg.tx_spacing_wl = 1.0;
  cfg.rx_spacing_wl = 0.5;
  cfg.qam_order = 16;
  return cfg;
}

}  // namespace dfrc

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dfrc/harness.hpp"

using namespace dfrc;

namespace {

std::string desk_text() {
  return R"(# desk-scale regression scenario
[system]
f_c = 24e9
delta = 1e5
T_p = 12.5e-6
T_cp = 2.5e-6
N_s = 128
N_p = 32
N_t = 16
N_x = 4
N_r = 16
N_c = 16
d_t = 1.0
d_r = 0.5
fixed_endpoints = true

[targets]
target = 14.4775121859, 140.625, 46.875

[radar]
snr_db = inf
private_period = 1

[comm]
snr_list = 0, 20
trials = 6
N_x_list = 2, 4
taps = 8
decoders = ssr, private

[run]
master_seed = 424242
)";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scenario parsing") {
  const Scenario sc = parse_scenario(desk_text(), "desk");
  CHECK(sc.system.num_subcarriers == 128);
  CHECK(sc.system.num_active == 4);
  CHECK(sc.fixed_endpoints);
  REQUIRE(sc.targets.size() == 1);
  CHECK(sc.targets[0].range_m == doctest::Approx(140.625));
  CHECK_FALSE(sc.radar_snr_db.has_value());
  CHECK(sc.comm.snr_list == std::vector<double>{0, 20});
  CHECK(sc.comm.nx_list == std::vector<int>{2, 4});
  CHECK(sc.master_seed == 424242);

  CHECK_THROWS_AS(parse_scenario("[system]\nbogus_key = 3\n", "x"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[targets]\ntarget = 1, 2\n", "x"), ScenarioError);
  CHECK(scenario_hash(sc) == scenario_hash(parse_scenario(desk_text(), "desk")));
}

TEST_CASE("shipped scenario files load") {
  for (const char* name :
       {"table1_table2.cfg", "fig1_virtual.cfg", "ber_sweep.cfg", "desk_small.cfg"}) {
    const Scenario sc = load_scenario(std::string(SCENARIO_DIR) + "/" + name);
    CHECK_NOTHROW(validate_config(sc.system));
  }
}

TEST_CASE("radar run recovers the on-grid desk target") {
  const Scenario sc = parse_scenario(desk_text(), "desk");
  const RunReport rep = run_radar(sc);
  REQUIRE(rep.coarse.size() == 1);
  CHECK(rep.coarse[0].angle_bin == 2);
  CHECK(rep.coarse[0].range_bin_index == 12);
  CHECK(rep.coarse[0].doppler_bin_index == 3);
  REQUIRE(rep.refined.size() == 1);
  CHECK(rep.refined[0].range_bin_index == 12);

  const RunReport again = run_radar(sc);
  CHECK(again.coarse.size() == rep.coarse.size());
  CHECK(again.refined[0].theta_deg == rep.refined[0].theta_deg);
}

TEST_CASE("ber sweep shape, determinism and noiseless sentinel") {
  Scenario sc = parse_scenario(desk_text(), "desk");
  sc.system.num_subcarriers = 64;
  sc.system.num_symbols = 2;
  sc.system.num_tx = 32;
  sc.fixed_endpoints = false;
  sc.comm.snr_list = {std::numeric_limits<double>::infinity(), 10.0};
  sc.comm.trials = 4;
  sc.comm.nx_list = {2, 5};

  const RunReport rep = run_ber_sweep(sc, 2);
  CHECK(rep.ber_rows.size() == 2 * 2 * 2);  // decoders x N_x x snr
  for (const auto& row : rep.ber_rows) {
    CHECK(row.trials == 4);
    if (std::isinf(row.snr_db)) {
      CHECK(row.payload_ber == 0.0);
      CHECK(row.index_ber == 0.0);
    }
  }
  const RunReport rep1 = run_ber_sweep(sc, 1);
  REQUIRE(rep1.ber_rows.size() == rep.ber_rows.size());
  for (std::size_t k = 0; k < rep.ber_rows.size(); ++k) {
    CHECK(rep1.ber_rows[k].payload_ber == rep.ber_rows[k].payload_ber);
    CHECK(rep1.ber_rows[k].index_ber == rep.ber_rows[k].index_ber);
  }
}

TEST_CASE("rates") {
  Scenario sc = parse_scenario(desk_text(), "desk");
  sc.system = full_scale_system();
  const RunReport rep = run_rates(sc);
  REQUIRE(rep.rates.size() == 2);
  CHECK_FALSE(rep.rates[0].with_private);
  CHECK(rep.rates[0].bits_per_second == doctest::Approx(1.63976e9));
  CHECK(rep.rates[1].bits_per_second == doctest::Approx(1.63336e9));
}

TEST_CASE("emit writes stable files") {
  namespace fs = std::filesystem;
  const Scenario sc = parse_scenario(desk_text(), "desk");
  const RunReport rep = run_radar(sc);
  const std::string dir = (fs::temp_directory_path() / "dfrc_emit_test").string();
  fs::remove_all(dir);
  emit(rep, dir);

  for (const char* f : {"estimates.csv", "ber.csv", "rates.csv", "spectrum_coarse.csv",
                        "spectrum_refined.csv", "run.json"})
    CHECK(fs::exists(dir + "/" + f));

  const std::string est = slurp(dir + "/estimates.csv");
  CHECK(est.rfind("theta_deg,R_m,v_mps,angle_bin,l_q,p_q,refined\n", 0) == 0);
  CHECK(slurp(dir + "/ber.csv") == "method,N_x,snr_db,payload_ber,index_ber,trials\n");

  // byte-identical on rerun
  const std::string dir2 = (fs::temp_directory_path() / "dfrc_emit_test2").string();
  fs::remove_all(dir2);
  emit(run_radar(sc), dir2);
  for (const char* f : {"estimates.csv", "run.json", "spectrum_coarse.csv"})
    CHECK(slurp(dir + "/" + std::string(f)) == slurp(dir2 + "/" + std::string(f)));

  // empty report still carries headers
  RunReport empty;
  const std::string dir3 = (fs::temp_directory_path() / "dfrc_emit_test3").string();
  fs::remove_all(dir3);
  emit(empty, dir3);
  CHECK(slurp(dir3 + "/estimates.csv") == "theta_deg,R_m,v_mps,angle_bin,l_q,p_q,refined\n");
}

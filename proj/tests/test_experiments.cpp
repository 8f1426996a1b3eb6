#include <cmath>
#include <sstream>
#include <string>

#include <doctest.h>

#include "rydress/config.hpp"
#include "rydress/dressing.hpp"
#include "rydress/errors.hpp"
#include "rydress/experiments.hpp"
#include "rydress/parallel.hpp"

using namespace rydress;

namespace {

ExperimentConfig shipped(const std::string& name) {
  return load_config_file(std::string(RYDRESS_CONFIG_DIR) + "/" + name + ".ini");
}

std::string file(const ExperimentOutput& out, const std::string& name) {
  for (const auto& f : out.files) {
    if (f.name == name) return f.contents;
  }
  FAIL("missing output file " << name);
  return "";
}

std::string column_header(const std::string& csv) { return csv.substr(0, csv.find('\n')); }

std::vector<double> csv_column(const std::string& csv, std::size_t col) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<double> v;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    for (std::size_t i = 0; i <= col; ++i) std::getline(row, cell, ',');
    v.push_back(std::stod(cell));
  }
  return v;
}

}  // namespace

TEST_CASE("jcurve runner") {
  auto c = shipped("jcurve");
  const auto out = run_jcurve(c);
  CHECK(column_header(file(out, "jcurve.csv")) == "drive,rabi_freq_MHz,detuning_MHz,r_um,J_MHz");
  const auto& drives = out.summary["results"]["drives"];
  REQUIRE(drives.size() == 2);
  for (const auto& d : drives) {
    const double plateau = d["plateau_MHz"];
    CHECK(std::abs(d["J_at_min_r_MHz"].get<double>() - plateau) < 0.01 * std::abs(plateau));
    CHECK(std::abs(d["J_at_max_r_MHz"].get<double>()) < 0.1 * std::abs(plateau));
    CHECK(d["blockade_radius_um"].is_number());
  }
  CHECK(out.summary["version"] == version());
  CHECK(out.summary["config"]["potential"]["model"] == "van_der_waals");

  c.r_grid.clear();
  CHECK_THROWS_AS(run_jcurve(c), ConfigError);
}

TEST_CASE("jcurve with a perfect blockade is flat") {
  auto c = load_config("[potential]\nmodel = perfect_blockade\n[jcurve]\nr_grid = linspace(1, 10, 10)\n");
  const auto out = run_jcurve(c);
  const auto csv = file(out, "jcurve.csv");
  const auto j = csv_column(csv, 4);
  REQUIRE(j.size() == 20);
  for (std::size_t i = 0; i < 10; ++i) CHECK(j[i] == doctest::Approx(j_perfect_blockade({4.4, 4.0})).epsilon(1e-9));
  for (std::size_t i = 10; i < 20; ++i) CHECK(j[i] == doctest::Approx(j_perfect_blockade({4.3, 1.3})).epsilon(1e-9));
  CHECK(out.summary["results"]["drives"][0]["blockade_radius_um"].is_null());
}

TEST_CASE("scan runner recovers J") {
  const auto out = run_scan(shipped("spectrum_scan"));
  const auto& r = out.summary["results"];
  CHECK_FALSE(out.numerical_error.has_value());
  CHECK(r["relative_error"].get<double>() < 0.05);
  CHECK(r["warnings"].empty());
  CHECK(r["single_flip_peak"]["center_MHz"].is_number());
  CHECK(r["double_flip_peak"]["center_MHz"].is_number());
  CHECK(column_header(file(out, "scan.csv")) == "detuning_MHz,P11,P10,P01,P00,Psingle");
}

TEST_CASE("scan runner without interaction reports J near zero") {
  auto c = shipped("zero_interaction");
  const auto out = run_scan(c);
  const auto& r = out.summary["results"];
  REQUIRE(r["J_extracted_MHz"].is_number());
  CHECK(std::abs(r["J_extracted_MHz"].get<double>()) < 5e-3);
  CHECK(r["relative_error"].is_null());
}

TEST_CASE("coarse scan grid is flagged") {
  auto c = shipped("spectrum_scan");
  c.scan_grid = parse_grid("linspace(0.8, 2.2, 8)");
  const auto out = run_scan(c);
  const auto& r = out.summary["results"];
  REQUIRE(r["warnings"].size() == 1);
  CHECK(r["warnings"][0].get<std::string>().find("|J|/4") != std::string::npos);
  // Peaks this narrow cannot be fitted on such a grid; the failure is
  // recorded rather than hidden.
  if (out.numerical_error) CHECK(r["error"].is_string());
}

TEST_CASE("rabi runner enhancement") {
  const auto blockaded = run_rabi(shipped("blockaded_rabi"));
  CHECK(blockaded.summary["results"]["enhancement"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
  CHECK(blockaded.summary["results"]["max_P00"].get<double>() < 0.15);
  CHECK(column_header(file(blockaded, "rabi.csv")) == "t_us,P11,Psingle,P00,P1_single_atom");
  const auto traj = file(blockaded, "rabi_trajectory.csv");
  CHECK(column_header(traj).rfind("t_us,pop_11,pop_10,pop_1r,pop_1d,pop_01", 0) == 0);

  const auto free = run_rabi(shipped("zero_interaction"));
  CHECK(free.summary["results"]["enhancement"].get<double>() == doctest::Approx(1.0).epsilon(0.02));

  auto c = shipped("blockaded_rabi");
  c.mw_rabi.reset();
  CHECK_THROWS_AS(run_rabi(c), ConfigError);
}

TEST_CASE("rabi first-peak visibility falls with decay") {
  auto c = shipped("blockaded_rabi");
  c.rabi_times = parse_grid("linspace(0, 4, 81)");
  double previous = 2.0;
  for (double gamma : {0.0, 0.05, 0.1, 0.2}) {
    CAPTURE(gamma);
    c.decay_rate = gamma;
    const double peak = run_rabi(c).summary["results"]["first_peak_Psingle"];
    CHECK(peak < previous);
    previous = peak;
  }
}

TEST_CASE("bell runner") {
  auto ideal = shipped("bell_ideal");
  const auto psi = run_bell(ideal);
  CHECK(psi.summary["results"]["fidelity_bound"].get<double>() >= 0.99);
  CHECK(column_header(file(psi, "parity.csv")) == "phi_rad,Q,P11,P10,P01,P00,survival");
  CHECK(csv_column(file(psi, "parity.csv"), 0).size() == 64);

  ideal.bell_target = BellState::phi_plus;
  const auto phi = run_bell(ideal);
  CHECK(phi.summary["results"]["fidelity_bound"].get<double>() >= 0.99);
  CHECK(phi.summary["results"]["target"] == "phi_plus");

  auto mixed = shipped("bell_ideal");
  mixed.inject_mixture = true;
  const auto m = run_bell(mixed);
  CHECK(m.summary["results"]["fidelity_bound"].get<double>() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_FALSE(m.summary["results"]["entangled"].get<bool>());
}

TEST_CASE("bell runner strict mode") {
  auto c = shipped("bell_noisy");
  c.shots = 1;
  c.temperature = 0.0;
  const auto lenient = run_bell(c);
  CHECK_FALSE(lenient.summary["results"]["warnings"].empty());
  c.strict = true;
  CHECK_THROWS_AS(run_bell(c), ProtocolError);
}

TEST_CASE("lifetime runner") {
  auto c = shipped("lifetime");
  const auto ten = run_lifetime(c);
  CHECK(ten.summary["results"]["tau_us"].get<double>() == doctest::Approx(10.0).epsilon(0.01));

  c.decay_rate = 1.0 / 150.0;
  c.lifetime_delays = parse_grid("linspace(0, 300, 31)");
  const auto long_lived = run_lifetime(c);
  CHECK(long_lived.summary["results"]["tau_us"].get<double>() == doctest::Approx(150.0).epsilon(0.01));

  c.decay_rate = 0.0;
  const auto stable = run_lifetime(c);
  CHECK(stable.summary["results"]["tau_us"].is_null());
  CHECK(stable.summary["results"]["tau_infinite"].get<bool>());
}

TEST_CASE("recapture runner") {
  auto c = shipped("recapture");
  c.recapture_samples = 4000;
  const auto out = run_recapture(c);
  const auto csv = file(out, "recapture.csv");
  CHECK(column_header(csv) == "release_time_us,probability,stderr");
  const auto p = csv_column(csv, 1);
  CHECK(p.front() > 0.99);
  CHECK(p.back() < p.front());
  CHECK(out.summary["results"]["warnings"].size() > 0);

  c.seed.reset();
  CHECK_THROWS_AS(run_recapture(c), ConfigError);
}

TEST_CASE("doppler offsets") {
  auto c = load_config("[run]\nseed = 3\nshots = 4000\n[noise]\ntemperature = 20\n");
  const auto off = doppler_offsets(c);
  REQUIRE(off.size() == 4000);
  double mean = 0.0, sq = 0.0;
  for (double o : off) {
    mean += o / off.size();
    sq += o * o / off.size();
  }
  const double sigma = doppler_detuning_sigma(20.0, c.drive.wavelength, constants::cesium_mass_amu);
  CHECK(std::abs(mean) < 4.0 * sigma / std::sqrt(4000.0));
  CHECK(std::sqrt(sq) == doctest::Approx(sigma).epsilon(0.05));

  c.temperature = 0.0;
  CHECK(doppler_offsets(c) == std::vector<double>{0.0});
  c.temperature = 20.0;
  c.seed.reset();
  CHECK_THROWS_AS(doppler_offsets(c), ConfigError);
}

TEST_CASE("outputs do not depend on the thread count") {
  auto bell = shipped("bell_noisy");
  bell.shots = 8;
  auto rabi = shipped("blockaded_rabi");
  rabi.temperature = 20.0;
  rabi.shots = 6;
  rabi.rabi_times = parse_grid("linspace(0, 3, 31)");
  auto rec = shipped("recapture");
  rec.recapture_samples = 2000;

  for (auto* c : {&bell, &rabi, &rec}) {
    const std::string cmd = c == &bell ? "bell" : c == &rabi ? "rabi" : "recapture";
    CAPTURE(cmd);
    set_max_threads(1);
    const auto one = run_experiment(cmd, *c);
    set_max_threads(4);
    const auto four = run_experiment(cmd, *c);
    set_max_threads(0);
    CHECK(one.summary.dump() == four.summary.dump());
    REQUIRE(one.files.size() == four.files.size());
    for (std::size_t i = 0; i < one.files.size(); ++i) CHECK(one.files[i].contents == four.files[i].contents);
  }
  CHECK_THROWS_AS(run_experiment("nope", bell), ConfigError);
}

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rydress/dynamics.hpp"
#include "rydress/entanglement.hpp"
#include "rydress/laser_drive.hpp"
#include "rydress/measurement.hpp"
#include "rydress/pair_potential.hpp"

namespace rydress {

/// section -> key -> raw value. Keys outside any section land in "".
using IniTable = std::map<std::string, std::map<std::string, std::string>>;

/// Parses `key = value` lines under `[section]` headers; `#` and `;` start
/// comments. Throws ConfigError with the line number on malformed input.
IniTable parse_ini(std::string_view text);

/// Accepts `linspace(a, b, n)`, `range(a, b, step)` (inclusive of b within
/// rounding) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

struct ExperimentConfig {
  std::optional<std::uint64_t> seed;  // required by stochastic runs
  int shots = 1;  // Monte Carlo shots for Doppler averaging
  bool strict = false;

  LaserDrive drive{4.3, 1.3};

  PairPotentialModel potential = VanDerWaals{};
  double separation = 2.9;        // um
  std::optional<double> u_dd;     // MHz, overrides the model when set

  std::optional<double> mw_rabi;     // dressed single-atom Rabi frequency, MHz
  std::optional<double> pulse_time;  // us

  double decay_rate = 0.0;  // 1/us
  DecayBranching branching;
  double temperature = 0.0;  // uK, Doppler noise on the dressing detuning
  double pump_efficiency = 1.0;
  DetectionModel detection;

  std::vector<LaserDrive> jcurve_drives{{4.4, 4.0}, {4.3, 1.3}};
  std::vector<double> r_grid;

  std::vector<double> scan_grid;  // empty: chosen from the expected J

  std::vector<double> rabi_times;

  BellState bell_target = BellState::psi_plus;
  PhiMethod phi_method = PhiMethod::global_half_pi;
  int phase_points = 64;
  bool inject_mixture = false;

  double lifetime_rabi = 4.3;
  std::vector<double> lifetime_delays;

  TrapParams trap;
  std::vector<double> release_times;
  std::uint64_t recapture_samples = 20000;

  /// Finite pair shift used by the dynamics commands. Throws ConfigError for
  /// the perfect-blockade model unless u_dd is given explicitly.
  double resolved_u_dd() const;

  /// Throws ConfigError when no seed was given.
  std::uint64_t required_seed() const;
};

/// Builds a config from INI text, starting from the defaults above. Unknown
/// sections or keys and invalid values raise ConfigError naming
/// `section.key`.
ExperimentConfig load_config(std::string_view text);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace rydress

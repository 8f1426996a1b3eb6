#include "rydress/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rydress/constants.hpp"
#include "rydress/dressing.hpp"
#include "rydress/entanglement.hpp"
#include "rydress/errors.hpp"
#include "rydress/fitting.hpp"
#include "rydress/measurement.hpp"
#include "rydress/output.hpp"
#include "rydress/parallel.hpp"
#include "rydress/random.hpp"
#include "rydress/spectroscopy.hpp"

namespace rydress {

using nlohmann::json;

const char* version() { return RYDRESS_VERSION; }

namespace {

ExperimentOutput start(const std::string& command, const ExperimentConfig& c) {
  ExperimentOutput out;
  out.command = command;
  out.summary["command"] = command;
  out.summary["version"] = version();
  out.summary["config"] = config_to_json(c);
  return out;
}

void require_grid(const std::vector<double>& g, const std::string& path) {
  if (g.empty()) throw ConfigError(path + ": grid must not be empty");
}

double require_mw(const ExperimentConfig& c) {
  if (!c.mw_rabi) throw ConfigError("microwave.rabi_freq: required for this experiment");
  return *c.mw_rabi;
}

double expected_j(const LaserDrive& drive, double u) { return drive.is_on() ? j_finite_blockade(drive, u) : 0.0; }

LaserDrive shifted(const LaserDrive& d, double offset) {
  LaserDrive s = d;
  if (s.is_on()) s.detuning += offset;
  return s;
}

}  // namespace

std::vector<double> doppler_offsets(const ExperimentConfig& c) {
  if (c.temperature == 0.0) return {0.0};
  const std::uint64_t seed = c.required_seed();
  const double sigma = doppler_detuning_sigma(c.temperature, c.drive.wavelength, constants::cesium_mass_amu);
  std::vector<double> offsets(c.shots);
  for (int s = 0; s < c.shots; ++s) {
    auto rng = rng_stream(seed, static_cast<std::uint64_t>(s));
    offsets[s] = std::normal_distribution<double>(0.0, sigma)(rng);
  }
  return offsets;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"jcurve", "scan", "rabi", "bell", "lifetime", "recapture"};
  return names;
}

ExperimentOutput run_experiment(const std::string& command, const ExperimentConfig& config) {
  if (command == "jcurve") return run_jcurve(config);
  if (command == "scan") return run_scan(config);
  if (command == "rabi") return run_rabi(config);
  if (command == "bell") return run_bell(config);
  if (command == "lifetime") return run_lifetime(config);
  if (command == "recapture") return run_recapture(config);
  throw ConfigError("unknown experiment '" + command + "'");
}

ExperimentOutput run_jcurve(const ExperimentConfig& c) {
  require_grid(c.r_grid, "jcurve.r_grid");
  ExperimentOutput out = start("jcurve", c);
  CsvTable csv({"drive", "rabi_freq_MHz", "detuning_MHz", "r_um", "J_MHz"});
  json drives = json::array();
  for (std::size_t k = 0; k < c.jcurve_drives.size(); ++k) {
    const LaserDrive& d = c.jcurve_drives[k];
    const auto curve = j_vs_r(d, c.potential, c.r_grid);
    for (const auto& p : curve) csv.add_row({static_cast<double>(k), d.rabi_freq, d.detuning, p.r, p.j});
    json entry = {{"rabi_freq_MHz", d.rabi_freq},
                  {"detuning_MHz", d.detuning},
                  {"plateau_MHz", j_perfect_blockade(d)},
                  {"J_at_min_r_MHz", curve.front().j},
                  {"J_at_max_r_MHz", curve.back().j}};
    entry["blockade_radius_um"] = nullptr;
    if (!std::holds_alternative<PerfectBlockade>(c.potential)) {
      try {
        entry["blockade_radius_um"] = blockade_radius(c.potential, d);
      } catch (const NotFoundError&) {
      }
    }
    drives.push_back(entry);
  }
  out.files.push_back({"jcurve.csv", csv.str()});
  out.summary["results"] = {{"drives", drives}};
  return out;
}

ExperimentOutput run_scan(const ExperimentConfig& c) {
  const double u = c.resolved_u_dd();
  ScanSettings s = suggest_scan_settings(c.drive, u);
  if (c.mw_rabi) s.mw_rabi = *c.mw_rabi;
  if (c.pulse_time) s.pulse_time = *c.pulse_time;
  if (!c.scan_grid.empty()) s.grid = c.scan_grid;
  if (s.grid.size() < 2) throw ConfigError("scan.grid: needs at least 2 points");

  ExperimentOutput out = start("scan", c);
  json warnings = json::array();
  double step = 0.0;
  for (std::size_t i = 1; i < s.grid.size(); ++i) step = std::max(step, s.grid[i] - s.grid[i - 1]);
  const double j_expected = expected_j(c.drive, u);
  if (std::abs(j_expected) > 0.0 && step > std::abs(j_expected) / 4.0) {
    warnings.push_back("grid step " + format_number(step) + " MHz exceeds |J|/4 = " +
                       format_number(std::abs(j_expected) / 4.0) + " MHz; peaks may be unresolved");
  }

  // Doppler shots are averaged point by point.
  const auto offsets = doppler_offsets(c);
  ScanResult scan;
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    const ScanResult shot = mw_scan(shifted(c.drive, offsets[k]), u, s.mw_rabi, s.pulse_time, s.grid, c.decay_rate);
    if (k == 0) {
      scan = shot;
      continue;
    }
    for (std::size_t i = 0; i < scan.size(); ++i) {
      scan.p11[i] += shot.p11[i];
      scan.p10[i] += shot.p10[i];
      scan.p01[i] += shot.p01[i];
      scan.p00[i] += shot.p00[i];
    }
  }
  const double n = static_cast<double>(offsets.size());
  for (std::size_t i = 0; i < scan.size(); ++i) {
    scan.p11[i] /= n;
    scan.p10[i] /= n;
    scan.p01[i] /= n;
    scan.p00[i] /= n;
  }

  CsvTable csv({"detuning_MHz", "P11", "P10", "P01", "P00", "Psingle"});
  for (std::size_t i = 0; i < scan.size(); ++i) {
    csv.add_row({scan.detuning[i], scan.p11[i], scan.p10[i], scan.p01[i], scan.p00[i], scan.p10[i] + scan.p01[i]});
  }
  out.files.push_back({"scan.csv", csv.str()});

  auto peak = [](const PeakFit& p) {
    return json{{"center_MHz", p.center}, {"fwhm_MHz", p.width}, {"amplitude", p.amplitude}, {"offset", p.offset}};
  };
  json res = {{"J_expected_MHz", j_expected},
              {"u_dd_MHz", u},
              {"mw_rabi_MHz", s.mw_rabi},
              {"pulse_time_us", s.pulse_time},
              {"grid_step_MHz", step},
              {"warnings", warnings}};
  res["relative_error"] = nullptr;
  try {
    const JExtraction ex = extract_j(scan);
    res["single_flip_peak"] = peak(ex.single);
    res["double_flip_peak"] = peak(ex.double_flip);
    res["J_extracted_MHz"] = ex.j;
    if (j_expected != 0.0) res["relative_error"] = std::abs(ex.j - j_expected) / std::abs(j_expected);
  } catch (const NumericalError& e) {
    res["J_extracted_MHz"] = nullptr;
    res["error"] = e.what();
    out.numerical_error = e.what();
  }
  out.summary["results"] = res;
  return out;
}

ExperimentOutput run_rabi(const ExperimentConfig& c) {
  require_grid(c.rabi_times, "rabi.times");
  const double u = c.resolved_u_dd();
  const double mw = require_mw(c);
  const auto offsets = doppler_offsets(c);
  const std::size_t nt = c.rabi_times.size();

  std::vector<RabiCurves> two(offsets.size());
  std::vector<std::vector<double>> one(offsets.size());
  parallel_for(offsets.size(), [&](std::size_t k) {
    RabiOptions opt{c.branching, offsets[k]};
    two[k] = simulate_blockaded_rabi(c.drive, u, mw, c.decay_rate, c.rabi_times, opt);
    one[k] = simulate_single_atom_rabi(c.drive, mw, c.decay_rate, c.rabi_times, opt);
  });

  std::vector<double> p11(nt, 0.0), ps(nt, 0.0), p00(nt, 0.0), p1(nt, 0.0);
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    for (std::size_t i = 0; i < nt; ++i) {
      p11[i] += two[k].p11[i] / offsets.size();
      ps[i] += two[k].p_single[i] / offsets.size();
      p00[i] += two[k].p00[i] / offsets.size();
      p1[i] += one[k][i] / offsets.size();
    }
  }

  ExperimentOutput out = start("rabi", c);
  CsvTable csv({"t_us", "P11", "Psingle", "P00", "P1_single_atom"});
  for (std::size_t i = 0; i < nt; ++i) csv.add_row({c.rabi_times[i], p11[i], ps[i], p00[i], p1[i]});
  out.files.push_back({"rabi.csv", csv.str()});

  std::vector<std::string> header{"t_us"};
  for (int b = 0; b < kDim; ++b) {
    std::string label = basis_label(b);
    label.erase(std::remove(label.begin(), label.end(), ','), label.end());
    header.push_back("pop_" + label);
  }
  for (const char* h : {"P11", "Psingle", "P00"}) header.push_back(h);
  CsvTable traj(header);
  for (std::size_t i = 0; i < nt; ++i) {
    std::vector<double> row{c.rabi_times[i]};
    for (int b = 0; b < kDim; ++b) {
      double pop = 0.0;
      for (const auto& shot : two) pop += shot.trajectory.populations[i][b] / offsets.size();
      row.push_back(pop);
    }
    row.insert(row.end(), {p11[i], ps[i], p00[i]});
    traj.add_row(row);
  }
  out.files.push_back({"rabi_trajectory.csv", traj.str()});

  const SinusoidFit f2 = fit_sinusoid(c.rabi_times, p11);
  const SinusoidFit f1 = fit_sinusoid(c.rabi_times, p1);
  // First maximum of P_single: the largest value within one fitted period.
  std::size_t first = 0;
  for (std::size_t i = 1; i < nt; ++i) {
    if (f2.frequency > 0.0 && c.rabi_times[i] - c.rabi_times[0] > 1.0 / f2.frequency) break;
    if (ps[i] > ps[first]) first = i;
  }
  out.summary["results"] = {{"u_dd_MHz", u},
                            {"J_MHz", expected_j(c.drive, u)},
                            {"mw_rabi_MHz", mw},
                            {"two_atom_frequency_MHz", f2.frequency},
                            {"single_atom_frequency_MHz", f1.frequency},
                            {"enhancement", f2.frequency / f1.frequency},
                            {"max_P00", *std::max_element(p00.begin(), p00.end())},
                            {"first_peak_time_us", c.rabi_times[first]},
                            {"first_peak_Psingle", ps[first]},
                            {"shots", offsets.size()}};
  return out;
}

ExperimentOutput run_bell(const ExperimentConfig& c) {
  const double u = c.resolved_u_dd();
  const double mw = require_mw(c);
  const auto offsets = doppler_offsets(c);
  const TwoAtomRegister initial = prepare_initial(c.pump_efficiency);

  std::vector<PreparationResult> shots(offsets.size(), PreparationResult{initial, 0.0, {}});
  parallel_for(offsets.size(), [&](std::size_t k) {
    if (c.bell_target == BellState::phi_plus && c.phi_method == PhiMethod::two_photon) {
      PhiPlusOptions o;
      o.dressing = shifted(c.drive, offsets[k]);
      o.u_dd = u;
      o.mw_rabi = mw;
      o.decay_rate = c.decay_rate;
      o.branching = c.branching;
      shots[k] = prepare_phi_plus(initial, PhiMethod::two_photon, o);
      return;
    }
    BellOptions opt;
    opt.branching = c.branching;
    opt.initial = initial;
    opt.detuning_offset = offsets[k];
    opt.strict = c.strict;
    PreparationResult r = prepare_psi_plus(c.drive, u, mw, c.decay_rate, opt);
    if (c.bell_target == BellState::phi_plus) {
      const PreparationResult phi = prepare_phi_plus(r.reg, PhiMethod::global_half_pi, PhiPlusOptions{});
      r.reg = phi.reg;
    }
    shots[k] = r;
  });

  Matrix16c rho = Matrix16c::Zero();
  for (const auto& s : shots) rho += s.reg.density();
  rho /= static_cast<double>(shots.size());
  TwoAtomRegister reg = TwoAtomRegister::from_density(rho);
  if (c.inject_mixture) {
    Matrix16c mix = Matrix16c::Zero();
    mix(basis_index(Level::zero, Level::one), basis_index(Level::zero, Level::one)) = 0.5;
    mix(basis_index(Level::one, Level::zero), basis_index(Level::one, Level::zero)) = 0.5;
    reg = TwoAtomRegister::from_density(mix);
  }

  std::vector<double> phases(c.phase_points);
  for (int i = 0; i < c.phase_points; ++i) phases[i] = constants::two_pi * i / c.phase_points;
  const MeasurementRecord before = detect(reg, c.detection);
  const ParityScan scan = parity_scan(reg, phases, c.detection);
  const FidelityReport rep = fidelity_report(scan, c.bell_target, before, reg);

  ExperimentOutput out = start("bell", c);
  CsvTable csv({"phi_rad", "Q", "P11", "P10", "P01", "P00", "survival"});
  for (std::size_t i = 0; i < phases.size(); ++i) {
    csv.add_row({scan.phi[i], scan.q[i], scan.p11[i], scan.p10[i], scan.p01[i], scan.p00[i], scan.survival[i]});
  }
  out.files.push_back({"parity.csv", csv.str()});

  json warnings = json::array();
  for (const auto& w : shots.front().warnings) warnings.push_back(w);
  out.summary["results"] = {
      {"target", bell_state_name(c.bell_target)},
      {"u_dd_MHz", u},
      {"J_MHz", expected_j(c.drive, u)},
      {"pulse_time_us", shots.front().pulse_time},
      {"coherence", rep.coherence},
      {"fidelity_bound", rep.bound},
      {"fidelity_bound_unconditioned", rep.bound_unconditioned},
      {"population_estimate", rep.population_estimate ? json(*rep.population_estimate) : json(nullptr)},
      {"exact_fidelity", rep.exact_fidelity ? json(*rep.exact_fidelity) : json(nullptr)},
      {"exact_fidelity_unconditioned",
       rep.exact_fidelity_unconditioned ? json(*rep.exact_fidelity_unconditioned) : json(nullptr)},
      {"entangled", rep.entangled},
      {"survival", before.survival},
      {"shots", offsets.size()},
      {"warnings", warnings}};
  return out;
}

ExperimentOutput run_lifetime(const ExperimentConfig& c) {
  require_grid(c.lifetime_delays, "lifetime.delays");
  const LaserDrive resonant{c.lifetime_rabi, 0.0, c.drive.wavelength};
  const auto p = simulate_lifetime(resonant, c.decay_rate, c.lifetime_delays, c.branching);
  const ExponentialFit fit = fit_exponential_decay(c.lifetime_delays, p);

  ExperimentOutput out = start("lifetime", c);
  CsvTable csv({"delay_us", "P_ground"});
  for (std::size_t i = 0; i < p.size(); ++i) csv.add_row({c.lifetime_delays[i], p[i]});
  out.files.push_back({"lifetime.csv", csv.str()});
  out.summary["results"] = {{"tau_us", finite_or_null(fit.tau)},
                            {"tau_infinite", fit.infinite_tau},
                            {"amplitude", fit.amplitude},
                            {"offset", fit.offset},
                            {"expected_tau_us", c.decay_rate > 0.0 ? json(1.0 / c.decay_rate) : json(nullptr)}};
  return out;
}

ExperimentOutput run_recapture(const ExperimentConfig& c) {
  require_grid(c.release_times, "recapture.release_times");
  const std::uint64_t seed = c.required_seed();
  ExperimentOutput out = start("recapture", c);
  CsvTable csv({"release_time_us", "probability", "stderr"});
  json rows = json::array();
  json warnings = json::array();
  for (std::size_t i = 0; i < c.release_times.size(); ++i) {
    TrapParams trap = c.trap;
    trap.release_time = c.release_times[i];
    if (trap.release_time > trap.recapture_window) {
      warnings.push_back("release time " + format_number(trap.release_time) + " us exceeds the recapture window");
    }
    // Each release time gets its own stream family.
    const RecaptureResult r = recapture_probability(trap, c.recapture_samples, seed + 0x9E3779B97F4A7C15ULL * i);
    csv.add_row({trap.release_time, r.probability, r.standard_error});
    rows.push_back({{"release_time_us", trap.release_time},
                    {"probability", r.probability},
                    {"stderr", r.standard_error}});
  }
  out.files.push_back({"recapture.csv", csv.str()});
  out.summary["results"] = {{"points", rows}, {"samples", c.recapture_samples}, {"warnings", warnings}};
  return out;
}

}  // namespace rydress

#include "rydress/output.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rydress {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void CsvTable::add_row(const std::vector<double>& row) {
  if (row.size() != header_.size()) throw std::logic_error("csv row width does not match the header");
  rows_.push_back(row);
}

std::string CsvTable::str() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  return out.str();
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

namespace {

nlohmann::json drive_json(const LaserDrive& d) {
  return {{"rabi_freq_MHz", d.rabi_freq}, {"detuning_MHz", d.detuning}, {"wavelength_nm", d.wavelength}};
}

nlohmann::json potential_json(const PairPotentialModel& m) {
  nlohmann::json j = {{"model", model_name(m)}};
  if (const auto* v = std::get_if<VanDerWaals>(&m)) j["c6_MHz_um6"] = v->c6;
  if (const auto* f = std::get_if<ForsterTwoChannel>(&m)) {
    j["c3_MHz_um3"] = f->c3;
    j["forster_defect_MHz"] = f->forster_defect;
  }
  return j;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["run"] = {{"seed", c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr)}, {"shots", c.shots}, {"strict", c.strict}};
  j["drive"] = drive_json(c.drive);
  nlohmann::json pot = potential_json(c.potential);
  pot["separation_um"] = c.separation;
  pot["u_dd_MHz"] = optional_json(c.u_dd);
  j["potential"] = pot;
  j["microwave"] = {{"rabi_freq_MHz", optional_json(c.mw_rabi)}, {"pulse_time_us", optional_json(c.pulse_time)}};
  j["noise"] = {{"decay_rate_per_us", c.decay_rate},
                {"branching_to_zero", c.branching.to_zero},
                {"branching_to_one", c.branching.to_one},
                {"temperature_uK", c.temperature},
                {"pump_efficiency", c.pump_efficiency},
                {"rydberg_loss_fraction", c.detection.rydberg_loss_fraction},
                {"rydberg_bright_probability", c.detection.rydberg_bright_probability}};
  nlohmann::json drives = nlohmann::json::array();
  for (const auto& d : c.jcurve_drives) drives.push_back(drive_json(d));
  j["jcurve"] = {{"drives", drives}, {"r_grid_um", c.r_grid}};
  j["scan"] = {{"grid_MHz", c.scan_grid}};
  j["rabi"] = {{"times_us", c.rabi_times}};
  j["bell"] = {{"target", bell_state_name(c.bell_target)},
               {"method", c.phi_method == PhiMethod::global_half_pi ? "global_half_pi" : "two_photon"},
               {"phase_points", c.phase_points},
               {"inject_mixture", c.inject_mixture}};
  j["lifetime"] = {{"rabi_freq_MHz", c.lifetime_rabi}, {"delays_us", c.lifetime_delays}};
  j["recapture"] = {{"release_times_us", c.release_times},
                    {"samples", c.recapture_samples},
                    {"waist_um", c.trap.waist},
                    {"depth_mK", c.trap.depth},
                    {"temperature_uK", c.trap.temperature},
                    {"recapture_window_us", c.trap.recapture_window},
                    {"wavelength_nm", c.trap.wavelength}};
  return j;
}

}  // namespace rydress

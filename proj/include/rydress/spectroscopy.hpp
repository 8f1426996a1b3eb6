#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rydress/laser_drive.hpp"

namespace rydress {

/// Populations at the end of a fixed-length microwave pulse, one row per
/// microwave detuning (MHz). Whatever is missing from the four entries sits
/// in Rydberg or dark levels.
struct ScanResult {
  std::vector<double> detuning;
  std::vector<double> p11;
  std::vector<double> p10;
  std::vector<double> p01;
  std::vector<double> p00;

  std::vector<double> p_single() const;
  std::size_t size() const { return detuning.size(); }
};

/// One pulse from |1,1> per grid point with the dressing laser on.
/// mw_rabi is the dressed single-atom Rabi frequency; the grid holds absolute
/// microwave detunings and must be sorted.
ScanResult mw_scan(const LaserDrive& drive, double u_dd, double mw_rabi, double pulse_time,
                   std::span<const double> grid, double decay_rate = 0.0);

/// Lorentzian y = offset + amplitude / (1 + ((x - center) / (width / 2))^2).
struct PeakFit {
  double center = 0.0;
  double width = 0.0;  // FWHM
  double amplitude = 0.0;
  double offset = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
};

double lorentzian(double x, const PeakFit& p);

/// Fits the points with x inside [window.first, window.second]. Needs at
/// least 7 points and an interior maximum; throws FitError otherwise.
PeakFit fit_peak(std::span<const double> x, std::span<const double> y, std::pair<double, double> window);

/// The central lobe around the global maximum: walks outwards while the data
/// keep falling, then pads to at least 7 points.
std::pair<double, double> central_lobe_window(std::span<const double> x, std::span<const double> y);

struct JExtraction {
  PeakFit single;       // P_single channel
  PeakFit double_flip;  // P_{0,0} channel
  double j = 0.0;       // 2 (double-flip center - single-flip center)
};

/// Throws ExtractionError naming the channel without a usable peak.
JExtraction extract_j(const ScanResult& scan);

struct ScanSettings {
  double mw_rabi = 0.0;     // MHz
  double pulse_time = 0.0;  // us
  std::vector<double> grid;
  double expected_j = 0.0;
  double resonance = 0.0;  // dressed single-flip resonance
};

/// Pulse and grid choices that make both the single-flip line and the
/// two-photon line visible for the given interaction.
ScanSettings suggest_scan_settings(const LaserDrive& drive, double u_dd);

}  // namespace rydress

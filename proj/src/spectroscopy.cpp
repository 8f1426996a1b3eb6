#include "rydress/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rydress/dressing.hpp"
#include "rydress/dynamics.hpp"
#include "rydress/errors.hpp"
#include "rydress/fitting.hpp"
#include "rydress/parallel.hpp"

namespace rydress {

namespace {

constexpr std::size_t kMinFitPoints = 7;
// Peaks smaller than this are treated as absent.
constexpr double kMinPeakHeight = 1e-4;

std::size_t argmax(std::span<const double> y) {
  return static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
}

}  // namespace

std::vector<double> ScanResult::p_single() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = p10[i] + p01[i];
  return out;
}

ScanResult mw_scan(const LaserDrive& drive, double u_dd, double mw_rabi, double pulse_time,
                   std::span<const double> grid, double decay_rate) {
  drive.validate();
  if (grid.empty()) throw DomainError("scan grid must be nonempty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("scan grid must be sorted");
  if (!(pulse_time >= 0.0)) throw DomainError("pulse time must be >= 0");
  const double bare = bare_microwave_coupling(drive, mw_rabi);

  ScanResult scan;
  scan.detuning.assign(grid.begin(), grid.end());
  scan.p11.resize(grid.size());
  scan.p10.resize(grid.size());
  scan.p01.resize(grid.size());
  scan.p00.resize(grid.size());

  parallel_for(grid.size(), [&](std::size_t i) {
    PulseSegment seg;
    seg.duration = pulse_time;
    seg.microwave = MicrowaveDrive{bare, grid[i], 0.0};
    if (drive.is_on()) seg.dressing = drive;
    seg.u_dd = u_dd;
    seg.rydberg_decay_rate = decay_rate;
    TwoAtomRegister reg;
    evolve(reg, seg);
    scan.p11[i] = reg.population(Level::one, Level::one);
    scan.p10[i] = reg.population(Level::one, Level::zero);
    scan.p01[i] = reg.population(Level::zero, Level::one);
    scan.p00[i] = reg.population(Level::zero, Level::zero);
  });
  return scan;
}

double lorentzian(double x, const PeakFit& p) {
  const double z = (x - p.center) / (0.5 * p.width);
  return p.offset + p.amplitude / (1.0 + z * z);
}

PeakFit fit_peak(std::span<const double> x, std::span<const double> y, std::pair<double, double> window) {
  if (x.size() != y.size()) throw FitError("peak fit: x and y differ in length");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= window.first && x[i] <= window.second) {
      xs.push_back(x[i]);
      ys.push_back(y[i]);
    }
  }
  if (xs.size() < kMinFitPoints) {
    throw FitError("peak fit: window holds " + std::to_string(xs.size()) + " points, need 7");
  }
  const std::size_t k = argmax(ys);
  if (k == 0 || k + 1 == xs.size()) throw FitError("peak fit: no local maximum inside the window");

  const double y_max = ys[k];
  const double y_min = *std::min_element(ys.begin(), ys.end());
  const double half = 0.5 * (y_max + y_min);
  std::size_t lo = k;
  while (lo > 0 && ys[lo] > half) --lo;
  std::size_t hi = k;
  while (hi + 1 < xs.size() && ys[hi] > half) ++hi;
  double width0 = xs[hi] - xs[lo];
  if (!(width0 > 0.0)) width0 = 2.0 * (xs[1] - xs[0]);

  Eigen::VectorXd x0(4);
  x0 << xs[k], width0, y_max - y_min, y_min;
  const ResidualFunction model = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    const PeakFit trial{p(0), p(1), p(2), p(3), 0.0, 0};
    for (std::size_t i = 0; i < xs.size(); ++i) r(i) = lorentzian(xs[i], trial) - ys[i];
  };
  const LeastSquaresResult fit = least_squares(model, static_cast<int>(xs.size()), x0);

  PeakFit out{fit.params(0), std::abs(fit.params(1)), fit.params(2), fit.params(3), fit.residual_norm,
              fit.iterations};
  if (!fit.converged) {
    throw FitError("peak fit did not converge (" + fit.status + "); last iterate center " +
                   std::to_string(out.center) + ", width " + std::to_string(out.width));
  }
  if (!(out.width > 0.0) || out.amplitude < 0.0) {
    throw FitError("peak fit converged to a dip, not a peak");
  }
  return out;
}

std::pair<double, double> central_lobe_window(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw FitError("central lobe: empty or mismatched data");
  const std::size_t k = argmax(y);
  std::size_t lo = k;
  while (lo > 0 && y[lo - 1] < y[lo]) --lo;
  std::size_t hi = k;
  while (hi + 1 < y.size() && y[hi + 1] < y[hi]) ++hi;
  while (hi - lo + 1 < kMinFitPoints && (lo > 0 || hi + 1 < y.size())) {
    if (lo > 0) --lo;
    if (hi - lo + 1 < kMinFitPoints && hi + 1 < y.size()) ++hi;
  }
  return {x[lo], x[hi]};
}

JExtraction extract_j(const ScanResult& scan) {
  const std::vector<double> single = scan.p_single();
  auto fit_channel = [&](const std::vector<double>& y, const char* name) {
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    if (*hi - *lo < kMinPeakHeight) {
      throw ExtractionError(std::string("no ") + name + " peak in the scan");
    }
    try {
      return fit_peak(scan.detuning, y, central_lobe_window(scan.detuning, y));
    } catch (const FitError& e) {
      throw ExtractionError(std::string(name) + " peak: " + e.what());
    }
  };
  JExtraction out;
  out.single = fit_channel(single, "P_single");
  out.double_flip = fit_channel(scan.p00, "P00");
  out.j = 2.0 * (out.double_flip.center - out.single.center);
  return out;
}

ScanSettings suggest_scan_settings(const LaserDrive& drive, double u_dd) {
  ScanSettings s;
  s.resonance = single_atom_light_shift(drive);
  s.expected_j = drive.is_on() ? j_finite_blockade(drive, u_dd) : 0.0;
  const double abs_j = std::abs(s.expected_j);

  double lo;
  double hi;
  double step;
  if (abs_j < 1e-3) {
    // Noninteracting: a single-atom pi/2 pulse puts both channels on one line.
    s.mw_rabi = 0.05;
    s.pulse_time = 1.0 / (4.0 * s.mw_rabi);
    step = 1.0 / (16.0 * s.pulse_time);
    lo = s.resonance - 64.0 * step;
    hi = s.resonance + 64.0 * step;
  } else {
    s.mw_rabi = abs_j / 10.0;
    // Odd multiple of the enhanced single-flip pi time closest to the
    // two-photon pi time.
    const double t_single = 1.0 / (2.0 * std::sqrt(2.0) * s.mw_rabi);
    const double t_double = abs_j / (4.0 * s.mw_rabi * s.mw_rabi);
    double n = 2.0 * std::floor(0.5 * (t_double / t_single - 1.0) + 0.5) + 1.0;
    n = std::max(n, 1.0);
    s.pulse_time = n * t_single;
    step = std::min(abs_j / 20.0, 1.0 / (16.0 * s.pulse_time));
    const double toward = 0.8 * abs_j;
    const double away = 0.5 * abs_j;
    lo = s.resonance - (s.expected_j < 0.0 ? toward : away);
    hi = s.resonance + (s.expected_j < 0.0 ? away : toward);
  }
  const auto n_points = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
  s.grid.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) s.grid[i] = lo + step * static_cast<double>(i);
  return s;
}

}  // namespace rydress

#include "rydress/dressing.hpp"

#include <cmath>

#include "rydress/branch_tracking.hpp"
#include "rydress/constants.hpp"
#include "rydress/errors.hpp"

namespace rydress {

void LaserDrive::validate() const {
  if (!(rabi_freq >= 0.0)) throw DomainError("laser drive: rabi_freq must be >= 0");
  if (!(wavelength > 0.0)) throw DomainError("laser drive: wavelength must be > 0");
}

namespace {

void require_branch(const LaserDrive& drive) {
  drive.validate();
  if (drive.detuning == 0.0 && drive.rabi_freq > 0.0) {
    throw DomainError(
        "degenerate branch: detuning must be nonzero to define the ground-connected branch");
  }
}

double sign(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Ground-connected eigenvalue of [[0, c], [c, -delta]], written without the
// cancellation in (-delta + sign(delta) sqrt(delta^2 + 4c^2)) / 2.
double two_level_shift(double coupling, double delta) {
  const double root = std::hypot(delta, 2.0 * coupling);
  return sign(delta) * 2.0 * coupling * coupling / (std::abs(delta) + root);
}

// Newton polish of the ground branch of the symmetric three-level problem
// using the secular function divided by (w - E), which stays well scaled
// when |u_dd| is many orders of magnitude above the drive.
double polish_three_level_root(double energy, double delta, double c2, double w) {
  double e = energy;
  for (int it = 0; it < 30; ++it) {
    const double gap = w - e;
    const double g = e * (delta + e) - c2 + e * c2 / gap;
    const double dg = delta + 2.0 * e + c2 / gap + e * c2 / (gap * gap);
    if (dg == 0.0) break;
    const double step = g / dg;
    e -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(e))) break;
  }
  const double scale = 1.0 + std::abs(energy);
  return std::abs(e - energy) < 1e-5 * scale ? e : energy;
}

}  // namespace

double single_atom_light_shift(const LaserDrive& drive) {
  drive.validate();
  if (drive.rabi_freq == 0.0) return 0.0;
  require_branch(drive);
  return two_level_shift(drive.rabi_freq / 2.0, drive.detuning);
}

DressedAmplitudes dressed_ground_amplitude(const LaserDrive& drive) {
  require_branch(drive);
  if (drive.rabi_freq == 0.0) return {1.0, 0.0};
  const double root = std::hypot(drive.detuning, drive.rabi_freq);
  // |Delta| keeps the ground-connected branch for red detuning as well.
  const double p_ground = 0.5 * (std::abs(drive.detuning) / root + 1.0);
  return {std::sqrt(p_ground), std::sqrt(1.0 - p_ground)};
}

double j_perfect_blockade(const LaserDrive& drive) {
  drive.validate();
  if (drive.rabi_freq == 0.0) return 0.0;
  require_branch(drive);
  const double d = drive.detuning;
  const double w = drive.rabi_freq;
  return 0.5 * (d + sign(d) * (std::sqrt(d * d + 2.0 * w * w) - 2.0 * std::sqrt(d * d + w * w)));
}

double j_finite_blockade(const LaserDrive& drive, double u_dd) {
  drive.validate();
  if (drive.rabi_freq == 0.0) return 0.0;
  require_branch(drive);
  if (!std::isfinite(u_dd)) throw DomainError("j_finite_blockade: u_dd must be finite");

  const double delta = drive.detuning;
  const double w_rr = -2.0 * delta + u_dd;
  const double c_full = drive.rabi_freq / std::sqrt(2.0);

  auto hamiltonian = [&](double s) {
    const double c = s * c_full;
    Eigen::Matrix3d h;
    h << 0.0, c, 0.0,
         c, -delta, c,
         0.0, c, w_rr;
    return Eigen::MatrixXd(h);
  };
  const TrackedBranch branch = track_branch(hamiltonian, Eigen::Vector3d::UnitX());
  const double e2 = polish_three_level_root(branch.energy, delta, c_full * c_full, w_rr);
  return e2 - 2.0 * single_atom_light_shift(drive);
}

double j_for_shift(const LaserDrive& drive, const PairShift& shift) {
  return shift.is_perfect_blockade() ? j_perfect_blockade(drive)
                                     : j_finite_blockade(drive, shift.mhz());
}

DressedSpectrum dressed_spectrum(const LaserDrive& drive, const PairShift& shift) {
  DressedSpectrum out;
  out.single_atom_shift = single_atom_light_shift(drive);
  out.j = j_for_shift(drive, shift);
  out.two_atom_shift = out.j + 2.0 * out.single_atom_shift;
  const DressedAmplitudes amps = dressed_ground_amplitude(drive);
  out.ground_amplitude = amps.ground;
  out.rydberg_amplitude = amps.rydberg;
  return out;
}

std::vector<JCurvePoint> j_vs_r(const LaserDrive& drive, const PairPotentialModel& model,
                                std::span<const double> r_grid) {
  std::vector<JCurvePoint> curve;
  curve.reserve(r_grid.size());
  for (double r : r_grid) {
    curve.push_back({r, j_for_shift(drive, u_dd(model, r))});
  }
  return curve;
}

double doppler_detuning_sigma(double temperature_uk, double wavelength_nm, double mass_amu) {
  if (!(temperature_uk >= 0.0)) throw DomainError("temperature must be >= 0");
  if (!(wavelength_nm > 0.0)) throw DomainError("wavelength must be > 0");
  if (!(mass_amu > 0.0)) throw DomainError("atom mass must be > 0");
  const double v_rms = std::sqrt(constants::boltzmann * temperature_uk * 1e-6 /
                                 (mass_amu * constants::atomic_mass_unit));
  return v_rms / (wavelength_nm * 1e-9) * 1e-6;
}

}  // namespace rydress

#pragma once

#include <array>
#include <cstdint>

#include "rydress/two_atom_register.hpp"

namespace rydress {

enum class Outcome : int { bright = 0, dark = 1, lost = 2 };

/// How levels show up in state-selective fluorescence: |0> is bright, |1> is
/// dark and |d> is lost. Leftover Rydberg population is lost with
/// `rydberg_loss_fraction`; the recaptured remainder has decayed and reads
/// bright with `rydberg_bright_probability`.
struct DetectionModel {
  double rydberg_loss_fraction = 1.0;
  double rydberg_bright_probability = 9.0 / 16.0;

  void validate() const;
};

struct MeasurementRecord {
  /// joint[o1][o2], outcomes indexed by Outcome.
  std::array<std::array<double, 3>, 3> joint{};
  double survival = 0.0;  // neither atom lost
  // Conditioned on survival; all zero when nothing survives.
  double p11 = 0.0;
  double p10 = 0.0;
  double p01 = 0.0;
  double p00 = 0.0;

  double parity() const { return p11 + p00 - p10 - p01; }
};

MeasurementRecord detect(const TwoAtomRegister& reg, const DetectionModel& model = {});

/// Optical pumping leaves each atom in |0> with probability pump_efficiency
/// and in |1> otherwise; a global pi rotation then transfers the target to
/// |1,1>.
TwoAtomRegister prepare_initial(double pump_efficiency);

struct TrapParams {
  double waist = 1.29;             // um, 1/e^2 radius
  double depth = 1.0;              // mK
  double temperature = 20.0;       // uK
  double release_time = 0.0;       // us
  double recapture_window = 10.0;  // us
  double wavelength = 938.0;       // nm
  double mass_amu = 0.0;           // 0 selects cesium

  void validate() const;
};

struct RecaptureResult {
  double probability = 0.0;
  double standard_error = 0.0;  // binomial
  std::uint64_t samples = 0;
};

/// Thermal atoms in the harmonic approximation of a Gaussian tweezer are
/// released, fall ballistically under gravity and count as recaptured when
/// their total energy in the restored trap is negative.
RecaptureResult recapture_probability(const TrapParams& trap, std::uint64_t n_samples, std::uint64_t seed);

}  // namespace rydress

#pragma once

#include "rydress/constants.hpp"

namespace rydress {

/// The 319-nm dressing laser coupling |0> to the Rydberg level |r>.
/// rabi_freq and detuning are ordinary frequencies in MHz (Omega_L/2pi,
/// Delta_L/2pi); positive detuning is blue of the bare resonance.
struct LaserDrive {
  double rabi_freq = 0.0;
  double detuning = 0.0;
  double wavelength = constants::dressing_wavelength_nm;

  /// Throws DomainError when rabi_freq < 0 or wavelength <= 0.
  void validate() const;

  bool is_on() const { return rabi_freq > 0.0; }
};

}  // namespace rydress

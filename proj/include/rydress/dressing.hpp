#pragma once

#include <span>
#include <vector>

#include "rydress/laser_drive.hpp"
#include "rydress/pair_potential.hpp"

namespace rydress {

struct DressedAmplitudes {
  double ground = 1.0;   // |<0|dressed>|
  double rydberg = 0.0;  // |<r|dressed>|
};

struct DressedSpectrum {
  double single_atom_shift = 0.0;  // MHz
  double two_atom_shift = 0.0;     // MHz
  double j = 0.0;                  // two_atom_shift - 2 single_atom_shift
  double ground_amplitude = 1.0;
  double rydberg_amplitude = 0.0;
};

/// Light shift of the dressed ground state: the eigenvalue of
/// [[0, Omega/2], [Omega/2, -Delta]] that tends to 0 as Omega -> 0.
/// Throws DomainError when Delta == 0 while Omega > 0.
double single_atom_light_shift(const LaserDrive& drive);

/// Bare |0> and |r> amplitudes of the dressed ground state.
DressedAmplitudes dressed_ground_amplitude(const LaserDrive& drive);

/// Closed-form J for an infinitely strong pair shift (perfect blockade).
double j_perfect_blockade(const LaserDrive& drive);

/// J for a finite pair shift, from the three-level symmetric two-atom
/// problem {|00>, (|0r>+|r0>)/sqrt2, |rr>} with the dressed ground branch
/// followed adiabatically from Omega = 0.
double j_finite_blockade(const LaserDrive& drive, double u_dd);

/// Dispatches to the perfect-blockade closed form or the finite solve.
double j_for_shift(const LaserDrive& drive, const PairShift& shift);

DressedSpectrum dressed_spectrum(const LaserDrive& drive, const PairShift& shift);

struct JCurvePoint {
  double r = 0.0;  // um
  double j = 0.0;  // MHz
};

std::vector<JCurvePoint> j_vs_r(const LaserDrive& drive, const PairPotentialModel& model,
                                std::span<const double> r_grid);

/// One-sigma width (MHz) of the Doppler detuning noise along the beam,
/// v_rms / lambda with v_rms = sqrt(kB T / m).
double doppler_detuning_sigma(double temperature_uk, double wavelength_nm, double mass_amu);

}  // namespace rydress

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rydress/dynamics.hpp"
#include "rydress/laser_drive.hpp"
#include "rydress/measurement.hpp"
#include "rydress/two_atom_register.hpp"

namespace rydress {

/// Single-atom qubit rotation exp[-i (angle/2)(cos(phase) sx + sin(phase) sy)]
/// with the Pauli matrices written in the (|0>, |1>) basis; identity on |r>
/// and |d>.
Matrix4c qubit_rotation(double angle, double phase);

/// Applies the same undressed rotation to both atoms.
TwoAtomRegister global_rotation(const TwoAtomRegister& reg, double angle, double phase);

enum class BellState { psi_plus, phi_plus };

std::string bell_state_name(BellState state);

/// (|0,1> + |1,0>)/sqrt2 or (|0,0> + |1,1>)/sqrt2.
Vector16c bell_state(BellState state);

/// Overlap with the target. Conditioned fidelity renormalizes the qubit
/// block first (both atoms present and in {|0>, |1>}). The phi_plus fidelity
/// is maximized over the relative phase of |0,0> and |1,1>.
double bell_fidelity(const TwoAtomRegister& reg, BellState target, bool conditioned = true);

struct PreparationResult {
  TwoAtomRegister reg;
  double pulse_time = 0.0;  // us
  std::vector<std::string> warnings;
};

struct BellOptions {
  DecayBranching branching;
  std::optional<TwoAtomRegister> initial;  // |1,1> when unset
  double detuning_offset = 0.0;            // MHz added to the laser detuning
  bool strict = false;  // blockade-validity warnings become ProtocolError
};

/// Blockaded microwave pi pulse of length 1/(2 sqrt2 mw_rabi) on the dressed
/// single-flip resonance. mw_rabi is the dressed single-atom Rabi frequency.
PreparationResult prepare_psi_plus(const LaserDrive& drive, double u_dd, double mw_rabi, double decay_rate,
                                   const BellOptions& options = {});

enum class PhiMethod { global_half_pi, two_photon };

struct PhiPlusOptions {
  double phase = 0.0;                // rad, phase of the rotation or microwave
  std::optional<LaserDrive> dressing;  // must be off for global_half_pi
  double u_dd = 0.0;
  double mw_rabi = 0.0;  // two_photon only
  double decay_rate = 0.0;
  DecayBranching branching;
};

/// global_half_pi rotates a Psi+ register by pi/2. two_photon drives
/// |1,1> <-> |0,0> with a pi/2 pulse detuned by J/2 from the dressed
/// resonance; its input is normally |1,1>.
PreparationResult prepare_phi_plus(const TwoAtomRegister& reg, PhiMethod method, const PhiPlusOptions& options);

struct ParityScan {
  std::vector<double> phi;
  std::vector<double> q;
  std::vector<double> p11;
  std::vector<double> p10;
  std::vector<double> p01;
  std::vector<double> p00;
  std::vector<double> survival;
};

/// Analysis pi/2 pulse at each phase followed by detection. The analysis
/// phase is referenced to the y axis of the rotation, so Phi+ oscillates as
/// +cos(2 phi).
ParityScan parity_scan(const TwoAtomRegister& reg, std::span<const double> phases,
                       const DetectionModel& detection = {});

struct FidelityReport {
  double coherence = 0.0;  // 2|rho_offdiag| estimated from Q(phi)
  double bound = 0.0;
  double bound_unconditioned = 0.0;  // bound times the mean survival
  std::optional<double> population_estimate;
  std::optional<double> exact_fidelity;
  std::optional<double> exact_fidelity_unconditioned;
  bool entangled = false;
};

/// psi_plus: coherence = mean Q. phi_plus: amplitude of the cos/sin(2 phi)
/// terms of a linear least-squares fit. The phase grid must be uniform and
/// span at least pi.
FidelityReport fidelity_report(const ParityScan& scan, BellState target,
                               const std::optional<MeasurementRecord>& before_pulse = std::nullopt,
                               const std::optional<TwoAtomRegister>& exact = std::nullopt);

}  // namespace rydress

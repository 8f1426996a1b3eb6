#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rydress/laser_drive.hpp"
#include "rydress/two_atom_register.hpp"

namespace rydress {

/// Microwave (or Raman) drive on the clock transition |1> <-> |0>.
/// rabi_freq is the bare coupling Omega_mw/2pi in MHz, detuning delta_mw in
/// MHz, phase in radians.
struct MicrowaveDrive {
  double rabi_freq = 0.0;
  double detuning = 0.0;
  double phase = 0.0;
};

/// Fractions of Rydberg decay returning to |0> and |1>; the remainder goes to
/// the dark level.
struct DecayBranching {
  double to_zero = 0.0;
  double to_one = 0.0;
};

/// One piecewise-constant stretch of drives.
struct PulseSegment {
  double duration = 0.0;  // us
  std::optional<MicrowaveDrive> microwave;
  std::optional<LaserDrive> dressing;
  double u_dd = 0.0;               // MHz, shift of |r,r>
  double rydberg_decay_rate = 0.0;  // 1/us
  DecayBranching branching;

  void validate() const;
};

struct PulseSequence {
  std::vector<PulseSegment> segments;
  std::uint64_t seed = 0;

  double total_duration() const;
  void validate() const;
};

struct CollapseChannel {
  Matrix16c op;
  double rate = 0.0;  // 1/us
};

/// H/h in MHz in the doubly rotating frame (microwave frame on |1>-|0>,
/// optical frame on |0>-|r>). |d> is uncoupled.
Matrix16c build_hamiltonian(const PulseSegment& segment);

/// Per-atom Rydberg decay channels with nonzero rate.
std::vector<CollapseChannel> collapse_channels(const PulseSegment& segment);

/// Superoperator acting on column-major vec(rho) for
/// d rho/dt = -i 2 pi [H, rho] + sum_k rate_k D[L_k] rho.
Eigen::MatrixXcd liouvillian(const Matrix16c& hamiltonian, const std::vector<CollapseChannel>& channels);

/// Largest angular frequency (rad/us) in the generator: 2 pi times the
/// Hamiltonian spectral width plus the total decay rate.
double max_angular_frequency(const PulseSegment& segment);

/// Exact propagation within one segment for arbitrary step sizes.
/// Unitary segments use the Hamiltonian eigendecomposition. Dissipative
/// segments use cached Pade exponentials of the Liouvillian and switch to a
/// Liouvillian eigendecomposition once many distinct step sizes are
/// requested (when that decomposition is well conditioned).
class SegmentPropagator {
 public:
  /// expected_steps is a hint: when many distinct steps are coming, a
  /// dissipative propagator diagonalizes its generator straight away.
  explicit SegmentPropagator(const PulseSegment& segment, std::size_t expected_steps = 1);

  bool is_unitary() const { return unitary_; }

  /// Evolves `reg` by dt microseconds. Throws NumericalError when the trace
  /// drifts by more than 1e-6.
  void advance(TwoAtomRegister& reg, double dt);

 private:
  void advance_unitary(TwoAtomRegister& reg, double dt) const;
  void advance_dissipative(TwoAtomRegister& reg, double dt);
  bool try_diagonalize();

  bool unitary_ = true;
  Eigen::Matrix<double, kDim, 1> energies_;
  Matrix16c eigenvectors_;

  Eigen::MatrixXcd generator_;
  std::map<double, Eigen::MatrixXcd> pade_cache_;
  int distinct_steps_ = 0;
  bool diagonalization_tried_ = false;
  bool diagonalized_ = false;
  Eigen::VectorXcd modes_;
  Eigen::MatrixXcd right_;
  Eigen::MatrixXcd left_;
};

/// Evolves the register through a whole segment.
void evolve(TwoAtomRegister& reg, const PulseSegment& segment);

/// Fixed-step fourth-order Runge-Kutta integration of the same master
/// equation, with dt = 1 / (steps_per_radian * max_angular_frequency).
/// Serves as an independent reference for the exact propagators.
void evolve_rk4(TwoAtomRegister& reg, const PulseSegment& segment, double steps_per_radian = 50.0);

/// Pure-state RK4 for unitary segments (decay rates must be zero).
Vector16c evolve_ket_rk4(const Vector16c& ket, const PulseSegment& segment,
                         double steps_per_radian = 50.0);

struct Trajectory {
  std::vector<double> times;
  std::vector<Populations> populations;

  std::vector<double> p11() const;
  std::vector<double> p_single() const;  // P(1,0) + P(0,1)
  std::vector<double> p00() const;
};

/// Populations of the 16 basis states at the requested (sorted) times.
Trajectory run_sequence(const TwoAtomRegister& initial, const PulseSequence& sequence,
                        std::span<const double> sample_times);

/// Running maxima over every propagation step in the process, for
/// numerical-hygiene reporting.
struct HygieneStats {
  double max_trace_drift = 0.0;
  double max_unitary_purity_drift = 0.0;
  std::uint64_t steps = 0;
};
HygieneStats hygiene_stats();
void reset_hygiene_stats();

// ---------------------------------------------------------------------------
// Experiments

/// Bare microwave coupling that gives a single dressed atom the Rabi
/// frequency `dressed_rabi`. The dressed transition |1> <-> |0~> couples with
/// the bare rate times the ground amplitude of the dressed state.
double bare_microwave_coupling(const LaserDrive& drive, double dressed_rabi);

struct RabiOptions {
  DecayBranching branching;
  double detuning_offset = 0.0;  // MHz added to Delta_L (Doppler shot)
};

struct RabiCurves {
  std::vector<double> times;
  std::vector<double> p11;
  std::vector<double> p_single;
  std::vector<double> p00;
  Trajectory trajectory;
};

/// Two atoms start in |1,1>; the dressing laser and the microwave run
/// together with the microwave on the dressed single-flip resonance.
/// mw_rabi is the dressed single-atom Rabi frequency.
RabiCurves simulate_blockaded_rabi(const LaserDrive& drive, double u_dd, double mw_rabi,
                                   double decay_rate, std::span<const double> times,
                                   const RabiOptions& options = {});

/// Same drive on a single atom (the partner parked in |d>); returns the
/// probability of finding the atom in |1>.
std::vector<double> simulate_single_atom_rabi(const LaserDrive& drive, double mw_rabi,
                                              double decay_rate, std::span<const double> times,
                                              const RabiOptions& options = {});

/// Two resonant optical pi pulses separated by a free-decay delay, atom 1
/// starting in |0> and atom 2 idle in |1>. Returns the probability of atom 1
/// being back in |0> for every delay.
std::vector<double> simulate_lifetime(const LaserDrive& drive, double decay_rate,
                                      std::span<const double> delays,
                                      const DecayBranching& branching = {});

}  // namespace rydress

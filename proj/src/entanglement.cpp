#include "rydress/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

#include "rydress/constants.hpp"
#include "rydress/dressing.hpp"
#include "rydress/errors.hpp"
#include "rydress/parallel.hpp"

namespace rydress {

namespace {

constexpr int i1 = static_cast<int>(Level::one);
constexpr int i0 = static_cast<int>(Level::zero);

constexpr std::array<int, 4> kQubitIndices = {basis_index(Level::one, Level::one), basis_index(Level::one, Level::zero),
                                              basis_index(Level::zero, Level::one),
                                              basis_index(Level::zero, Level::zero)};

}  // namespace

Matrix4c qubit_rotation(double angle, double phase) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const Complex minus_i(0.0, -1.0);
  Matrix4c u = Matrix4c::Identity();
  u(i1, i1) = c;
  u(i0, i0) = c;
  u(i0, i1) = minus_i * s * std::polar(1.0, -phase);
  u(i1, i0) = minus_i * s * std::polar(1.0, phase);
  return u;
}

TwoAtomRegister global_rotation(const TwoAtomRegister& reg, double angle, double phase) {
  const Matrix4c u = qubit_rotation(angle, phase);
  const Matrix16c uu = Eigen::kroneckerProduct(u, u);
  TwoAtomRegister out = reg;
  out.assign(uu * reg.density() * uu.adjoint());
  return out;
}

std::string bell_state_name(BellState state) { return state == BellState::psi_plus ? "psi_plus" : "phi_plus"; }

Vector16c bell_state(BellState state) {
  const double a = 1.0 / std::sqrt(2.0);
  if (state == BellState::psi_plus) {
    return a * (product_ket(Level::zero, Level::one) + product_ket(Level::one, Level::zero));
  }
  return a * (product_ket(Level::zero, Level::zero) + product_ket(Level::one, Level::one));
}

double bell_fidelity(const TwoAtomRegister& reg, BellState target, bool conditioned) {
  const Matrix16c& rho = reg.density();
  double norm = 1.0;
  if (conditioned) {
    norm = 0.0;
    for (int k : kQubitIndices) norm += rho(k, k).real();
    if (!(norm > 0.0)) return 0.0;
  }
  if (target == BellState::psi_plus) {
    const Vector16c psi = bell_state(target);
    return (psi.adjoint() * rho * psi)(0, 0).real() / norm;
  }
  const int a = basis_index(Level::zero, Level::zero);
  const int b = basis_index(Level::one, Level::one);
  return (0.5 * (rho(a, a).real() + rho(b, b).real()) + std::abs(rho(a, b))) / norm;
}

PreparationResult prepare_psi_plus(const LaserDrive& drive, double u_dd, double mw_rabi, double decay_rate,
                                   const BellOptions& options) {
  drive.validate();
  if (!(mw_rabi >= 0.0)) throw DomainError("microwave Rabi frequency must be >= 0");
  PreparationResult out{options.initial.value_or(TwoAtomRegister()), 0.0, {}};
  if (mw_rabi == 0.0) return out;

  const double j = drive.is_on() ? j_finite_blockade(drive, u_dd) : 0.0;
  if (std::abs(j) < 5.0 * mw_rabi) {
    const std::string msg = "microwave Rabi frequency " + std::to_string(mw_rabi) +
                            " MHz is not small against |J| = " + std::to_string(std::abs(j)) +
                            " MHz (want |J| >= 5 mw_rabi)";
    if (options.strict) throw ProtocolError(msg);
    out.warnings.push_back(msg);
  }

  PulseSegment seg;
  seg.duration = 1.0 / (2.0 * std::sqrt(2.0) * mw_rabi);
  seg.microwave = MicrowaveDrive{bare_microwave_coupling(drive, mw_rabi), single_atom_light_shift(drive), 0.0};
  if (drive.is_on()) {
    LaserDrive shifted = drive;
    shifted.detuning += options.detuning_offset;
    seg.dressing = shifted;
  }
  seg.u_dd = u_dd;
  seg.rydberg_decay_rate = decay_rate;
  seg.branching = options.branching;
  evolve(out.reg, seg);
  out.pulse_time = seg.duration;
  return out;
}

PreparationResult prepare_phi_plus(const TwoAtomRegister& reg, PhiMethod method, const PhiPlusOptions& options) {
  const bool dressed = options.dressing && options.dressing->is_on();
  PreparationResult out{reg, 0.0, {}};
  if (method == PhiMethod::global_half_pi) {
    if (dressed) throw ProtocolError("global_half_pi needs the dressing laser off");
    out.reg = global_rotation(reg, constants::pi / 2.0, options.phase);
    return out;
  }

  if (!dressed) throw ProtocolError("two_photon needs the dressing laser on");
  const LaserDrive& drive = *options.dressing;
  drive.validate();
  if (!(options.mw_rabi >= 0.0)) throw DomainError("microwave Rabi frequency must be >= 0");
  if (options.mw_rabi == 0.0) return out;
  const double j = j_finite_blockade(drive, options.u_dd);
  if (std::abs(j) < 1e-9) throw ProtocolError("two_photon needs a nonzero interaction J");

  PulseSegment seg;
  seg.duration = std::abs(j) / (8.0 * options.mw_rabi * options.mw_rabi);
  seg.microwave = MicrowaveDrive{bare_microwave_coupling(drive, options.mw_rabi),
                                 single_atom_light_shift(drive) + 0.5 * j, options.phase};
  seg.dressing = drive;
  seg.u_dd = options.u_dd;
  seg.rydberg_decay_rate = options.decay_rate;
  seg.branching = options.branching;
  evolve(out.reg, seg);
  out.pulse_time = seg.duration;
  out.warnings.push_back("two_photon preparation: lower fidelity than global_half_pi");
  return out;
}

ParityScan parity_scan(const TwoAtomRegister& reg, std::span<const double> phases, const DetectionModel& detection) {
  const std::size_t n = phases.size();
  ParityScan scan;
  scan.phi.assign(phases.begin(), phases.end());
  scan.q.resize(n);
  scan.p11.resize(n);
  scan.p10.resize(n);
  scan.p01.resize(n);
  scan.p00.resize(n);
  scan.survival.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const TwoAtomRegister rotated = global_rotation(reg, constants::pi / 2.0, phases[i] + constants::pi / 2.0);
    const MeasurementRecord rec = detect(rotated, detection);
    scan.p11[i] = rec.p11;
    scan.p10[i] = rec.p10;
    scan.p01[i] = rec.p01;
    scan.p00[i] = rec.p00;
    scan.q[i] = rec.parity();
    scan.survival[i] = rec.survival;
  });
  return scan;
}

FidelityReport fidelity_report(const ParityScan& scan, BellState target,
                               const std::optional<MeasurementRecord>& before_pulse,
                               const std::optional<TwoAtomRegister>& exact) {
  const std::size_t n = scan.phi.size();
  if (n < 3 || scan.q.size() != n) throw DomainError("parity scan needs at least 3 phases");
  const double step = (scan.phi.back() - scan.phi.front()) / static_cast<double>(n - 1);
  if (!(step > 0.0)) throw DomainError("parity phases must increase");
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(scan.phi[i] - scan.phi[i - 1] - step) > 1e-9 * std::max(1.0, step)) {
      throw DomainError("parity phases must be uniformly spaced");
    }
  }
  if (step * static_cast<double>(n) < constants::pi * (1.0 - 1e-9)) {
    throw DomainError("parity phases must cover at least one period (pi)");
  }

  FidelityReport rep;
  if (target == BellState::psi_plus) {
    rep.coherence = std::accumulate(scan.q.begin(), scan.q.end(), 0.0) / static_cast<double>(n);
  } else {
    Eigen::MatrixXd basis(n, 3);
    Eigen::VectorXd q(n);
    for (std::size_t i = 0; i < n; ++i) {
      basis(i, 0) = 1.0;
      basis(i, 1) = std::cos(2.0 * scan.phi[i]);
      basis(i, 2) = std::sin(2.0 * scan.phi[i]);
      q(i) = scan.q[i];
    }
    const Eigen::Vector3d coef = basis.colPivHouseholderQr().solve(q);
    rep.coherence = std::hypot(coef(1), coef(2));
  }
  rep.bound = std::clamp(rep.coherence, 0.0, 1.0);
  const double survival =
      scan.survival.empty() ? 1.0
                            : std::accumulate(scan.survival.begin(), scan.survival.end(), 0.0) / scan.survival.size();
  rep.bound_unconditioned = std::clamp(rep.coherence * survival, 0.0, 1.0);
  rep.entangled = rep.bound > 0.5;

  if (before_pulse) {
    const double pop = target == BellState::psi_plus ? before_pulse->p01 + before_pulse->p10
                                                     : before_pulse->p00 + before_pulse->p11;
    rep.population_estimate = std::clamp(0.5 * pop + 0.5 * rep.coherence, 0.0, 1.0);
  }
  if (exact) {
    rep.exact_fidelity = bell_fidelity(*exact, target, true);
    rep.exact_fidelity_unconditioned = bell_fidelity(*exact, target, false);
  }
  return rep;
}

}  // namespace rydress

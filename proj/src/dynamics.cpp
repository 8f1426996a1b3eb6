#include "rydress/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "rydress/constants.hpp"
#include "rydress/dressing.hpp"
#include "rydress/errors.hpp"

namespace rydress {

namespace {

constexpr double kTraceDriftTol = 1e-6;
constexpr int kPadeStepsBeforeDiagonalizing = 8;
constexpr std::size_t kPadeCacheLimit = 64;

std::atomic<double> g_max_trace_drift{0.0};
std::atomic<double> g_max_purity_drift{0.0};
std::atomic<std::uint64_t> g_steps{0};

void atomic_max(std::atomic<double>& target, double value) {
  double current = target.load(std::memory_order_relaxed);
  while (value > current && !target.compare_exchange_weak(current, value, std::memory_order_relaxed)) {
  }
}

int idx(Level l) { return static_cast<int>(l); }

Matrix4c single_atom_hamiltonian(const PulseSegment& s) {
  Matrix4c h = Matrix4c::Zero();
  const double mw_detuning = s.microwave ? s.microwave->detuning : 0.0;
  if (s.microwave) {
    const Complex coupling = 0.5 * s.microwave->rabi_freq * std::polar(1.0, -s.microwave->phase);
    h(idx(Level::zero), idx(Level::one)) = coupling;
    h(idx(Level::one), idx(Level::zero)) = std::conj(coupling);
  }
  h(idx(Level::zero), idx(Level::zero)) = -mw_detuning;
  const double laser_detuning = s.dressing ? s.dressing->detuning : 0.0;
  if (s.dressing) {
    h(idx(Level::rydberg), idx(Level::zero)) = 0.5 * s.dressing->rabi_freq;
    h(idx(Level::zero), idx(Level::rydberg)) = 0.5 * s.dressing->rabi_freq;
  }
  h(idx(Level::rydberg), idx(Level::rydberg)) = -(laser_detuning + mw_detuning);
  return h;
}

Matrix16c embed(const Matrix4c& op, int atom) {
  const Matrix4c id = Matrix4c::Identity();
  return atom == 0 ? Matrix16c(Eigen::kroneckerProduct(op, id)) : Matrix16c(Eigen::kroneckerProduct(id, op));
}

void check_trace_drift(double before, double after, double dt) {
  const double drift = std::abs(after - before);
  atomic_max(g_max_trace_drift, drift);
  g_steps.fetch_add(1, std::memory_order_relaxed);
  if (drift > kTraceDriftTol) {
    std::ostringstream msg;
    msg << "trace drift " << drift << " exceeds " << kTraceDriftTol << " over a step of " << dt << " us";
    throw NumericalError(msg.str());
  }
}

}  // namespace

void PulseSegment::validate() const {
  if (!(duration >= 0.0)) throw DomainError("pulse segment: duration must be >= 0");
  if (microwave && !(microwave->rabi_freq >= 0.0)) {
    throw DomainError("pulse segment: microwave rabi_freq must be >= 0");
  }
  if (dressing) dressing->validate();
  if (!std::isfinite(u_dd)) throw DomainError("pulse segment: u_dd must be finite");
  if (!(rydberg_decay_rate >= 0.0)) throw DomainError("pulse segment: rydberg_decay_rate must be >= 0");
  if (branching.to_zero < 0.0 || branching.to_one < 0.0 || branching.to_zero + branching.to_one > 1.0) {
    throw DomainError("pulse segment: decay branching fractions must be in [0, 1] and sum to <= 1");
  }
}

double PulseSequence::total_duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

void PulseSequence::validate() const {
  if (segments.empty()) throw DomainError("pulse sequence must contain at least one segment");
  for (const auto& s : segments) s.validate();
}

Matrix16c build_hamiltonian(const PulseSegment& segment) {
  const Matrix4c h = single_atom_hamiltonian(segment);
  Matrix16c total = embed(h, 0) + embed(h, 1);
  const int rr = basis_index(Level::rydberg, Level::rydberg);
  total(rr, rr) += segment.u_dd;
  return total;
}

std::vector<CollapseChannel> collapse_channels(const PulseSegment& segment) {
  std::vector<CollapseChannel> channels;
  const double gamma = segment.rydberg_decay_rate;
  if (gamma == 0.0) return channels;
  const DecayBranching& b = segment.branching;
  const std::pair<Level, double> targets[] = {
      {Level::dark, (1.0 - b.to_zero - b.to_one) * gamma},
      {Level::zero, b.to_zero * gamma},
      {Level::one, b.to_one * gamma},
  };
  for (const auto& [target, rate] : targets) {
    if (rate <= 0.0) continue;
    Matrix4c jump = Matrix4c::Zero();
    jump(idx(target), idx(Level::rydberg)) = 1.0;
    for (int atom = 0; atom < 2; ++atom) channels.push_back({embed(jump, atom), rate});
  }
  return channels;
}

Eigen::MatrixXcd liouvillian(const Matrix16c& hamiltonian, const std::vector<CollapseChannel>& channels) {
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(kDim, kDim);
  const Eigen::MatrixXcd h = hamiltonian;
  const Complex minus_i_two_pi(0.0, -constants::two_pi);
  Eigen::MatrixXcd gen = minus_i_two_pi * (Eigen::MatrixXcd(Eigen::kroneckerProduct(id, h)) -
                                           Eigen::MatrixXcd(Eigen::kroneckerProduct(h.transpose(), id)));
  for (const auto& ch : channels) {
    const Eigen::MatrixXcd a = ch.op;
    const Eigen::MatrixXcd ada = a.adjoint() * a;
    gen += ch.rate * (Eigen::MatrixXcd(Eigen::kroneckerProduct(a.conjugate(), a)) -
                      0.5 * Eigen::MatrixXcd(Eigen::kroneckerProduct(id, ada)) -
                      0.5 * Eigen::MatrixXcd(Eigen::kroneckerProduct(ada.transpose(), id)));
  }
  return gen;
}

double max_angular_frequency(const PulseSegment& segment) {
  Eigen::SelfAdjointEigenSolver<Matrix16c> solver(build_hamiltonian(segment), Eigen::EigenvaluesOnly);
  const auto& e = solver.eigenvalues();
  double total_rate = 0.0;
  for (const auto& ch : collapse_channels(segment)) total_rate += ch.rate;
  return constants::two_pi * (e.maxCoeff() - e.minCoeff()) + total_rate;
}

// ---------------------------------------------------------------------------

SegmentPropagator::SegmentPropagator(const PulseSegment& segment, std::size_t expected_steps) {
  segment.validate();
  const Matrix16c h = build_hamiltonian(segment);
  const auto channels = collapse_channels(segment);
  unitary_ = channels.empty();
  if (unitary_) {
    Eigen::SelfAdjointEigenSolver<Matrix16c> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalError("Hamiltonian eigendecomposition failed");
    energies_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
  } else {
    generator_ = liouvillian(h, channels);
    if (expected_steps > static_cast<std::size_t>(kPadeStepsBeforeDiagonalizing)) try_diagonalize();
  }
}

void SegmentPropagator::advance(TwoAtomRegister& reg, double dt) {
  if (!(dt >= 0.0)) throw DomainError("propagation step must be >= 0");
  if (dt == 0.0) return;
  if (unitary_) {
    advance_unitary(reg, dt);
  } else {
    advance_dissipative(reg, dt);
  }
}

void SegmentPropagator::advance_unitary(TwoAtomRegister& reg, double dt) const {
  Eigen::Matrix<Complex, kDim, 1> phases;
  for (int i = 0; i < kDim; ++i) phases(i) = std::polar(1.0, -constants::two_pi * energies_(i) * dt);
  const Matrix16c u = eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
  const double trace_before = reg.trace();
  const double purity_before = reg.purity();
  Matrix16c rho = u * reg.density() * u.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  reg.assign(rho);
  atomic_max(g_max_purity_drift, std::abs(reg.purity() - purity_before));
  check_trace_drift(trace_before, reg.trace(), dt);
}

bool SegmentPropagator::try_diagonalize() {
  diagonalization_tried_ = true;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(generator_);
  if (solver.info() != Eigen::Success) return false;
  const Eigen::MatrixXcd& v = solver.eigenvectors();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(v);
  if (!(lu.rcond() > 1e-10)) return false;
  Eigen::MatrixXcd inverse = lu.inverse();
  const Eigen::MatrixXcd rebuilt = v * solver.eigenvalues().asDiagonal() * inverse;
  const double scale = generator_.cwiseAbs().maxCoeff();
  if ((rebuilt - generator_).cwiseAbs().maxCoeff() > 1e-10 * scale) return false;
  modes_ = solver.eigenvalues();
  right_ = v;
  left_ = std::move(inverse);
  diagonalized_ = true;
  return true;
}

void SegmentPropagator::advance_dissipative(TwoAtomRegister& reg, double dt) {
  const double trace_before = reg.trace();
  Matrix16c rho = reg.density();
  Eigen::Map<Eigen::VectorXcd> vec(rho.data(), kDim * kDim);

  auto cached = pade_cache_.find(dt);
  if (cached == pade_cache_.end() && !diagonalized_) {
    ++distinct_steps_;
    if (distinct_steps_ > kPadeStepsBeforeDiagonalizing && !diagonalization_tried_) try_diagonalize();
  }

  if (cached != pade_cache_.end()) {
    vec = cached->second * vec.eval();
  } else if (diagonalized_) {
    const Eigen::VectorXcd growth = (modes_ * dt).array().exp().matrix();
    vec = right_ * growth.cwiseProduct(left_ * vec.eval());
  } else {
    if (pade_cache_.size() >= kPadeCacheLimit) pade_cache_.clear();
    const Eigen::MatrixXcd step = (generator_ * dt).exp();
    vec = step * vec.eval();
    pade_cache_.emplace(dt, step);
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  reg.assign(rho);
  check_trace_drift(trace_before, reg.trace(), dt);
}

void evolve(TwoAtomRegister& reg, const PulseSegment& segment) {
  SegmentPropagator propagator(segment);
  propagator.advance(reg, segment.duration);
}

namespace {

int rk4_steps(const PulseSegment& segment, double steps_per_radian) {
  const double omega = max_angular_frequency(segment);
  const double n = std::ceil(segment.duration * omega * steps_per_radian);
  return std::max(1, static_cast<int>(n));
}

}  // namespace

void evolve_rk4(TwoAtomRegister& reg, const PulseSegment& segment, double steps_per_radian) {
  segment.validate();
  if (segment.duration == 0.0) return;
  const Matrix16c h = build_hamiltonian(segment);
  const auto channels = collapse_channels(segment);
  Matrix16c damping = Matrix16c::Zero();
  for (const auto& ch : channels) damping += ch.rate * ch.op.adjoint() * ch.op;
  const Complex minus_i_two_pi(0.0, -constants::two_pi);

  auto rhs = [&](const Matrix16c& rho) {
    Matrix16c out = minus_i_two_pi * (h * rho - rho * h) - 0.5 * (damping * rho + rho * damping);
    for (const auto& ch : channels) out += ch.rate * ch.op * rho * ch.op.adjoint();
    return out;
  };

  const int n = rk4_steps(segment, steps_per_radian);
  const double dt = segment.duration / n;
  Matrix16c rho = reg.density();
  for (int i = 0; i < n; ++i) {
    const Matrix16c k1 = rhs(rho);
    const Matrix16c k2 = rhs(rho + 0.5 * dt * k1);
    const Matrix16c k3 = rhs(rho + 0.5 * dt * k2);
    const Matrix16c k4 = rhs(rho + dt * k3);
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  reg.assign(rho);
}

Vector16c evolve_ket_rk4(const Vector16c& ket, const PulseSegment& segment, double steps_per_radian) {
  segment.validate();
  if (segment.rydberg_decay_rate != 0.0) throw DomainError("ket integration requires zero decay");
  if (segment.duration == 0.0) return ket;
  const Matrix16c gen = Complex(0.0, -constants::two_pi) * build_hamiltonian(segment);
  const int n = rk4_steps(segment, steps_per_radian);
  const double dt = segment.duration / n;
  Vector16c psi = ket;
  for (int i = 0; i < n; ++i) {
    const Vector16c k1 = gen * psi;
    const Vector16c k2 = gen * (psi + 0.5 * dt * k1);
    const Vector16c k3 = gen * (psi + 0.5 * dt * k2);
    const Vector16c k4 = gen * (psi + dt * k3);
    psi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return psi;
}

// ---------------------------------------------------------------------------

std::vector<double> Trajectory::p11() const {
  std::vector<double> out;
  for (const auto& p : populations) out.push_back(p[basis_index(Level::one, Level::one)]);
  return out;
}

std::vector<double> Trajectory::p_single() const {
  std::vector<double> out;
  for (const auto& p : populations) {
    out.push_back(p[basis_index(Level::one, Level::zero)] + p[basis_index(Level::zero, Level::one)]);
  }
  return out;
}

std::vector<double> Trajectory::p00() const {
  std::vector<double> out;
  for (const auto& p : populations) out.push_back(p[basis_index(Level::zero, Level::zero)]);
  return out;
}

Trajectory run_sequence(const TwoAtomRegister& initial, const PulseSequence& sequence,
                        std::span<const double> sample_times) {
  sequence.validate();
  const double total = sequence.total_duration();
  const double slack = 1e-12 * std::max(1.0, total);
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < 0.0 || sample_times[i] > total + slack) {
      throw DomainError("run_sequence: sample time outside the sequence duration");
    }
    if (i > 0 && sample_times[i] < sample_times[i - 1]) {
      throw DomainError("run_sequence: sample times must be sorted");
    }
  }

  Trajectory traj;
  TwoAtomRegister reg = initial;
  double now = 0.0;
  double segment_start = 0.0;
  std::size_t next = 0;
  for (const auto& segment : sequence.segments) {
    const double segment_end = segment_start + segment.duration;
    const bool last = &segment == &sequence.segments.back();
    std::size_t steps = 0;
    for (std::size_t k = next; k < sample_times.size() && (sample_times[k] <= segment_end || last); ++k) ++steps;
    SegmentPropagator propagator(segment, steps);
    while (next < sample_times.size() && (sample_times[next] <= segment_end || last)) {
      const double t = std::min(sample_times[next], segment_end);
      propagator.advance(reg, t - now);
      now = t;
      traj.times.push_back(sample_times[next]);
      traj.populations.push_back(reg.populations());
      ++next;
    }
    propagator.advance(reg, segment_end - now);
    now = segment_end;
    segment_start = segment_end;
  }
  return traj;
}

HygieneStats hygiene_stats() {
  return {g_max_trace_drift.load(), g_max_purity_drift.load(), g_steps.load()};
}

void reset_hygiene_stats() {
  g_max_trace_drift = 0.0;
  g_max_purity_drift = 0.0;
  g_steps = 0;
}

// ---------------------------------------------------------------------------

double bare_microwave_coupling(const LaserDrive& drive, double dressed_rabi) {
  if (!(dressed_rabi >= 0.0)) throw DomainError("microwave Rabi frequency must be >= 0");
  if (!drive.is_on()) return dressed_rabi;
  return dressed_rabi / dressed_ground_amplitude(drive).ground;
}

namespace {

PulseSegment rabi_segment(const LaserDrive& drive, double u_dd, double mw_rabi, double decay_rate,
                          double duration, const RabiOptions& options) {
  PulseSegment seg;
  seg.duration = duration;
  seg.microwave = MicrowaveDrive{bare_microwave_coupling(drive, mw_rabi), single_atom_light_shift(drive), 0.0};
  if (drive.is_on()) {
    LaserDrive shifted = drive;
    shifted.detuning += options.detuning_offset;
    seg.dressing = shifted;
  }
  seg.u_dd = u_dd;
  seg.rydberg_decay_rate = decay_rate;
  seg.branching = options.branching;
  return seg;
}

double last_time(std::span<const double> times) {
  if (times.empty()) throw DomainError("time grid must be nonempty");
  for (double t : times) {
    if (!(t >= 0.0)) throw DomainError("times must be >= 0");
  }
  return *std::max_element(times.begin(), times.end());
}

}  // namespace

RabiCurves simulate_blockaded_rabi(const LaserDrive& drive, double u_dd, double mw_rabi, double decay_rate,
                                   std::span<const double> times, const RabiOptions& options) {
  PulseSequence seq;
  seq.segments.push_back(rabi_segment(drive, u_dd, mw_rabi, decay_rate, last_time(times), options));
  RabiCurves out;
  out.trajectory = run_sequence(TwoAtomRegister(), seq, times);
  out.times = out.trajectory.times;
  out.p11 = out.trajectory.p11();
  out.p_single = out.trajectory.p_single();
  out.p00 = out.trajectory.p00();
  return out;
}

std::vector<double> simulate_single_atom_rabi(const LaserDrive& drive, double mw_rabi, double decay_rate,
                                              std::span<const double> times, const RabiOptions& options) {
  PulseSequence seq;
  seq.segments.push_back(rabi_segment(drive, 0.0, mw_rabi, decay_rate, last_time(times), options));
  const Trajectory traj = run_sequence(TwoAtomRegister::product(Level::one, Level::dark), seq, times);
  std::vector<double> p1;
  for (const auto& p : traj.populations) p1.push_back(p[basis_index(Level::one, Level::dark)]);
  return p1;
}

std::vector<double> simulate_lifetime(const LaserDrive& drive, double decay_rate, std::span<const double> delays,
                                      const DecayBranching& branching) {
  drive.validate();
  if (!drive.is_on()) throw DomainError("lifetime measurement needs a nonzero optical Rabi frequency");
  const double max_delay = last_time(delays);

  PulseSegment pulse;
  pulse.duration = 1.0 / (2.0 * drive.rabi_freq);
  pulse.dressing = drive;
  pulse.rydberg_decay_rate = decay_rate;
  pulse.branching = branching;

  PulseSegment wait;
  wait.duration = max_delay;
  wait.rydberg_decay_rate = decay_rate;
  wait.branching = branching;

  SegmentPropagator pulse_prop(pulse);
  SegmentPropagator wait_prop(wait);

  TwoAtomRegister excited = TwoAtomRegister::product(Level::zero, Level::one);
  pulse_prop.advance(excited, pulse.duration);

  // Walk the delays in increasing order so a uniform grid reuses one short
  // wait propagator.
  std::vector<std::size_t> order(delays.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return delays[a] < delays[b]; });

  std::vector<double> returned(delays.size());
  TwoAtomRegister waited = excited;
  double waited_for = 0.0;
  for (std::size_t i : order) {
    wait_prop.advance(waited, delays[i] - waited_for);
    waited_for = delays[i];
    TwoAtomRegister reg = waited;
    pulse_prop.advance(reg, pulse.duration);
    double p0 = 0.0;
    for (int b = 0; b < kLevels; ++b) p0 += reg.population(Level::zero, static_cast<Level>(b));
    returned[i] = p0;
  }
  return returned;
}

}  // namespace rydress

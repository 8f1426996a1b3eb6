#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"
#include "rydress/dressing.hpp"
#include "rydress/dynamics.hpp"
#include "rydress/errors.hpp"
#include "rydress/pair_potential.hpp"

using namespace rydress;

namespace {

const LaserDrive kBlockadeDrive{4.3, 1.1};
constexpr double kBlockadeMw = 0.17678;

double blockade_u() { return u_dd_mhz(VanDerWaals{1e5}, 2.9); }

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

double max_abs_diff(const Matrix16c& a, const Matrix16c& b) { return (a - b).cwiseAbs().maxCoeff(); }

TwoAtomRegister random_register(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix16c a;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) a(i, j) = Complex(n(rng), n(rng));
  Matrix16c rho = a * a.adjoint();
  rho /= rho.trace().real();
  return TwoAtomRegister::from_density(rho);
}

}  // namespace

TEST_CASE("Hamiltonian structure") {
  PulseSegment empty;
  CHECK(build_hamiltonian(empty).cwiseAbs().maxCoeff() == 0.0);

  PulseSegment uonly;
  uonly.u_dd = -42.0;
  const Matrix16c hu = build_hamiltonian(uonly);
  CHECK(hu(10, 10).real() == -42.0);
  CHECK(hu.cwiseAbs().sum() == doctest::Approx(42.0));

  PulseSegment mw;
  mw.microwave = MicrowaveDrive{0.3, 0.0, 0.7};
  const Matrix16c h = build_hamiltonian(mw);
  CHECK(max_abs_diff(h, h.adjoint()) < 1e-15);
  const int q[4] = {0, 1, 4, 5};
  Eigen::Matrix4cd block;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) block(i, j) = h(q[i], q[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(block);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-0.3));
  CHECK(std::abs(es.eigenvalues()(1)) < 1e-14);
  CHECK(std::abs(es.eigenvalues()(2)) < 1e-14);
  CHECK(es.eigenvalues()(3) == doctest::Approx(0.3));
}

TEST_CASE("segment validation") {
  PulseSegment s;
  s.duration = -1.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.duration = 1.0;
  s.rydberg_decay_rate = -0.1;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.rydberg_decay_rate = 0.1;
  s.branching = {0.7, 0.5};
  CHECK_THROWS_AS(s.validate(), DomainError);
  PulseSequence seq;
  CHECK_THROWS_AS(seq.validate(), DomainError);
}

TEST_CASE("zero generator leaves the register alone") {
  std::mt19937_64 rng(1);
  const TwoAtomRegister start = random_register(rng);
  TwoAtomRegister reg = start;
  PulseSegment s;
  s.duration = 17.0;
  evolve(reg, s);
  CHECK(max_abs_diff(reg.density(), start.density()) < 1e-12);
}

TEST_CASE("Rydberg decay is exponential") {
  TwoAtomRegister reg = TwoAtomRegister::product(Level::rydberg, Level::one);
  PulseSegment s;
  s.duration = 10.0;
  s.rydberg_decay_rate = 0.1;
  evolve(reg, s);
  CHECK(std::abs(reg.population(Level::rydberg, Level::one) - std::exp(-1.0)) < 1e-4);
  CHECK(reg.population(Level::dark, Level::one) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK_NOTHROW(reg.check_invariants());
}

TEST_CASE("decay branching routes population") {
  TwoAtomRegister reg = TwoAtomRegister::product(Level::rydberg, Level::one);
  PulseSegment s;
  s.duration = 200.0;
  s.rydberg_decay_rate = 0.1;
  s.branching = {0.25, 0.5};
  evolve(reg, s);
  CHECK(reg.population(Level::zero, Level::one) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(reg.population(Level::one, Level::one) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(reg.population(Level::dark, Level::one) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("resonant optical pi pulse") {
  TwoAtomRegister reg = TwoAtomRegister::product(Level::zero, Level::one);
  PulseSegment s;
  s.duration = 1.0 / (2.0 * 4.3);
  s.dressing = LaserDrive{4.3, 0.0};
  evolve(reg, s);
  CHECK(reg.population(Level::rydberg, Level::one) > 1.0 - 1e-6);
}

TEST_CASE("run_sequence sampling") {
  PulseSequence seq;
  PulseSegment idle;
  idle.duration = 5.0;
  seq.segments.push_back(idle);
  const auto times = linspace(0.0, 5.0, 11);
  const Trajectory t = run_sequence(TwoAtomRegister(), seq, times);
  for (double p : t.p11()) CHECK(p == doctest::Approx(1.0));

  const auto rabi = simulate_blockaded_rabi(kBlockadeDrive, blockade_u(), kBlockadeMw, 0.0, times);
  CHECK(rabi.p11.front() == doctest::Approx(1.0));
  CHECK(rabi.p_single.front() == doctest::Approx(0.0));
  for (const auto& pops : rabi.trajectory.populations) {
    double sum = 0.0;
    for (double p : pops) sum += p;
    CHECK(std::abs(sum - 1.0) < 1e-6);
  }
}

TEST_CASE("multi-segment sequence equals consecutive evolve calls") {
  PulseSegment a;
  a.duration = 1.3;
  a.microwave = MicrowaveDrive{0.4, 0.1, 0.2};
  PulseSegment b;
  b.duration = 0.7;
  b.dressing = LaserDrive{3.0, 1.0};
  b.rydberg_decay_rate = 0.2;
  PulseSequence seq{{a, b}, 0};
  const double times[] = {0.5, 1.3, 1.6, 2.0};
  const Trajectory t = run_sequence(TwoAtomRegister(), seq, times);
  TwoAtomRegister reg;
  evolve(reg, a);
  evolve(reg, b);
  const Populations p = reg.populations();
  for (int k = 0; k < kDim; ++k) CHECK(t.populations.back()[k] == doctest::Approx(p[k]).epsilon(1e-10));
}

TEST_CASE("noninteracting undressed atoms flip independently") {
  const auto times = linspace(0.0, 8.0, 81);
  const auto r = simulate_blockaded_rabi(LaserDrive{}, 0.0, kBlockadeMw, 0.0, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double s = std::sin(oracle::kPi * kBlockadeMw * times[i]);
    CHECK(std::abs(r.p00[i] - std::pow(s, 4)) < 1e-6);
  }
}

TEST_CASE("noninteracting dressed atoms match the single-atom three-level oracle") {
  const auto times = linspace(0.0, 8.0, 41);
  const auto r = simulate_blockaded_rabi(kBlockadeDrive, 0.0, kBlockadeMw, 0.0, times);
  const double bare = bare_microwave_coupling(kBlockadeDrive, kBlockadeMw);
  const double shift = single_atom_light_shift(kBlockadeDrive);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto psi = oracle::single_atom_three_level(bare, shift, 4.3, 1.1, times[i]);
    const double p1 = std::norm(psi(0));
    const double p0 = std::norm(psi(1));
    CHECK(std::abs(r.p11[i] - p1 * p1) < 1e-9);
    CHECK(std::abs(r.p00[i] - p0 * p0) < 1e-9);
    CHECK(std::abs(r.p_single[i] - 2.0 * p0 * p1) < 1e-9);
  }
}

TEST_CASE("dressed single-atom Rabi frequency equals mw_rabi") {
  const auto times = linspace(0.0, 1.0 / kBlockadeMw, 3);
  const auto p1 = simulate_single_atom_rabi(kBlockadeDrive, kBlockadeMw, 0.0, times);
  CHECK(p1[0] == doctest::Approx(1.0));
  // Half a Rabi period empties |1> up to the small off-resonant admixture.
  CHECK(p1[1] < 0.01);
  CHECK(p1[2] > 0.99);
}

TEST_CASE("no microwave, no dynamics in the qubit populations") {
  const auto times = linspace(0.0, 5.0, 6);
  const auto r = simulate_blockaded_rabi(kBlockadeDrive, blockade_u(), 0.0, 0.0, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(r.p11[i] == doctest::Approx(1.0));
    CHECK(r.p00[i] == doctest::Approx(0.0));
  }
}

TEST_CASE("R = 2.9 um blockade configuration produces Psi+ near 2 us") {
  const auto times = linspace(0.0, 4.0, 401);
  const auto r = simulate_blockaded_rabi(kBlockadeDrive, blockade_u(), kBlockadeMw, 0.0, times);
  const auto k = std::max_element(r.p_single.begin(), r.p_single.end()) - r.p_single.begin();
  CHECK(times[k] == doctest::Approx(2.0).epsilon(0.1));
  // Bare populations: the dressed |0> carries about 62% ground weight.
  const double ground = std::pow(dressed_ground_amplitude(kBlockadeDrive).ground, 2);
  CHECK(r.p_single[k] > 0.9 * ground);
}

TEST_CASE("blockade limit matches the model with |r,r> removed") {
  const auto times = linspace(0.0, 6.0, 301);
  const double u = -1e6;
  const auto r = simulate_blockaded_rabi(kBlockadeDrive, u, kBlockadeMw, 0.0, times);
  const double lib_max = *std::max_element(r.p00.begin(), r.p00.end());

  PulseSegment s;
  s.microwave = MicrowaveDrive{bare_microwave_coupling(kBlockadeDrive, kBlockadeMw), single_atom_light_shift(kBlockadeDrive), 0.0};
  s.dressing = kBlockadeDrive;
  const Matrix16c h = build_hamiltonian(s);
  Eigen::MatrixXcd h15(15, 15);
  for (int i = 0, a = 0; i < 16; ++i) {
    if (i == 10) continue;
    for (int j = 0, b = 0; j < 16; ++j) {
      if (j == 10) continue;
      h15(a, b++) = h(i, j);
    }
    ++a;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h15);
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(15);
  psi0(0) = 1.0;
  const Eigen::VectorXcd c = es.eigenvectors().adjoint() * psi0;
  double ref_max = 0.0;
  for (double t : times) {
    Eigen::VectorXcd ph(15);
    for (int k = 0; k < 15; ++k) ph(k) = std::polar(1.0, -2.0 * oracle::kPi * es.eigenvalues()(k) * t);
    const Eigen::VectorXcd psi = es.eigenvectors() * ph.cwiseProduct(c);
    ref_max = std::max(ref_max, std::norm(psi(5)));  // |0,0> keeps index 5
  }
  CHECK(std::abs(lib_max - ref_max) < 1e-4);
}

TEST_CASE("invariants hold through dissipative evolution") {
  PulseSegment s;
  s.duration = 3.0;
  s.microwave = MicrowaveDrive{0.3, 0.5, 1.0};
  s.dressing = LaserDrive{4.3, 1.3};
  s.u_dd = -30.0;
  s.rydberg_decay_rate = 0.2;
  s.branching = {0.1, 0.2};
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5; ++i) {
    TwoAtomRegister reg = random_register(rng);
    evolve(reg, s);
    CHECK_NOTHROW(reg.check_invariants());
    CHECK(std::abs(reg.trace() - 1.0) < 1e-10);
  }
}

TEST_CASE("purity is conserved without decay") {
  PulseSegment s;
  s.duration = 4.0;
  s.microwave = MicrowaveDrive{0.3, 0.5, 1.0};
  s.dressing = LaserDrive{4.3, 1.3};
  s.u_dd = -30.0;
  std::mt19937_64 rng(8);
  for (int i = 0; i < 5; ++i) {
    TwoAtomRegister reg = random_register(rng);
    const double before = reg.purity();
    evolve(reg, s);
    CHECK(std::abs(reg.purity() - before) < 1e-8);
  }
}

TEST_CASE("exact propagators agree with RK4") {
  PulseSegment s;
  s.duration = 0.8;
  s.microwave = MicrowaveDrive{0.3, 0.5, 1.0};
  s.dressing = LaserDrive{4.3, 1.3};
  s.u_dd = -30.0;
  for (double gamma : {0.0, 0.15}) {
    s.rydberg_decay_rate = gamma;
    s.branching = {0.2, 0.1};
    TwoAtomRegister exact;
    evolve(exact, s);
    TwoAtomRegister rk;
    evolve_rk4(rk, s);
    CHECK(max_abs_diff(exact.density(), rk.density()) < 1e-6);
  }
  s.rydberg_decay_rate = 0.0;
  const Vector16c ket = evolve_ket_rk4(product_ket(Level::one, Level::one), s);
  TwoAtomRegister exact;
  evolve(exact, s);
  CHECK(max_abs_diff(exact.density(), ket * ket.adjoint()) < 1e-6);
}

TEST_CASE("halving the RK4 step changes populations by < 1e-7") {
  PulseSegment s;
  s.duration = 1.0;
  s.microwave = MicrowaveDrive{0.2, 1.6, 0.0};
  s.dressing = LaserDrive{4.3, 1.3};
  s.u_dd = -10.0;
  s.rydberg_decay_rate = 0.1;
  TwoAtomRegister a;
  evolve_rk4(a, s, 50.0);
  TwoAtomRegister b;
  evolve_rk4(b, s, 100.0);
  const auto pa = a.populations();
  const auto pb = b.populations();
  for (int k = 0; k < kDim; ++k) CHECK(std::abs(pa[k] - pb[k]) < 1e-7);
}

TEST_CASE("gauge checks") {
  PulseSegment s;
  s.duration = 2.0;
  s.microwave = MicrowaveDrive{0.3, 1.5, 0.0};
  s.dressing = LaserDrive{4.3, 1.3};
  s.u_dd = -80.0;

  // A constant energy offset is unobservable.
  std::mt19937_64 rng(12);
  const TwoAtomRegister start = random_register(rng);
  Eigen::Map<const Eigen::VectorXcd> v0(start.density().data(), kDim * kDim);
  const Matrix16c h = build_hamiltonian(s);
  const Eigen::MatrixXcd l1 = liouvillian(h, {});
  const Eigen::MatrixXcd l2 = liouvillian(h + 3.7 * Matrix16c::Identity(), {});
  const Eigen::VectorXcd r1 = (l1 * s.duration).exp() * v0;
  const Eigen::VectorXcd r2 = (l2 * s.duration).exp() * v0;
  CHECK((r1 - r2).cwiseAbs().maxCoeff() < 1e-8);

  // Starting from |1,1>, the microwave phase only rotates coherences.
  const auto times = linspace(0.0, 2.0, 5);
  PulseSequence a{{s}, 0};
  s.microwave->phase = 1.234;
  PulseSequence b{{s}, 0};
  const Trajectory ta = run_sequence(TwoAtomRegister(), a, times);
  const Trajectory tb = run_sequence(TwoAtomRegister(), b, times);
  for (std::size_t i = 0; i < times.size(); ++i)
    for (int k = 0; k < kDim; ++k) CHECK(std::abs(ta.populations[i][k] - tb.populations[i][k]) < 1e-8);
}

TEST_CASE("lifetime experiment") {
  const LaserDrive resonant{4.3, 0.0};
  const auto delays = linspace(0.0, 30.0, 16);
  CHECK(simulate_lifetime(resonant, 1.0 / 150.0, std::vector<double>{0.0}).front() >= 0.999);
  // Decay during the pulses scales the curve and leaves a tiny offset.
  const auto p = simulate_lifetime(resonant, 0.1, delays);
  for (std::size_t i = 0; i < delays.size(); ++i) {
    CHECK(std::abs(p[i] / p[0] - std::exp(-0.1 * delays[i])) < 1e-4);
  }
  const auto flat = simulate_lifetime(resonant, 0.0, delays);
  for (double v : flat) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(simulate_lifetime(LaserDrive{}, 0.1, delays), DomainError);
}

TEST_CASE("hygiene statistics accumulate") {
  reset_hygiene_stats();
  TwoAtomRegister reg;
  PulseSegment s;
  s.duration = 1.0;
  s.microwave = MicrowaveDrive{0.3, 0.0, 0.0};
  evolve(reg, s);
  const HygieneStats h = hygiene_stats();
  CHECK(h.steps > 0);
  CHECK(h.max_trace_drift < 1e-12);
  CHECK(h.max_unitary_purity_drift < 1e-12);
}

#include "rydress/measurement.hpp"

#include <cmath>
#include <vector>

#include "rydress/constants.hpp"
#include "rydress/entanglement.hpp"
#include "rydress/errors.hpp"
#include "rydress/parallel.hpp"
#include "rydress/random.hpp"

namespace rydress {

void DetectionModel::validate() const {
  if (!(rydberg_loss_fraction >= 0.0 && rydberg_loss_fraction <= 1.0)) {
    throw DomainError("rydberg_loss_fraction must lie in [0, 1]");
  }
  if (!(rydberg_bright_probability >= 0.0 && rydberg_bright_probability <= 1.0)) {
    throw DomainError("rydberg_bright_probability must lie in [0, 1]");
  }
}

MeasurementRecord detect(const TwoAtomRegister& reg, const DetectionModel& model) {
  model.validate();
  // outcome_given_level[level][outcome]
  std::array<std::array<double, 3>, kLevels> m{};
  m[static_cast<int>(Level::one)] = {0.0, 1.0, 0.0};
  m[static_cast<int>(Level::zero)] = {1.0, 0.0, 0.0};
  m[static_cast<int>(Level::dark)] = {0.0, 0.0, 1.0};
  const double kept = 1.0 - model.rydberg_loss_fraction;
  m[static_cast<int>(Level::rydberg)] = {kept * model.rydberg_bright_probability,
                                         kept * (1.0 - model.rydberg_bright_probability),
                                         model.rydberg_loss_fraction};

  const Populations pop = reg.populations();
  MeasurementRecord rec;
  for (int a = 0; a < kLevels; ++a) {
    for (int b = 0; b < kLevels; ++b) {
      const double p = pop[kLevels * a + b];
      for (int o1 = 0; o1 < 3; ++o1) {
        for (int o2 = 0; o2 < 3; ++o2) rec.joint[o1][o2] += p * m[a][o1] * m[b][o2];
      }
    }
  }
  constexpr int bright = static_cast<int>(Outcome::bright);
  constexpr int dark = static_cast<int>(Outcome::dark);
  rec.survival = rec.joint[bright][bright] + rec.joint[bright][dark] + rec.joint[dark][bright] +
                 rec.joint[dark][dark];
  if (rec.survival > 0.0) {
    rec.p11 = rec.joint[dark][dark] / rec.survival;
    rec.p10 = rec.joint[dark][bright] / rec.survival;
    rec.p01 = rec.joint[bright][dark] / rec.survival;
    rec.p00 = rec.joint[bright][bright] / rec.survival;
  }
  return rec;
}

TwoAtomRegister prepare_initial(double pump_efficiency) {
  if (!(pump_efficiency >= 0.0 && pump_efficiency <= 1.0)) {
    throw DomainError("pump efficiency must lie in [0, 1]");
  }
  Matrix4c atom = Matrix4c::Zero();
  atom(static_cast<int>(Level::zero), static_cast<int>(Level::zero)) = pump_efficiency;
  atom(static_cast<int>(Level::one), static_cast<int>(Level::one)) = 1.0 - pump_efficiency;
  return global_rotation(TwoAtomRegister::from_atoms(atom, atom), constants::pi, 0.0);
}

void TrapParams::validate() const {
  if (!(waist > 0.0)) throw DomainError("trap waist must be > 0");
  if (!(depth > 0.0)) throw DomainError("trap depth must be > 0");
  if (!(temperature >= 0.0)) throw DomainError("temperature must be >= 0");
  if (!(release_time >= 0.0)) throw DomainError("release time must be >= 0");
  if (!(recapture_window > 0.0)) throw DomainError("recapture window must be > 0");
  if (!(wavelength > 0.0)) throw DomainError("trap wavelength must be > 0");
  if (!(mass_amu >= 0.0)) throw DomainError("mass must be >= 0");
}

namespace {

struct Trap {
  double u0;  // J
  double w0;  // m
  double zr;  // m
  double mass;

  double potential(double x, double y, double z) const {
    const double q = 1.0 + (z / zr) * (z / zr);
    return -u0 / q * std::exp(-2.0 * (x * x + y * y) / (w0 * w0 * q));
  }
};

}  // namespace

RecaptureResult recapture_probability(const TrapParams& trap, std::uint64_t n_samples, std::uint64_t seed) {
  trap.validate();
  if (n_samples < 1000) throw DomainError("recapture Monte Carlo needs at least 1000 samples");

  Trap t;
  t.u0 = constants::boltzmann * trap.depth * 1e-3;
  t.w0 = trap.waist * 1e-6;
  t.zr = constants::pi * t.w0 * t.w0 / (trap.wavelength * 1e-9);
  t.mass = (trap.mass_amu > 0.0 ? trap.mass_amu : constants::cesium_mass_amu) * constants::atomic_mass_unit;

  const double kt = constants::boltzmann * trap.temperature * 1e-6;
  const double sigma_v = std::sqrt(kt / t.mass);
  const double omega_r = std::sqrt(4.0 * t.u0 / (t.mass * t.w0 * t.w0));
  const double omega_z = std::sqrt(2.0 * t.u0 / (t.mass * t.zr * t.zr));
  const double sigma_r = sigma_v / omega_r;
  const double sigma_z = sigma_v / omega_z;
  const double time = trap.release_time * 1e-6;

  std::vector<unsigned char> kept(n_samples);
  parallel_for(n_samples, [&](std::size_t i) {
    auto rng = rng_stream(seed, i);
    std::normal_distribution<double> normal(0.0, 1.0);
    double x, y, z, vx, vy, vz;
    do {
      x = sigma_r * normal(rng);
      y = sigma_r * normal(rng);
      z = sigma_z * normal(rng);
      vx = sigma_v * normal(rng);
      vy = sigma_v * normal(rng);
      vz = sigma_v * normal(rng);
    } while (0.5 * t.mass * (vx * vx + vy * vy + vz * vz) + t.potential(x, y, z) >= 0.0);

    // Gravity points along -y, transverse to the tweezer axis.
    const double xf = x + vx * time;
    const double yf = y + vy * time - 0.5 * constants::gravity * time * time;
    const double zf = z + vz * time;
    const double vyf = vy - constants::gravity * time;
    const double kinetic = 0.5 * t.mass * (vx * vx + vyf * vyf + vz * vz);
    kept[i] = kinetic + t.potential(xf, yf, zf) < 0.0 ? 1 : 0;
  });

  std::uint64_t count = 0;
  for (unsigned char k : kept) count += k;
  RecaptureResult out;
  out.samples = n_samples;
  out.probability = static_cast<double>(count) / static_cast<double>(n_samples);
  out.standard_error = std::sqrt(out.probability * (1.0 - out.probability) / static_cast<double>(n_samples));
  return out;
}

}  // namespace rydress

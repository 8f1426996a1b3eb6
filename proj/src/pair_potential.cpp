#include "rydress/pair_potential.hpp"

#include <cmath>
#include <sstream>

#include "rydress/branch_tracking.hpp"
#include "rydress/errors.hpp"

namespace rydress {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double forster_shift(const ForsterTwoChannel& m, double r) {
  const double v = m.c3 / (r * r * r);
  const double defect = m.forster_defect;

  // Pick the branch connected to the resonant pair state by following it
  // from v = 0, then evaluate that root in closed form.
  auto hamiltonian = [&](double s) {
    Eigen::Matrix2d h;
    h << 0.0, s * v,
         s * v, defect;
    return Eigen::MatrixXd(h);
  };
  const TrackedBranch branch = track_branch(hamiltonian, Eigen::Vector2d::UnitX());

  const double root = std::hypot(defect, 2.0 * v);
  const double sgn = defect < 0.0 ? -1.0 : 1.0;
  const double small = -sgn * 2.0 * v * v / (std::abs(defect) + root);
  const double large = defect - small;
  return std::abs(branch.energy - small) <= std::abs(branch.energy - large) ? small : large;
}

}  // namespace

std::string model_name(const PairPotentialModel& model) {
  return std::visit(overloaded{[](const PerfectBlockade&) { return std::string("perfect_blockade"); },
                               [](const VanDerWaals&) { return std::string("van_der_waals"); },
                               [](const ForsterTwoChannel&) { return std::string("forster"); }},
                    model);
}

double PairShift::mhz() const {
  if (perfect_) {
    throw DomainError("perfect blockade has no finite pair shift; use the plateau formula");
  }
  return value_;
}

void validate(const PairPotentialModel& model) {
  if (const auto* f = std::get_if<ForsterTwoChannel>(&model)) {
    if (f->forster_defect == 0.0 || !std::isfinite(f->forster_defect)) {
      throw DomainError("forster model: forster_defect must be nonzero");
    }
    if (!std::isfinite(f->c3)) throw DomainError("forster model: c3 must be finite");
  }
  if (const auto* w = std::get_if<VanDerWaals>(&model)) {
    if (!std::isfinite(w->c6)) throw DomainError("van der Waals model: c6 must be finite");
  }
}

PairShift u_dd(const PairPotentialModel& model, double r) {
  if (!(r > 0.0)) throw DomainError("pair potential: distance must be > 0");
  validate(model);
  return std::visit(
      overloaded{[](const PerfectBlockade&) { return PairShift::perfect_blockade(); },
                 [r](const VanDerWaals& m) { return PairShift::finite(-m.c6 / std::pow(r, 6)); },
                 [r](const ForsterTwoChannel& m) { return PairShift::finite(forster_shift(m, r)); }},
      model);
}

double u_dd_mhz(const PairPotentialModel& model, double r) { return u_dd(model, r).mhz(); }

double blockade_radius(const PairPotentialModel& model, const LaserDrive& drive) {
  drive.validate();
  if (std::holds_alternative<PerfectBlockade>(model)) {
    throw DomainError("blockade radius is undefined for a perfect blockade");
  }
  const double scale = std::sqrt(drive.detuning * drive.detuning +
                                 2.0 * drive.rabi_freq * drive.rabi_freq);
  auto excess = [&](double r) { return std::abs(u_dd_mhz(model, r)) - scale; };

  double lo = 0.1;
  double hi = 100.0;
  if (!(excess(lo) > 0.0 && excess(hi) < 0.0)) {
    std::ostringstream msg;
    msg << "no blockade radius in [0.1, 100] um: |u_dd| never crosses " << scale << " MHz";
    throw NotFoundError(msg.str());
  }
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rydress

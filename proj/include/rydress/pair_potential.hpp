#pragma once

#include <string>
#include <variant>

#include "rydress/laser_drive.hpp"

namespace rydress {

// Parametric shift U_dd(R) of the doubly excited pair state |r,r>.
// Coefficients carry the sign convention U_dd = -c6/R^6, so a positive c6 is
// a red (attractive) shift.

struct PerfectBlockade {};

struct VanDerWaals {
  double c6 = 1.0e5;  // MHz um^6, illustrative default
};

/// Two dipole-coupled pair channels separated by a Foerster defect. The
/// shift crosses over from -c3^2/(defect R^6) at long range to ~c3/R^3 at
/// short range.
struct ForsterTwoChannel {
  double c3 = 3.0e3;             // MHz um^3, illustrative default
  double forster_defect = 100.0;  // MHz, must be nonzero
};

using PairPotentialModel = std::variant<PerfectBlockade, VanDerWaals, ForsterTwoChannel>;

std::string model_name(const PairPotentialModel& model);

/// Result of evaluating a pair potential: either a finite shift in MHz or the
/// perfect-blockade sentinel. The sentinel never converts to a number.
class PairShift {
 public:
  static PairShift finite(double mhz) { return PairShift(false, mhz); }
  static PairShift perfect_blockade() { return PairShift(true, 0.0); }

  bool is_perfect_blockade() const { return perfect_; }
  /// Throws DomainError for the perfect-blockade sentinel.
  double mhz() const;

 private:
  PairShift(bool perfect, double value) : perfect_(perfect), value_(value) {}
  bool perfect_;
  double value_;
};

/// Throws DomainError for r <= 0 or an invalid model (zero Foerster defect).
PairShift u_dd(const PairPotentialModel& model, double r);

/// Convenience for finite models; throws DomainError for PerfectBlockade.
double u_dd_mhz(const PairPotentialModel& model, double r);

void validate(const PairPotentialModel& model);

/// Distance at which |U_dd(R)| equals the two-atom dressing scale
/// sqrt(Delta^2 + 2 Omega^2), by bisection on [0.1, 100] um to 1e-4 um.
/// Throws NotFoundError when there is no crossing in that interval and
/// DomainError for PerfectBlockade.
double blockade_radius(const PairPotentialModel& model, const LaserDrive& drive);

}  // namespace rydress

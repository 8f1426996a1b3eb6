#pragma once

// Small independent reference computations used to pin library results.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Eigenvalue of a real symmetric matrix whose eigenvector has the largest
/// weight on basis state 0.
inline double ground_connected_eigenvalue(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  Eigen::Index best = 0;
  double weight = -1.0;
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    const double w = es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
    if (w > weight) {
      weight = w;
      best = k;
    }
  }
  return es.eigenvalues()(best);
}

inline double light_shift(double omega, double delta) {
  Eigen::Matrix2d h;
  h << 0.0, omega / 2.0, omega / 2.0, -delta;
  return ground_connected_eigenvalue(h);
}

/// Two-atom dressed shift minus twice the single-atom shift from the
/// symmetric three-state problem.
inline double j_three_level(double omega, double delta, double u) {
  const double g = omega / std::sqrt(2.0);
  Eigen::Matrix3d h;
  h << 0.0, g, 0.0, g, -delta, g, 0.0, g, -2.0 * delta + u;
  return ground_connected_eigenvalue(h) - 2.0 * light_shift(omega, delta);
}

/// Same quantity for weak or moderate shifts, where the ground branch can
/// carry less than half the |00> weight: start from the noninteracting
/// answer 2 E1 at u = 0 and follow the nearest eigenvalue while ramping u.
inline double j_three_level_ramped(double omega, double delta, double u, int steps = 4000) {
  const double g = omega / std::sqrt(2.0);
  const double e1 = light_shift(omega, delta);
  double e = 2.0 * e1;
  for (int k = 1; k <= steps; ++k) {
    Eigen::Matrix3d h;
    h << 0.0, g, 0.0, g, -delta, g, 0.0, g, -2.0 * delta + u * k / steps;
    const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(h).eigenvalues();
    Eigen::Index best = 0;
    (ev.array() - e).abs().minCoeff(&best);
    e = ev(best);
  }
  return e - 2.0 * e1;
}

/// Closed-form two-level transfer probability with Rabi frequency and
/// detuning in MHz, time in us.
inline double two_level_transfer(double rabi, double detuning, double t) {
  const double gen = std::hypot(rabi, detuning);
  if (gen == 0.0) return 0.0;
  const double s = std::sin(kPi * gen * t);
  return rabi * rabi / (gen * gen) * s * s;
}

/// Single atom {|1>, |0>, |r>} under the dressed microwave drive; returns
/// the amplitudes after time t starting from |1>.
inline Eigen::Vector3cd single_atom_three_level(double mw_bare, double mw_detuning, double omega_l, double delta_l,
                                                double t) {
  Eigen::Matrix3d h;
  h << 0.0, mw_bare / 2.0, 0.0, mw_bare / 2.0, -mw_detuning, omega_l / 2.0, 0.0, omega_l / 2.0,
      -(delta_l + mw_detuning);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);
  Eigen::Vector3cd phases;
  for (int k = 0; k < 3; ++k) phases(k) = std::polar(1.0, -2.0 * kPi * es.eigenvalues()(k) * t);
  const Eigen::Matrix3cd v = es.eigenvectors().cast<std::complex<double>>();
  Eigen::Vector3cd psi0(1.0, 0.0, 0.0);
  return v * phases.asDiagonal() * v.adjoint() * psi0;
}

}  // namespace oracle

#pragma once

#include <functional>

#include <Eigen/Dense>

namespace rydress {

struct TrackedBranch {
  double energy = 0.0;
  Eigen::VectorXd state;
  double min_overlap = 1.0;  // worst step-to-step overlap seen while ramping
};

struct BranchTrackingOptions {
  int steps = 64;
  double min_overlap = 0.6;
};

/// Follows one eigenvector of the real symmetric family H(s), s in [0, 1],
/// starting from `start` at s = 0. At each of the `steps` ramp points the
/// eigenvector with the largest overlap with the previous one is selected.
/// Throws BranchTrackingError when the best overlap drops below
/// options.min_overlap.
TrackedBranch track_branch(const std::function<Eigen::MatrixXd(double)>& hamiltonian,
                           const Eigen::VectorXd& start,
                           const BranchTrackingOptions& options = {});

}  // namespace rydress

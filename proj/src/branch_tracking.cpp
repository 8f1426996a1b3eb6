#include "rydress/branch_tracking.hpp"

#include <cmath>
#include <sstream>

#include "rydress/errors.hpp"

namespace rydress {

TrackedBranch track_branch(const std::function<Eigen::MatrixXd(double)>& hamiltonian,
                           const Eigen::VectorXd& start, const BranchTrackingOptions& options) {
  TrackedBranch branch;
  branch.state = start.normalized();
  branch.energy = branch.state.dot(hamiltonian(0.0) * branch.state);

  for (int k = 1; k <= options.steps; ++k) {
    const double s = static_cast<double>(k) / options.steps;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian(s));
    if (solver.info() != Eigen::Success) {
      throw NumericalError("eigensolver failed during branch tracking");
    }
    const Eigen::VectorXd overlaps = (solver.eigenvectors().transpose() * branch.state).cwiseAbs();
    Eigen::Index best = 0;
    const double overlap = overlaps.maxCoeff(&best);
    if (overlap < options.min_overlap) {
      std::ostringstream msg;
      msg << "branch tracking failed at ramp step " << k << "/" << options.steps
          << " (overlap " << overlap << " < " << options.min_overlap
          << "); the drive is too close to an anti-blockade resonance";
      throw BranchTrackingError(msg.str());
    }
    Eigen::VectorXd next = solver.eigenvectors().col(best);
    if (next.dot(branch.state) < 0.0) next = -next;
    branch.state = next;
    branch.energy = solver.eigenvalues()(best);
    branch.min_overlap = std::min(branch.min_overlap, overlap);
  }
  return branch;
}

}  // namespace rydress

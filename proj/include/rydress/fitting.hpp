#pragma once

#include <functional>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace rydress {

using ResidualFunction = std::function<void(const Eigen::VectorXd& params, Eigen::VectorXd& residuals)>;

struct LeastSquaresOptions {
  double xtol = 1e-8;   // relative parameter change at convergence
  double ftol = 1e-14;  // relative reduction of the residual norm
  int max_iterations = 500;
};

struct LeastSquaresResult {
  Eigen::VectorXd params;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status;
};

/// Levenberg-Marquardt with a central-difference Jacobian.
LeastSquaresResult least_squares(const ResidualFunction& residuals, int n_residuals, Eigen::VectorXd x0,
                                 const LeastSquaresOptions& options = {});

/// y ~ offset + amplitude * cos(2 pi frequency t + phase)
struct SinusoidFit {
  double frequency = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double offset = 0.0;
  double residual_norm = 0.0;
};

/// Frequency seeded from a periodogram peak, then refined by least squares.
SinusoidFit fit_sinusoid(std::span<const double> t, std::span<const double> y);

/// y ~ amplitude * exp(-t / tau) + offset
struct ExponentialFit {
  double amplitude = 0.0;
  double tau = 0.0;
  double offset = 0.0;
  double residual_norm = 0.0;
  bool infinite_tau = false;  // flat data: no decay resolvable
};

ExponentialFit fit_exponential_decay(std::span<const double> t, std::span<const double> y);

}  // namespace rydress

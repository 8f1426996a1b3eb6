#include "rydress/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "rydress/constants.hpp"
#include "rydress/errors.hpp"

namespace rydress {

namespace {

struct ResidualFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const ResidualFunction* fn = nullptr;
  int n_inputs = 0;
  int n_values = 0;

  int inputs() const { return n_inputs; }
  int values() const { return n_values; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    (*fn)(x, f);
    return 0;
  }
};

std::string status_name(Eigen::LevenbergMarquardtSpace::Status s) {
  using namespace Eigen::LevenbergMarquardtSpace;
  switch (s) {
    case RelativeReductionTooSmall: return "relative_reduction";
    case RelativeErrorTooSmall: return "relative_error";
    case RelativeErrorAndReductionTooSmall: return "relative_error_and_reduction";
    case CosinusTooSmall: return "orthogonal_gradient";
    case TooManyFunctionEvaluation: return "too_many_evaluations";
    case FtolTooSmall: return "ftol_limit";
    case XtolTooSmall: return "xtol_limit";
    case GtolTooSmall: return "gtol_limit";
    case ImproperInputParameters: return "improper_input";
    default: return "running";
  }
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

}  // namespace

LeastSquaresResult least_squares(const ResidualFunction& residuals, int n_residuals, Eigen::VectorXd x0,
                                 const LeastSquaresOptions& options) {
  using Eigen::LevenbergMarquardtSpace::Status;
  if (n_residuals < x0.size()) throw FitError("least squares: fewer residuals than parameters");

  ResidualFunctor functor{&residuals, static_cast<int>(x0.size()), n_residuals};
  Eigen::NumericalDiff<ResidualFunctor, Eigen::Central> numdiff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ResidualFunctor, Eigen::Central>> lm(numdiff);
  lm.parameters.xtol = options.xtol;
  lm.parameters.ftol = options.ftol;
  lm.parameters.maxfev = 1000000;

  LeastSquaresResult result;
  Status status = lm.minimizeInit(x0);
  if (status == Status::ImproperInputParameters) throw FitError("least squares: improper input");
  int iterations = 0;
  do {
    status = lm.minimizeOneStep(x0);
    ++iterations;
  } while (status == Status::Running && iterations < options.max_iterations);

  result.params = x0;
  Eigen::VectorXd f(n_residuals);
  residuals(x0, f);
  result.residual_norm = f.norm();
  result.iterations = iterations;
  result.status = status_name(status);
  result.converged = status != Status::Running && status != Status::TooManyFunctionEvaluation &&
                     status != Status::ImproperInputParameters;
  return result;
}

SinusoidFit fit_sinusoid(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size() || t.size() < 5) throw FitError("sinusoid fit: need >= 5 paired samples");
  const double y_mean = mean(y);
  const double span = t.back() - t.front();
  if (!(span > 0.0)) throw FitError("sinusoid fit: time span must be positive");

  // Periodogram search between one cycle per span and the Nyquist limit.
  const double dt = span / (t.size() - 1);
  const double f_lo = 0.5 / span;
  const double f_hi = 0.5 / dt;
  const double df = 0.02 / span;
  double best_f = f_lo;
  double best_power = -1.0;
  for (double f = f_lo; f <= f_hi; f += df) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      acc += (y[i] - y_mean) * std::polar(1.0, -constants::two_pi * f * t[i]);
    }
    if (std::norm(acc) > best_power) {
      best_power = std::norm(acc);
      best_f = f;
    }
  }

  // Linear amplitude/phase at the seed frequency.
  Eigen::MatrixXd basis(t.size(), 3);
  Eigen::VectorXd rhs(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    basis(i, 0) = 1.0;
    basis(i, 1) = std::cos(constants::two_pi * best_f * t[i]);
    basis(i, 2) = std::sin(constants::two_pi * best_f * t[i]);
    rhs(i) = y[i];
  }
  const Eigen::Vector3d lin = basis.colPivHouseholderQr().solve(rhs);

  Eigen::VectorXd x0(4);
  x0 << lin(0), std::hypot(lin(1), lin(2)), best_f, std::atan2(-lin(2), lin(1));
  const ResidualFunction model = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      r(i) = p(0) + p(1) * std::cos(constants::two_pi * p(2) * t[i] + p(3)) - y[i];
    }
  };
  const LeastSquaresResult fit = least_squares(model, static_cast<int>(t.size()), x0);
  if (!fit.converged) throw FitError("sinusoid fit did not converge (" + fit.status + ")");

  SinusoidFit out;
  out.offset = fit.params(0);
  out.amplitude = fit.params(1);
  out.frequency = std::abs(fit.params(2));
  out.phase = fit.params(3);
  if (out.amplitude < 0.0) {
    out.amplitude = -out.amplitude;
    out.phase += constants::pi;
  }
  out.phase = std::remainder(out.phase, constants::two_pi);
  out.residual_norm = fit.residual_norm;
  return out;
}

ExponentialFit fit_exponential_decay(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size() || t.size() < 4) throw FitError("exponential fit: need >= 4 paired samples");
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  ExponentialFit out;
  if (*hi - *lo < 1e-9) {
    out.infinite_tau = true;
    out.tau = std::numeric_limits<double>::infinity();
    out.offset = mean(y);
    return out;
  }

  // Seed: offset just below the tail, 1/e crossing for the time constant.
  const double span = t.back() - t.front();
  const double b0 = y.back() - 0.05 * (y.front() - y.back());
  const double a0 = y.front() - b0;
  double tau0 = span / 3.0;
  const double target = b0 + a0 / std::exp(1.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if ((y[i - 1] - target) * (y[i] - target) <= 0.0 && y[i] != y[i - 1]) {
      tau0 = t[i - 1] + (target - y[i - 1]) * (t[i] - t[i - 1]) / (y[i] - y[i - 1]) - t.front();
      break;
    }
  }
  tau0 = std::max(tau0, 1e-6 * std::max(span, 1e-12));

  Eigen::VectorXd x0(3);
  x0 << a0, 1.0 / tau0, b0;
  const ResidualFunction model = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < t.size(); ++i) r(i) = p(0) * std::exp(-p(1) * t[i]) + p(2) - y[i];
  };
  LeastSquaresOptions opts;
  opts.xtol = 1e-12;
  const LeastSquaresResult fit = least_squares(model, static_cast<int>(t.size()), x0, opts);
  if (!fit.converged) throw FitError("exponential fit did not converge (" + fit.status + ")");
  out.amplitude = fit.params(0);
  out.offset = fit.params(2);
  out.residual_norm = fit.residual_norm;
  if (fit.params(1) <= 0.0) {
    out.infinite_tau = true;
    out.tau = std::numeric_limits<double>::infinity();
  } else {
    out.tau = 1.0 / fit.params(1);
  }
  return out;
}

}  // namespace rydress

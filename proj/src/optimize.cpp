#include "pulsevqe/optimize.hpp"

#include <cmath>

namespace pulsevqe {

void OptimizerConfig::validate() const {
  if (!(gradient_tolerance > 0.0))
    throw ConfigError("optimizer: gradient tolerance must be positive");
  if (max_iterations < 0) throw ConfigError("optimizer: max_iterations must be non-negative");
  if (!(penalty_weight >= 0.0)) throw ConfigError("optimizer: penalty weight must be >= 0");
  if (!(0.0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0))
    throw ConfigError("optimizer: need 0 < c1 < c2 < 1");
}

std::string termination_name(Termination reason) {
  switch (reason) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::LineSearchFailure: return "line_search_failure";
    case Termination::NonFiniteObjective: return "non_finite_objective";
  }
  return "unknown";
}

PenaltyResult penalty(const PulseEnsemble& pulse, const DeviceSpec& device, double duration,
                      double weight) {
  const TimeGrid grid = TimeGrid::make(duration, device.steps_per_ns);
  PenaltyResult result;
  result.gradient = RealVector::Zero(pulse.n_params());
  if (weight == 0.0) return result;

  double total = 0.0;
  for (int i = 0; i <= grid.steps; ++i) {
    const double t = i * grid.tau;
    for (int q = 0; q < pulse.n_qubits; ++q) {
      const int window = pulse.grids[q].window_index(t);
      const Complex omega = pulse.window_amplitude(q, window);
      const double modulus = std::abs(omega);
      const double excess = modulus - device.omega_max;
      if (excess <= 0.0) continue;
      total += excess * excess;
      // d|Omega|/dtheta per window parameter; modulus > 0 here.
      switch (pulse.form) {
        case Parameterization::CartesianAmplitude:
        case Parameterization::CartesianAmplitudeDetuned: {
          result.gradient[pulse.amplitude_param_index(q, window, 0)] +=
              2.0 * excess * omega.real() / modulus;
          result.gradient[pulse.amplitude_param_index(q, window, 1)] +=
              2.0 * excess * omega.imag() / modulus;
          break;
        }
        case Parameterization::PolarAmplitude: {
          const double a =
              pulse.amplitude_params[q][static_cast<std::size_t>(window) * 2];
          result.gradient[pulse.amplitude_param_index(q, window, 0)] +=
              2.0 * excess * (a >= 0.0 ? 0.5 : -0.5);
          break;
        }
        case Parameterization::RealAmplitude:
        case Parameterization::RealAmplitudeDetuned: {
          const double a = pulse.amplitude_params[q][window];
          result.gradient[pulse.amplitude_param_index(q, window, 0)] +=
              2.0 * excess * (a >= 0.0 ? 1.0 : -1.0);
          break;
        }
      }
    }
  }
  result.value = weight * grid.tau * total;
  result.gradient *= weight * grid.tau;
  return result;
}

namespace {

double linf_norm(const RealVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Minimizer of the cubic Hermite interpolant through (a, fa, da), (b, fb, db).
// Falls back to bisection when the interpolant is degenerate.
double cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  double disc = d1 * d1 - da * db;
  if (disc < 0.0) return 0.5 * (a + b);
  const double d2 = (b > a ? 1.0 : -1.0) * std::sqrt(disc);
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0) return 0.5 * (a + b);
  const double candidate = b - (b - a) * (db + d2 - d1) / denom;
  if (!std::isfinite(candidate)) return 0.5 * (a + b);
  return candidate;
}

struct LinePoint {
  double alpha;
  double value;
  double slope;
  RealVector x;
  RealVector gradient;
};

struct LineSearchOutcome {
  bool success = false;
  LinePoint point;
  int evals = 0;
};

class LineObjective {
 public:
  LineObjective(const ObjectiveFn& f, const RealVector& x0, const RealVector& direction)
      : f_(f), x0_(x0), direction_(direction) {}

  LinePoint at(double alpha) {
    LinePoint p;
    p.alpha = alpha;
    p.x = x0_ + alpha * direction_;
    p.value = f_(p.x, p.gradient);
    p.slope = p.gradient.dot(direction_);
    ++evals_;
    return p;
  }

  int evals() const { return evals_; }

 private:
  const ObjectiveFn& f_;
  const RealVector& x0_;
  const RealVector& direction_;
  int evals_ = 0;
};

// Strong-Wolfe line search with bracketing and cubic-interpolation zoom.
LineSearchOutcome wolfe_line_search(LineObjective& line, double f0, double slope0,
                                    const OptimizerConfig& config) {
  LineSearchOutcome outcome;
  const double c1 = config.wolfe_c1;
  const double c2 = config.wolfe_c2;
  const int budget = config.max_line_search_steps;

  auto wolfe_ok = [&](const LinePoint& p) {
    return p.value <= f0 + c1 * p.alpha * slope0 && std::abs(p.slope) <= -c2 * slope0;
  };

  auto zoom = [&](LinePoint lo, LinePoint hi) {
    while (line.evals() < budget) {
      double alpha = cubic_minimizer(lo.alpha, lo.value, lo.slope, hi.alpha, hi.value, hi.slope);
      const double left = std::min(lo.alpha, hi.alpha);
      const double right = std::max(lo.alpha, hi.alpha);
      const double margin = 0.1 * (right - left);
      if (!(alpha > left + margin && alpha < right - margin)) alpha = 0.5 * (left + right);
      if (right - left < 1e-16 * std::max(1.0, right)) break;

      LinePoint p = line.at(alpha);
      if (!std::isfinite(p.value)) break;
      if (p.value > f0 + c1 * alpha * slope0 || p.value >= lo.value) {
        hi = std::move(p);
        continue;
      }
      if (std::abs(p.slope) <= -c2 * slope0) {
        outcome.success = true;
        outcome.point = std::move(p);
        return;
      }
      if (p.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = std::move(p);
    }
    // No interior Wolfe point found; accept lo if it at least decreases.
    if (lo.alpha > 0.0 && lo.value < f0) {
      outcome.success = true;
      outcome.point = std::move(lo);
    }
  };

  LinePoint prev;
  prev.alpha = 0.0;
  prev.value = f0;
  prev.slope = slope0;

  double alpha = 1.0;
  while (line.evals() < budget) {
    LinePoint p = line.at(alpha);
    if (!std::isfinite(p.value)) {
      zoom(prev, std::move(p));
      return outcome;
    }
    if (p.value > f0 + c1 * alpha * slope0 || (prev.alpha > 0.0 && p.value >= prev.value)) {
      zoom(std::move(prev), std::move(p));
      return outcome;
    }
    if (wolfe_ok(p)) {
      outcome.success = true;
      outcome.point = std::move(p);
      return outcome;
    }
    if (p.slope >= 0.0) {
      zoom(std::move(p), std::move(prev));
      return outcome;
    }
    prev = std::move(p);
    alpha *= 2.0;
    if (alpha > 1e12) break;
  }
  return outcome;
}

}  // namespace

OptResult bfgs_minimize(const ObjectiveFn& objective, const RealVector& x0,
                        const OptimizerConfig& config, const IterationCallback& callback) {
  config.validate();
  const Eigen::Index n = x0.size();

  OptResult result;
  result.parameters = x0;
  RealVector gradient(n);
  double value = objective(x0, gradient);
  int evals = 1;

  auto finish = [&](Termination reason, double f, const RealVector& x, const RealVector& g) {
    result.reason = reason;
    result.converged = reason == Termination::Converged;
    result.objective_value = f;
    result.parameters = x;
    result.objective_evals = evals;
    result.gradient_evals = evals;
    (void)g;
    return result;
  };

  if (!std::isfinite(value) || !gradient.allFinite())
    return finish(Termination::NonFiniteObjective, value, x0, gradient);
  if (linf_norm(gradient) <= config.gradient_tolerance)
    return finish(Termination::Converged, value, x0, gradient);

  RealVector x = x0;
  RealMatrix inverse_hessian = RealMatrix::Identity(n, n);
  bool scale_pending = true;

  while (result.iterations < config.max_iterations) {
    RealVector direction = -(inverse_hessian * gradient);
    double slope = gradient.dot(direction);
    if (!(slope < 0.0)) {
      // Lost positive definiteness; restart from steepest descent.
      inverse_hessian.setIdentity();
      scale_pending = true;
      direction = -gradient;
      slope = gradient.dot(direction);
      if (!(slope < 0.0)) return finish(Termination::LineSearchFailure, value, x, gradient);
    }

    LineObjective line(objective, x, direction);
    LineSearchOutcome search = wolfe_line_search(line, value, slope, config);
    evals += line.evals();
    if (!search.success) return finish(Termination::LineSearchFailure, value, x, gradient);
    if (!std::isfinite(search.point.value) || !search.point.gradient.allFinite())
      return finish(Termination::NonFiniteObjective, search.point.value, search.point.x,
                    search.point.gradient);

    const RealVector step = search.point.x - x;
    const RealVector delta_gradient = search.point.gradient - gradient;
    if (step.cwiseAbs().maxCoeff() <= 1e-16 * (1.0 + x.cwiseAbs().maxCoeff()))
      return finish(Termination::LineSearchFailure, value, x, gradient);

    x = search.point.x;
    value = search.point.value;
    gradient = search.point.gradient;
    ++result.iterations;

    if (callback)
      callback({result.iterations, value, linf_norm(gradient), search.point.alpha, x});

    if (linf_norm(gradient) <= config.gradient_tolerance)
      return finish(Termination::Converged, value, x, gradient);

    const double sy = step.dot(delta_gradient);
    if (sy > 1e-12 * step.norm() * delta_gradient.norm()) {
      if (scale_pending) {
        const double yy = delta_gradient.squaredNorm();
        if (yy > 0.0) inverse_hessian *= sy / yy;
        scale_pending = false;
      }
      const double rho = 1.0 / sy;
      const RealVector hy = inverse_hessian * delta_gradient;
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      inverse_hessian.noalias() -= rho * (step * hy.transpose() + hy * step.transpose());
      inverse_hessian.noalias() +=
          (rho * rho * delta_gradient.dot(hy) + rho) * (step * step.transpose());
    }
  }
  return finish(Termination::MaxIterations, value, x, gradient);
}

VqeObjective::VqeObjective(const Problem& problem, const Evolver& evolver,
                           PulseEnsemble prototype, double duration, double penalty_weight)
    : problem_(&problem),
      evolver_(&evolver),
      prototype_(std::move(prototype)),
      duration_(duration),
      penalty_weight_(penalty_weight) {}

double VqeObjective::operator()(const RealVector& x, RealVector& gradient) const {
  PulseEnsemble pulse = prototype_;
  pulse.unpack(x);
  const EnergyGradient eg = energy_gradient(pulse, *evolver_, *problem_, duration_);
  const PenaltyResult pen = penalty(pulse, evolver_->device(), duration_, penalty_weight_);
  gradient = eg.gradient + pen.gradient;
  last_energy_ = eg.energy;
  last_penalty_ = pen.value;
  ++evals_;
  return eg.energy + pen.value;
}

OptResult minimize_pulse(const Problem& problem, const Evolver& evolver,
                         const PulseEnsemble& prototype, double duration, const RealVector& x0,
                         const OptimizerConfig& config, const PulseTraceCallback& trace) {
  VqeObjective objective(problem, evolver, prototype, duration, config.penalty_weight);
  ObjectiveFn fn = [&objective](const RealVector& x, RealVector& g) { return objective(x, g); };

  IterationCallback callback;
  if (trace) {
    callback = [&](const IterationInfo& info) {
      trace({info.iteration, info.objective, objective.last_energy(),
             objective.last_penalty(), info.gradient_linf, info.step_length, info.x});
    };
  }

  OptResult result = bfgs_minimize(fn, x0, config, callback);
  // Re-evaluate the accepted point so the energy/penalty split refers to it.
  RealVector g(result.parameters.size());
  result.objective_value = objective(result.parameters, g);
  result.energy = objective.last_energy();
  result.penalty = objective.last_penalty();
  result.objective_evals = objective.evaluations();
  result.gradient_evals = objective.evaluations();
  return result;
}

}  // namespace pulsevqe

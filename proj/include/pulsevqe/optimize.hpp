#pragma once

#include <functional>
#include <string>

#include "pulsevqe/gradients.hpp"

namespace pulsevqe {

struct OptimizerConfig {
  double gradient_tolerance = 1e-6;  // L-infinity norm of the gradient
  int max_iterations = 10000;
  double penalty_weight = 1.0;  // Hartree per (rad/ns)^2 per ns
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search_steps = 50;

  void validate() const;
};

enum class Termination {
  Converged,
  MaxIterations,
  LineSearchFailure,
  NonFiniteObjective,
};

std::string termination_name(Termination reason);

struct OptResult {
  RealVector parameters;
  double objective_value = std::numeric_limits<double>::quiet_NaN();
  double energy = std::numeric_limits<double>::quiet_NaN();
  double penalty = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  int objective_evals = 0;
  int gradient_evals = 0;
  bool converged = false;
  Termination reason = Termination::MaxIterations;
};

struct PenaltyResult {
  double value = 0.0;
  RealVector gradient;
};

// Smooth amplitude-bound penalty
//   weight * tau * sum_{q,i} h(|Omega_q(t_i)| - omega_max),  h(u) = u^2 for u > 0
// summed over the evolution grid points. Zero value and gradient whenever
// every |Omega| stays within the bound.
PenaltyResult penalty(const PulseEnsemble& pulse, const DeviceSpec& device, double duration,
                      double weight);

// Objective contract: fill `gradient` (resized by the callee) and return the
// value. Value and gradient are always computed together.
using ObjectiveFn = std::function<double(const RealVector& x, RealVector& gradient)>;

struct IterationInfo {
  int iteration;
  double objective;
  double gradient_linf;
  double step_length;
  const RealVector& x;
};

using IterationCallback = std::function<void(const IterationInfo&)>;

// BFGS with a strong-Wolfe cubic-interpolation line search. Terminates when
// the gradient L-infinity norm reaches the tolerance, on iteration budget, or
// when the line search cannot make progress; the accepted objective value is
// non-increasing across iterations.
OptResult bfgs_minimize(const ObjectiveFn& objective, const RealVector& x0,
                        const OptimizerConfig& config, const IterationCallback& callback = {});

// Full pulse objective: rotating-frame energy plus the amplitude-bound
// penalty. Instances are cheap; use one per concurrent minimization.
class VqeObjective {
 public:
  VqeObjective(const Problem& problem, const Evolver& evolver, PulseEnsemble prototype,
               double duration, double penalty_weight);

  double operator()(const RealVector& x, RealVector& gradient) const;

  double last_energy() const { return last_energy_; }
  double last_penalty() const { return last_penalty_; }
  int evaluations() const { return evals_; }

 private:
  const Problem* problem_;
  const Evolver* evolver_;
  PulseEnsemble prototype_;
  double duration_;
  double penalty_weight_;
  mutable double last_energy_ = 0.0;
  mutable double last_penalty_ = 0.0;
  mutable int evals_ = 0;
};

struct PulseTracePoint {
  int iteration;
  double objective;
  double energy;
  double penalty;
  double gradient_linf;
  double step_length;
  const RealVector& x;
};

using PulseTraceCallback = std::function<void(const PulseTracePoint&)>;

// Minimize the pulse objective from x0; the result carries the bare energy
// and penalty re-evaluated at the optimum.
OptResult minimize_pulse(const Problem& problem, const Evolver& evolver,
                         const PulseEnsemble& prototype, double duration, const RealVector& x0,
                         const OptimizerConfig& config, const PulseTraceCallback& trace = {});

}  // namespace pulsevqe

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pulsevqe/optimize.hpp"

namespace pulsevqe {

// Constant single-qubit drive in the rotating frame:
//   H(t) = Omega e^{i Delta t} a + h.c.,  Omega = A e^{i phase} / 2.
struct RabiSetting {
  double amplitude = 0.0;  // A, rad/ns
  double detuning = 0.0;   // Delta, rad/ns
  double phase = 0.0;      // phi, rad

  double rabi_rate() const;       // lambda = sqrt(A^2 + Delta^2)
  double max_polar_angle() const; // theta_max = 2 atan2(A, Delta); pi on resonance
};

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;
};

// Closed-form Bloch trajectory from |0> (north pole). A = Delta = 0 returns
// the north pole for all t.
BlochVector rabi_trajectory(const RabiSetting& setting, double t);

struct SweepRow {
  double duration = 0.0;  // ns
  int n_windows = 0;
  double energy = std::numeric_limits<double>::quiet_NaN();
  double error = std::numeric_limits<double>::quiet_NaN();  // energy - ground_energy
  int iterations = 0;
  int objective_evals = 0;
  int gradient_evals = 0;
  bool converged = false;
  std::string init_mode = "zero";
  std::uint64_t seed = 0;
  std::string termination;
};

struct SweepConfig {
  Parameterization form = Parameterization::CartesianAmplitude;
  double min_window_length = 3.0;  // ns
  std::vector<double> durations;   // ascending
  InitConfig init;
  OptimizerConfig optimizer;
  int jobs = 1;
};

// Invoked in ascending duration (and seed) order as rows complete, so a
// partial sweep can be persisted incrementally.
using RowCallback = std::function<void(const SweepRow&)>;

// One optimization per duration. A failure at one duration is recorded in its
// row and the sweep continues. The problem's ground energy is computed if
// not already present.
std::vector<SweepRow> emet_sweep(const Problem& problem, const DeviceSpec& device,
                                 const SweepConfig& config, const RowCallback& on_row = {});

// n_restarts independent optimizations per duration from distinct derived
// seeds (recorded per row).
std::vector<SweepRow> multistart(const Problem& problem, const DeviceSpec& device,
                                 const SweepConfig& config, int n_restarts,
                                 const RowCallback& on_row = {});

// First duration whose error is below the threshold.
std::optional<double> detect_transition(const std::vector<SweepRow>& rows,
                                        double threshold = 1e-8);

// Best (lowest) energy per duration, ascending in duration.
std::vector<SweepRow> best_per_duration(const std::vector<SweepRow>& rows);

}  // namespace pulsevqe

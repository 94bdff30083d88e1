#pragma once

#include <span>
#include <vector>

#include "pulsevqe/model.hpp"
#include "pulsevqe/pulses.hpp"

namespace pulsevqe {

// Uniform evolution grid: r = ceil(steps_per_ns * T) steps of length tau = T / r.
struct TimeGrid {
  double duration = 0.0;
  int steps = 0;
  double tau = 0.0;

  static TimeGrid make(double duration, int steps_per_ns);
};

// Rotating-frame states at times 0, tau, 2 tau, ..., T.
struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexVector> states;
};

// Rotating-frame time evolution under a device and a pulse ensemble.
//
// The propagator is the symmetric product
//   U_R = e^{+iT H0} * prod_{j=r..1} e^{-i tau V_j/2} e^{-i tau H0} e^{-i tau V_{j-1}/2}
// with the drive sampled at grid times, V_j = sum_q (z_q(t_j) a_q + h.c.),
// z_q(t) = Omega_q(t) e^{i nu_q t}. Adjacent half-steps of the same V_j merge
// into a single full step. The drive factor splits exactly into commuting
// single-qubit 2x2 exponentials; the static factor is applied through the
// eigendecomposition of H0, computed once per Evolver.
class Evolver {
 public:
  explicit Evolver(DeviceSpec device);

  const DeviceSpec& device() const { return device_; }
  const RealVector& h0_eigenvalues() const { return evals_; }
  const ComplexMatrix& h0_eigenvectors() const { return evecs_; }

  QuantumState evolve(const QuantumState& reference, const PulseEnsemble& pulse,
                      double duration) const;
  Trajectory evolve_trajectory(const QuantumState& reference, const PulseEnsemble& pulse,
                               double duration) const;

  // Evolution over grid steps [step_begin, step_end] of the grid for
  // total_duration, taking and returning rotating-frame states. Composing
  // consecutive segments reproduces the full evolution.
  QuantumState evolve_segment(const QuantumState& state, const PulseEnsemble& pulse,
                              double total_duration, int step_begin, int step_end) const;

  // Building blocks shared with the gradient sweeps.
  ComplexMatrix h0_step_operator(double dt) const;          // dense e^{-i dt H0}
  void apply_frame_rotation(ComplexVector& psi, double t) const;  // psi <- e^{+i t H0} psi
  std::vector<Complex> drive_samples(const PulseEnsemble& pulse, double t) const;

  // psi <- e^{-i dt sum_q (z_q a_q + h.c.)} psi, one 2x2 kernel per qubit.
  static void apply_drive_exponential(ComplexVector& psi, std::span<const Complex> z,
                                      double dt);

 private:
  void check_compatible(const QuantumState& state, const PulseEnsemble& pulse,
                        double duration) const;

  DeviceSpec device_;
  RealVector evals_;
  ComplexMatrix evecs_;
};

// <psi|O|psi>. The imaginary part must vanish to 1e-10 (NumericalError
// otherwise); the real part is returned.
double measure_energy(const QuantumState& state, const Problem& problem);

// Entry (i, j) = |<a_i|b_j>|^2 between two recorded trajectories.
RealMatrix fidelity_map(const Trajectory& a, const Trajectory& b);

}  // namespace pulsevqe

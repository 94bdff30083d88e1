#pragma once

#include "pulsevqe/dynamics.hpp"

namespace pulsevqe {

// Per-qubit, per-grid-time derivative kernels
//   x(q, i) = Im <lambda_i| Q_q |psi_i>,   y(q, i) = Im <lambda_i| P_q |psi_i>
// with Q_q = a_q + a_q^dag and P_q = i(a_q - a_q^dag). Shape n_qubits x (r+1).
struct GradientSignals {
  RealMatrix x;
  RealMatrix y;
};

struct EnergyGradient {
  double energy = 0.0;
  RealVector gradient;  // canonical parameter order of the pulse
  GradientSignals signals;
};

// One forward propagation of the state and one backward propagation of the
// costate; cost is a small multiple of a single evolve call.
GradientSignals gradient_signals(const PulseEnsemble& pulse, const Evolver& evolver,
                                 const Problem& problem, double duration);

// Energy and its gradient with respect to the pulse parameters. The chain
// rule contracts the signals with d z_q(t_i)/d theta using trapezoidal
// end-point weights (half weight at i = 0 and i = r):
//   dE/dtheta = 2 tau sum_{q,i} w_i [ (dx_qi/dtheta) x(q,i) + (dy_qi/dtheta) y(q,i) ].
// Detunings use dx/dDelta = -t y_qi, dy/dDelta = +t x_qi.
EnergyGradient energy_gradient(const PulseEnsemble& pulse, const Evolver& evolver,
                               const Problem& problem, double duration);

// Quantum Fisher information F_kl = 4 Re[<d_k psi|d_l psi> -
// <d_k psi|psi><psi|d_l psi>] for the pure evolved state, with state
// derivatives by central finite differences on the fixed evolution grid.
RealMatrix fisher_information(const PulseEnsemble& pulse, const Evolver& evolver,
                              const QuantumState& reference, double duration,
                              double fd_step = 1e-4);

// Effective quantum dimension: number of singular values of the Fisher
// matrix above 1e-8 * max(1, s_max).
int quantum_fisher_rank(const PulseEnsemble& pulse, const Evolver& evolver,
                        const QuantumState& reference, double duration,
                        double fd_step = 1e-4);

int fisher_rank_from_matrix(const RealMatrix& fisher);

}  // namespace pulsevqe

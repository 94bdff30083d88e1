#include "pulsevqe/gradients.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace pulsevqe {

namespace {

// <lambda| Q_q |psi> and <lambda| P_q |psi> in one pass over the bit pairs.
// With s1 = sum over lower indices of conj(lambda_lo) psi_hi and
// s2 = sum of conj(lambda_hi) psi_lo:
//   <lambda|Q|psi> = s1 + s2,   <lambda|P|psi> = i s1 - i s2.
struct QPOverlap {
  double imag_q;
  double imag_p;
};

QPOverlap qp_overlap(const ComplexVector& lambda, const ComplexVector& psi, int qubit) {
  const Eigen::Index bit = Eigen::Index{1} << qubit;
  Complex s1{0.0, 0.0};
  Complex s2{0.0, 0.0};
  for (Eigen::Index base = 0; base < psi.size(); ++base) {
    if (base & bit) continue;
    const Eigen::Index upper = base | bit;
    s1 += std::conj(lambda[base]) * psi[upper];
    s2 += std::conj(lambda[upper]) * psi[base];
  }
  return {(s1 + s2).imag(), s1.real() - s2.real()};
}

struct SignalSweep {
  double energy;
  GradientSignals signals;
  std::vector<std::vector<Complex>> samples;  // z_q(t_i), (r+1) x n
  TimeGrid grid;
};

SignalSweep run_signal_sweep(const PulseEnsemble& pulse, const Evolver& evolver,
                             const Problem& problem, double duration) {
  const DeviceSpec& device = evolver.device();
  if (problem.dim() != device.dim())
    throw ValidationError("gradient: problem dimension does not match the device");
  if (pulse.n_qubits != device.n_qubits)
    throw ValidationError("gradient: pulse qubit count does not match the device");

  const TimeGrid grid = TimeGrid::make(duration, device.steps_per_ns);
  const int r = grid.steps;
  const double tau = grid.tau;
  const int n = device.n_qubits;

  std::vector<std::vector<Complex>> samples(r + 1);
  for (int j = 0; j <= r; ++j) samples[j] = evolver.drive_samples(pulse, j * tau);

  const ComplexMatrix u_fwd = evolver.h0_step_operator(tau);
  const ComplexMatrix u_bwd = evolver.h0_step_operator(-tau);

  // Forward sweep: psi_i for i = 0..r, without the final frame prefix.
  const QuantumState reference = basis_state(problem.n_qubits, problem.reference_index);
  std::vector<ComplexVector> forward(r + 1);
  forward[0] = reference.amplitudes;
  ComplexVector psi = reference.amplitudes;
  for (int j = 1; j <= r; ++j) {
    Evolver::apply_drive_exponential(psi, samples[j - 1], tau / 2.0);
    psi = u_fwd * psi;
    Evolver::apply_drive_exponential(psi, samples[j], tau / 2.0);
    forward[j] = psi;
  }

  ComplexVector rotated = forward[r];
  evolver.apply_frame_rotation(rotated, duration);
  const Complex expectation = rotated.dot(problem.observable * rotated);
  if (std::abs(expectation.imag()) >= 1e-10)
    throw NumericalError("gradient: energy expectation has a non-real component");

  // Costate sweep: lambda_r = e^{-iT H0} O U_R |ref>, then peel one block per step.
  ComplexVector lambda = problem.observable * rotated;
  evolver.apply_frame_rotation(lambda, -duration);

  GradientSignals signals;
  signals.x = RealMatrix(n, r + 1);
  signals.y = RealMatrix(n, r + 1);
  for (int q = 0; q < n; ++q) {
    const QPOverlap o = qp_overlap(lambda, forward[r], q);
    signals.x(q, r) = o.imag_q;
    signals.y(q, r) = o.imag_p;
  }
  for (int i = r; i >= 1; --i) {
    Evolver::apply_drive_exponential(lambda, samples[i], -tau / 2.0);
    lambda = u_bwd * lambda;
    Evolver::apply_drive_exponential(lambda, samples[i - 1], -tau / 2.0);
    for (int q = 0; q < n; ++q) {
      const QPOverlap o = qp_overlap(lambda, forward[i - 1], q);
      signals.x(q, i - 1) = o.imag_q;
      signals.y(q, i - 1) = o.imag_p;
    }
  }
  if (!signals.x.allFinite() || !signals.y.allFinite())
    throw NumericalError("gradient: non-finite gradient signal");

  return {expectation.real(), std::move(signals), std::move(samples), grid};
}

}  // namespace

GradientSignals gradient_signals(const PulseEnsemble& pulse, const Evolver& evolver,
                                 const Problem& problem, double duration) {
  return run_signal_sweep(pulse, evolver, problem, duration).signals;
}

EnergyGradient energy_gradient(const PulseEnsemble& pulse, const Evolver& evolver,
                               const Problem& problem, double duration) {
  SignalSweep sweep = run_signal_sweep(pulse, evolver, problem, duration);
  const int r = sweep.grid.steps;
  const double tau = sweep.grid.tau;

  RealVector gradient = RealVector::Zero(pulse.n_params());
  const bool detuned = has_detuning(pulse.form);

  for (int i = 0; i <= r; ++i) {
    const double t = i * tau;
    const double weight = (i == 0 || i == r) ? 0.5 : 1.0;
    for (int q = 0; q < pulse.n_qubits; ++q) {
      const int window = pulse.grids[q].window_index(t);
      const double phi_x = sweep.signals.x(q, i);
      const double phi_y = sweep.signals.y(q, i);
      const double angle = pulse.drive_frequency(q) * t;
      const Complex phase{std::cos(angle), std::sin(angle)};

      // d z / d theta for each window parameter; contributions are
      // Re(dz) phi_x + Im(dz) phi_y.
      switch (pulse.form) {
        case Parameterization::CartesianAmplitude:
        case Parameterization::CartesianAmplitudeDetuned: {
          const Complex dz_da = phase;
          const Complex dz_db = Complex{0.0, 1.0} * phase;
          gradient[pulse.amplitude_param_index(q, window, 0)] +=
              weight * (dz_da.real() * phi_x + dz_da.imag() * phi_y);
          gradient[pulse.amplitude_param_index(q, window, 1)] +=
              weight * (dz_db.real() * phi_x + dz_db.imag() * phi_y);
          break;
        }
        case Parameterization::PolarAmplitude: {
          const double* p =
              &pulse.amplitude_params[q][static_cast<std::size_t>(window) * 2];
          const Complex unit_phase{std::cos(p[1]), std::sin(p[1])};
          const Complex omega = 0.5 * p[0] * unit_phase;
          const Complex dz_dA = 0.5 * unit_phase * phase;
          const Complex dz_dphi = Complex{0.0, 1.0} * omega * phase;
          gradient[pulse.amplitude_param_index(q, window, 0)] +=
              weight * (dz_dA.real() * phi_x + dz_dA.imag() * phi_y);
          gradient[pulse.amplitude_param_index(q, window, 1)] +=
              weight * (dz_dphi.real() * phi_x + dz_dphi.imag() * phi_y);
          break;
        }
        case Parameterization::RealAmplitude:
        case Parameterization::RealAmplitudeDetuned: {
          gradient[pulse.amplitude_param_index(q, window, 0)] +=
              weight * (phase.real() * phi_x + phase.imag() * phi_y);
          break;
        }
      }
      if (detuned) {
        const Complex z = sweep.samples[i][q];
        gradient[pulse.detuning_param_index(q)] +=
            weight * t * (-z.imag() * phi_x + z.real() * phi_y);
      }
    }
  }
  gradient *= 2.0 * tau;

  EnergyGradient result;
  result.energy = sweep.energy;
  result.gradient = std::move(gradient);
  result.signals = std::move(sweep.signals);
  return result;
}

RealMatrix fisher_information(const PulseEnsemble& pulse, const Evolver& evolver,
                              const QuantumState& reference, double duration, double fd_step) {
  const int n_params = pulse.n_params();
  const RealVector x = pulse.pack();
  PulseEnsemble scratch = pulse;

  const ComplexVector psi = evolver.evolve(reference, pulse, duration).amplitudes;
  std::vector<ComplexVector> derivatives(n_params);
  for (int k = 0; k < n_params; ++k) {
    RealVector xp = x;
    xp[k] += fd_step;
    scratch.unpack(xp);
    const ComplexVector plus = evolver.evolve(reference, scratch, duration).amplitudes;
    RealVector xm = x;
    xm[k] -= fd_step;
    scratch.unpack(xm);
    const ComplexVector minus = evolver.evolve(reference, scratch, duration).amplitudes;
    derivatives[k] = (plus - minus) / (2.0 * fd_step);
    if (!derivatives[k].allFinite())
      throw NumericalError("fisher_information: non-finite state derivative");
  }

  RealMatrix fisher(n_params, n_params);
  std::vector<Complex> overlap_with_state(n_params);
  for (int k = 0; k < n_params; ++k) overlap_with_state[k] = derivatives[k].dot(psi);
  for (int k = 0; k < n_params; ++k) {
    for (int l = k; l < n_params; ++l) {
      const Complex term = derivatives[k].dot(derivatives[l]) -
                           overlap_with_state[k] * std::conj(overlap_with_state[l]);
      fisher(k, l) = 4.0 * term.real();
      fisher(l, k) = fisher(k, l);
    }
  }
  return fisher;
}

int fisher_rank_from_matrix(const RealMatrix& fisher) {
  Eigen::BDCSVD<RealMatrix> svd(fisher);
  const RealVector& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double threshold = 1e-8 * std::max(1.0, sv[0]);
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] > threshold) ++rank;
  }
  return rank;
}

int quantum_fisher_rank(const PulseEnsemble& pulse, const Evolver& evolver,
                        const QuantumState& reference, double duration, double fd_step) {
  return fisher_rank_from_matrix(
      fisher_information(pulse, evolver, reference, duration, fd_step));
}

}  // namespace pulsevqe

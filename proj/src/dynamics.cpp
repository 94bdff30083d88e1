#include "pulsevqe/dynamics.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace pulsevqe {

TimeGrid TimeGrid::make(double duration, int steps_per_ns) {
  if (!(duration > 0.0)) throw ValidationError("time grid: duration must be positive");
  if (steps_per_ns < 1) throw ValidationError("time grid: steps_per_ns must be at least 1");
  // Slack keeps exact multiples from picking up a spurious extra step.
  int steps = static_cast<int>(std::ceil(steps_per_ns * duration - 1e-9));
  if (steps < 1) steps = 1;
  TimeGrid grid;
  grid.duration = duration;
  grid.steps = steps;
  grid.tau = duration / steps;
  return grid;
}

Evolver::Evolver(DeviceSpec device) : device_(std::move(device)) {
  device_.validate();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(build_static_hamiltonian(device_));
  if (solver.info() != Eigen::Success)
    throw NumericalError("evolver: eigendecomposition of the static Hamiltonian failed");
  evals_ = solver.eigenvalues();
  evecs_ = solver.eigenvectors();
}

ComplexMatrix Evolver::h0_step_operator(double dt) const {
  ComplexVector phases(evals_.size());
  for (Eigen::Index k = 0; k < evals_.size(); ++k) {
    const double angle = -dt * evals_[k];
    phases[k] = Complex{std::cos(angle), std::sin(angle)};
  }
  return evecs_ * phases.asDiagonal() * evecs_.adjoint();
}

void Evolver::apply_frame_rotation(ComplexVector& psi, double t) const {
  if (t == 0.0) return;
  ComplexVector w = evecs_.adjoint() * psi;
  for (Eigen::Index k = 0; k < evals_.size(); ++k) {
    const double angle = t * evals_[k];
    w[k] *= Complex{std::cos(angle), std::sin(angle)};
  }
  psi = evecs_ * w;
}

std::vector<Complex> Evolver::drive_samples(const PulseEnsemble& pulse, double t) const {
  std::vector<Complex> z(pulse.n_qubits);
  for (int q = 0; q < pulse.n_qubits; ++q) z[q] = pulse.drive_sample(q, t);
  return z;
}

void Evolver::apply_drive_exponential(ComplexVector& psi, std::span<const Complex> z,
                                      double dt) {
  const Eigen::Index dim = psi.size();
  for (int q = 0; q < static_cast<int>(z.size()); ++q) {
    const Complex zq = z[q];
    const double modulus = std::abs(zq);
    if (modulus == 0.0) continue;
    const double theta = dt * modulus;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Complex u01 = Complex{0.0, -s} * (zq / modulus);
    const Complex u10 = Complex{0.0, -s} * (std::conj(zq) / modulus);
    const Eigen::Index bit = Eigen::Index{1} << q;
    for (Eigen::Index base = 0; base < dim; ++base) {
      if (base & bit) continue;
      const Eigen::Index upper = base | bit;
      const Complex v0 = psi[base];
      const Complex v1 = psi[upper];
      psi[base] = c * v0 + u01 * v1;
      psi[upper] = u10 * v0 + c * v1;
    }
  }
}

void Evolver::check_compatible(const QuantumState& state, const PulseEnsemble& pulse,
                               double duration) const {
  if (state.amplitudes.size() != device_.dim())
    throw ValidationError("evolve: state dimension does not match the device");
  if (pulse.n_qubits != device_.n_qubits)
    throw ValidationError("evolve: pulse qubit count does not match the device");
  for (const WindowGrid& grid : pulse.grids) {
    if (grid.duration < duration - 1e-9)
      throw ValidationError("evolve: pulse grid does not cover [0, T]");
  }
  state.validate();
}

QuantumState Evolver::evolve(const QuantumState& reference, const PulseEnsemble& pulse,
                             double duration) const {
  check_compatible(reference, pulse, duration);
  if (duration == 0.0) return reference;
  const TimeGrid grid = TimeGrid::make(duration, device_.steps_per_ns);
  return evolve_segment(reference, pulse, duration, 0, grid.steps);
}

QuantumState Evolver::evolve_segment(const QuantumState& state, const PulseEnsemble& pulse,
                                     double total_duration, int step_begin,
                                     int step_end) const {
  check_compatible(state, pulse, total_duration);
  const TimeGrid grid = TimeGrid::make(total_duration, device_.steps_per_ns);
  if (step_begin < 0 || step_end > grid.steps || step_begin > step_end)
    throw ValidationError("evolve: segment steps outside the evolution grid");

  QuantumState result{state.amplitudes};
  ComplexVector& psi = result.amplitudes;
  if (step_begin == step_end) return result;

  const double tau = grid.tau;
  apply_frame_rotation(psi, -step_begin * tau);
  const ComplexMatrix u_step = h0_step_operator(tau);

  std::vector<Complex> z = drive_samples(pulse, step_begin * tau);
  apply_drive_exponential(psi, z, tau / 2.0);
  for (int j = step_begin + 1; j < step_end; ++j) {
    psi = u_step * psi;
    z = drive_samples(pulse, j * tau);
    apply_drive_exponential(psi, z, tau);
  }
  psi = u_step * psi;
  z = drive_samples(pulse, step_end * tau);
  apply_drive_exponential(psi, z, tau / 2.0);

  apply_frame_rotation(psi, step_end * tau);
  return result;
}

Trajectory Evolver::evolve_trajectory(const QuantumState& reference, const PulseEnsemble& pulse,
                                      double duration) const {
  check_compatible(reference, pulse, duration);
  Trajectory trajectory;
  if (duration == 0.0) {
    trajectory.times.push_back(0.0);
    trajectory.states.push_back(reference.amplitudes);
    return trajectory;
  }
  const TimeGrid grid = TimeGrid::make(duration, device_.steps_per_ns);
  const double tau = grid.tau;
  const ComplexMatrix u_step = h0_step_operator(tau);

  trajectory.times.reserve(grid.steps + 1);
  trajectory.states.reserve(grid.steps + 1);
  ComplexVector psi = reference.amplitudes;
  trajectory.times.push_back(0.0);
  trajectory.states.push_back(psi);
  for (int j = 1; j <= grid.steps; ++j) {
    apply_drive_exponential(psi, drive_samples(pulse, (j - 1) * tau), tau / 2.0);
    psi = u_step * psi;
    apply_drive_exponential(psi, drive_samples(pulse, j * tau), tau / 2.0);
    ComplexVector framed = psi;
    apply_frame_rotation(framed, j * tau);
    trajectory.times.push_back(j * tau);
    trajectory.states.push_back(std::move(framed));
  }
  return trajectory;
}

double measure_energy(const QuantumState& state, const Problem& problem) {
  if (state.amplitudes.size() != problem.dim())
    throw ValidationError("measure_energy: state dimension does not match the observable");
  const Complex value = state.amplitudes.dot(problem.observable * state.amplitudes);
  if (std::abs(value.imag()) >= 1e-10)
    throw NumericalError("measure_energy: expectation value has a non-real component");
  return value.real();
}

RealMatrix fidelity_map(const Trajectory& a, const Trajectory& b) {
  if (a.states.empty() || b.states.empty())
    throw ValidationError("fidelity_map: empty trajectory");
  const Eigen::Index dim = a.states.front().size();
  for (const ComplexVector& s : b.states) {
    if (s.size() != dim) throw ValidationError("fidelity_map: trajectory dimensions differ");
  }
  RealMatrix map(a.states.size(), b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    for (std::size_t j = 0; j < b.states.size(); ++j) {
      const Complex overlap = a.states[i].dot(b.states[j]);
      map(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::norm(overlap);
    }
  }
  return map;
}

}  // namespace pulsevqe

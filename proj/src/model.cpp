#include "pulsevqe/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace pulsevqe {

void DeviceSpec::validate() const {
  if (n_qubits < 1) throw ConfigError("device: n_qubits must be positive");
  if (n_qubits > 20)
    throw ConfigError("device: more than 20 qubits exceeds the dense statevector range");
  if (static_cast<int>(qubit_freqs.size()) != n_qubits)
    throw ConfigError("device: qubit_freqs size does not match n_qubits");
  for (int q = 0; q < n_qubits; ++q) {
    if (!(qubit_freqs[q] > 0.0)) {
      std::ostringstream msg;
      msg << "device: qubit frequency " << (q + 1) << " must be strictly positive";
      throw ConfigError(msg.str());
    }
  }
  if (!(omega_max > 0.0)) throw ConfigError("device: omega_max must be strictly positive");
  if (steps_per_ns < 1) throw ConfigError("device: steps_per_ns must be at least 1");

  std::set<std::pair<int, int>> seen;
  for (const Coupling& c : couplings) {
    if (c.p < 1 || c.p > n_qubits || c.q < 1 || c.q > n_qubits) {
      std::ostringstream msg;
      msg << "device: coupling (" << c.p << ", " << c.q << ") references a qubit outside 1.."
          << n_qubits;
      throw ConfigError(msg.str());
    }
    if (c.p == c.q) throw ConfigError("device: coupling must join two distinct qubits");
    auto key = std::minmax(c.p, c.q);
    if (!seen.insert(key).second) {
      std::ostringstream msg;
      msg << "device: coupling pair (" << key.first << ", " << key.second
          << ") appears more than once";
      throw ConfigError(msg.str());
    }
  }
}

DeviceSpec default_device(int n_qubits) {
  if (n_qubits < 1) throw ConfigError("default_device: n_qubits must be positive");
  DeviceSpec device;
  device.n_qubits = n_qubits;
  device.qubit_freqs.reserve(n_qubits);
  for (int q = 1; q <= n_qubits; ++q) device.qubit_freqs.push_back((4.80 + 0.02 * q) * kTwoPi);
  for (int p = 1; p < n_qubits; ++p) device.couplings.push_back({p, p + 1, 0.02 * kTwoPi});
  device.omega_max = 0.02 * kTwoPi;
  device.steps_per_ns = 20;
  return device;
}

ComplexMatrix lowering_operator(int n_qubits, int qubit) {
  if (qubit < 1 || qubit > n_qubits) throw ConfigError("lowering_operator: qubit out of range");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  const Eigen::Index bit = Eigen::Index{1} << (qubit - 1);
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    if (idx & bit) a(idx ^ bit, idx) = 1.0;
  }
  return a;
}

ComplexMatrix build_static_hamiltonian(const DeviceSpec& device) {
  device.validate();
  const Eigen::Index dim = device.dim();
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  // Number terms are diagonal in the computational basis.
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    double e = 0.0;
    for (int q = 0; q < device.n_qubits; ++q) {
      if (idx & (Eigen::Index{1} << q)) e += device.qubit_freqs[q];
    }
    h(idx, idx) = e;
  }
  for (const Coupling& c : device.couplings) {
    const ComplexMatrix ap = lowering_operator(device.n_qubits, c.p);
    const ComplexMatrix aq = lowering_operator(device.n_qubits, c.q);
    h += c.strength * (ap.adjoint() * aq + aq.adjoint() * ap);
  }
  return h;
}

void Problem::validate() const {
  if (n_qubits < 1) throw ValidationError("problem: n_qubits must be positive");
  if (n_qubits > 20)
    throw ValidationError("problem: more than 20 qubits exceeds the dense observable range");
  const Eigen::Index d = dim();
  if (observable.rows() != d || observable.cols() != d)
    throw ValidationError("problem: observable dimension does not match 2^n_qubits");
  if (!is_hermitian(observable))
    throw ValidationError("problem: observable is not Hermitian to 1e-12");
  if (reference_index < 0 || reference_index >= d)
    throw ValidationError("problem: reference_index outside the basis range");
}

double exact_ground_energy(Problem& problem) {
  problem.validate();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(problem.observable,
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("exact_ground_energy: eigensolver failed to converge");
  problem.ground_energy = solver.eigenvalues().minCoeff();
  return problem.ground_energy;
}

void QuantumState::validate() const {
  if (amplitudes.size() == 0) throw ValidationError("state: empty amplitude vector");
  if (std::abs(norm() - 1.0) > 1e-10)
    throw ValidationError("state: amplitudes are not normalized to 1e-10");
}

QuantumState basis_state(int n_qubits, int index) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (index < 0 || index >= dim) throw ValidationError("basis_state: index outside the basis");
  QuantumState state;
  state.amplitudes = ComplexVector::Zero(dim);
  state.amplitudes[index] = 1.0;
  return state;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace pulsevqe

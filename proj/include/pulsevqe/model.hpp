#pragma once

#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "pulsevqe/errors.hpp"

namespace pulsevqe {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Static exchange coupling g (a_p^dag a_q + a_q^dag a_p) between qubits p and q.
// Qubit indices are 1-based; strengths are angular frequencies in rad/ns.
struct Coupling {
  int p = 0;
  int q = 0;
  double strength = 0.0;
};

// Two-level transmon device. All frequencies are angular, in rad/ns;
// configuration files carry GHz and are converted on ingestion.
struct DeviceSpec {
  int n_qubits = 0;
  std::vector<double> qubit_freqs;  // omega_q, index q-1
  std::vector<Coupling> couplings;
  double omega_max = 0.0;  // bound on the drive modulus |Omega|
  int steps_per_ns = 20;   // time-evolution resolution

  Eigen::Index dim() const { return Eigen::Index{1} << n_qubits; }

  // Throws ConfigError on inconsistent data (non-positive frequencies,
  // out-of-range or duplicate couplings, steps_per_ns < 1).
  void validate() const;
};

// Device with omega_q = (4.80 + 0.02 q) * 2pi rad/ns, linear nearest-neighbor
// couplings of 0.02 * 2pi, omega_max = 0.02 * 2pi, and 20 steps per ns.
DeviceSpec default_device(int n_qubits);

// Lowering operator a_q embedded in the full register by tensor product.
// Qubit 1 occupies the least-significant bit of the basis index.
ComplexMatrix lowering_operator(int n_qubits, int qubit);

// H0 = sum_q omega_q a_q^dag a_q + sum_<p,q> g_pq (a_p^dag a_q + a_q^dag a_p).
ComplexMatrix build_static_hamiltonian(const DeviceSpec& device);

// Eigenproblem instance: Hermitian observable (entries in Hartree for
// molecular problems) plus the computational-basis reference state.
struct Problem {
  int n_qubits = 0;
  ComplexMatrix observable;
  int reference_index = 0;
  double ground_energy = std::numeric_limits<double>::quiet_NaN();

  Eigen::Index dim() const { return Eigen::Index{1} << n_qubits; }
  void validate() const;
};

// Smallest eigenvalue of the observable; also stored in problem.ground_energy.
double exact_ground_energy(Problem& problem);

struct QuantumState {
  ComplexVector amplitudes;

  double norm() const { return amplitudes.norm(); }
  // Unit norm to 1e-10.
  void validate() const;
};

QuantumState basis_state(int n_qubits, int index);

bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12);

}  // namespace pulsevqe

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pulsevqe/model.hpp"

namespace pulsevqe {

// How the per-window drive amplitude and the drive frequency are parameterized.
enum class Parameterization {
  CartesianAmplitude,         // Omega = alpha + i beta, resonant
  PolarAmplitude,             // Omega = A e^{i phi} / 2, resonant
  RealAmplitude,              // Omega = alpha, resonant
  RealAmplitudeDetuned,       // Omega = alpha, one detuning per pulse
  CartesianAmplitudeDetuned,  // Omega = alpha + i beta, one detuning per pulse
};

int amplitude_params_per_window(Parameterization form);
bool has_detuning(Parameterization form);
std::string parameterization_name(Parameterization form);

// A pulse-shape label as it appears in configuration files. "ab2" halves the
// minimum window length and "ab-inf" ties it to the evolution time step; both
// share the Cartesian amplitude form.
struct PulseForm {
  Parameterization form = Parameterization::CartesianAmplitude;
  double min_window_scale = 1.0;
  bool window_per_step = false;
};

// Accepts "ab", "ab2", "ab-inf", "Aphi", "a", "aD", "abD"; throws ConfigError otherwise.
PulseForm parse_pulse_label(const std::string& label);
double resolve_min_window_length(const PulseForm& form, double base_min_window, int steps_per_ns);

// Uniform division of [0, T] into the largest number of windows whose
// length stays at or above a requested minimum.
struct WindowGrid {
  double duration = 0.0;       // T, ns
  int n_windows = 0;
  double window_length = 0.0;  // ns

  static WindowGrid from_min_length(double duration, double min_window_length);

  // Windows are half-open [start, end); the final window is closed at T.
  // Throws DomainError for t outside [0, T].
  int window_index(double t) const;
  std::vector<double> boundaries() const;
};

struct DriveValue {
  Complex omega;     // complex amplitude, rad/ns
  double frequency;  // drive frequency nu, rad/ns
};

// One drive per qubit under a common parameterization.
//
// Flat parameter order (canonical): for each qubit in ascending order, its
// window parameters in ascending window order (two-parameter forms interleave
// as (p0, p1) per window); detunings, one per qubit, are appended at the end
// for the detuned forms.
struct PulseEnsemble {
  Parameterization form = Parameterization::CartesianAmplitude;
  int n_qubits = 0;
  std::vector<WindowGrid> grids;                       // per qubit
  std::vector<double> qubit_freqs;                     // omega_q, rad/ns
  std::vector<std::vector<double>> amplitude_params;   // per qubit, window-minor
  std::vector<double> detunings;                       // Delta_q, rad/ns

  double duration() const { return grids.front().duration; }
  double drive_frequency(int qubit) const;             // nu_q = omega_q + Delta_q
  Complex window_amplitude(int qubit, int window) const;
  DriveValue drive_value(int qubit, double t) const;
  // z_q(t) = Omega_q(t) e^{i nu_q t}; real and imaginary parts are the
  // coefficients of the coordinate/momentum drive operators.
  Complex drive_sample(int qubit, double t) const;

  int n_params() const;
  int amplitude_param_index(int qubit, int window, int component) const;
  int detuning_param_index(int qubit) const;
  RealVector pack() const;
  void unpack(const RealVector& x);  // ValidationError on size mismatch
};

// Zero-amplitude, resonant pulse on every qubit with the same window grid.
PulseEnsemble make_pulse(const DeviceSpec& device, Parameterization form, const WindowGrid& grid);

enum class InitMode { Zero, Random };

struct InitConfig {
  InitMode mode = InitMode::Zero;
  std::uint64_t seed = 0;
  // Uniform sampling range for detunings under random mode; detunings stay
  // on resonance when unset.
  std::optional<std::pair<double, double>> detuning_range;
};

// Zero mode gives an all-zero vector (flat pulse on resonance). Random mode
// samples each amplitude component uniformly over a range that keeps
// |Omega| <= omega_max at every point: Cartesian components over
// [-omega_max/sqrt(2), +omega_max/sqrt(2)], real-only amplitudes over
// [-omega_max, +omega_max], polar moduli A over [0, 2 omega_max] with phases
// over [-pi, pi). Identical seeds give bit-identical vectors.
RealVector initialize_parameters(const PulseEnsemble& pulse, const DeviceSpec& device,
                                 const InitConfig& init);

}  // namespace pulsevqe

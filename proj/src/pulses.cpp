#include "pulsevqe/pulses.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace pulsevqe {

namespace {

// Uniform double in [0, 1) from the top 53 bits; identical streams on every
// platform, unlike std::uniform_real_distribution.
double uniform_unit(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

}  // namespace

int amplitude_params_per_window(Parameterization form) {
  switch (form) {
    case Parameterization::CartesianAmplitude:
    case Parameterization::PolarAmplitude:
    case Parameterization::CartesianAmplitudeDetuned:
      return 2;
    case Parameterization::RealAmplitude:
    case Parameterization::RealAmplitudeDetuned:
      return 1;
  }
  throw ConfigError("unknown parameterization");
}

bool has_detuning(Parameterization form) {
  return form == Parameterization::RealAmplitudeDetuned ||
         form == Parameterization::CartesianAmplitudeDetuned;
}

std::string parameterization_name(Parameterization form) {
  switch (form) {
    case Parameterization::CartesianAmplitude: return "ab";
    case Parameterization::PolarAmplitude: return "Aphi";
    case Parameterization::RealAmplitude: return "a";
    case Parameterization::RealAmplitudeDetuned: return "aD";
    case Parameterization::CartesianAmplitudeDetuned: return "abD";
  }
  throw ConfigError("unknown parameterization");
}

PulseForm parse_pulse_label(const std::string& label) {
  if (label == "ab") return {Parameterization::CartesianAmplitude, 1.0, false};
  if (label == "ab2") return {Parameterization::CartesianAmplitude, 0.5, false};
  if (label == "ab-inf") return {Parameterization::CartesianAmplitude, 1.0, true};
  if (label == "Aphi") return {Parameterization::PolarAmplitude, 1.0, false};
  if (label == "a") return {Parameterization::RealAmplitude, 1.0, false};
  if (label == "aD") return {Parameterization::RealAmplitudeDetuned, 1.0, false};
  if (label == "abD") return {Parameterization::CartesianAmplitudeDetuned, 1.0, false};
  throw ConfigError("unknown parameterization label '" + label +
                    "' (expected ab, ab2, ab-inf, Aphi, a, aD, abD)");
}

double resolve_min_window_length(const PulseForm& form, double base_min_window,
                                 int steps_per_ns) {
  if (form.window_per_step) return 1.0 / steps_per_ns;
  return base_min_window * form.min_window_scale;
}

WindowGrid WindowGrid::from_min_length(double duration, double min_window_length) {
  if (!(duration > 0.0)) throw ValidationError("window grid: duration must be positive");
  if (!(min_window_length > 0.0))
    throw ValidationError("window grid: minimum window length must be positive");
  // Small slack so exact integer ratios survive rounding.
  int n = static_cast<int>(std::floor(duration / min_window_length + 1e-9));
  if (n < 1) n = 1;
  WindowGrid grid;
  grid.duration = duration;
  grid.n_windows = n;
  grid.window_length = duration / n;
  return grid;
}

int WindowGrid::window_index(double t) const {
  // Tolerance for grid times landing an ulp outside [0, T].
  const double slack = 1e-9 * std::max(1.0, duration);
  if (!(t >= -slack && t <= duration + slack))
    throw DomainError("window grid: time outside the pulse interval [0, T]");
  if (t < 0.0) t = 0.0;
  int idx = static_cast<int>(t / window_length);
  if (idx >= n_windows) idx = n_windows - 1;
  return idx;
}

std::vector<double> WindowGrid::boundaries() const {
  std::vector<double> edges(n_windows + 1);
  for (int w = 0; w <= n_windows; ++w) edges[w] = w * window_length;
  edges[n_windows] = duration;
  return edges;
}

double PulseEnsemble::drive_frequency(int qubit) const {
  return qubit_freqs[qubit] + detunings[qubit];
}

Complex PulseEnsemble::window_amplitude(int qubit, int window) const {
  const int k = amplitude_params_per_window(form);
  const double* p = &amplitude_params[qubit][static_cast<std::size_t>(window) * k];
  switch (form) {
    case Parameterization::CartesianAmplitude:
    case Parameterization::CartesianAmplitudeDetuned:
      return {p[0], p[1]};
    case Parameterization::PolarAmplitude:
      return 0.5 * p[0] * Complex{std::cos(p[1]), std::sin(p[1])};
    case Parameterization::RealAmplitude:
    case Parameterization::RealAmplitudeDetuned:
      return {p[0], 0.0};
  }
  throw ConfigError("unknown parameterization");
}

DriveValue PulseEnsemble::drive_value(int qubit, double t) const {
  const int window = grids[qubit].window_index(t);
  return {window_amplitude(qubit, window), drive_frequency(qubit)};
}

Complex PulseEnsemble::drive_sample(int qubit, double t) const {
  const DriveValue v = drive_value(qubit, t);
  const double angle = v.frequency * t;
  return v.omega * Complex{std::cos(angle), std::sin(angle)};
}

int PulseEnsemble::n_params() const {
  const int k = amplitude_params_per_window(form);
  int count = 0;
  for (const WindowGrid& grid : grids) count += k * grid.n_windows;
  if (has_detuning(form)) count += n_qubits;
  return count;
}

int PulseEnsemble::amplitude_param_index(int qubit, int window, int component) const {
  const int k = amplitude_params_per_window(form);
  int base = 0;
  for (int q = 0; q < qubit; ++q) base += k * grids[q].n_windows;
  return base + k * window + component;
}

int PulseEnsemble::detuning_param_index(int qubit) const {
  if (!has_detuning(form)) throw ConfigError("parameterization has no detuning parameter");
  const int k = amplitude_params_per_window(form);
  int base = 0;
  for (int q = 0; q < n_qubits; ++q) base += k * grids[q].n_windows;
  return base + qubit;
}

RealVector PulseEnsemble::pack() const {
  RealVector x(n_params());
  int at = 0;
  for (int q = 0; q < n_qubits; ++q)
    for (double value : amplitude_params[q]) x[at++] = value;
  if (has_detuning(form))
    for (int q = 0; q < n_qubits; ++q) x[at++] = detunings[q];
  return x;
}

void PulseEnsemble::unpack(const RealVector& x) {
  if (x.size() != n_params()) {
    std::ostringstream msg;
    msg << "pulse: parameter vector has " << x.size() << " entries, expected " << n_params();
    throw ValidationError(msg.str());
  }
  int at = 0;
  for (int q = 0; q < n_qubits; ++q)
    for (double& value : amplitude_params[q]) value = x[at++];
  if (has_detuning(form))
    for (int q = 0; q < n_qubits; ++q) detunings[q] = x[at++];
}

PulseEnsemble make_pulse(const DeviceSpec& device, Parameterization form,
                         const WindowGrid& grid) {
  device.validate();
  PulseEnsemble pulse;
  pulse.form = form;
  pulse.n_qubits = device.n_qubits;
  pulse.grids.assign(device.n_qubits, grid);
  pulse.qubit_freqs = device.qubit_freqs;
  pulse.amplitude_params.assign(
      device.n_qubits,
      std::vector<double>(static_cast<std::size_t>(amplitude_params_per_window(form)) *
                              grid.n_windows,
                          0.0));
  pulse.detunings.assign(device.n_qubits, 0.0);
  return pulse;
}

RealVector initialize_parameters(const PulseEnsemble& pulse, const DeviceSpec& device,
                                 const InitConfig& init) {
  RealVector x = RealVector::Zero(pulse.n_params());
  if (init.mode == InitMode::Zero) return x;

  std::mt19937_64 rng(init.seed);
  const double omax = device.omega_max;
  const double cartesian_bound = omax / std::sqrt(2.0);
  const int k = amplitude_params_per_window(pulse.form);
  int at = 0;
  for (int q = 0; q < pulse.n_qubits; ++q) {
    for (int w = 0; w < pulse.grids[q].n_windows; ++w) {
      switch (pulse.form) {
        case Parameterization::CartesianAmplitude:
        case Parameterization::CartesianAmplitudeDetuned:
          x[at] = uniform_in(rng, -cartesian_bound, cartesian_bound);
          x[at + 1] = uniform_in(rng, -cartesian_bound, cartesian_bound);
          break;
        case Parameterization::PolarAmplitude:
          x[at] = uniform_in(rng, 0.0, 2.0 * omax);
          x[at + 1] = uniform_in(rng, -EIGEN_PI, EIGEN_PI);
          break;
        case Parameterization::RealAmplitude:
        case Parameterization::RealAmplitudeDetuned:
          x[at] = uniform_in(rng, -omax, omax);
          break;
      }
      at += k;
    }
  }
  if (has_detuning(pulse.form) && init.detuning_range) {
    for (int q = 0; q < pulse.n_qubits; ++q)
      x[at + q] = uniform_in(rng, init.detuning_range->first, init.detuning_range->second);
  }
  return x;
}

}  // namespace pulsevqe

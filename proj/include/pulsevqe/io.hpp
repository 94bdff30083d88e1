#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pulsevqe/analysis.hpp"
#include "pulsevqe/dynamics.hpp"

namespace pulsevqe::io {

using json = nlohmann::json;

// Locale-independent shortest-roundtrip decimal rendering ('.' separator).
std::string format_double(double value);

// Problem file: { "n_qubits", "reference_index", "observable": [[[re,im],...],...] }
// with a row-major dense matrix in Hartree.
Problem load_problem(const std::filesystem::path& path);
void save_problem(const Problem& problem, const std::filesystem::path& path);

// Device file: { "n_qubits", "qubit_freqs_ghz", "couplings": [[p,q,g_ghz],...],
//   "omega_max_ghz", "steps_per_ns" }. Frequencies are multiplied by 2 pi on
// ingestion (GHz -> rad/ns).
DeviceSpec load_device(const std::filesystem::path& path);
void save_device(const DeviceSpec& device, const std::filesystem::path& path);

// Pulse dump: parameterization label, per-qubit window boundaries, parameter
// values in canonical order, drive frequencies, plus a provenance block.
void save_pulse(const PulseEnsemble& pulse, const json& provenance,
                const std::filesystem::path& path);
PulseEnsemble load_pulse(const std::filesystem::path& path);

void save_state(const QuantumState& state, const json& provenance,
                const std::filesystem::path& path);

void save_trajectory(const Trajectory& trajectory, const json& provenance,
                     const std::filesystem::path& path);

// CSV grid of |<a_i|b_j>|^2, one row per time of `a`.
void save_fidelity_csv(const RealMatrix& map, const json& provenance,
                       const std::filesystem::path& path);

// Debug dump of the gradient signals: t_ns,qubit,phi_x,phi_y.
void save_signals_csv(const GradientSignals& signals, const TimeGrid& grid,
                      const json& provenance, const std::filesystem::path& path);

// Sweep CSV: '#'-prefixed provenance header, then
// T_ns,n_windows,energy_ha,error_ha,iterations,f_evals,g_evals,converged,init_mode,seed.
class SweepCsvWriter {
 public:
  SweepCsvWriter(const std::filesystem::path& path, const json& provenance);
  void append(const SweepRow& row);

 private:
  std::ofstream out_;
};

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path,
                                     json* provenance = nullptr);
std::string sweep_row_line(const SweepRow& row);

// Optimizer trace CSV: iteration,objective,energy,penalty,gradient_linf,step_length.
class TraceCsvWriter {
 public:
  TraceCsvWriter(const std::filesystem::path& path, const json& provenance);
  void append(const PulseTracePoint& point);

 private:
  std::ofstream out_;
};

json complex_to_json(const Complex& z);
Complex complex_from_json(const json& j);

}  // namespace pulsevqe::io

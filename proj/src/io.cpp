#include "pulsevqe/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace pulsevqe::io {

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  out << j.dump(2) << "\n";
}

const json& require_field(const json& j, const std::string& field, const std::string& context) {
  auto it = j.find(field);
  if (it == j.end())
    throw ValidationError(context + ": missing field '" + field + "'");
  return *it;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ValidationError("complex entries must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

Problem load_problem(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  const std::string context = "problem file " + path.string();

  Problem problem;
  try {
    problem.n_qubits = require_field(j, "n_qubits", context).get<int>();
    problem.reference_index = require_field(j, "reference_index", context).get<int>();
    const json& rows = require_field(j, "observable", context);
    if (problem.n_qubits < 1) throw ValidationError(context + ": n_qubits must be positive");
    const Eigen::Index dim = Eigen::Index{1} << problem.n_qubits;
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != dim)
      throw ValidationError(context + ": observable must have 2^n_qubits rows");
    problem.observable.resize(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      const json& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim)
        throw ValidationError(context + ": observable row has the wrong length");
      for (Eigen::Index c = 0; c < dim; ++c)
        problem.observable(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
    }
    if (j.contains("ground_energy")) problem.ground_energy = j["ground_energy"].get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(context + ": " + e.what());
  }
  problem.validate();
  return problem;
}

void save_problem(const Problem& problem, const std::filesystem::path& path) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < problem.observable.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < problem.observable.cols(); ++c)
      row.push_back(complex_to_json(problem.observable(r, c)));
    rows.push_back(std::move(row));
  }
  json j{{"n_qubits", problem.n_qubits},
         {"reference_index", problem.reference_index},
         {"observable", std::move(rows)}};
  if (!std::isnan(problem.ground_energy)) j["ground_energy"] = problem.ground_energy;
  write_json_file(j, path);
}

DeviceSpec load_device(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  const std::string context = "device file " + path.string();

  DeviceSpec device;
  try {
    device.n_qubits = require_field(j, "n_qubits", context).get<int>();
    for (const json& f : require_field(j, "qubit_freqs_ghz", context))
      device.qubit_freqs.push_back(f.get<double>() * kTwoPi);
    for (const json& c : require_field(j, "couplings", context)) {
      if (!c.is_array() || c.size() != 3)
        throw ValidationError(context + ": couplings must be [p, q, g_ghz] triples");
      device.couplings.push_back(
          {c[0].get<int>(), c[1].get<int>(), c[2].get<double>() * kTwoPi});
    }
    device.omega_max = require_field(j, "omega_max_ghz", context).get<double>() * kTwoPi;
    device.steps_per_ns = require_field(j, "steps_per_ns", context).get<int>();
  } catch (const json::exception& e) {
    throw ValidationError(context + ": " + e.what());
  }
  device.validate();
  return device;
}

void save_device(const DeviceSpec& device, const std::filesystem::path& path) {
  json freqs = json::array();
  for (double f : device.qubit_freqs) freqs.push_back(f / kTwoPi);
  json couplings = json::array();
  for (const Coupling& c : device.couplings)
    couplings.push_back(json::array({c.p, c.q, c.strength / kTwoPi}));
  write_json_file(json{{"n_qubits", device.n_qubits},
                       {"qubit_freqs_ghz", std::move(freqs)},
                       {"couplings", std::move(couplings)},
                       {"omega_max_ghz", device.omega_max / kTwoPi},
                       {"steps_per_ns", device.steps_per_ns}},
                  path);
}

void save_pulse(const PulseEnsemble& pulse, const json& provenance,
                const std::filesystem::path& path) {
  json boundaries = json::array();
  for (const WindowGrid& grid : pulse.grids) boundaries.push_back(grid.boundaries());
  json freqs = json::array();
  json drive_freqs = json::array();
  for (int q = 0; q < pulse.n_qubits; ++q) {
    freqs.push_back(pulse.qubit_freqs[q]);
    drive_freqs.push_back(pulse.drive_frequency(q));
  }
  const RealVector x = pulse.pack();
  json params = json::array();
  for (Eigen::Index k = 0; k < x.size(); ++k) params.push_back(x[k]);

  write_json_file(json{{"parameterization", parameterization_name(pulse.form)},
                       {"n_qubits", pulse.n_qubits},
                       {"duration_ns", pulse.duration()},
                       {"window_boundaries_ns", std::move(boundaries)},
                       {"parameters", std::move(params)},
                       {"qubit_freqs_rad_ns", std::move(freqs)},
                       {"drive_freqs_rad_ns", std::move(drive_freqs)},
                       {"provenance", provenance}},
                  path);
}

PulseEnsemble load_pulse(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  const std::string context = "pulse file " + path.string();

  PulseEnsemble pulse;
  const std::string label = require_field(j, "parameterization", context).get<std::string>();
  pulse.form = parse_pulse_label(label).form;
  pulse.n_qubits = require_field(j, "n_qubits", context).get<int>();
  const double duration = require_field(j, "duration_ns", context).get<double>();

  const json& boundaries = require_field(j, "window_boundaries_ns", context);
  if (static_cast<int>(boundaries.size()) != pulse.n_qubits)
    throw ValidationError(context + ": window boundaries must list every qubit");
  const int k = amplitude_params_per_window(pulse.form);
  for (const json& edges : boundaries) {
    if (edges.size() < 2) throw ValidationError(context + ": window grid needs two edges");
    WindowGrid grid;
    grid.duration = duration;
    grid.n_windows = static_cast<int>(edges.size()) - 1;
    grid.window_length = duration / grid.n_windows;
    for (int w = 0; w <= grid.n_windows; ++w) {
      const double expected = w == grid.n_windows ? duration : w * grid.window_length;
      if (std::abs(edges[w].get<double>() - expected) > 1e-9)
        throw ValidationError(context + ": window boundaries must be uniform over [0, T]");
    }
    pulse.grids.push_back(grid);
    pulse.amplitude_params.emplace_back(static_cast<std::size_t>(k) * grid.n_windows, 0.0);
  }

  for (const json& f : require_field(j, "qubit_freqs_rad_ns", context))
    pulse.qubit_freqs.push_back(f.get<double>());
  if (static_cast<int>(pulse.qubit_freqs.size()) != pulse.n_qubits)
    throw ValidationError(context + ": qubit_freqs_rad_ns must list every qubit");
  pulse.detunings.assign(pulse.n_qubits, 0.0);

  const json& params = require_field(j, "parameters", context);
  RealVector x(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) x[static_cast<Eigen::Index>(i)] = params[i];
  pulse.unpack(x);
  return pulse;
}

void save_state(const QuantumState& state, const json& provenance,
                const std::filesystem::path& path) {
  json amplitudes = json::array();
  for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i)
    amplitudes.push_back(complex_to_json(state.amplitudes[i]));
  write_json_file(json{{"amplitudes", std::move(amplitudes)}, {"provenance", provenance}},
                  path);
}

void save_trajectory(const Trajectory& trajectory, const json& provenance,
                     const std::filesystem::path& path) {
  json states = json::array();
  for (const ComplexVector& state : trajectory.states) {
    json amplitudes = json::array();
    for (Eigen::Index i = 0; i < state.size(); ++i)
      amplitudes.push_back(complex_to_json(state[i]));
    states.push_back(std::move(amplitudes));
  }
  write_json_file(json{{"times_ns", trajectory.times},
                       {"states", std::move(states)},
                       {"provenance", provenance}},
                  path);
}

void save_fidelity_csv(const RealMatrix& map, const json& provenance,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  out << "# pulsevqe fidelity map; rows follow the first trajectory's times\n";
  out << "# config: " << provenance.dump() << "\n";
  for (Eigen::Index i = 0; i < map.rows(); ++i) {
    for (Eigen::Index j = 0; j < map.cols(); ++j) {
      if (j) out << ",";
      out << format_double(map(i, j));
    }
    out << "\n";
  }
}

void save_signals_csv(const GradientSignals& signals, const TimeGrid& grid,
                      const json& provenance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  out << "# config: " << provenance.dump() << "\n";
  out << "t_ns,qubit,phi_x,phi_y\n";
  for (Eigen::Index i = 0; i < signals.x.cols(); ++i) {
    for (Eigen::Index q = 0; q < signals.x.rows(); ++q) {
      out << format_double(i * grid.tau) << "," << (q + 1) << ","
          << format_double(signals.x(q, i)) << "," << format_double(signals.y(q, i)) << "\n";
    }
  }
}

std::string sweep_row_line(const SweepRow& row) {
  std::ostringstream line;
  line << format_double(row.duration) << "," << row.n_windows << ","
       << format_double(row.energy) << "," << format_double(row.error) << ","
       << row.iterations << "," << row.objective_evals << "," << row.gradient_evals << ","
       << (row.converged ? "true" : "false") << "," << row.init_mode << "," << row.seed;
  return line.str();
}

SweepCsvWriter::SweepCsvWriter(const std::filesystem::path& path, const json& provenance) {
  out_.open(path);
  if (!out_) throw ValidationError("cannot write file: " + path.string());
  out_ << "# config: " << provenance.dump() << "\n";
  out_ << "T_ns,n_windows,energy_ha,error_ha,iterations,f_evals,g_evals,converged,init_mode,"
          "seed\n";
  out_.flush();
}

void SweepCsvWriter::append(const SweepRow& row) {
  out_ << sweep_row_line(row) << "\n";
  out_.flush();
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path, json* provenance) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  std::vector<SweepRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# config: ", 0) == 0) {
      if (provenance) *provenance = json::parse(line.substr(10));
      continue;
    }
    if (line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 10)
      throw ValidationError("sweep CSV " + path.string() + ": malformed row '" + line + "'");
    SweepRow row;
    row.duration = std::stod(fields[0]);
    row.n_windows = std::stoi(fields[1]);
    row.energy = std::stod(fields[2]);
    row.error = std::stod(fields[3]);
    row.iterations = std::stoi(fields[4]);
    row.objective_evals = std::stoi(fields[5]);
    row.gradient_evals = std::stoi(fields[6]);
    row.converged = fields[7] == "true" || fields[7] == "1";
    row.init_mode = fields[8];
    row.seed = std::stoull(fields[9]);
    rows.push_back(std::move(row));
  }
  return rows;
}

TraceCsvWriter::TraceCsvWriter(const std::filesystem::path& path, const json& provenance) {
  out_.open(path);
  if (!out_) throw ValidationError("cannot write file: " + path.string());
  out_ << "# config: " << provenance.dump() << "\n";
  out_ << "iteration,objective,energy,penalty,gradient_linf,step_length\n";
}

void TraceCsvWriter::append(const PulseTracePoint& point) {
  out_ << point.iteration << "," << format_double(point.objective) << ","
       << format_double(point.energy) << "," << format_double(point.penalty) << ","
       << format_double(point.gradient_linf) << "," << format_double(point.step_length)
       << "\n";
  out_.flush();
}

}  // namespace pulsevqe::io

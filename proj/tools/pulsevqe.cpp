// Command-line driver: optimize a pulse at fixed duration, sweep durations,
// or run diagnostics (fidelity maps, effective quantum dimension traces,
// simulator-vs-closed-form comparison tables).

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "pulsevqe/analysis.hpp"
#include "pulsevqe/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace pulsevqe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct RunConfig {
  fs::path problem_path;
  std::optional<fs::path> device_path;
  std::string param_label = "ab";
  double ds_min = 3.0;
  std::optional<double> duration;
  std::optional<double> t_start;
  std::optional<double> t_stop;
  double t_step = 1.0;
  std::string init = "zero";
  std::uint64_t seed = 0;
  std::optional<std::pair<double, double>> delta_range;
  int restarts = 1;
  OptimizerConfig optimizer;
  fs::path out_dir = "out";
  int jobs = 0;  // 0: all available cores
  int fisher_iterations = 5;

  json resolved() const {
    json j{{"problem", problem_path.string()},
           {"parameterization", param_label},
           {"ds_min_ns", ds_min},
           {"init", init},
           {"seed", seed},
           {"restarts", restarts},
           {"optimizer",
            {{"g_tol", optimizer.gradient_tolerance},
             {"max_iterations", optimizer.max_iterations},
             {"penalty_weight", optimizer.penalty_weight}}}};
    if (device_path) j["device"] = device_path->string();
    if (duration) j["T_ns"] = *duration;
    if (t_start) j["T_start_ns"] = *t_start;
    if (t_stop) j["T_stop_ns"] = *t_stop;
    if (t_start || t_stop) j["T_step_ns"] = t_step;
    if (delta_range) j["delta_range_rad_ns"] = {delta_range->first, delta_range->second};
    return j;
  }
};

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }

  const std::string context = "config file " + path.string();
  RunConfig config;
  try {
    if (!j.contains("problem")) throw ValidationError(context + ": missing field 'problem'");
    config.problem_path = j["problem"].get<std::string>();
    if (j.contains("device")) config.device_path = fs::path(j["device"].get<std::string>());
    if (j.contains("parameterization"))
      config.param_label = j["parameterization"].get<std::string>();
    if (j.contains("ds_min_ns")) config.ds_min = j["ds_min_ns"].get<double>();
    if (j.contains("T_ns")) config.duration = j["T_ns"].get<double>();
    if (j.contains("T_start_ns")) config.t_start = j["T_start_ns"].get<double>();
    if (j.contains("T_stop_ns")) config.t_stop = j["T_stop_ns"].get<double>();
    if (j.contains("T_step_ns")) config.t_step = j["T_step_ns"].get<double>();
    if (j.contains("init")) config.init = j["init"].get<std::string>();
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("delta_range_rad_ns")) {
      const json& r = j["delta_range_rad_ns"];
      if (!r.is_array() || r.size() != 2)
        throw ValidationError(context + ": delta_range_rad_ns must be [lo, hi]");
      config.delta_range = {r[0].get<double>(), r[1].get<double>()};
    }
    if (j.contains("restarts")) config.restarts = j["restarts"].get<int>();
    if (j.contains("optimizer")) {
      const json& opt = j["optimizer"];
      if (opt.contains("g_tol"))
        config.optimizer.gradient_tolerance = opt["g_tol"].get<double>();
      if (opt.contains("max_iterations"))
        config.optimizer.max_iterations = opt["max_iterations"].get<int>();
      if (opt.contains("penalty_weight"))
        config.optimizer.penalty_weight = opt["penalty_weight"].get<double>();
    }
    if (j.contains("out_dir")) config.out_dir = fs::path(j["out_dir"].get<std::string>());
    if (j.contains("jobs")) config.jobs = j["jobs"].get<int>();
    if (j.contains("fisher_iterations"))
      config.fisher_iterations = j["fisher_iterations"].get<int>();
  } catch (const json::exception& e) {
    throw ValidationError(context + ": " + e.what());
  }

  if (config.init != "zero" && config.init != "random")
    throw ValidationError(context + ": init must be 'zero' or 'random'");
  parse_pulse_label(config.param_label);  // reject unknown labels before any computation
  return config;
}

struct Workspace {
  Problem problem;
  DeviceSpec device;
  PulseForm form;
  double ds_min;
};

Workspace load_workspace(const RunConfig& config) {
  Workspace ws;
  ws.problem = io::load_problem(config.problem_path);
  exact_ground_energy(ws.problem);
  ws.device = config.device_path ? io::load_device(*config.device_path)
                                 : default_device(ws.problem.n_qubits);
  if (ws.device.n_qubits != ws.problem.n_qubits)
    throw ValidationError("device and problem disagree on the number of qubits");
  ws.form = parse_pulse_label(config.param_label);
  ws.ds_min = resolve_min_window_length(ws.form, config.ds_min, ws.device.steps_per_ns);
  return ws;
}

InitConfig make_init(const RunConfig& config) {
  InitConfig init;
  init.mode = config.init == "zero" ? InitMode::Zero : InitMode::Random;
  init.seed = config.seed;
  init.detuning_range = config.delta_range;
  return init;
}

int run_optimize(const RunConfig& config) {
  if (!config.duration)
    throw ValidationError("config: T_ns is required for optimize (or pass --T)");
  const Workspace ws = load_workspace(config);
  const double duration = *config.duration;
  const WindowGrid grid = WindowGrid::from_min_length(duration, ws.ds_min);
  const PulseEnsemble prototype = make_pulse(ws.device, ws.form.form, grid);
  const RealVector x0 = initialize_parameters(prototype, ws.device, make_init(config));

  fs::create_directories(config.out_dir);
  const json provenance = config.resolved();
  io::TraceCsvWriter trace(config.out_dir / "trace.csv", provenance);
  const Evolver evolver(ws.device);
  const OptResult result =
      minimize_pulse(ws.problem, evolver, prototype, duration, x0, config.optimizer,
                     [&trace](const PulseTracePoint& point) { trace.append(point); });

  PulseEnsemble optimized = prototype;
  optimized.unpack(result.parameters);
  io::save_pulse(optimized, provenance, config.out_dir / "pulse.json");

  const QuantumState reference = basis_state(ws.problem.n_qubits, ws.problem.reference_index);
  const QuantumState final_state = evolver.evolve(reference, optimized, duration);
  io::save_state(final_state, provenance, config.out_dir / "final_state.json");

  json summary{{"energy_ha", result.energy},
               {"ground_energy_ha", ws.problem.ground_energy},
               {"error_ha", result.energy - ws.problem.ground_energy},
               {"penalty_ha", result.penalty},
               {"objective_ha", result.objective_value},
               {"iterations", result.iterations},
               {"f_evals", result.objective_evals},
               {"g_evals", result.gradient_evals},
               {"converged", result.converged},
               {"termination", termination_name(result.reason)},
               {"n_windows", grid.n_windows},
               {"config", provenance}};
  std::ofstream out(config.out_dir / "summary.json");
  out << summary.dump(2) << "\n";

  std::cout << "energy " << io::format_double(result.energy) << " Ha, error "
            << io::format_double(result.energy - ws.problem.ground_energy) << " Ha, "
            << result.iterations << " iterations, "
            << (result.converged ? "converged" : termination_name(result.reason)) << "\n";
  return result.converged ? kExitOk : kExitNotConverged;
}

std::vector<double> duration_list(const RunConfig& config) {
  if (!config.t_start || !config.t_stop)
    throw ValidationError("config: T_start_ns and T_stop_ns are required for sweep");
  if (!(config.t_step > 0.0)) throw ValidationError("config: T_step_ns must be positive");
  if (*config.t_stop < *config.t_start)
    throw ValidationError("config: T_stop_ns must not precede T_start_ns");
  std::vector<double> durations;
  for (int k = 0;; ++k) {
    const double t = *config.t_start + k * config.t_step;
    if (t > *config.t_stop + 1e-9) break;
    durations.push_back(t);
  }
  return durations;
}

int run_sweep(const RunConfig& config, bool fresh) {
  const Workspace ws = load_workspace(config);
  const std::vector<double> durations = duration_list(config);
  const json provenance = config.resolved();

  fs::create_directories(config.out_dir);
  const fs::path csv_path = config.out_dir / "sweep.csv";

  // Resume: rows already present for this exact configuration are kept and
  // only the missing durations are recomputed.
  std::map<double, std::vector<SweepRow>> existing;
  if (!fresh && fs::exists(csv_path)) {
    json old_provenance;
    std::vector<SweepRow> old_rows = io::read_sweep_csv(csv_path, &old_provenance);
    if (old_provenance != provenance)
      throw ValidationError("sweep.csv in " + config.out_dir.string() +
                            " was produced by a different configuration; use --fresh");
    for (SweepRow& row : old_rows) existing[row.duration].push_back(std::move(row));
  }

  std::vector<double> pending;
  for (double t : durations) {
    const auto it = existing.find(t);
    const std::size_t want = static_cast<std::size_t>(std::max(1, config.restarts));
    if (it == existing.end() || it->second.size() != want) pending.push_back(t);
  }

  io::SweepCsvWriter writer(csv_path, provenance);
  std::vector<SweepRow> all_rows;
  std::size_t next_duration = 0;
  const std::size_t rows_per_duration = static_cast<std::size_t>(std::max(1, config.restarts));
  auto flush_ready = [&](const std::map<double, std::vector<SweepRow>>& done) {
    while (next_duration < durations.size()) {
      const auto it = done.find(durations[next_duration]);
      if (it == done.end() || it->second.size() < rows_per_duration) break;
      for (const SweepRow& row : it->second) {
        writer.append(row);
        all_rows.push_back(row);
      }
      ++next_duration;
    }
  };

  std::map<double, std::vector<SweepRow>> done = existing;
  for (double t : pending) done.erase(t);
  flush_ready(done);

  if (!pending.empty()) {
    SweepConfig sweep;
    sweep.form = ws.form.form;
    sweep.min_window_length = ws.ds_min;
    sweep.durations = pending;
    sweep.init = make_init(config);
    sweep.optimizer = config.optimizer;
    sweep.jobs = config.jobs > 0 ? config.jobs
                                 : static_cast<int>(std::thread::hardware_concurrency());
    const RowCallback on_row = [&](const SweepRow& row) {
      done[row.duration].push_back(row);
      flush_ready(done);
    };
    if (config.restarts > 1)
      multistart(ws.problem, ws.device, sweep, config.restarts, on_row);
    else
      emet_sweep(ws.problem, ws.device, sweep, on_row);
  }

  const std::vector<SweepRow> best = best_per_duration(all_rows);
  const std::optional<double> t_star = detect_transition(best);
  double best_error = std::numeric_limits<double>::quiet_NaN();
  for (const SweepRow& row : best) {
    if (std::isfinite(row.error) && !(best_error <= row.error)) best_error = row.error;
  }

  json summary{{"rows", all_rows.size()},
               {"t_star_ns", t_star ? json(*t_star) : json(nullptr)},
               {"best_error_ha", best_error},
               {"config", provenance}};
  std::ofstream out(config.out_dir / "sweep_summary.json");
  out << summary.dump(2) << "\n";

  std::cout << all_rows.size() << " rows written to " << csv_path.string();
  if (t_star) std::cout << "; first error < 1e-8 at T = " << *t_star << " ns";
  std::cout << "\n";
  return kExitOk;
}

int run_diagnose(const RunConfig& config, const std::vector<std::string>& fidelity_pulses,
                 bool fisher, bool rabi) {
  fs::create_directories(config.out_dir);
  const json provenance = config.resolved();

  if (!fidelity_pulses.empty()) {
    const Workspace ws = load_workspace(config);
    const Evolver evolver(ws.device);
    const QuantumState reference =
        basis_state(ws.problem.n_qubits, ws.problem.reference_index);
    const PulseEnsemble pulse_a = io::load_pulse(fidelity_pulses[0]);
    const PulseEnsemble pulse_b = io::load_pulse(fidelity_pulses[1]);
    const Trajectory traj_a = evolver.evolve_trajectory(reference, pulse_a, pulse_a.duration());
    const Trajectory traj_b = evolver.evolve_trajectory(reference, pulse_b, pulse_b.duration());
    const RealMatrix map = fidelity_map(traj_a, traj_b);
    json p = provenance;
    p["fidelity_pulses"] = fidelity_pulses;
    io::save_fidelity_csv(map, p, config.out_dir / "fidelity.csv");
    std::cout << "fidelity map " << map.rows() << "x" << map.cols() << " written\n";
  }

  if (fisher) {
    if (!config.duration)
      throw ValidationError("config: T_ns is required for the fisher trace (or pass --T)");
    const Workspace ws = load_workspace(config);
    const Evolver evolver(ws.device);
    const double duration = *config.duration;
    const WindowGrid grid = WindowGrid::from_min_length(duration, ws.ds_min);
    const PulseEnsemble prototype = make_pulse(ws.device, ws.form.form, grid);
    const QuantumState reference =
        basis_state(ws.problem.n_qubits, ws.problem.reference_index);

    std::ofstream out(config.out_dir / "fisher_trace.csv");
    out << "# config: " << provenance.dump() << "\n";
    out << "iteration,energy_ha,effective_dimension\n";

    PulseEnsemble scratch = prototype;
    const RealVector x0 = initialize_parameters(prototype, ws.device, make_init(config));
    scratch.unpack(x0);
    {
      const QuantumState state = evolver.evolve(reference, scratch, duration);
      const int rank = quantum_fisher_rank(scratch, evolver, reference, duration);
      out << 0 << "," << io::format_double(measure_energy(state, ws.problem)) << "," << rank
          << "\n";
      std::cout << "iteration 0: effective dimension " << rank << "\n";
    }
    OptimizerConfig opt = config.optimizer;
    opt.max_iterations = config.fisher_iterations;
    minimize_pulse(ws.problem, evolver, prototype, duration, x0, opt,
                   [&](const PulseTracePoint& point) {
                     scratch.unpack(point.x);
                     const int rank =
                         quantum_fisher_rank(scratch, evolver, reference, duration);
                     out << point.iteration << "," << io::format_double(point.energy) << ","
                         << rank << "\n";
                     std::cout << "iteration " << point.iteration << ": effective dimension "
                               << rank << "\n";
                   });
  }

  if (rabi) {
    // Single-qubit check of the evolved state against the closed-form Bloch
    // trajectory, over constant drives realized as one-window pulses.
    const DeviceSpec device = default_device(1);
    const Evolver evolver(device);
    const QuantumState reference = basis_state(1, 0);

    std::ofstream out(config.out_dir / "rabi_table.csv");
    out << "# config: " << provenance.dump() << "\n";
    out << "amplitude_rad_ns,detuning_rad_ns,phase_rad,t_ns,sim_x,sim_y,sim_z,"
           "oracle_x,oracle_y,oracle_z,deviation\n";

    double worst = 0.0;
    const std::vector<double> amplitudes{0.0, 0.05, 0.1, 0.15, 0.2};
    const std::vector<double> detunings{0.0, 0.05, 0.1, 0.15, 0.2};
    const std::vector<double> phases{0.0, 1.5707963267948966, 3.141592653589793,
                                     4.71238898038469};
    const std::vector<double> times{1.0, 12.5, 25.0, 50.0};
    for (double a : amplitudes) {
      for (double d : detunings) {
        for (double phi : phases) {
          for (double t : times) {
            PulseEnsemble pulse = make_pulse(device, Parameterization::CartesianAmplitudeDetuned,
                                             WindowGrid::from_min_length(t, t));
            const Complex omega =
                0.5 * a * Complex{std::cos(phi), std::sin(phi)};
            RealVector x(3);
            x << omega.real(), omega.imag(), d;
            pulse.unpack(x);
            const QuantumState state = evolver.evolve(reference, pulse, t);
            const Complex c01 =
                std::conj(state.amplitudes[0]) * state.amplitudes[1];
            const double sx = 2.0 * c01.real();
            const double sy = 2.0 * c01.imag();
            const double sz =
                std::norm(state.amplitudes[0]) - std::norm(state.amplitudes[1]);
            const BlochVector oracle = rabi_trajectory({a, d, phi}, t);
            const double dev = std::max({std::abs(sx - oracle.x), std::abs(sy - oracle.y),
                                         std::abs(sz - oracle.z)});
            worst = std::max(worst, dev);
            out << io::format_double(a) << "," << io::format_double(d) << ","
                << io::format_double(phi) << "," << io::format_double(t) << ","
                << io::format_double(sx) << "," << io::format_double(sy) << ","
                << io::format_double(sz) << "," << io::format_double(oracle.x) << ","
                << io::format_double(oracle.y) << "," << io::format_double(oracle.z) << ","
                << io::format_double(dev) << "\n";
          }
        }
      }
    }
    std::cout << "rabi table max deviation " << io::format_double(worst) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulse-level variational eigensolver on a coupled-transmon simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<double> duration_override;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> param_override;
  std::optional<std::string> out_override;
  std::optional<int> jobs_override;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration")->required();
    cmd->add_option("--T", duration_override, "override T_ns");
    cmd->add_option("--seed", seed_override, "override the initialization seed");
    cmd->add_option("--param", param_override, "override the parameterization label");
    cmd->add_option("--out", out_override, "override the output directory");
    cmd->add_option("--jobs", jobs_override, "worker threads for sweeps");
  };

  CLI::App* cmd_optimize = app.add_subcommand("optimize", "single optimization at fixed T");
  add_common(cmd_optimize);

  bool fresh = false;
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "optimize across a range of durations");
  add_common(cmd_sweep);
  cmd_sweep->add_flag("--fresh", fresh, "ignore any partial sweep.csv");

  std::vector<std::string> fidelity_pulses;
  bool fisher = false;
  bool rabi = false;
  std::optional<int> fisher_iters;
  CLI::App* cmd_diagnose = app.add_subcommand("diagnose", "fidelity / dimension / rabi checks");
  add_common(cmd_diagnose);
  cmd_diagnose->add_option("--fidelity", fidelity_pulses, "two optimized-pulse JSON files")
      ->expected(2);
  cmd_diagnose->add_flag("--fisher", fisher, "effective quantum dimension trace");
  cmd_diagnose->add_flag("--rabi", rabi, "single-qubit closed-form comparison table");
  cmd_diagnose->add_option("--fisher-iters", fisher_iters, "optimizer iterations in the trace");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    RunConfig config = load_run_config(config_path);
    if (duration_override) config.duration = *duration_override;
    if (seed_override) config.seed = *seed_override;
    if (param_override) config.param_label = *param_override;
    if (out_override) config.out_dir = *out_override;
    if (jobs_override) config.jobs = *jobs_override;
    if (fisher_iters) config.fisher_iterations = *fisher_iters;
    parse_pulse_label(config.param_label);
    config.optimizer.validate();

    if (app.got_subcommand(cmd_optimize)) return run_optimize(config);
    if (app.got_subcommand(cmd_sweep)) return run_sweep(config, fresh);
    if (app.got_subcommand(cmd_diagnose)) {
      if (fidelity_pulses.empty() && !fisher && !rabi)
        throw ValidationError("diagnose: pass --fidelity, --fisher, or --rabi");
      return run_diagnose(config, fidelity_pulses, fisher, rabi);
    }
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

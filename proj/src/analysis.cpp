#include "pulsevqe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

namespace pulsevqe {

double RabiSetting::rabi_rate() const { return std::hypot(amplitude, detuning); }

double RabiSetting::max_polar_angle() const {
  // atan2 keeps the resonant limit: Delta = 0 gives theta_max = pi.
  return 2.0 * std::atan2(amplitude, detuning);
}

BlochVector rabi_trajectory(const RabiSetting& setting, double t) {
  const double lambda = setting.rabi_rate();
  if (lambda == 0.0) return {0.0, 0.0, 1.0};

  const double theta_max = setting.max_polar_angle();
  const double half = 0.5 * lambda * t;
  const double sin_half_sq = std::sin(half) * std::sin(half);
  const double delta_t = setting.detuning * t;

  const double x = -std::sin(0.5 * theta_max) * std::sin(delta_t) * std::sin(lambda * t) +
                   std::sin(theta_max) * std::cos(delta_t) * sin_half_sq;
  const double y = -std::sin(0.5 * theta_max) * std::cos(delta_t) * std::sin(lambda * t) -
                   std::sin(theta_max) * std::sin(delta_t) * sin_half_sq;

  const double c = std::cos(setting.phase);
  const double s = std::sin(setting.phase);
  BlochVector bloch;
  bloch.x = x * c + y * s;
  bloch.y = y * c - x * s;
  bloch.z = std::cos(half) * std::cos(half) + sin_half_sq * std::cos(theta_max);
  return bloch;
}

namespace {

struct SweepTask {
  double duration;
  std::uint64_t seed;
  InitMode mode;
};

SweepRow run_task(const Problem& problem, const DeviceSpec& device, const Evolver& evolver,
                  const SweepConfig& config, const SweepTask& task) {
  SweepRow row;
  row.duration = task.duration;
  row.seed = task.seed;
  row.init_mode = task.mode == InitMode::Zero ? "zero" : "random";
  try {
    const WindowGrid grid = WindowGrid::from_min_length(task.duration, config.min_window_length);
    row.n_windows = grid.n_windows;
    const PulseEnsemble pulse = make_pulse(device, config.form, grid);
    InitConfig init = config.init;
    init.mode = task.mode;
    init.seed = task.seed;
    const RealVector x0 = initialize_parameters(pulse, device, init);
    const OptResult result =
        minimize_pulse(problem, evolver, pulse, task.duration, x0, config.optimizer);
    row.energy = result.energy;
    row.error = result.energy - problem.ground_energy;
    row.iterations = result.iterations;
    row.objective_evals = result.objective_evals;
    row.gradient_evals = result.gradient_evals;
    row.converged = result.converged;
    row.termination = termination_name(result.reason);
  } catch (const std::exception& e) {
    row.converged = false;
    row.termination = std::string("error: ") + e.what();
  }
  return row;
}

std::vector<SweepRow> run_tasks(const Problem& problem, const DeviceSpec& device,
                                const SweepConfig& config, const std::vector<SweepTask>& tasks,
                                const RowCallback& on_row) {
  Problem prepared = problem;
  if (std::isnan(prepared.ground_energy)) exact_ground_energy(prepared);
  const Evolver evolver(device);

  std::vector<SweepRow> rows(tasks.size());
  const int jobs = std::max(1, config.jobs);

  if (jobs == 1) {
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      rows[k] = run_task(prepared, device, evolver, config, tasks[k]);
      if (on_row) on_row(rows[k]);
    }
    return rows;
  }

  // Workers pull task indices; completed rows are released to the callback
  // in task order through a single collector.
  std::mutex mutex;
  std::condition_variable done_cv;
  std::size_t next_task = 0;
  std::map<std::size_t, const SweepRow*> completed;
  std::size_t next_release = 0;

  auto worker = [&]() {
    while (true) {
      std::size_t index;
      {
        std::lock_guard lock(mutex);
        if (next_task >= tasks.size()) return;
        index = next_task++;
      }
      SweepRow row = run_task(prepared, device, evolver, config, tasks[index]);
      {
        std::lock_guard lock(mutex);
        rows[index] = std::move(row);
        completed[index] = &rows[index];
        while (!completed.empty() && completed.begin()->first == next_release) {
          if (on_row) on_row(*completed.begin()->second);
          completed.erase(completed.begin());
          ++next_release;
        }
        if (next_release == tasks.size()) done_cv.notify_all();
      }
    }
  };

  std::vector<std::thread> pool;
  const int n_threads = std::min<std::size_t>(jobs, tasks.size());
  pool.reserve(n_threads);
  for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return rows;
}

}  // namespace

std::vector<SweepRow> emet_sweep(const Problem& problem, const DeviceSpec& device,
                                 const SweepConfig& config, const RowCallback& on_row) {
  if (config.durations.empty()) throw ValidationError("sweep: empty duration list");
  if (!std::is_sorted(config.durations.begin(), config.durations.end()))
    throw ValidationError("sweep: durations must be ascending");
  std::vector<SweepTask> tasks;
  tasks.reserve(config.durations.size());
  for (double duration : config.durations)
    tasks.push_back({duration, config.init.seed, config.init.mode});
  return run_tasks(problem, device, config, tasks, on_row);
}

std::vector<SweepRow> multistart(const Problem& problem, const DeviceSpec& device,
                                 const SweepConfig& config, int n_restarts,
                                 const RowCallback& on_row) {
  if (n_restarts < 1) throw ValidationError("multistart: n_restarts must be at least 1");
  if (config.durations.empty()) throw ValidationError("sweep: empty duration list");
  std::vector<SweepTask> tasks;
  tasks.reserve(config.durations.size() * n_restarts);
  for (double duration : config.durations) {
    for (int k = 0; k < n_restarts; ++k)
      tasks.push_back({duration, config.init.seed + static_cast<std::uint64_t>(k),
                       config.init.mode});
  }
  return run_tasks(problem, device, config, tasks, on_row);
}

std::optional<double> detect_transition(const std::vector<SweepRow>& rows, double threshold) {
  for (const SweepRow& row : rows) {
    if (std::isfinite(row.error) && row.error < threshold) return row.duration;
  }
  return std::nullopt;
}

std::vector<SweepRow> best_per_duration(const std::vector<SweepRow>& rows) {
  std::map<double, SweepRow> best;
  for (const SweepRow& row : rows) {
    auto it = best.find(row.duration);
    if (it == best.end() || (std::isfinite(row.energy) &&
                             (!std::isfinite(it->second.energy) || row.energy < it->second.energy)))
      best[row.duration] = row;
  }
  std::vector<SweepRow> out;
  out.reserve(best.size());
  for (auto& [duration, row] : best) out.push_back(row);
  return out;
}

}  // namespace pulsevqe

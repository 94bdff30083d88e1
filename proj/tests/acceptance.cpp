// Acceptance suite: one check per release criterion, each printed as a
// single pass/fail line with the measured quantities.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pulsevqe/analysis.hpp"
#include "pulsevqe/io.hpp"
#include "test_util.hpp"

using namespace pulsevqe;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

fs::path fixture(const std::string& name) { return fs::path(PULSEVQE_FIXTURE_DIR) / name; }

std::string fmt(double value) { return io::format_double(value); }

// ---------------------------------------------------------------------------
// 1. Window-grid rule: the worked examples are exact.
Outcome check_window_grid() {
  const WindowGrid a = WindowGrid::from_min_length(24.0, 3.0);
  const WindowGrid b = WindowGrid::from_min_length(23.8, 3.0);
  Outcome out;
  out.pass = a.n_windows == 8 && a.window_length == 3.0 && b.n_windows == 7 &&
             std::abs(b.window_length - 3.4) < 1e-12;
  out.detail = "(24, 3) -> " + std::to_string(a.n_windows) + " x " + fmt(a.window_length) +
               " ns; (23.8, 3) -> " + std::to_string(b.n_windows) + " x " +
               fmt(b.window_length) + " ns";
  return out;
}

// ---------------------------------------------------------------------------
// 2. Single-qubit evolution vs the closed-form Bloch trajectory at 20
//    steps/ns over a 5x5x4 grid of (A, Delta, phi) with A, Delta up to
//    0.2 * 2pi rad/ns and t up to 50 ns; tolerance 1e-4 per component.
Outcome check_rabi_grid() {
  const DeviceSpec device = default_device(1);
  const Evolver evolver(device);
  const QuantumState reference = basis_state(1, 0);

  auto bloch_of = [](const ComplexVector& psi) {
    const Complex c01 = std::conj(psi[0]) * psi[1];
    return BlochVector{2.0 * c01.real(), 2.0 * c01.imag(),
                       std::norm(psi[0]) - std::norm(psi[1])};
  };

  auto grid_deviation = [&](double scale) {
    double worst = 0.0;
    for (int ia = 0; ia < 5; ++ia) {
      for (int id = 0; id < 5; ++id) {
        for (int ip = 0; ip < 4; ++ip) {
          const double amplitude = scale * ia / 4.0;
          const double detuning = scale * id / 4.0;
          const double phase = ip * EIGEN_PI / 2.0;
          for (double t : {1.0, 12.5, 25.0, 37.5, 50.0}) {
            PulseEnsemble pulse =
                make_pulse(device, Parameterization::CartesianAmplitudeDetuned,
                           WindowGrid::from_min_length(t, t));
            RealVector x(3);
            x << 0.5 * amplitude * std::cos(phase), 0.5 * amplitude * std::sin(phase),
                detuning;
            pulse.unpack(x);
            const BlochVector sim =
                bloch_of(evolver.evolve(reference, pulse, t).amplitudes);
            const BlochVector oracle = rabi_trajectory({amplitude, detuning, phase}, t);
            worst = std::max({worst, std::abs(sim.x - oracle.x), std::abs(sim.y - oracle.y),
                              std::abs(sim.z - oracle.z)});
          }
        }
      }
    }
    return worst;
  };

  const double stated = grid_deviation(0.2 * kTwoPi);
  const double device_scale = grid_deviation(device.omega_max);
  Outcome out;
  out.pass = stated <= 1e-4;
  out.detail = "max deviation " + fmt(stated) +
               " at A, Delta <= 0.2*2pi rad/ns (tolerance 1e-4); " + fmt(device_scale) +
               " at the device bound 0.02*2pi";
  return out;
}

// ---------------------------------------------------------------------------
// 3. Analytic gradient vs central finite differences for all five forms,
//    ten seeds each, relative L-inf <= 1e-3 at tau = 0.05 ns, and the
//    residual shrinks when tau is halved.
Outcome check_gradients() {
  const Problem problem = testutil::make_problem(2, 1001);
  const QuantumState reference = basis_state(2, 0);
  const double duration = 8.0;

  auto fd_gradient = [&](const Evolver& evolver, const PulseEnsemble& pulse) {
    PulseEnsemble scratch = pulse;
    return oracles::fd_gradient(
        [&](const RealVector& x) {
          scratch.unpack(x);
          return oracles::quadratic_form(
                     problem.observable,
                     evolver.evolve(reference, scratch, duration).amplitudes)
              .real();
        },
        pulse.pack(), 1e-5);
  };
  auto rel_linf = [](const RealVector& a, const RealVector& b) {
    const double scale = b.cwiseAbs().maxCoeff();
    return (a - b).cwiseAbs().maxCoeff() / (scale > 0 ? scale : 1.0);
  };

  const std::vector<Parameterization> forms{
      Parameterization::CartesianAmplitude, Parameterization::PolarAmplitude,
      Parameterization::RealAmplitude, Parameterization::RealAmplitudeDetuned,
      Parameterization::CartesianAmplitudeDetuned};

  Outcome out;
  double worst = 0.0;
  bool all_shrink = true;
  DeviceSpec coarse_device = default_device(2);
  DeviceSpec fine_device = coarse_device;
  fine_device.steps_per_ns = 40;
  const Evolver coarse(coarse_device);
  const Evolver fine(fine_device);

  for (Parameterization form : forms) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const PulseEnsemble pulse =
          testutil::make_random_pulse(coarse_device, form, duration, 3.0, seed, true);
      const double rel =
          rel_linf(energy_gradient(pulse, coarse, problem, duration).gradient,
                   fd_gradient(coarse, pulse));
      worst = std::max(worst, rel);
      if (rel > 1e-3) out.pass = false;
    }
    // tau dependence, measured above the finite-difference noise floor by
    // amplifying the amplitudes fourfold. The resonant real form has no
    // within-step commutator term at all (the parameter direction is parallel
    // to the drive operator), so its residual sits at the noise floor and
    // there is nothing left to shrink.
    double coarse_err = 0.0;
    double fine_err = 0.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      PulseEnsemble pulse =
          testutil::make_random_pulse(coarse_device, form, duration, 3.0, seed, true);
      pulse.unpack(RealVector(4.0 * pulse.pack()));
      coarse_err = std::max(
          coarse_err, rel_linf(energy_gradient(pulse, coarse, problem, duration).gradient,
                               fd_gradient(coarse, pulse)));
      fine_err = std::max(
          fine_err, rel_linf(energy_gradient(pulse, fine, problem, duration).gradient,
                             fd_gradient(fine, pulse)));
    }
    if (coarse_err > 1e-8 && !(fine_err < coarse_err)) all_shrink = false;
  }
  out.pass = out.pass && all_shrink;
  out.detail = "worst relative L-inf " + fmt(worst) +
               " over 5 forms x 10 seeds (tolerance 1e-3); residual shrinks at tau/2 for " +
               std::string(all_shrink ? "every form with a measurable residual"
                                      : "SOME FORMS ONLY");
  return out;
}

// ---------------------------------------------------------------------------
// 4. Polar and Cartesian parameterizations are physically equivalent:
//    objectives agree to 1e-12 at mapped points, and the detuned Cartesian
//    form at zero detuning equals the resonant one exactly.
Outcome check_polar_cartesian() {
  const Problem problem = testutil::make_problem(2, 1002);
  const DeviceSpec device = default_device(2);
  const Evolver evolver(device);
  const double duration = 9.0;
  const WindowGrid grid = WindowGrid::from_min_length(duration, 3.0);

  const PulseEnsemble cart_proto =
      make_pulse(device, Parameterization::CartesianAmplitude, grid);
  const PulseEnsemble polar_proto = make_pulse(device, Parameterization::PolarAmplitude, grid);
  const PulseEnsemble det_proto =
      make_pulse(device, Parameterization::CartesianAmplitudeDetuned, grid);

  const VqeObjective f_cart(problem, evolver, cart_proto, duration, 1.0);
  const VqeObjective f_polar(problem, evolver, polar_proto, duration, 1.0);
  const VqeObjective f_det(problem, evolver, det_proto, duration, 1.0);

  double worst_pc = 0.0;
  bool detuned_exact = true;
  for (int point = 0; point < 100; ++point) {
    const RealVector ab =
        oracles::random_uniform_vector(cart_proto.n_params(), 3000 + point, -0.12, 0.12);
    RealVector polar_x(polar_proto.n_params());
    for (int q = 0; q < 2; ++q) {
      for (int w = 0; w < grid.n_windows; ++w) {
        const double alpha = ab[cart_proto.amplitude_param_index(q, w, 0)];
        const double beta = ab[cart_proto.amplitude_param_index(q, w, 1)];
        polar_x[polar_proto.amplitude_param_index(q, w, 0)] = 2.0 * std::hypot(alpha, beta);
        polar_x[polar_proto.amplitude_param_index(q, w, 1)] = std::atan2(beta, alpha);
      }
    }
    RealVector det_x = RealVector::Zero(det_proto.n_params());
    det_x.head(ab.size()) = ab;

    RealVector g;
    const double e_cart = f_cart(ab, g);
    const double e_polar = f_polar(polar_x, g);
    const double e_det = f_det(det_x, g);
    worst_pc = std::max(worst_pc, std::abs(e_cart - e_polar));
    if (e_det != e_cart) detuned_exact = false;
  }

  Outcome out;
  out.pass = worst_pc <= 1e-12 && detuned_exact;
  out.detail = "max |objective(ab) - objective(Aphi)| = " + fmt(worst_pc) +
               " over 100 mapped points (tolerance 1e-12); abD at Delta=0 " +
               (detuned_exact ? "bit-identical to ab" : "DIFFERS from ab");
  return out;
}

// ---------------------------------------------------------------------------
// 5. Synthetic transition: the shipped two-qubit instance shows a sharp
//    transition at some T*, errors above 1e-4 at T <= T* - 2 ns, and an
//    iteration peak within 3 ns of T*.
Outcome check_transition(std::vector<SweepRow>& rows_out) {
  Problem problem = io::load_problem(fixture("problem_2q.json"));
  const DeviceSpec device = io::load_device(fixture("device_2q.json"));
  exact_ground_energy(problem);

  SweepConfig config;
  for (double t = 4.0; t <= 24.0 + 1e-9; t += 1.0) config.durations.push_back(t);
  const std::vector<SweepRow> rows = emet_sweep(problem, device, config);
  rows_out = rows;

  const std::optional<double> t_star = detect_transition(rows);
  Outcome out;
  if (!t_star) {
    out.pass = false;
    out.detail = "no duration reached error < 1e-8";
    return out;
  }
  bool accurate_above = true;
  bool rough_below = true;
  int peak_iterations = 0;
  double peak_duration = 0.0;
  for (const SweepRow& row : rows) {
    if (row.duration >= *t_star && !(row.error < 1e-8)) accurate_above = false;
    if (row.duration <= *t_star - 2.0 && !(row.error > 1e-4)) rough_below = false;
    if (row.iterations > peak_iterations) {
      peak_iterations = row.iterations;
      peak_duration = row.duration;
    }
  }
  const bool peak_near = std::abs(peak_duration - *t_star) <= 3.0;
  out.pass = accurate_above && rough_below && peak_near;
  out.detail = "T* = " + fmt(*t_star) + " ns; error < 1e-8 at every T >= T*: " +
               (accurate_above ? "yes" : "NO") + "; error > 1e-4 at every T <= T*-2: " +
               (rough_below ? "yes" : "NO") + "; iteration peak " +
               std::to_string(peak_iterations) + " at " + fmt(peak_duration) +
               " ns (|dT| <= 3: " + (peak_near ? "yes" : "NO") + ")";
  return out;
}

// ---------------------------------------------------------------------------
// 6. Effective quantum dimension on the four-qubit default device: 16 for the
//    zero pulse, 30 after a few optimizer steps at T >= 12 ns.
Outcome check_effective_dimension() {
  const DeviceSpec device = default_device(4);
  const Evolver evolver(device);
  Problem problem = io::load_problem(fixture("problem_4q.json"));
  exact_ground_energy(problem);
  const QuantumState reference = basis_state(4, problem.reference_index);
  const double duration = 12.0;
  PulseEnsemble pulse = make_pulse(device, Parameterization::CartesianAmplitude,
                                   WindowGrid::from_min_length(duration, 3.0));

  const int rank_zero = quantum_fisher_rank(pulse, evolver, reference, duration);

  OptimizerConfig config;
  config.max_iterations = 3;
  const OptResult result = minimize_pulse(problem, evolver, pulse, duration,
                                          RealVector::Zero(pulse.n_params()), config);
  pulse.unpack(result.parameters);
  const int rank_perturbed = quantum_fisher_rank(pulse, evolver, reference, duration);

  Outcome out;
  out.pass = rank_zero == 16 && rank_perturbed == 30;
  out.detail = "zero pulse -> " + std::to_string(rank_zero) +
               " (want 16); after 3 optimizer iterations -> " + std::to_string(rank_perturbed) +
               " (want 30)";
  return out;
}

// ---------------------------------------------------------------------------
// 7. Conservation: unit norm over 50 ns, constant zero-drive energy, and the
//    variational bound on every sweep row.
Outcome check_conservation(const std::vector<SweepRow>& sweep_rows) {
  const DeviceSpec device = default_device(2);
  const Evolver evolver(device);
  Problem problem = io::load_problem(fixture("problem_2q.json"));
  exact_ground_energy(problem);
  const QuantumState reference = basis_state(2, problem.reference_index);

  double norm_drift = 0.0;
  for (std::uint64_t seed : {5001u, 5002u}) {
    const PulseEnsemble pulse = testutil::make_random_pulse(
        device, Parameterization::CartesianAmplitude, 50.0, 3.0, seed);
    const QuantumState final_state = evolver.evolve(reference, pulse, 50.0);
    norm_drift = std::max(norm_drift, std::abs(final_state.norm() - 1.0));
  }

  const PulseEnsemble zero = make_pulse(device, Parameterization::CartesianAmplitude,
                                        WindowGrid::from_min_length(50.0, 3.0));
  const double reference_energy = measure_energy(reference, problem);
  double energy_drift = 0.0;
  for (double t : {5.0, 17.3, 36.0, 50.0}) {
    const double energy = measure_energy(evolver.evolve(reference, zero, t), problem);
    energy_drift = std::max(energy_drift, std::abs(energy - reference_energy));
  }

  double worst_bound = 0.0;
  for (const SweepRow& row : sweep_rows)
    if (std::isfinite(row.error)) worst_bound = std::min(worst_bound, row.error);

  Outcome out;
  out.pass = norm_drift <= 1e-10 && energy_drift <= 1e-10 && worst_bound >= -1e-9;
  out.detail = "norm drift " + fmt(norm_drift) +
               " over 50 ns (<= 1e-10); zero-drive energy drift " + fmt(energy_drift) +
               " (<= 1e-10); most negative sweep error " + fmt(worst_bound) + " (>= -1e-9)";
  return out;
}

// ---------------------------------------------------------------------------
// 8. Optimizer soundness on classical benchmarks plus gradient re-verification
//    of a converged pulse run.
Outcome check_optimizer() {
  Outcome out;

  const int dim = 10;
  RealMatrix basis(dim, dim);
  std::mt19937_64 rng(6001);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) basis(r, c) = ((rng() >> 11) * 0x1.0p-53) - 0.5;
  const RealMatrix quadratic = basis * basis.transpose() + RealMatrix::Identity(dim, dim);
  const RealVector rhs = oracles::random_uniform_vector(dim, 6002, -1.0, 1.0);
  const ObjectiveFn quad_objective = [&](const RealVector& x, RealVector& g) {
    g = quadratic * x - rhs;
    return 0.5 * x.dot(quadratic * x) - rhs.dot(x);
  };
  OptimizerConfig config;
  const OptResult quad = bfgs_minimize(quad_objective, RealVector::Zero(dim), config);
  RealVector quad_grad(dim);
  quad_objective(quad.parameters, quad_grad);
  const bool quad_ok =
      quad.converged && quad.iterations <= dim + 5 && quad_grad.cwiseAbs().maxCoeff() <= 1e-6;

  const ObjectiveFn rosenbrock = [](const RealVector& x, RealVector& g) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    g.resize(2);
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
  };
  RealVector start(2);
  start << -1.2, 1.0;
  const OptResult rosen = bfgs_minimize(rosenbrock, start, config);
  const OptResult rosen_again = bfgs_minimize(rosenbrock, start, config);
  RealVector rosen_grad(2);
  rosenbrock(rosen.parameters, rosen_grad);
  const bool rosen_ok = rosen.converged && std::abs(rosen.parameters[0] - 1.0) <= 1e-6 &&
                        std::abs(rosen.parameters[1] - 1.0) <= 1e-6 &&
                        rosen.iterations == rosen_again.iterations &&
                        rosen_grad.cwiseAbs().maxCoeff() <= 1e-6;

  Problem problem = io::load_problem(fixture("problem_2q.json"));
  const DeviceSpec device = io::load_device(fixture("device_2q.json"));
  exact_ground_energy(problem);
  const Evolver evolver(device);
  const double duration = 16.0;
  const PulseEnsemble prototype = make_pulse(device, Parameterization::CartesianAmplitude,
                                             WindowGrid::from_min_length(duration, 3.0));
  const OptResult vqe = minimize_pulse(problem, evolver, prototype, duration,
                                       RealVector::Zero(prototype.n_params()), config);
  VqeObjective objective(problem, evolver, prototype, duration, config.penalty_weight);
  RealVector vqe_grad;
  objective(vqe.parameters, vqe_grad);
  const bool vqe_ok = vqe.converged && vqe_grad.cwiseAbs().maxCoeff() <= 1e-6;

  out.pass = quad_ok && rosen_ok && vqe_ok;
  out.detail = "quadratic d=10: " + std::to_string(quad.iterations) +
               " iterations (<= 15), re-verified |g| " + fmt(quad_grad.cwiseAbs().maxCoeff()) +
               "; rosenbrock: " + std::to_string(rosen.iterations) +
               " iterations, reaches (1, 1), rerun identical; converged pulse run re-verified "
               "|g| " +
               fmt(vqe_grad.cwiseAbs().maxCoeff()) + " <= 1e-6";
  return out;
}

}  // namespace

int main() {
  std::vector<SweepRow> sweep_rows;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"window-grid rule", check_window_grid},
      {"rabi oracle vs simulator", check_rabi_grid},
      {"gradient correctness", check_gradients},
      {"polar/cartesian equivalence", check_polar_cartesian},
      {"synthetic transition", [&] { return check_transition(sweep_rows); }},
      {"effective quantum dimension", check_effective_dimension},
      {"conservation suite", [&] { return check_conservation(sweep_rows); }},
      {"optimizer soundness", check_optimizer},
  };

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome outcome;
    try {
      outcome = criteria[k].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] %zu. %s: %s\n", outcome.pass ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures;
}

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pulsevqe/pulses.hpp"
#include "test_util.hpp"

using namespace pulsevqe;

TEST_CASE("window grid picks the most windows not shorter than the minimum") {
  SUBCASE("24 ns at 3 ns minimum gives eight 3 ns windows") {
    const WindowGrid grid = WindowGrid::from_min_length(24.0, 3.0);
    CHECK(grid.n_windows == 8);
    CHECK(grid.window_length == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("23.8 ns at 3 ns minimum gives seven 3.4 ns windows") {
    const WindowGrid grid = WindowGrid::from_min_length(23.8, 3.0);
    CHECK(grid.n_windows == 7);
    CHECK(grid.window_length == doctest::Approx(3.4).epsilon(1e-12));
  }
  SUBCASE("durations below the minimum clamp to a single window") {
    const WindowGrid grid = WindowGrid::from_min_length(2.0, 3.0);
    CHECK(grid.n_windows == 1);
    CHECK(grid.window_length == doctest::Approx(2.0));
  }
  SUBCASE("non-positive inputs are rejected") {
    CHECK_THROWS_AS(WindowGrid::from_min_length(0.0, 3.0), ValidationError);
    CHECK_THROWS_AS(WindowGrid::from_min_length(5.0, 0.0), ValidationError);
    CHECK_THROWS_AS(WindowGrid::from_min_length(-1.0, 3.0), ValidationError);
  }
  SUBCASE("windows tile the duration and respect the minimum") {
    const RealVector durations = oracles::random_uniform_vector(50, 5, 0.5, 40.0);
    const RealVector minima = oracles::random_uniform_vector(50, 6, 0.2, 5.0);
    for (int k = 0; k < 50; ++k) {
      const WindowGrid grid = WindowGrid::from_min_length(durations[k], minima[k]);
      CHECK(std::abs(grid.n_windows * grid.window_length - grid.duration) < 1e-12);
      if (grid.n_windows > 1) CHECK(grid.window_length >= minima[k] - 1e-9);
    }
  }
}

TEST_CASE("window membership uses half-open intervals with a closed final window") {
  const WindowGrid grid = WindowGrid::from_min_length(24.0, 3.0);
  CHECK(grid.window_index(0.0) == 0);
  CHECK(grid.window_index(3.0) == 1);
  CHECK(grid.window_index(2.999999) == 0);
  CHECK(grid.window_index(23.999) == 7);
  CHECK(grid.window_index(24.0) == 7);
  CHECK_THROWS_AS(grid.window_index(-0.5), DomainError);
  CHECK_THROWS_AS(grid.window_index(24.5), DomainError);
}

TEST_CASE("pulse label parsing") {
  CHECK(parse_pulse_label("ab").form == Parameterization::CartesianAmplitude);
  CHECK(parse_pulse_label("Aphi").form == Parameterization::PolarAmplitude);
  CHECK(parse_pulse_label("a").form == Parameterization::RealAmplitude);
  CHECK(parse_pulse_label("aD").form == Parameterization::RealAmplitudeDetuned);
  CHECK(parse_pulse_label("abD").form == Parameterization::CartesianAmplitudeDetuned);

  const PulseForm halved = parse_pulse_label("ab2");
  CHECK(halved.form == Parameterization::CartesianAmplitude);
  CHECK(resolve_min_window_length(halved, 3.0, 20) == doctest::Approx(1.5));

  const PulseForm continuous = parse_pulse_label("ab-inf");
  CHECK(resolve_min_window_length(continuous, 3.0, 20) == doctest::Approx(0.05));

  CHECK_THROWS_AS(parse_pulse_label("bogus"), ConfigError);
}

TEST_CASE("drive values per parameterization") {
  const DeviceSpec device = default_device(1);
  const WindowGrid grid = WindowGrid::from_min_length(4.0, 4.0);

  SUBCASE("polar form keeps the explicit half") {
    PulseEnsemble pulse = make_pulse(device, Parameterization::PolarAmplitude, grid);
    RealVector x(2);
    x << 2.0, 0.0;
    pulse.unpack(x);
    const DriveValue v = pulse.drive_value(0, 1.0);
    CHECK(v.omega.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v.omega.imag() == doctest::Approx(0.0));
    CHECK(v.frequency == doctest::Approx(device.qubit_freqs[0]));
  }
  SUBCASE("cartesian form is alpha + i beta") {
    PulseEnsemble pulse = make_pulse(device, Parameterization::CartesianAmplitude, grid);
    RealVector x(2);
    x << 0.03, -0.04;
    pulse.unpack(x);
    const DriveValue v = pulse.drive_value(0, 0.0);
    CHECK(v.omega == Complex{0.03, -0.04});
    CHECK(std::abs(v.omega) == doctest::Approx(0.05).epsilon(1e-15));
  }
  SUBCASE("time outside the pulse is a domain error") {
    PulseEnsemble pulse = make_pulse(device, Parameterization::CartesianAmplitude, grid);
    CHECK_THROWS_AS(pulse.drive_value(0, 4.5), DomainError);
    CHECK_THROWS_AS(pulse.drive_value(0, -0.5), DomainError);
  }
}

TEST_CASE("polar and cartesian forms describe the same drive at mapped points") {
  const DeviceSpec device = default_device(2);
  const WindowGrid grid = WindowGrid::from_min_length(9.0, 3.0);
  PulseEnsemble cartesian = make_pulse(device, Parameterization::CartesianAmplitude, grid);
  PulseEnsemble polar = make_pulse(device, Parameterization::PolarAmplitude, grid);

  const RealVector alphas = oracles::random_uniform_vector(cartesian.n_params(), 21, -0.1, 0.1);
  cartesian.unpack(alphas);
  RealVector mapped(polar.n_params());
  for (int q = 0; q < 2; ++q) {
    for (int w = 0; w < grid.n_windows; ++w) {
      const double alpha = alphas[cartesian.amplitude_param_index(q, w, 0)];
      const double beta = alphas[cartesian.amplitude_param_index(q, w, 1)];
      mapped[polar.amplitude_param_index(q, w, 0)] = 2.0 * std::hypot(alpha, beta);
      mapped[polar.amplitude_param_index(q, w, 1)] = std::atan2(beta, alpha);
    }
  }
  polar.unpack(mapped);

  for (double t : {0.0, 1.7, 3.0, 5.2, 8.999, 9.0}) {
    for (int q = 0; q < 2; ++q) {
      const DriveValue a = cartesian.drive_value(q, t);
      const DriveValue b = polar.drive_value(q, t);
      CHECK(std::abs(a.omega - b.omega) < 1e-15);
      CHECK(a.frequency == b.frequency);
    }
  }
}

TEST_CASE("drive is piecewise constant over windows") {
  const DeviceSpec device = default_device(2);
  for (Parameterization form :
       {Parameterization::CartesianAmplitude, Parameterization::PolarAmplitude,
        Parameterization::RealAmplitude, Parameterization::RealAmplitudeDetuned,
        Parameterization::CartesianAmplitudeDetuned}) {
    const PulseEnsemble pulse = testutil::make_random_pulse(device, form, 10.0, 3.0, 17, true);
    for (int q = 0; q < 2; ++q) {
      const DriveValue left = pulse.drive_value(q, 3.4);
      const DriveValue right = pulse.drive_value(q, 6.6);  // same window [10/3, 20/3)
      CHECK(left.omega == right.omega);
      CHECK(left.frequency == right.frequency);
    }
  }
}

TEST_CASE("detuned cartesian form with zero detuning matches the resonant form exactly") {
  const DeviceSpec device = default_device(2);
  const WindowGrid grid = WindowGrid::from_min_length(12.0, 3.0);
  PulseEnsemble resonant = make_pulse(device, Parameterization::CartesianAmplitude, grid);
  PulseEnsemble detuned = make_pulse(device, Parameterization::CartesianAmplitudeDetuned, grid);

  const RealVector amp = oracles::random_uniform_vector(resonant.n_params(), 31, -0.1, 0.1);
  resonant.unpack(amp);
  RealVector extended = RealVector::Zero(detuned.n_params());
  extended.head(amp.size()) = amp;
  detuned.unpack(extended);

  for (double t : {0.0, 2.5, 6.0, 11.3, 12.0}) {
    for (int q = 0; q < 2; ++q) {
      const DriveValue a = resonant.drive_value(q, t);
      const DriveValue b = detuned.drive_value(q, t);
      CHECK(a.omega == b.omega);
      CHECK(a.frequency == b.frequency);  // nu = omega exactly when Delta = 0
    }
  }
}

TEST_CASE("parameter counts match the per-window and per-pulse rules") {
  const DeviceSpec device = default_device(3);
  const int n = 3;
  for (double duration : {6.0, 13.0, 21.5}) {
    const WindowGrid grid = WindowGrid::from_min_length(duration, 3.0);
    const int w = grid.n_windows;
    CHECK(make_pulse(device, Parameterization::CartesianAmplitude, grid).n_params() == 2 * n * w);
    CHECK(make_pulse(device, Parameterization::PolarAmplitude, grid).n_params() == 2 * n * w);
    CHECK(make_pulse(device, Parameterization::RealAmplitude, grid).n_params() == n * w);
    CHECK(make_pulse(device, Parameterization::RealAmplitudeDetuned, grid).n_params() ==
          n * w + n);
    CHECK(make_pulse(device, Parameterization::CartesianAmplitudeDetuned, grid).n_params() ==
          2 * n * w + n);
  }
}

TEST_CASE("pack round-trips exactly") {
  const DeviceSpec device = default_device(2);
  const WindowGrid grid = WindowGrid::from_min_length(10.0, 3.0);
  for (Parameterization form :
       {Parameterization::CartesianAmplitude, Parameterization::PolarAmplitude,
        Parameterization::RealAmplitude, Parameterization::RealAmplitudeDetuned,
        Parameterization::CartesianAmplitudeDetuned}) {
    PulseEnsemble pulse = make_pulse(device, form, grid);
    const RealVector x =
        oracles::random_uniform_vector(pulse.n_params(), 41 + static_cast<int>(form), -1.0, 1.0);
    pulse.unpack(x);
    const RealVector packed = pulse.pack();
    REQUIRE(packed.size() == x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) CHECK(packed[k] == x[k]);

    RealVector wrong(x.size() + 1);
    CHECK_THROWS_AS(pulse.unpack(wrong), ValidationError);
  }
}

TEST_CASE("zero initialization gives a flat resonant pulse") {
  const DeviceSpec device = default_device(2);
  const PulseEnsemble pulse = make_pulse(device, Parameterization::CartesianAmplitudeDetuned,
                                         WindowGrid::from_min_length(9.0, 3.0));
  const RealVector x = initialize_parameters(pulse, device, {});
  CHECK(x.size() == pulse.n_params());
  CHECK(x.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random initialization is reproducible and respects the amplitude bound") {
  const DeviceSpec device = default_device(2);
  InitConfig init;
  init.mode = InitMode::Random;
  init.seed = 1234;

  for (Parameterization form :
       {Parameterization::CartesianAmplitude, Parameterization::PolarAmplitude,
        Parameterization::RealAmplitude}) {
    PulseEnsemble pulse =
        make_pulse(device, form, WindowGrid::from_min_length(24.0, 3.0));
    const RealVector a = initialize_parameters(pulse, device, init);
    const RealVector b = initialize_parameters(pulse, device, init);
    for (Eigen::Index k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);

    pulse.unpack(a);
    for (int q = 0; q < 2; ++q)
      for (int w = 0; w < pulse.grids[q].n_windows; ++w)
        CHECK(std::abs(pulse.window_amplitude(q, w)) <= device.omega_max + 1e-15);
  }
}

TEST_CASE("random detunings stay on resonance unless a range is configured") {
  const DeviceSpec device = default_device(2);
  PulseEnsemble pulse = make_pulse(device, Parameterization::RealAmplitudeDetuned,
                                   WindowGrid::from_min_length(9.0, 3.0));
  InitConfig init;
  init.mode = InitMode::Random;
  init.seed = 5;
  RealVector x = initialize_parameters(pulse, device, init);
  pulse.unpack(x);
  CHECK(pulse.detunings[0] == 0.0);
  CHECK(pulse.detunings[1] == 0.0);

  init.detuning_range = {{-0.3, 0.3}};
  x = initialize_parameters(pulse, device, init);
  pulse.unpack(x);
  bool some_nonzero = false;
  for (double d : pulse.detunings) {
    CHECK(d >= -0.3);
    CHECK(d <= 0.3);
    if (d != 0.0) some_nonzero = true;
  }
  CHECK(some_nonzero);
}

TEST_CASE("real-amplitude sampler is uniform over [-omega_max, omega_max]") {
  const DeviceSpec device = default_device(1);
  // One qubit with 1000 windows gives 1000 independent samples.
  WindowGrid grid;
  grid.duration = 1000.0;
  grid.n_windows = 1000;
  grid.window_length = 1.0;
  PulseEnsemble pulse = make_pulse(device, Parameterization::RealAmplitude, grid);
  InitConfig init;
  init.mode = InitMode::Random;
  init.seed = 11;
  const RealVector x = initialize_parameters(pulse, device, init);
  std::vector<double> samples(x.data(), x.data() + x.size());
  const double ks = oracles::ks_uniform_statistic(samples, -device.omega_max, device.omega_max);
  CHECK(ks < 0.05);
}

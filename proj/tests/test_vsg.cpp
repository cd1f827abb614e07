#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "bsalloc/vsg.hpp"

using namespace bsalloc;

namespace {
VsgParams study_params() {
  VsgParams p;
  p.inertia_s = 8.0;
  p.pll_time_const_s = 0.05;
  p.damping = 1.0;
  p.droop_gain = 89.0;
  return p;
}
}  // namespace

TEST_CASE("second-order shape for the study parameter set") {
  auto s = response_shape(study_params());
  CHECK(s.natural_freq_rad == Catch::Approx(10.60660).margin(5e-4));
  CHECK(s.damping_ratio == Catch::Approx(0.94575).margin(5e-5));
  CHECK_FALSE(s.overdamped);
  CHECK(s.nadir_time_s == Catch::Approx(0.81506).margin(5e-4));
  CHECK(s.nadir_ratio == Catch::Approx(1.4826e-4).margin(2e-6));
}

TEST_CASE("natural frequency scales with sqrt of stiffness") {
  VsgParams p = study_params();
  auto base = response_shape(p);
  p.damping *= 4.0;
  p.droop_gain *= 4.0;
  auto scaled = response_shape(p);
  CHECK(scaled.natural_freq_rad == Catch::Approx(2.0 * base.natural_freq_rad));
}

TEST_CASE("transient indices at the study operating point") {
  VsgParams p = study_params();
  auto shape = response_shape(p);

  SECTION("zero disturbance is the identity") {
    auto idx = freq_indices(p, shape, 59.9, 0.0, 2.294);
    CHECK(idx.rocof_hz_s == 0.0);
    CHECK(idx.qss_hz == 59.9);
    CHECK(idx.nadir_hz == 59.9);
  }
  SECTION("0.5 MW pick-up on a 2.294 MW unit") {
    auto idx = freq_indices(p, shape, 60.0, 0.5, 2.294);
    CHECK(idx.rocof_hz_s == Catch::Approx(-0.81735).margin(5e-4));
    CHECK(idx.qss_hz == Catch::Approx(59.85469).margin(5e-4));
    CHECK(idx.nadir_hz == Catch::Approx(59.85467).margin(5e-4));
  }
  SECTION("load drop mirrors about the previous frequency") {
    auto up = freq_indices(p, shape, 60.0, -0.5, 2.294);
    auto down = freq_indices(p, shape, 60.0, 0.5, 2.294);
    CHECK(up.qss_hz - 60.0 == Catch::Approx(60.0 - down.qss_hz));
    CHECK(up.nadir_hz - 60.0 == Catch::Approx(60.0 - down.nadir_hz));
    CHECK(up.rocof_hz_s == Catch::Approx(-down.rocof_hz_s));
  }
  SECTION("rejects non-positive rating") {
    CHECK_THROWS_AS(freq_indices(p, shape, 60, 0.1, 0.0), std::invalid_argument);
  }
}

TEST_CASE("oracle trajectory basics") {
  VsgParams p = study_params();
  auto shape = response_shape(p);
  const double dt = 0.04 / shape.natural_freq_rad;

  SECTION("zero step stays at zero") {
    auto traj = step_response_oracle(p, 0.0, 2.0, dt);
    for (double v : traj) CHECK(v == 0.0);
  }
  SECTION("unit step settles at -1/stiffness") {
    auto traj = step_response_oracle(p, 1.0, 12.0, dt);
    CHECK(traj.back() == Catch::Approx(-1.0 / 90.0).margin(1e-6));
  }
  SECTION("rejects too-large dt") {
    CHECK_THROWS_AS(step_response_oracle(p, 1.0, 1.0, 1.0), std::invalid_argument);
  }
  SECTION("closed-form nadir matches the integrated extremum") {
    auto traj = step_response_oracle(p, 1.0, 12.0, dt);
    auto sum = summarize_oracle(traj, dt);
    const double closed = -(1.0 + shape.nadir_ratio) / 90.0;
    CHECK(std::abs(sum.extremum - closed) <= 1e-4);
    CHECK(sum.extremum_time_s == Catch::Approx(shape.nadir_time_s).margin(0.02));
  }
}

TEST_CASE("closed form vs oracle over random valid parameters") {
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> uh(2.0, 10.0), ut(0.02, 0.1), ud(0.0, 5.0),
      uk(20.0, 100.0);
  int tested = 0;
  for (int i = 0; i < 200 && tested < 100; ++i) {
    VsgParams p;
    p.inertia_s = uh(rng);
    p.pll_time_const_s = ut(rng);
    p.damping = ud(rng);
    p.droop_gain = uk(rng);
    auto shape = response_shape(p);
    if (shape.overdamped) continue;
    ++tested;
    const double dt = 0.04 / shape.natural_freq_rad;
    const double horizon = std::max(12.0, 8.0 / (shape.damping_ratio *
                                                 shape.natural_freq_rad));
    auto traj = step_response_oracle(p, 1.0, horizon, dt);
    auto sum = summarize_oracle(traj, dt);

    const double qss_closed = -1.0 / p.stiffness();
    const double nadir_closed = qss_closed * (1.0 + shape.nadir_ratio);
    INFO("H=" << p.inertia_s << " T=" << p.pll_time_const_s << " D=" << p.damping
              << " K=" << p.droop_gain);
    CHECK(std::abs(sum.asymptote - qss_closed) <= 1e-4);
    CHECK(std::abs(sum.extremum - nadir_closed) <= 1e-3);
    // inertial initial slope
    const double rocof_closed = 1.0 / (2.0 * p.inertia_s);
    CHECK(sum.max_abs_slope == Catch::Approx(rocof_closed).epsilon(0.05));
  }
  CHECK(tested == 100);
}

TEST_CASE("nadir ordering and monotonicity in the disturbance") {
  VsgParams p = study_params();
  auto shape = response_shape(p);
  double prev_nadir = 1e9;
  for (double dp = 0.0; dp <= 1.0; dp += 0.1) {
    auto idx = freq_indices(p, shape, 60.0, dp, 2.0);
    CHECK(idx.nadir_hz <= idx.qss_hz);
    CHECK(idx.qss_hz <= 60.0);
    CHECK(idx.nadir_hz <= prev_nadir);
    prev_nadir = idx.nadir_hz;
    CHECK(idx.rocof_hz_s == Catch::Approx(-dp / (2.0 * 8.0 * 2.0) * 60.0));
  }
}

TEST_CASE("overdamped parameterization is flagged with zero overshoot") {
  VsgParams p;
  p.inertia_s = 0.5;
  p.pll_time_const_s = 0.5;
  p.damping = 10.0;
  p.droop_gain = 1.0;
  auto s = response_shape(p);
  CHECK(s.overdamped);
  CHECK(s.nadir_ratio == 0.0);
}

TEST_CASE("voltage pinning collapses when installed and relaxes otherwise") {
  auto pinned = voltage_bounds(true, 1.0, 0.02, 100.0);
  CHECK(pinned.rhs == Catch::Approx(1.02));
  CHECK(pinned.slack == 0.0);
  auto open = voltage_bounds(false, 1.0, 0.02, 100.0);
  CHECK(open.slack == 100.0);
  CHECK_THROWS_AS(voltage_bounds(true, 0.0, 0.0, 1.0), std::invalid_argument);
}

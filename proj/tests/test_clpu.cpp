#include <catch2/catch_amalgamated.hpp>

#include "bsalloc/clpu.hpp"

using namespace bsalloc;

TEST_CASE("staircase multiplier after energization") {
  ClpuCoefficients b;  // defaults 0.6/0.3/0.1
  std::vector<double> u = {0, 0, 0, 1, 1, 1, 1, 1};
  CHECK(clpu_multiplier(u, 2, b) == Catch::Approx(0.0));
  CHECK(clpu_multiplier(u, 3, b) == Catch::Approx(1.6));
  CHECK(clpu_multiplier(u, 4, b) == Catch::Approx(1.3));
  CHECK(clpu_multiplier(u, 5, b) == Catch::Approx(1.1));
  CHECK(clpu_multiplier(u, 6, b) == Catch::Approx(1.0));
  CHECK(clpu_multiplier(u, 7, b) == Catch::Approx(1.0));
}

TEST_CASE("never energized stays at zero; pre-horizon service stays at one") {
  ClpuCoefficients b;
  std::vector<double> dead(6, 0.0);
  for (size_t t = 0; t < 6; ++t) CHECK(clpu_multiplier(dead, t, b) == 0.0);
  // service that predates the window: all delta terms vanish
  CHECK(clpu_multiplier(std::array<double, 4>{1, 1, 1, 1}, b) == Catch::Approx(1.0));
  // black start at the first step produces the surge at t = 0
  std::vector<double> live(6, 1.0);
  CHECK(clpu_multiplier(live, 0, b) == Catch::Approx(1.6));
  CHECK(clpu_multiplier(live, 3, b) == Catch::Approx(1.0));
}

TEST_CASE("multiplier properties over every energization time in a 12-step horizon") {
  ClpuCoefficients b;
  b.beta1 = 0.5;
  b.beta2 = 0.2;
  b.beta3 = 0.05;
  for (int t0 = 0; t0 < 12; ++t0) {
    std::vector<double> u(12, 0.0);
    for (int t = t0; t < 12; ++t) u[static_cast<size_t>(t)] = 1.0;
    double prev = 1e9;
    for (int t = 0; t < 12; ++t) {
      const double mult = clpu_multiplier(u, static_cast<size_t>(t), b);
      if (t < t0) {
        CHECK(mult == 0.0);
      } else {
        CHECK(mult >= 1.0);
        CHECK(mult <= prev);
        prev = mult;
        if (t - t0 >= 3) CHECK(mult == Catch::Approx(1.0));
      }
    }
  }
}

TEST_CASE("restored series composes multiplier, nominal shape and power factor") {
  ClpuCoefficients b;
  std::vector<double> nominal = {0.2, 0.2, 0.25, 0.25};
  std::vector<double> status = {0, 1, 1, 1};
  auto r = restored_load_series(nominal, status, 0.451, b);
  CHECK(r.p_mw[0] == 0.0);
  CHECK(r.p_mw[1] == Catch::Approx(0.2 * 1.6));
  CHECK(r.p_mw[2] == Catch::Approx(0.25 * 1.3));
  CHECK(r.p_mw[3] == Catch::Approx(0.25 * 1.1));
  for (size_t t = 0; t < 4; ++t)
    CHECK(r.q_mvar[t] == Catch::Approx(r.p_mw[t] * 0.48430).margin(1e-5));
}

TEST_CASE("invalid inputs are rejected") {
  ClpuCoefficients bad;
  bad.beta2 = 0.9;  // violates the decay ordering
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  ClpuCoefficients b;
  CHECK_THROWS_AS(restored_load_series({1.0}, {1.0, 0.0}, 0.451, b),
                  std::invalid_argument);
  CHECK_THROWS_AS(restored_load_series({1.0, 1.0}, {1.0, 0.0}, 0.451, b),
                  std::invalid_argument);
}

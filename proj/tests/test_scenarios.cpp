#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "bsalloc/scenarios.hpp"

using namespace bsalloc;

namespace {
OutageDistribution study_outages() {
  OutageDistribution d;
  d.durations_min = {60, 120, 180, 240};
  d.probabilities = {0.1340, 0.4290, 0.2733, 0.1637};
  return d;
}
}  // namespace

TEST_CASE("sixteen scenarios with the study outage distribution") {
  auto seasons = synthesize_season_profiles(7, 21, 15);
  auto set = build_scenarios(seasons, study_outages(), 21, 15);
  REQUIRE(set.scenarios.size() == 16);
  double total = 0.0;
  for (const auto& s : set.scenarios) total += s.probability;
  CHECK(total == Catch::Approx(1.0).margin(1e-12));

  // summer, 120 minutes
  const Scenario* su120 = nullptr;
  for (const auto& s : set.scenarios)
    if (s.season == "SU" && s.outage_min == 120) su120 = &s;
  REQUIRE(su120 != nullptr);
  CHECK(su120->probability == Catch::Approx(0.25 * 0.4290).margin(1e-15));
  CHECK(su120->probability == Catch::Approx(0.10725).margin(1e-15));
}

TEST_CASE("tg availability is a single step function per scenario") {
  auto seasons = synthesize_season_profiles(7, 21, 15);
  auto set = build_scenarios(seasons, study_outages(), 21, 15);
  for (const auto& s : set.scenarios) {
    int flips = 0;
    for (size_t t = 1; t < s.tg_available.size(); ++t) {
      CHECK(s.tg_available[t] >= s.tg_available[t - 1]);
      if (s.tg_available[t] != s.tg_available[t - 1]) ++flips;
    }
    CHECK(flips == 1);
    // first available step is the first boundary at or past the outage end
    const int first = s.outage_min / 15;
    CHECK(s.tg_available[static_cast<size_t>(first)] == 1);
    CHECK(s.tg_available[static_cast<size_t>(first - 1)] == 0);
  }
}

TEST_CASE("degenerate single-season single-duration set") {
  auto seasons = synthesize_season_profiles(3, 12, 15);
  seasons.resize(1);
  OutageDistribution d;
  d.durations_min = {120};
  d.probabilities = {1.0};
  auto set = build_scenarios(seasons, d, 12, 15);
  REQUIRE(set.scenarios.size() == 1);
  CHECK(set.scenarios[0].probability == 1.0);
}

TEST_CASE("invalid distributions and durations are rejected") {
  auto seasons = synthesize_season_profiles(3, 12, 15);
  OutageDistribution bad;
  bad.durations_min = {60, 120};
  bad.probabilities = {0.5, 0.6};
  CHECK_THROWS_AS(build_scenarios(seasons, bad, 12, 15), std::invalid_argument);
  OutageDistribution odd;
  odd.durations_min = {70};
  odd.probabilities = {1.0};
  CHECK_THROWS_AS(build_scenarios(seasons, odd, 12, 15), std::invalid_argument);
}

TEST_CASE("synthesized profiles are deterministic, bounded, and season-ordered") {
  auto a = synthesize_season_profiles(42, 21, 15);
  auto b = synthesize_season_profiles(42, 21, 15);
  REQUIRE(a.size() == 4);
  for (size_t s = 0; s < 4; ++s) {
    CHECK(a[s].load_shape == b[s].load_shape);
    CHECK(a[s].pv_shape == b[s].pv_shape);
    for (double v : a[s].pv_shape) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (double v : a[s].load_shape) CHECK(v > 0.0);
  }
  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  const SeasonProfile *su = nullptr, *w = nullptr;
  for (const auto& s : a) {
    if (s.label == "SU") su = &s;
    if (s.label == "W") w = &s;
  }
  REQUIRE(su != nullptr);
  REQUIRE(w != nullptr);
  CHECK(mean(w->pv_shape) < mean(su->pv_shape));
}

TEST_CASE("season profiles load from file") {
  const std::string path = "tmp_seasons.txt";
  {
    std::ofstream out(path);
    out << "# test seasons\n";
    out << "season SP load=1.0,1.1,0.9 pv=0.2,0.5,0.4\n";
    out << "season SU load=1.2,1.2,1.2 pv=0.6,0.9,0.8\n";
  }
  auto seasons = load_season_profiles(path);
  std::remove(path.c_str());
  REQUIRE(seasons.size() == 2);
  CHECK(seasons[0].label == "SP");
  CHECK(seasons[1].pv_shape == std::vector<double>{0.6, 0.9, 0.8});
}

#include <catch2/catch_amalgamated.hpp>
#include <fstream>

#include <json.hpp>

#include "bsalloc/milp_build.hpp"
#include "bsalloc/mps.hpp"

using namespace bsalloc;

namespace {
std::string fixture(const std::string& name) {
  return std::string(BSALLOC_FIXTURE_DIR) + "/" + name;
}

ScenarioSet tiny_scenarios(int steps, int durations = 1) {
  auto seasons = synthesize_season_profiles(5, steps, 15);
  seasons.resize(1);
  OutageDistribution d;
  if (durations == 1) {
    d.durations_min = {15};
    d.probabilities = {1.0};
  } else {
    d.durations_min = {15, 30};
    d.probabilities = {0.5, 0.5};
  }
  return build_scenarios(seasons, d, steps, 15);
}

RunConfig tiny_config(const std::string& feeder) {
  RunConfig c;
  c.feeder_path = feeder;
  c.horizon_steps = 2;
  c.budgets.s_budget_mw = 2.0;
  c.budgets.e_budget_mwh = 3.0;
  c.budgets.s_min_mw = 0.1;
  c.budgets.s_max_mw = 2.0;
  c.budgets.e_min_mwh = 0.5;
  c.budgets.e_max_mwh = 3.0;
  return c;
}
}  // namespace

TEST_CASE("toy5 model matches the hand-enumerated count table") {
  auto feeder = load_feeder(fixture("toy5.feeder"));
  auto cfg = tiny_config(fixture("toy5.feeder"));
  auto set = tiny_scenarios(2);
  auto b = build_model(feeder, set, cfg);
  auto stats = b.model.stats();

  nlohmann::json golden;
  std::ifstream in(fixture("toy5_stats.json"));
  in >> golden;
  for (auto& [family, count] : golden.at("vars").items()) {
    INFO("variable family " << family);
    CHECK(stats.vars_per_family[family] == count.get<size_t>());
  }
  size_t total = 0;
  for (auto& [family, count] : golden.at("vars").items()) total += count.get<size_t>();
  CHECK(stats.n_vars == total);
  for (auto& [family, count] : golden.at("constraints").items()) {
    INFO("constraint family " << family);
    CHECK(stats.constraints_per_family[family] == count.get<size_t>());
  }
  size_t ctotal = 0;
  for (auto& [family, count] : golden.at("constraints").items())
    ctotal += count.get<size_t>();
  CHECK(stats.n_constraints == ctotal);
}

TEST_CASE("doubling the horizon doubles every time-indexed family") {
  auto feeder = load_feeder(fixture("toy5.feeder"));
  auto cfg = tiny_config(fixture("toy5.feeder"));
  auto s2 = build_model(feeder, tiny_scenarios(2), cfg).model.stats();
  cfg.horizon_steps = 4;
  auto s4 = build_model(feeder, tiny_scenarios(4), cfg).model.stats();

  const std::vector<std::string> time_indexed = {"u.sg", "u.b",  "u.l", "v",
                                                 "flp",  "flq",  "p.cl", "en",
                                                 "f.mg", "p.mg", "r.roots"};
  for (const auto& fam : time_indexed) {
    INFO(fam);
    CHECK(s4.vars_per_family.at(fam) == 2 * s2.vars_per_family.at(fam));
  }
  // one initialization step plus per-step recursions
  CHECK(s4.vars_per_family.at("f.qss") == 3);
  CHECK(s4.constraints_per_family.at("freq.init") == 1);
  CHECK(s4.constraints_per_family.at("freq.update") == 3);
}

TEST_CASE("adding scenarios scales the second stage and leaves stage one alone") {
  auto feeder = load_feeder(fixture("toy5.feeder"));
  auto cfg = tiny_config(fixture("toy5.feeder"));
  auto s1 = build_model(feeder, tiny_scenarios(2, 1), cfg).model.stats();
  auto s2 = build_model(feeder, tiny_scenarios(2, 2), cfg).model.stats();

  CHECK(s2.vars_per_family.at("y.bess") == s1.vars_per_family.at("y.bess"));
  CHECK(s2.vars_per_family.at("s.mg") == s1.vars_per_family.at("s.mg"));
  CHECK(s2.vars_per_family.at("y.ssw") == s1.vars_per_family.at("y.ssw"));
  for (const auto& fam : {"u.sg", "u.b", "v", "flp", "p.cl", "en", "f.mg"}) {
    INFO(fam);
    CHECK(s2.vars_per_family.at(fam) == 2 * s1.vars_per_family.at(fam));
  }
  CHECK(s2.constraints_per_family.at("budget.power") == 1);
  CHECK(s2.constraints_per_family.at("balance.p") ==
        2 * s1.constraints_per_family.at("balance.p"));
}

TEST_CASE("every rule family appears on a model with TG, PV and three MGs") {
  auto feeder = load_feeder(fixture("toy3mg.feeder"));
  REQUIRE(feeder.sync_pairs.size() == 3);
  REQUIRE(feeder.sync_triples.size() == 3);
  auto cfg = tiny_config(fixture("toy3mg.feeder"));
  cfg.horizon_steps = 3;
  auto seasons = synthesize_season_profiles(5, 3, 15);
  seasons.resize(1);
  OutageDistribution d;
  d.durations_min = {15};
  d.probabilities = {1.0};
  auto set = build_scenarios(seasons, d, 3, 15);
  auto b = build_model(feeder, set, cfg);
  auto stats = b.model.stats();
  for (const auto& fam : expected_rule_families()) {
    INFO("rule family " << fam);
    CHECK(stats.constraints_per_family[fam] >= 1);
  }
}

TEST_CASE("scenario blocks never couple: every row touches one scenario at most") {
  auto feeder = load_feeder(fixture("toy5.feeder"));
  auto cfg = tiny_config(fixture("toy5.feeder"));
  auto set = tiny_scenarios(2, 2);
  auto b = build_model(feeder, set, cfg);
  auto scen_of = [](const std::string& name) -> int {
    auto pos = name.rfind(".o");
    if (pos == std::string::npos) return -1;
    return std::stoi(name.substr(pos + 2));
  };
  for (const auto& c : b.model.constraints()) {
    int seen = -1;
    bool ok = true;
    for (const auto& [v, coef] : c.expr.terms()) {
      const int s = scen_of(b.model.vars().info(v).name);
      if (s < 0) continue;
      if (seen < 0)
        seen = s;
      else if (seen != s)
        ok = false;
    }
    INFO(c.name);
    CHECK(ok);
  }
}

TEST_CASE("eager budget infeasibility diagnostics") {
  auto feeder = load_feeder(fixture("toy5.feeder"));
  auto cfg = tiny_config(fixture("toy5.feeder"));
  cfg.budgets.e_budget_mwh = 0.0;
  auto set = tiny_scenarios(2);
  CHECK_THROWS_WITH(build_model(feeder, set, cfg),
                    Catch::Matchers::ContainsSubstring("budget.energy"));
  cfg.budgets.e_budget_mwh = 3.0;
  cfg.budgets.s_budget_mw = 0.05;
  CHECK_THROWS_WITH(build_model(feeder, set, cfg),
                    Catch::Matchers::ContainsSubstring("budget.power"));
}

TEST_CASE("built model writes a parseable exchange file") {
  auto feeder = load_feeder(fixture("toy5.feeder"));
  auto cfg = tiny_config(fixture("toy5.feeder"));
  auto set = tiny_scenarios(2);
  auto b = build_model(feeder, set, cfg);
  const std::string path = "tmp_toy5_model.mps";
  write_exchange_file(b.model, path);
  auto parsed = parse_exchange_file(path);
  CHECK(diff_against_parsed(b.model, parsed).empty());
  std::remove(path.c_str());
}

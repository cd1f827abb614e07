#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>

#include "bsalloc/milp_build.hpp"
#include "bsalloc/plan.hpp"
#include "bsalloc/solve.hpp"
#include "bsalloc/validate.hpp"

using namespace bsalloc;

namespace {
std::string fixture(const std::string& name) {
  return std::string(BSALLOC_FIXTURE_DIR) + "/" + name;
}
}  // namespace

TEST_CASE("toy13 pipeline: build, solve, extract, audit") {
  auto cfg = load_config(fixture("toy13.json"));
  auto feeder = load_feeder(cfg.feeder_path);
  auto scen = make_scenarios(cfg);
  REQUIRE(scen.scenarios.size() == 4);

  auto build = build_model(feeder, scen, cfg);
  auto res = solve(build.model, cfg.backend, SolveLimits{cfg.time_limit_s, cfg.gap},
                   "tmp_pipeline", "toy13");
  INFO("solver: " << res.message << " status " << to_string(res.status));
  REQUIRE(res.has_values());
  CHECK(res.gap <= cfg.gap + 1e-9);

  auto plan = extract_plan(feeder, scen, res);
  CHECK(plan.installed_count() >= 1);

  auto rep = audit_plan(plan, feeder, scen, cfg);
  INFO(rep.human_summary());
  CHECK(rep.pass());

  // plan file round trip preserves the audit result
  write_plan(plan, "tmp_pipeline/toy13.plan");
  auto plan2 = read_plan("tmp_pipeline/toy13.plan");
  auto rep2 = audit_plan(plan2, feeder, scen, cfg);
  CHECK(rep2.pass());
  CHECK(plan2.objective == Catch::Approx(plan.objective));
  CHECK(plan2.installed_count() == plan.installed_count());
}

#include <catch2/catch_amalgamated.hpp>
#include <filesystem>

#include "bsalloc/solve.hpp"

using namespace bsalloc;

namespace {
SolverBackend highs_backend() { return SolverBackend{}; }

SolverBackend glpk_backend() {
  SolverBackend b;
  b.name = "glpk";
  b.command =
      "python3 {script_dir}/solve_glpk.py {model} {solution} "
      "--time-limit {time_limit} --gap {gap}";
  return b;
}

MilpModel knapsack() {
  // max 5a + 4b + 3c st 2a + 3b + c <= 4, binary -> min -(...), optimum -8
  MilpModel m;
  auto a = m.vars().add("a", "", VarKind::Binary, 0, 1);
  auto b = m.vars().add("b", "", VarKind::Binary, 0, 1);
  auto c = m.vars().add("c", "", VarKind::Binary, 0, 1);
  LinExpr cap;
  cap.add(a, 2.0).add(b, 3.0).add(c, 1.0);
  m.add_constraint("cap", "", cap, Sense::Le, 4.0);
  LinExpr obj;
  obj.add(a, -5.0).add(b, -4.0).add(c, -3.0);
  m.add_objective_term(obj);
  m.finalize_objective();
  return m;
}
}  // namespace

TEST_CASE("knapsack solves to the known optimum on both backends") {
  auto m = knapsack();
  for (const auto& backend : {highs_backend(), glpk_backend()}) {
    auto r = solve(m, backend, SolveLimits{60.0, 0.0}, "tmp_solve", backend.name);
    INFO(backend.name << ": " << r.message);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == Catch::Approx(-8.0));
    CHECK(r.value("a") == 1.0);
    CHECK(r.value("b") == 0.0);
    CHECK(r.value("c") == 1.0);
  }
}

TEST_CASE("infeasible two-constraint toy reports infeasible") {
  MilpModel m;
  auto x = m.vars().add("x", "", VarKind::Continuous, 0, 10);
  LinExpr lo;
  lo.add(x, 1.0);
  m.add_constraint("ge", "", lo, Sense::Ge, 1.0);
  LinExpr hi;
  hi.add(x, 1.0);
  m.add_constraint("le", "", hi, Sense::Le, 0.0);
  LinExpr obj;
  obj.add(x, 1.0);
  m.add_objective_term(obj);
  m.finalize_objective();
  for (const auto& backend : {highs_backend(), glpk_backend()}) {
    auto r = solve(m, backend, SolveLimits{60.0, 0.0}, "tmp_solve",
                   backend.name + "_inf");
    INFO(backend.name << ": " << r.message);
    CHECK(r.status == SolveStatus::Infeasible);
    CHECK(r.values.empty());
  }
}

TEST_CASE("missing backend executable surfaces as an error") {
  auto m = knapsack();
  SolverBackend bad;
  bad.name = "missing";
  bad.command = "/nonexistent/solver {model} {solution}";
  auto r = solve(m, bad, SolveLimits{}, "tmp_solve", "missing");
  CHECK(r.status == SolveStatus::Error);
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("gap limit is recorded in the result") {
  auto m = knapsack();
  auto r = solve(m, highs_backend(), SolveLimits{60.0, 0.05}, "tmp_solve", "gapped");
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.gap <= 0.05);
}

TEST_CASE("backends agree on random mixed-integer models") {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> coeff(-4.0, 4.0);
  for (int iter = 0; iter < 8; ++iter) {
    MilpModel m;
    const int nv = 5;
    for (int i = 0; i < nv; ++i) {
      if (i % 2 == 0)
        m.vars().add("b", std::to_string(i), VarKind::Binary, 0, 1);
      else
        m.vars().add("x", std::to_string(i), VarKind::Continuous, 0, 5);
    }
    // cover every variable so the relaxation stays bounded
    LinExpr cover;
    for (int i = 0; i < nv; ++i) cover.add(i, 1.0);
    m.add_constraint("cover", "", cover, Sense::Le, 8.0);
    for (int r = 0; r < 4; ++r) {
      LinExpr e;
      for (int i = 0; i < nv; ++i) e.add(i, coeff(rng));
      m.add_constraint("row", std::to_string(r), e, Sense::Le, 3.0 + iter);
    }
    LinExpr obj;
    for (int i = 0; i < nv; ++i) obj.add(i, coeff(rng) - 1.0);
    m.add_objective_term(obj);
    m.finalize_objective();

    auto rh = solve(m, highs_backend(), SolveLimits{60.0, 0.0}, "tmp_solve",
                    "xh" + std::to_string(iter));
    auto rg = solve(m, glpk_backend(), SolveLimits{60.0, 0.0}, "tmp_solve",
                    "xg" + std::to_string(iter));
    INFO("iter " << iter << " highs=" << rh.message << " glpk=" << rg.message);
    REQUIRE(rh.status == SolveStatus::Optimal);
    REQUIRE(rg.status == SolveStatus::Optimal);
    const double scale = std::max(1.0, std::abs(rh.objective));
    CHECK(std::abs(rh.objective - rg.objective) / scale < 1e-5);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include "bsalloc/linexpr.hpp"

using namespace bsalloc;

TEST_CASE("catalog rejects duplicates and bad bounds") {
  VarCatalog cat;
  auto x = cat.add("x", "1", VarKind::Continuous, 0.0, 10.0);
  CHECK(cat.info(x).name == "x.1");
  CHECK(cat.lookup("x.1") == x);
  CHECK_THROWS_AS(cat.add("x", "1", VarKind::Binary, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(cat.add("y", "", VarKind::Continuous, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cat.lookup("nope"), std::out_of_range);
}

TEST_CASE("expression compaction merges duplicates and drops zeros") {
  LinExpr e;
  e.add(3, 1.0).add(1, 2.0).add(3, -1.0).add(2, 0.5);
  e.add_constant(4.0);
  e.compact();
  REQUIRE(e.terms().size() == 2);
  CHECK(e.terms()[0] == std::pair<VarId, double>{1, 2.0});
  CHECK(e.terms()[1] == std::pair<VarId, double>{2, 0.5});
  std::vector<double> x = {0, 1, 2, 3};
  CHECK(e.evaluate(x) == Catch::Approx(4.0 + 2.0 + 1.0));
}

TEST_CASE("model folds expression constants into the rhs") {
  MilpModel m;
  auto x = m.vars().add("x", "", VarKind::Continuous, 0, 10);
  LinExpr e;
  e.add(x, 2.0).add_constant(5.0);
  m.add_constraint("row", "a", e, Sense::Le, 8.0);
  REQUIRE(m.constraints().size() == 1);
  CHECK(m.constraints()[0].rhs == Catch::Approx(3.0));
  CHECK(m.constraints()[0].expr.constant() == 0.0);
  CHECK_THROWS_AS(m.add_constraint("row", "a", LinExpr{}, Sense::Le, 0.0),
                  std::invalid_argument);
}

TEST_CASE("stats count per family") {
  MilpModel m;
  m.vars().add("u", "1", VarKind::Binary, 0, 1);
  m.vars().add("u", "2", VarKind::Binary, 0, 1);
  m.vars().add("v", "1", VarKind::Continuous, 0, 1);
  LinExpr e;
  e.add(0, 1.0).add(1, 1.0);
  m.add_constraint("cover", "1", e, Sense::Ge, 1.0);
  auto s = m.stats();
  CHECK(s.vars_per_family.at("u") == 2);
  CHECK(s.vars_per_family.at("v") == 1);
  CHECK(s.n_binary == 2);
  CHECK(s.constraints_per_family.at("cover") == 1);
  CHECK(s.n_nonzeros == 2);
}

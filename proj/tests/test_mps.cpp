#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <fstream>
#include <random>

#include "bsalloc/mps.hpp"

using namespace bsalloc;

namespace {
struct TempPath {
  std::string path;
  explicit TempPath(const std::string& p) : path(p) {}
  ~TempPath() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MilpModel random_model(std::mt19937_64& rng) {
  MilpModel m;
  std::uniform_int_distribution<int> nvars(2, 12), nrows(1, 14), pick_kind(0, 2);
  std::uniform_real_distribution<double> coeff(-5.0, 5.0), bound(0.5, 20.0);
  const int nv = nvars(rng);
  for (int i = 0; i < nv; ++i) {
    const int k = pick_kind(rng);
    if (k == 0)
      m.vars().add("b", std::to_string(i), VarKind::Binary, 0, 1);
    else if (k == 1)
      m.vars().add("x", std::to_string(i), VarKind::Continuous, -bound(rng), bound(rng));
    else
      m.vars().add("y", std::to_string(i), VarKind::Continuous, 0,
                   std::numeric_limits<double>::infinity());
  }
  const int nr = nrows(rng);
  std::uniform_int_distribution<int> sense(0, 2), var_pick(0, nv - 1);
  for (int r = 0; r < nr; ++r) {
    LinExpr e;
    const int terms = std::uniform_int_distribution<int>(1, nv)(rng);
    for (int t = 0; t < terms; ++t) e.add(var_pick(rng), coeff(rng));
    const int s = sense(rng);
    m.add_constraint("row", std::to_string(r), e,
                     s == 0 ? Sense::Le : s == 1 ? Sense::Ge : Sense::Eq, coeff(rng));
  }
  LinExpr obj;
  for (int i = 0; i < nv; ++i) obj.add(i, coeff(rng));
  m.add_objective_term(obj);
  m.finalize_objective();
  return m;
}
}  // namespace

TEST_CASE("one-variable model round-trips exactly") {
  MilpModel m;
  auto x = m.vars().add("x", "", VarKind::Continuous, 0.0, 10.0);
  LinExpr e;
  e.add(x, 1.0);
  m.add_constraint("lo", "", e, Sense::Ge, 1.0);
  LinExpr obj;
  obj.add(x, 1.0);
  m.add_objective_term(obj);
  m.finalize_objective();

  TempPath tp("tmp_tiny.mps");
  write_exchange_file(m, tp.path);
  auto parsed = parse_exchange_file(tp.path);
  CHECK(diff_against_parsed(m, parsed).empty());
  CHECK(parsed.rows.at("lo").sense == Sense::Ge);
  CHECK(parsed.rows.at("lo").rhs == 1.0);
  CHECK(parsed.cols.at("x").obj == 1.0);
}

TEST_CASE("emission is byte-identical across runs") {
  std::mt19937_64 rng(99);
  auto m = random_model(rng);
  TempPath a("tmp_det_a.mps"), b("tmp_det_b.mps");
  write_exchange_file(m, a.path);
  write_exchange_file(m, b.path);
  CHECK(slurp(a.path) == slurp(b.path));
}

TEST_CASE("fifty random models survive write then parse coefficient-identically") {
  std::mt19937_64 rng(20250810);
  for (int i = 0; i < 50; ++i) {
    auto m = random_model(rng);
    TempPath tp("tmp_rand_" + std::to_string(i) + ".mps");
    write_exchange_file(m, tp.path);
    auto parsed = parse_exchange_file(tp.path);
    const std::string diff = diff_against_parsed(m, parsed);
    INFO("model " << i << ": " << diff);
    CHECK(diff.empty());
  }
}

TEST_CASE("unwritable paths and unsafe names are rejected") {
  MilpModel m;
  m.vars().add("x", "", VarKind::Continuous, 0, 1);
  CHECK_THROWS_AS(write_exchange_file(m, "/nonexistent-dir/m.mps"), std::runtime_error);

  MilpModel bad;
  bad.vars().add("a b", "", VarKind::Continuous, 0, 1);
  CHECK_THROWS_AS(write_exchange_file(bad, "tmp_bad.mps"), std::invalid_argument);
}

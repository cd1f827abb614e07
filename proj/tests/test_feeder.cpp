#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <fstream>
#include <set>

#include "bsalloc/feeder.hpp"

using namespace bsalloc;

namespace {
std::string fixture(const std::string& name) {
  return std::string(BSALLOC_FIXTURE_DIR) + "/" + name;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& content) {
    path = std::string("tmp_feeder_") + std::to_string(rand()) + ".txt";
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};
}  // namespace

TEST_CASE("toy five-bus feeder loads with the expected structure") {
  auto m = load_feeder(fixture("toy5.feeder"));
  CHECK(m.buses.size() == 5);
  CHECK(m.segments.size() == 2);
  int switches = 0;
  for (const auto& b : m.branches)
    if (b.kind == BranchKind::Switch) ++switches;
  CHECK(switches == 1);
  CHECK(m.segments[0].is_candidate_mg);
  CHECK_FALSE(m.segments[1].is_candidate_mg);
  CHECK(m.segments[0].boundary_switches == std::vector<int>{3});
  CHECK(m.segments[1].boundary_switches == std::vector<int>{3});
  CHECK(m.buses[m.bus("n2")].has_critical_load);
  CHECK(m.buses[m.bus("n5")].has_noncritical_load);
  CHECK(m.buses[m.bus("n3")].pv_rating_mw == Catch::Approx(0.1));

  // partition property
  std::set<int> seen;
  size_t total = 0;
  for (const auto& seg : m.segments) {
    total += seg.buses.size();
    for (int b : seg.buses) CHECK(seen.insert(b).second);
  }
  CHECK(total == m.buses.size() - m.tg_buses.size());
}

TEST_CASE("round trip through serialize") {
  auto m = load_feeder(fixture("toy5.feeder"));
  TempFile tf(serialize(m));
  auto m2 = load_feeder(tf.path);
  CHECK(serialize(m2) == serialize(m));
  CHECK(m2.buses.size() == m.buses.size());
  CHECK(m2.sync_pairs == m.sync_pairs);
}

TEST_CASE("partition violations are rejected") {
  SECTION("bus in two segments") {
    TempFile tf(
        "bus a phases=abc\nbus b phases=abc\n"
        "line l from=a to=b phases=a r=0.1 x=0.1\n"
        "segment 1 buses=a,b\nsegment 2 buses=b\n");
    CHECK_THROWS_WITH(load_feeder(tf.path),
                      Catch::Matchers::ContainsSubstring("partition violation"));
  }
  SECTION("bus in no segment") {
    TempFile tf(
        "bus a phases=abc\nbus b phases=abc\nbus c phases=abc\n"
        "line l from=a to=b phases=a r=0.1 x=0.1\n"
        "switch s from=b to=c phases=abc\n"
        "segment 1 buses=a,b\n");
    CHECK_THROWS_WITH(load_feeder(tf.path),
                      Catch::Matchers::ContainsSubstring("partition violation"));
  }
}

TEST_CASE("structural errors carry line context") {
  SECTION("dangling branch endpoint") {
    TempFile tf("bus a phases=abc\nline l from=a to=zz phases=abc r=0.1 x=0.1\n");
    CHECK_THROWS_WITH(load_feeder(tf.path), Catch::Matchers::ContainsSubstring(":2:"));
  }
  SECTION("disconnected graph") {
    TempFile tf(
        "bus a phases=abc\nbus b phases=abc\nbus c phases=abc\nbus d phases=abc\n"
        "line l1 from=a to=b phases=a r=0.1 x=0.1\n"
        "line l2 from=c to=d phases=a r=0.1 x=0.1\n"
        "segment 1 buses=a,b\nsegment 2 buses=c,d\n");
    CHECK_THROWS_WITH(load_feeder(tf.path),
                      Catch::Matchers::ContainsSubstring("disconnected"));
  }
  SECTION("line crossing a segment boundary") {
    TempFile tf(
        "bus a phases=abc\nbus b phases=abc\n"
        "line l from=a to=b phases=a r=0.1 x=0.1\n"
        "segment 1 buses=a\nsegment 2 buses=b\n");
    CHECK_THROWS_WITH(load_feeder(tf.path),
                      Catch::Matchers::ContainsSubstring("switch for boundaries"));
  }
  SECTION("branch phases exceeding endpoints") {
    TempFile tf(
        "bus a phases=ab\nbus b phases=abc\n"
        "line l from=a to=b phases=abc r=0.1 x=0.1\n"
        "segment 1 buses=a,b\n");
    CHECK_THROWS_WITH(load_feeder(tf.path),
                      Catch::Matchers::ContainsSubstring("exceed endpoint"));
  }
  SECTION("candidate bus must be three-phase") {
    TempFile tf(
        "bus a phases=ab\nbus b phases=abc\n"
        "line l from=a to=b phases=ab r=0.1,0,0,0.1 x=0.1,0,0,0.1\n"
        "segment 1 buses=a,b candidate=a\n");
    CHECK_THROWS_WITH(load_feeder(tf.path),
                      Catch::Matchers::ContainsSubstring("three phases"));
  }
  SECTION("TG bus inside a segment") {
    TempFile tf(
        "bus a phases=abc tg\nbus b phases=abc\n"
        "switch s from=a to=b phases=abc\n"
        "segment 1 buses=a,b\n");
    CHECK_THROWS_WITH(load_feeder(tf.path),
                      Catch::Matchers::ContainsSubstring("cannot belong"));
  }
}

TEST_CASE("sync set enumeration") {
  SECTION("three candidates give three pairs and three overlapping tuples") {
    FeederModel m;
    for (int i = 0; i < 3; ++i) {
      Segment s;
      s.id = i;
      s.is_candidate_mg = true;
      m.segments.push_back(s);
    }
    derive_sync_sets(m);
    CHECK(m.sync_pairs.size() == 3);
    CHECK(m.sync_triples.size() == 3);
    for (const auto& t : m.sync_triples) {
      std::set<int> a = {t.pair_a.first, t.pair_a.second};
      std::set<int> b = {t.pair_b.first, t.pair_b.second};
      std::set<int> inter;
      for (int x : a)
        if (b.count(x)) inter.insert(x);
      CHECK(inter.size() == 1);
      CHECK(a.count(t.leftover.first) + b.count(t.leftover.first) == 1);
      CHECK(a.count(t.leftover.second) + b.count(t.leftover.second) == 1);
    }
  }
  SECTION("single candidate degenerates to empty sets") {
    FeederModel m;
    Segment s;
    s.id = 0;
    s.is_candidate_mg = true;
    m.segments.push_back(s);
    derive_sync_sets(m);
    CHECK(m.sync_pairs.empty());
    CHECK(m.sync_triples.empty());
  }
  SECTION("four candidates: brute-force count of overlapping pair combinations") {
    FeederModel m;
    for (int i = 0; i < 4; ++i) {
      Segment s;
      s.id = i;
      s.is_candidate_mg = true;
      m.segments.push_back(s);
    }
    derive_sync_sets(m);
    CHECK(m.sync_pairs.size() == 6);
    // brute force over all unordered pairs of distinct pairs
    int expect = 0;
    for (size_t i = 0; i < m.sync_pairs.size(); ++i)
      for (size_t j = i + 1; j < m.sync_pairs.size(); ++j) {
        std::set<int> u = {m.sync_pairs[i].first, m.sync_pairs[i].second,
                           m.sync_pairs[j].first, m.sync_pairs[j].second};
        if (u.size() == 3) ++expect;
      }
    CHECK(expect == 12);
    CHECK(m.sync_triples.size() == 12);
  }
}

TEST_CASE("drop coefficients reduce to r and x on a single phase") {
  Branch br;
  br.kind = BranchKind::Line;
  br.phases = kPhaseB;
  br.r_ohm = {0.42};
  br.x_ohm = {0.85};
  auto d = vdrop_coeffs(br);
  REQUIRE(d.r.size() == 1);
  CHECK(d.r[0] == Catch::Approx(0.42));
  CHECK(d.x[0] == Catch::Approx(0.85));
}

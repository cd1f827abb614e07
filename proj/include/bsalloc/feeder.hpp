// Multi-phase feeder data model: buses, lines, switchable boundaries,
// segment partition, candidate microgrid sites and the synchronization
// index sets. Loads from the documented structured-text schema (see
// docs/feeder-format.md) and validates every structural invariant on load.
// Instances are immutable after load_feeder returns.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace bsalloc {

class FeederError : public std::runtime_error {
 public:
  explicit FeederError(const std::string& what) : std::runtime_error(what) {}
};

// Phases as a bitmask: bit 0 = A, bit 1 = B, bit 2 = C.
using PhaseMask = std::uint8_t;
constexpr PhaseMask kPhaseA = 1, kPhaseB = 2, kPhaseC = 4, kPhaseAll = 7;

inline int phase_count(PhaseMask m) {
  return ((m >> 0) & 1) + ((m >> 1) & 1) + ((m >> 2) & 1);
}
inline std::vector<int> phase_list(PhaseMask m) {
  std::vector<int> out;
  for (int p = 0; p < 3; ++p)
    if (m & (1 << p)) out.push_back(p);
  return out;
}
inline char phase_letter(int p) { return static_cast<char>('a' + p); }

inline PhaseMask parse_phases(const std::string& s) {
  PhaseMask m = 0;
  for (char c : s) {
    if (c == 'a' || c == 'A')
      m |= kPhaseA;
    else if (c == 'b' || c == 'B')
      m |= kPhaseB;
    else if (c == 'c' || c == 'C')
      m |= kPhaseC;
    else
      throw FeederError("bad phase spec: " + s);
  }
  if (m == 0) throw FeederError("empty phase spec");
  return m;
}
inline std::string phases_to_string(PhaseMask m) {
  std::string s;
  for (int p = 0; p < 3; ++p)
    if (m & (1 << p)) s += phase_letter(p);
  return s;
}

struct Bus {
  std::string id;
  PhaseMask phases = kPhaseAll;
  double vbase_v = 2401.8;  // line-to-neutral base, volts
  bool is_tg_interface = false;
  bool has_critical_load = false;
  bool has_noncritical_load = false;
  double pv_rating_mw = 0.0;
  int segment = -1;  // -1 for TG interface buses
};

enum class BranchKind { Line, Switch };

struct Branch {
  std::string id;
  int from = -1, to = -1;
  PhaseMask phases = kPhaseAll;
  BranchKind kind = BranchKind::Line;
  bool ssw_eligible = true;  // meaningful for switches only
  double limit_mva = 5.0;
  // Row-major per-phase impedance over phase_list(phases); empty for switches.
  std::vector<double> r_ohm, x_ohm;
};

enum class LoadKind { Critical, NonCritical };

struct LoadSpec {
  int bus = -1;
  LoadKind kind = LoadKind::Critical;
  double p_mw = 0.0;  // total over served phases, at shape multiplier 1
  double pf_angle_rad = 0.451;
  PhaseMask phases = kPhaseAll;
};

struct Segment {
  int id = 0;           // external id from the file
  std::vector<int> buses;
  std::vector<int> internal_lines;
  std::vector<int> boundary_switches;
  bool is_candidate_mg = false;
  std::vector<int> candidate_buses;  // three-phase BESS sites, when candidate
};

struct SyncTriple {
  std::pair<int, int> pair_a;    // indices into sync_pairs' segment space
  std::pair<int, int> pair_b;
  std::pair<int, int> leftover;  // symmetric difference of the two pairs
};

struct FeederModel {
  std::string name = "feeder";
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Segment> segments;  // ordered by external id
  std::vector<LoadSpec> loads;
  std::vector<int> tg_buses;

  // All unordered pairs of candidate segment indices, lexicographic.
  std::vector<std::pair<int, int>> sync_pairs;
  std::vector<SyncTriple> sync_triples;

  std::map<std::string, int> bus_index;
  std::map<std::string, int> branch_index;

  int bus(const std::string& id) const {
    auto it = bus_index.find(id);
    if (it == bus_index.end()) throw FeederError("unknown bus: " + id);
    return it->second;
  }
  std::vector<int> candidate_segments() const {
    std::vector<int> out;
    for (size_t i = 0; i < segments.size(); ++i)
      if (segments[i].is_candidate_mg) out.push_back(static_cast<int>(i));
    return out;
  }
  int segment_of_bus(int b) const { return buses[static_cast<size_t>(b)].segment; }
};

// LinDistFlow drop coefficients for one branch: v_j = v_i - 2*(R p + X q)
// with the usual 120-degree phase-rotation folded into R and X. Entries are
// row-major over the branch phase list, in ohms.
struct DropCoeffs {
  std::vector<double> r, x;
};

inline DropCoeffs vdrop_coeffs(const Branch& br) {
  const auto ph = phase_list(br.phases);
  const int n = static_cast<int>(ph.size());
  DropCoeffs out;
  out.r.assign(static_cast<size_t>(n * n), 0.0);
  out.x.assign(static_cast<size_t>(n * n), 0.0);
  if (br.kind == BranchKind::Switch || br.r_ohm.empty()) return out;
  static const std::array<double, 3> theta = {0.0, -2.0 * M_PI / 3.0, 2.0 * M_PI / 3.0};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const std::complex<double> z(br.r_ohm[static_cast<size_t>(a * n + b)],
                                   br.x_ohm[static_cast<size_t>(a * n + b)]);
      const double rot = theta[static_cast<size_t>(ph[static_cast<size_t>(b)])] -
                         theta[static_cast<size_t>(ph[static_cast<size_t>(a)])];
      const std::complex<double> w = z * std::exp(std::complex<double>(0.0, rot));
      out.r[static_cast<size_t>(a * n + b)] = w.real();
      out.x[static_cast<size_t>(a * n + b)] = w.imag();
    }
  return out;
}

namespace detail {

struct Tok {
  std::string key, value;
};

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

inline std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

class LineCtx {
 public:
  LineCtx(const std::string& path, int line) : path_(path), line_(line) {}
  [[noreturn]] void fail(const std::string& msg) const {
    throw FeederError(path_ + ":" + std::to_string(line_) + ": " + msg);
  }
  double num(const std::string& s, const std::string& field) const {
    try {
      size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) fail("trailing characters in " + field + ": " + s);
      return v;
    } catch (const FeederError&) {
      throw;
    } catch (...) {
      fail("bad number for " + field + ": " + s);
    }
  }

 private:
  std::string path_;
  int line_;
};

// key=value attributes after the positional tokens; bare words are flags.
struct AttrMap {
  std::map<std::string, std::string> kv;
  std::set<std::string> flags;

  static AttrMap parse(const std::vector<std::string>& toks, size_t start) {
    AttrMap a;
    for (size_t i = start; i < toks.size(); ++i) {
      auto eq = toks[i].find('=');
      if (eq == std::string::npos)
        a.flags.insert(toks[i]);
      else
        a.kv[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
    }
    return a;
  }
  std::optional<std::string> get(const std::string& k) const {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  }
  std::string require(const std::string& k, const LineCtx& ctx) const {
    auto v = get(k);
    if (!v) ctx.fail("missing attribute " + k + "=");
    return *v;
  }
};

inline void check_connected(const FeederModel& m) {
  if (m.buses.empty()) throw FeederError("feeder has no buses");
  std::vector<std::vector<int>> adj(m.buses.size());
  for (const auto& br : m.branches) {
    adj[static_cast<size_t>(br.from)].push_back(br.to);
    adj[static_cast<size_t>(br.to)].push_back(br.from);
  }
  std::vector<char> seen(m.buses.size(), 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  size_t count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[static_cast<size_t>(u)])
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = 1;
        ++count;
        stack.push_back(v);
      }
  }
  if (count != m.buses.size())
    throw FeederError("feeder graph is disconnected (" + std::to_string(count) +
                      " of " + std::to_string(m.buses.size()) + " buses reachable)");
}

inline void check_segment_trees(const FeederModel& m) {
  for (const auto& seg : m.segments) {
    if (seg.buses.empty())
      throw FeederError("segment " + std::to_string(seg.id) + " has no buses");
    if (seg.internal_lines.size() + 1 != seg.buses.size())
      throw FeederError("segment " + std::to_string(seg.id) +
                        " internal lines do not form a spanning tree (" +
                        std::to_string(seg.internal_lines.size()) + " lines, " +
                        std::to_string(seg.buses.size()) + " buses)");
    // connectivity inside the segment
    std::map<int, std::vector<int>> adj;
    for (int b : seg.buses) adj[b];
    for (int li : seg.internal_lines) {
      const auto& br = m.branches[static_cast<size_t>(li)];
      adj[br.from].push_back(br.to);
      adj[br.to].push_back(br.from);
    }
    std::set<int> seen;
    std::vector<int> stack = {seg.buses.front()};
    seen.insert(seg.buses.front());
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (seen.insert(v).second) stack.push_back(v);
    }
    if (seen.size() != seg.buses.size())
      throw FeederError("segment " + std::to_string(seg.id) + " is internally disconnected");
  }
}

}  // namespace detail

// Enumerates sync pairs (all 2-subsets of candidate segments) and the
// overlapping-pair tuples used by the one-merge-per-step rule. Pairs use
// internal segment indices; each triple records the leftover pair.
inline void derive_sync_sets(FeederModel& m) {
  m.sync_pairs.clear();
  m.sync_triples.clear();
  const auto cand = m.candidate_segments();
  for (size_t i = 0; i < cand.size(); ++i)
    for (size_t j = i + 1; j < cand.size(); ++j)
      m.sync_pairs.emplace_back(cand[i], cand[j]);
  for (size_t i = 0; i < m.sync_pairs.size(); ++i)
    for (size_t j = i + 1; j < m.sync_pairs.size(); ++j) {
      const auto& p = m.sync_pairs[i];
      const auto& q = m.sync_pairs[j];
      std::set<int> inter;
      std::set<int> uni = {p.first, p.second, q.first, q.second};
      if (p.first == q.first || p.first == q.second) inter.insert(p.first);
      if (p.second == q.first || p.second == q.second) inter.insert(p.second);
      if (inter.size() != 1) continue;
      std::vector<int> left;
      for (int s : uni)
        if (!inter.count(s)) left.push_back(s);
      SyncTriple t;
      t.pair_a = p;
      t.pair_b = q;
      t.leftover = {std::min(left[0], left[1]), std::max(left[0], left[1])};
      m.sync_triples.push_back(t);
    }
}

inline FeederModel load_feeder(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FeederError("cannot open feeder file: " + path);

  FeederModel m;
  struct SegDecl {
    int id;
    std::vector<std::string> bus_ids;
    std::vector<std::string> cand_ids;
    int line_no;
  };
  std::vector<SegDecl> seg_decls;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::LineCtx ctx(path, line_no);
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    const std::string& kind = toks[0];

    if (kind == "feeder") {
      if (toks.size() > 1) m.name = toks[1];
    } else if (kind == "bus") {
      if (toks.size() < 2) ctx.fail("bus needs an id");
      auto attrs = detail::AttrMap::parse(toks, 2);
      Bus b;
      b.id = toks[1];
      b.phases = parse_phases(attrs.require("phases", ctx));
      if (auto v = attrs.get("vbase")) b.vbase_v = ctx.num(*v, "vbase");
      b.is_tg_interface = attrs.flags.count("tg") > 0;
      if (b.is_tg_interface && b.phases != kPhaseAll)
        ctx.fail("TG interface bus " + b.id + " must carry all three phases");
      if (!(b.vbase_v > 0.0)) ctx.fail("vbase must be positive");
      if (!m.bus_index.emplace(b.id, static_cast<int>(m.buses.size())).second)
        ctx.fail("duplicate bus id " + b.id);
      if (b.is_tg_interface) m.tg_buses.push_back(static_cast<int>(m.buses.size()));
      m.buses.push_back(std::move(b));
    } else if (kind == "line" || kind == "switch") {
      if (toks.size() < 2) ctx.fail(kind + " needs an id");
      auto attrs = detail::AttrMap::parse(toks, 2);
      Branch br;
      br.id = toks[1];
      br.kind = kind == "line" ? BranchKind::Line : BranchKind::Switch;
      const std::string from_id = attrs.require("from", ctx);
      const std::string to_id = attrs.require("to", ctx);
      auto fit = m.bus_index.find(from_id);
      if (fit == m.bus_index.end()) ctx.fail("unknown bus in from=: " + from_id);
      auto tit = m.bus_index.find(to_id);
      if (tit == m.bus_index.end()) ctx.fail("unknown bus in to=: " + to_id);
      br.from = fit->second;
      br.to = tit->second;
      br.phases = parse_phases(attrs.require("phases", ctx));
      const PhaseMask allowed = m.buses[static_cast<size_t>(br.from)].phases &
                                m.buses[static_cast<size_t>(br.to)].phases;
      if ((br.phases & ~allowed) != 0)
        ctx.fail("branch " + br.id + " phases exceed endpoint phases");
      if (auto v = attrs.get("limit")) br.limit_mva = ctx.num(*v, "limit");
      if (!(br.limit_mva > 0.0)) ctx.fail("limit must be positive");
      const int n = phase_count(br.phases);
      if (br.kind == BranchKind::Line) {
        auto rs = detail::split_commas(attrs.require("r", ctx));
        auto xs = detail::split_commas(attrs.require("x", ctx));
        if (static_cast<int>(rs.size()) != n * n || static_cast<int>(xs.size()) != n * n)
          ctx.fail("impedance matrices must have " + std::to_string(n * n) + " entries");
        for (const auto& s : rs) br.r_ohm.push_back(ctx.num(s, "r"));
        for (const auto& s : xs) br.x_ohm.push_back(ctx.num(s, "x"));
      } else if (auto v = attrs.get("ssw")) {
        br.ssw_eligible = ctx.num(*v, "ssw") != 0.0;
      }
      if (!m.branch_index.emplace(br.id, static_cast<int>(m.branches.size())).second)
        ctx.fail("duplicate branch id " + br.id);
      m.branches.push_back(std::move(br));
    } else if (kind == "segment") {
      if (toks.size() < 2) ctx.fail("segment needs an integer id");
      auto attrs = detail::AttrMap::parse(toks, 2);
      SegDecl d;
      d.id = static_cast<int>(ctx.num(toks[1], "segment id"));
      d.bus_ids = detail::split_commas(attrs.require("buses", ctx));
      if (auto v = attrs.get("candidate")) d.cand_ids = detail::split_commas(*v);
      d.line_no = line_no;
      seg_decls.push_back(std::move(d));
    } else if (kind == "load") {
      auto attrs = detail::AttrMap::parse(toks, 1);
      LoadSpec l;
      const std::string bus_id = attrs.require("bus", ctx);
      auto bit = m.bus_index.find(bus_id);
      if (bit == m.bus_index.end()) ctx.fail("unknown bus in load: " + bus_id);
      l.bus = bit->second;
      if (m.buses[static_cast<size_t>(l.bus)].is_tg_interface)
        ctx.fail("loads cannot sit on the TG interface bus " + bus_id);
      const std::string k = attrs.require("kind", ctx);
      if (k == "critical" || k == "cl")
        l.kind = LoadKind::Critical;
      else if (k == "noncritical" || k == "nl")
        l.kind = LoadKind::NonCritical;
      else
        ctx.fail("load kind must be critical|noncritical");
      l.p_mw = ctx.num(attrs.require("p", ctx), "p");
      if (l.p_mw < 0.0) ctx.fail("load p must be >= 0");
      if (auto v = attrs.get("pf_angle")) l.pf_angle_rad = ctx.num(*v, "pf_angle");
      if (!(l.pf_angle_rad > 0.0) || !(l.pf_angle_rad < M_PI / 2.0))
        ctx.fail("pf_angle must be in (0, pi/2)");
      l.phases = m.buses[static_cast<size_t>(l.bus)].phases;
      if (auto v = attrs.get("phases")) l.phases = parse_phases(*v);
      if ((l.phases & ~m.buses[static_cast<size_t>(l.bus)].phases) != 0)
        ctx.fail("load phases exceed bus phases");
      auto& bus = m.buses[static_cast<size_t>(l.bus)];
      bool& flag = l.kind == LoadKind::Critical ? bus.has_critical_load
                                                : bus.has_noncritical_load;
      if (flag) ctx.fail("duplicate " + k + " load on bus " + bus_id);
      flag = true;
      m.loads.push_back(std::move(l));
    } else if (kind == "pv") {
      auto attrs = detail::AttrMap::parse(toks, 1);
      const std::string bus_id = attrs.require("bus", ctx);
      auto bit = m.bus_index.find(bus_id);
      if (bit == m.bus_index.end()) ctx.fail("unknown bus in pv: " + bus_id);
      if (m.buses[static_cast<size_t>(bit->second)].is_tg_interface)
        ctx.fail("PV cannot sit on the TG interface bus " + bus_id);
      double rating = ctx.num(attrs.require("rating", ctx), "rating");
      if (rating < 0.0) ctx.fail("pv rating must be >= 0");
      m.buses[static_cast<size_t>(bit->second)].pv_rating_mw += rating;
    } else {
      ctx.fail("unknown record kind: " + kind);
    }
  }

  // Resolve segments, assign bus membership, derive internal/boundary sets.
  std::sort(seg_decls.begin(), seg_decls.end(),
            [](const SegDecl& a, const SegDecl& b) { return a.id < b.id; });
  for (const auto& d : seg_decls) {
    detail::LineCtx ctx(path, d.line_no);
    Segment seg;
    seg.id = d.id;
    for (const auto& bid : d.bus_ids) {
      auto it = m.bus_index.find(bid);
      if (it == m.bus_index.end()) ctx.fail("segment references unknown bus " + bid);
      Bus& b = m.buses[static_cast<size_t>(it->second)];
      if (b.is_tg_interface)
        ctx.fail("TG interface bus " + bid + " cannot belong to a segment");
      if (b.segment != -1)
        ctx.fail("partition violation: bus " + bid + " appears in segments " +
                 std::to_string(m.segments[static_cast<size_t>(b.segment)].id) +
                 " and " + std::to_string(d.id));
      b.segment = static_cast<int>(m.segments.size());
      seg.buses.push_back(it->second);
    }
    seg.is_candidate_mg = !d.cand_ids.empty();
    for (const auto& cid : d.cand_ids) {
      auto it = m.bus_index.find(cid);
      if (it == m.bus_index.end()) ctx.fail("candidate references unknown bus " + cid);
      const Bus& b = m.buses[static_cast<size_t>(it->second)];
      if (b.segment != static_cast<int>(m.segments.size()))
        ctx.fail("candidate bus " + cid + " is not in segment " + std::to_string(d.id));
      if (b.phases != kPhaseAll)
        ctx.fail("candidate bus " + cid + " must carry all three phases");
      seg.candidate_buses.push_back(it->second);
    }
    m.segments.push_back(std::move(seg));
  }

  for (size_t i = 0; i < m.buses.size(); ++i) {
    const Bus& b = m.buses[i];
    if (!b.is_tg_interface && b.segment == -1)
      throw FeederError("partition violation: bus " + b.id + " is in no segment");
  }

  for (size_t bi = 0; bi < m.branches.size(); ++bi) {
    const Branch& br = m.branches[bi];
    const int sf = m.buses[static_cast<size_t>(br.from)].segment;
    const int st = m.buses[static_cast<size_t>(br.to)].segment;
    if (br.kind == BranchKind::Line) {
      if (sf != st || sf == -1)
        throw FeederError("line " + br.id +
                          " must join buses of one segment (use a switch for boundaries)");
      m.segments[static_cast<size_t>(sf)].internal_lines.push_back(static_cast<int>(bi));
    } else {
      if (sf == st)
        throw FeederError("switch " + br.id + " must be a boundary between segments");
      if (sf != -1)
        m.segments[static_cast<size_t>(sf)].boundary_switches.push_back(
            static_cast<int>(bi));
      if (st != -1)
        m.segments[static_cast<size_t>(st)].boundary_switches.push_back(
            static_cast<int>(bi));
    }
  }

  detail::check_connected(m);
  detail::check_segment_trees(m);
  derive_sync_sets(m);
  return m;
}

// Serializes back to the file schema; load_feeder(serialize(m)) reproduces
// the model (round-trip property checked in tests).
inline std::string serialize(const FeederModel& m) {
  std::ostringstream out;
  out.precision(17);
  out << "feeder " << m.name << "\n";
  for (const auto& b : m.buses) {
    out << "bus " << b.id << " phases=" << phases_to_string(b.phases)
        << " vbase=" << b.vbase_v;
    if (b.is_tg_interface) out << " tg";
    out << "\n";
  }
  for (const auto& br : m.branches) {
    out << (br.kind == BranchKind::Line ? "line " : "switch ") << br.id
        << " from=" << m.buses[static_cast<size_t>(br.from)].id
        << " to=" << m.buses[static_cast<size_t>(br.to)].id
        << " phases=" << phases_to_string(br.phases) << " limit=" << br.limit_mva;
    if (br.kind == BranchKind::Line) {
      out << " r=";
      for (size_t i = 0; i < br.r_ohm.size(); ++i) out << (i ? "," : "") << br.r_ohm[i];
      out << " x=";
      for (size_t i = 0; i < br.x_ohm.size(); ++i) out << (i ? "," : "") << br.x_ohm[i];
    } else if (!br.ssw_eligible) {
      out << " ssw=0";
    }
    out << "\n";
  }
  for (const auto& seg : m.segments) {
    out << "segment " << seg.id << " buses=";
    for (size_t i = 0; i < seg.buses.size(); ++i)
      out << (i ? "," : "") << m.buses[static_cast<size_t>(seg.buses[i])].id;
    if (!seg.candidate_buses.empty()) {
      out << " candidate=";
      for (size_t i = 0; i < seg.candidate_buses.size(); ++i)
        out << (i ? "," : "") << m.buses[static_cast<size_t>(seg.candidate_buses[i])].id;
    }
    out << "\n";
  }
  for (const auto& l : m.loads) {
    out << "load bus=" << m.buses[static_cast<size_t>(l.bus)].id
        << " kind=" << (l.kind == LoadKind::Critical ? "critical" : "noncritical")
        << " p=" << l.p_mw << " pf_angle=" << l.pf_angle_rad
        << " phases=" << phases_to_string(l.phases) << "\n";
  }
  for (const auto& b : m.buses)
    if (b.pv_rating_mw > 0.0)
      out << "pv bus=" << b.id << " rating=" << b.pv_rating_mw << "\n";
  return out.str();
}

}  // namespace bsalloc

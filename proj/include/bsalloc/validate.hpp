// Independent audit of a solved restoration plan. Everything is recomputed
// from first principles: union-find for the forest/root-count check, direct
// arithmetic for balances, staircases and the energy account, the closed
// forms plus the ODE integrator for frequency. None of the optimizer's
// expression builders are reused here.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bsalloc/clpu.hpp"
#include "bsalloc/config.hpp"
#include "bsalloc/feeder.hpp"
#include "bsalloc/plan.hpp"
#include "bsalloc/scenarios.hpp"
#include "bsalloc/vsg.hpp"

namespace bsalloc {

struct AuditFinding {
  std::string rule;
  std::string index;
  double magnitude = 0.0;
};

struct AuditReport {
  std::vector<AuditFinding> violations;
  std::vector<AuditFinding> warnings;

  bool pass() const { return violations.empty(); }
  void flag(const std::string& rule, const std::string& index, double magnitude) {
    violations.push_back(AuditFinding{rule, index, magnitude});
  }
  void warn(const std::string& rule, const std::string& index, double magnitude) {
    warnings.push_back(AuditFinding{rule, index, magnitude});
  }
  std::map<std::string, size_t> summary() const {
    std::map<std::string, size_t> s;
    for (const auto& v : violations) s[v.rule]++;
    return s;
  }
  std::string human_summary() const {
    std::ostringstream out;
    out << (pass() ? "AUDIT PASS" : "AUDIT FAIL") << ": " << violations.size()
        << " violation(s), " << warnings.size() << " warning(s)\n";
    for (const auto& [rule, count] : summary()) out << "  " << rule << ": " << count << "\n";
    size_t shown = 0;
    for (const auto& v : violations) {
      if (++shown > 12) {
        out << "  ...\n";
        break;
      }
      out << "  " << v.rule << " @ " << v.index << " magnitude " << v.magnitude << "\n";
    }
    return out.str();
  }
};

inline void write_audit_report(const AuditReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write audit report: " + path);
  out.precision(12);
  out << "audit v1\n";
  out << "pass " << (r.pass() ? 1 : 0) << "\n";
  out << "violations " << r.violations.size() << "\n";
  out << "warnings " << r.warnings.size() << "\n";
  for (const auto& v : r.violations)
    out << "violation " << v.rule << " " << v.index << " " << v.magnitude << "\n";
  for (const auto& w : r.warnings)
    out << "warning " << w.rule << " " << w.index << " " << w.magnitude << "\n";
}

namespace audit_detail {

constexpr double kTolMw = 1e-6;    // power tolerance, MW
constexpr double kTolV2 = 1e-6;    // squared-voltage tolerance, pu^2
constexpr double kTolBin = 1e-6;   // binary integrality
constexpr double kTolHz = 1e-6;    // frequency band slack
constexpr double kRelFreqWarn = 0.02;  // linearization warning channel

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  }
  // false if already joined (a cycle)
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<size_t>(a)] = b;
    return true;
  }
};

inline bool as_bool(double v) { return v > 0.5; }

inline std::string idx(int o, int t, const std::string& what) {
  return "o" + std::to_string(o) + ".t" + std::to_string(t) + "." + what;
}

}  // namespace audit_detail

// Forest/root-count, switching legality and segment-coherence audit.
inline void audit_topology(const RestorationPlan& plan, const FeederModel& f,
                           AuditReport& rep) {
  using namespace audit_detail;
  const int O = static_cast<int>(plan.trajectories.size());

  // installed MGs per candidate segment from the siting block
  std::map<int, int> installed_by_seg;  // internal seg -> 0/1
  for (const auto& sd : plan.siting) {
    const int seg = f.buses[static_cast<size_t>(f.bus(sd.bus))].segment;
    installed_by_seg[seg] += sd.installed ? 1 : 0;
  }
  for (const auto& [seg, n] : installed_by_seg)
    if (n > 1)
      rep.flag("site.one.per.mg", "segment " + std::to_string(f.segments[static_cast<size_t>(seg)].id),
               n);
  const int n_installed = plan.installed_count();

  for (int o = 0; o < O; ++o) {
    const PlanTrajectory& tr = plan.trajectories[static_cast<size_t>(o)];
    const int T = static_cast<int>(tr.at("roots total").size());
    for (int t = 0; t < T; ++t) {
      // binaries are binary
      for (const auto& [key, vec] : tr.series) {
        if (key.rfind("seg ", 0) == 0 || key.rfind("bus ", 0) == 0 ||
            key.rfind("line ", 0) == 0 || key.rfind("esw ", 0) == 0 ||
            key.rfind("ssw ", 0) == 0 || key.rfind("tg ", 0) == 0 ||
            key.rfind("z ", 0) == 0) {
          const double v = vec[static_cast<size_t>(t)];
          if (std::abs(v - std::round(v)) > kTolBin)
            rep.flag("integrality", idx(o, t, key), std::abs(v - std::round(v)));
        }
      }

      // segment coherence: buses and internal lines mirror the segment
      for (const auto& seg : f.segments) {
        const double usg = tr.at("seg " + vn::seg(seg.id))[static_cast<size_t>(t)];
        if (t >= 1) {
          const double prev = tr.at("seg " + vn::seg(seg.id))[static_cast<size_t>(t - 1)];
          if (usg < prev - kTolBin)
            rep.flag("seg.latch", idx(o, t, vn::seg(seg.id)), prev - usg);
        }
        for (int bus : seg.buses) {
          const double ub =
              tr.at("bus " + f.buses[static_cast<size_t>(bus)].id)[static_cast<size_t>(t)];
          if (std::abs(ub - usg) > kTolBin)
            rep.flag("seg.bus.tie", idx(o, t, f.buses[static_cast<size_t>(bus)].id),
                     std::abs(ub - usg));
        }
        for (int li : seg.internal_lines) {
          const double ul =
              tr.at("line " + f.branches[static_cast<size_t>(li)].id)[static_cast<size_t>(t)];
          if (std::abs(ul - usg) > kTolBin)
            rep.flag("seg.line.tie", idx(o, t, f.branches[static_cast<size_t>(li)].id),
                     std::abs(ul - usg));
        }
      }

      // switch legality
      for (const auto& br : f.branches) {
        if (br.kind != BranchKind::Switch) continue;
        const double esw = tr.at("esw " + br.id)[static_cast<size_t>(t)];
        const double ssw = tr.at("ssw " + br.id)[static_cast<size_t>(t)];
        const double ul = tr.at("line " + br.id)[static_cast<size_t>(t)];
        const int placed =
            plan.ssw_placement.count(br.id) ? plan.ssw_placement.at(br.id) : 0;
        if (std::abs(ul - esw - ssw) > kTolBin)
          rep.flag("switch.line.def", idx(o, t, br.id), std::abs(ul - esw - ssw));
        if (as_bool(esw) && placed)
          rep.flag("esw.block.ssw", idx(o, t, br.id), esw);
        if (as_bool(ssw) && !placed)
          rep.flag("ssw.placed.gate", idx(o, t, br.id), ssw);
        const std::string& bi = f.buses[static_cast<size_t>(br.from)].id;
        const std::string& bj = f.buses[static_cast<size_t>(br.to)].id;
        const double ubi_prev = t >= 1 ? tr.at("bus " + bi)[static_cast<size_t>(t - 1)] : 0.0;
        const double ubj_prev = t >= 1 ? tr.at("bus " + bj)[static_cast<size_t>(t - 1)] : 0.0;
        if (as_bool(esw) && ubi_prev + ubj_prev < 0.5)
          rep.flag("esw.adjacency", idx(o, t, br.id), 1.0);
        const double esw_prev = t >= 1 ? tr.at("esw " + br.id)[static_cast<size_t>(t - 1)] : 0.0;
        if (esw - esw_prev > 0.5 && ubi_prev + ubj_prev > 1.5)
          rep.flag("esw.nojoin", idx(o, t, br.id), ubi_prev + ubj_prev);
        const double ssw_prev = t >= 1 ? tr.at("ssw " + br.id)[static_cast<size_t>(t - 1)] : 0.0;
        if (ssw < ssw_prev - kTolBin) rep.flag("ssw.latch", idx(o, t, br.id), ssw_prev - ssw);
        if (as_bool(ssw) && (ubi_prev < 0.5 || ubj_prev < 0.5))
          rep.flag("ssw.ends.live", idx(o, t, br.id), 2.0 - ubi_prev - ubj_prev);
      }

      // one closing ESW per formerly dead segment
      for (const auto& seg : f.segments) {
        const double prev_sg =
            t >= 1 ? tr.at("seg " + vn::seg(seg.id))[static_cast<size_t>(t - 1)] : 0.0;
        if (as_bool(prev_sg)) continue;
        int closings = 0;
        for (int sw : seg.boundary_switches) {
          const Branch& br = f.branches[static_cast<size_t>(sw)];
          const double now = tr.at("esw " + br.id)[static_cast<size_t>(t)];
          const double before =
              t >= 1 ? tr.at("esw " + br.id)[static_cast<size_t>(t - 1)] : 0.0;
          if (now - before > 0.5) ++closings;
        }
        if (closings > 1) rep.flag("seg.one.esw", idx(o, t, vn::seg(seg.id)), closings);
      }

      // forest and root-count check by union-find
      UnionFind uf(f.buses.size());
      int live_buses = 0, live_edges = 0;
      for (const auto& bus : f.buses)
        if (as_bool(tr.at("bus " + bus.id)[static_cast<size_t>(t)])) ++live_buses;
      bool cycle = false;
      for (size_t biq = 0; biq < f.branches.size(); ++biq) {
        const Branch& br = f.branches[biq];
        if (!as_bool(tr.at("line " + br.id)[static_cast<size_t>(t)])) continue;
        const bool from_live = as_bool(
            tr.at("bus " + f.buses[static_cast<size_t>(br.from)].id)[static_cast<size_t>(t)]);
        const bool to_live = as_bool(
            tr.at("bus " + f.buses[static_cast<size_t>(br.to)].id)[static_cast<size_t>(t)]);
        if (!from_live || !to_live) {
          rep.flag("topology.edge.dead.end", idx(o, t, br.id), 1.0);
          continue;
        }
        ++live_edges;
        if (!uf.unite(br.from, br.to)) {
          cycle = true;
          rep.flag("topology.cycle", idx(o, t, br.id), 1.0);
        }
      }
      std::set<int> comps;
      for (size_t biq = 0; biq < f.buses.size(); ++biq)
        if (as_bool(tr.at("bus " + f.buses[biq].id)[static_cast<size_t>(t)]))
          comps.insert(uf.find(static_cast<int>(biq)));
      int live_tg = 0, closed_ssw = 0;
      for (int busi : f.tg_buses)
        if (as_bool(tr.at("tg " + f.buses[static_cast<size_t>(busi)].id)[static_cast<size_t>(t)]))
          ++live_tg;
      for (const auto& br : f.branches)
        if (br.kind == BranchKind::Switch &&
            as_bool(tr.at("ssw " + br.id)[static_cast<size_t>(t)]))
          ++closed_ssw;
      const int expected_roots = n_installed + live_tg - closed_ssw;
      if (!cycle && static_cast<int>(comps.size()) != expected_roots)
        rep.flag("radial.roots", idx(o, t, "components"),
                 static_cast<double>(static_cast<int>(comps.size()) - expected_roots));
      if (live_edges != live_buses - expected_roots)
        rep.flag("radial.count", idx(o, t, "edges"),
                 static_cast<double>(live_edges - (live_buses - expected_roots)));
      const double roots_var = tr.at("roots total")[static_cast<size_t>(t)];
      if (std::abs(roots_var - expected_roots) > kTolBin)
        rep.flag("radial.roots.var", idx(o, t, "roots"),
                 std::abs(roots_var - expected_roots));
    }
  }
}

// Frequency audit: exact index recomputation against the safe ranges, ODE
// cross-check at the largest disturbances, window and zero-flow conditions at
// every smart-switch closing, and the linearization warning channel.
inline void audit_frequency(const RestorationPlan& plan, const FeederModel& f,
                            const RunConfig& cfg, AuditReport& rep) {
  using namespace audit_detail;
  const VsgParams& p = cfg.vsg;
  const ResponseShape shape = response_shape(p);
  const double f0 = p.base_freq_hz;
  const double c_qss = f0 / p.stiffness();
  const double c_roc = f0 / (2.0 * p.inertia_s);
  const auto& safe = cfg.safe;

  std::map<int, double> s_by_seg;  // internal segment -> installed MW
  for (const auto& sd : plan.siting)
    if (sd.installed)
      s_by_seg[f.buses[static_cast<size_t>(f.bus(sd.bus))].segment] += sd.s_nom_mw;

  for (size_t oi = 0; oi < plan.trajectories.size(); ++oi) {
    const PlanTrajectory& tr = plan.trajectories[oi];
    const int o = static_cast<int>(oi);
    const int T = static_cast<int>(tr.at("roots total").size());

    struct Disturb {
      double mag, dpu, f_prev;
      int t, seg_ext;
    };
    std::vector<Disturb> disturbances;

    for (size_t segi = 0; segi < f.segments.size(); ++segi) {
      const Segment& seg = f.segments[segi];
      if (!seg.is_candidate_mg) continue;
      auto it = s_by_seg.find(static_cast<int>(segi));
      const double snom = it == s_by_seg.end() ? 0.0 : it->second;
      const auto& fmg = tr.at("fmg " + vn::seg(seg.id));
      if (snom <= 0.0) {
        for (int t = 0; t < T; ++t)
          if (std::abs(fmg[static_cast<size_t>(t)]) > kTolHz)
            rep.flag("freq.dead.mg", idx(o, t, vn::seg(seg.id)),
                     fmg[static_cast<size_t>(t)]);
        continue;
      }
      const auto& dp = tr.at("dp " + vn::seg(seg.id));
      const auto& adj = tr.at("adj " + vn::seg(seg.id));
      for (int t = 0; t < T; ++t) {
        const double ft = fmg[static_cast<size_t>(t)];
        if (ft < safe.freq_lo_hz - kTolHz || ft > safe.freq_hi_hz + kTolHz)
          rep.flag("freq.band", idx(o, t, vn::seg(seg.id)), ft);
        if (t == 0) {
          if (std::abs(ft - f0) > kTolHz)
            rep.flag("freq.init", idx(o, t, vn::seg(seg.id)), ft - f0);
          continue;
        }
        const double f_prev = fmg[static_cast<size_t>(t - 1)];
        const double dpt = dp[static_cast<size_t>(t)];
        const double qss_exact = f_prev - dpt / snom * c_qss;
        const double nad_exact = f_prev - dpt / snom * c_qss * (1.0 + shape.nadir_ratio);
        const double roc_exact = -dpt / snom * c_roc;
        if (qss_exact < safe.qss_lo_hz - kTolHz || qss_exact > safe.qss_hi_hz + kTolHz)
          rep.flag("freq.qss.range", idx(o, t, vn::seg(seg.id)), qss_exact);
        if (nad_exact < safe.nadir_lo_hz - kTolHz || nad_exact > safe.nadir_hi_hz + kTolHz)
          rep.flag("freq.nadir.range", idx(o, t, vn::seg(seg.id)), nad_exact);
        if (roc_exact < safe.rocof_lo_hz_s - kTolHz ||
            roc_exact > safe.rocof_hi_hz_s + kTolHz)
          rep.flag("freq.rocof.range", idx(o, t, vn::seg(seg.id)), roc_exact);
        // linearized-vs-exact recursion gap: warning channel
        const double recon = qss_exact + adj[static_cast<size_t>(t)];
        if (std::abs(ft - recon) > kRelFreqWarn * f0)
          rep.warn("freq.recursion.gap", idx(o, t, vn::seg(seg.id)), ft - recon);
        disturbances.push_back(
            Disturb{std::abs(dpt), dpt / snom, f_prev, t, seg.id});
      }
    }

    // ODE oracle at the three largest disturbances of the scenario
    std::sort(disturbances.begin(), disturbances.end(),
              [](const Disturb& a, const Disturb& b) { return a.mag > b.mag; });
    for (size_t di = 0; di < disturbances.size() && di < 3; ++di) {
      const auto& d = disturbances[di];
      if (d.mag < kTolMw) continue;
      const double dt = 0.04 / shape.natural_freq_rad;
      auto traj = step_response_oracle(p, d.dpu, 12.0, dt);
      auto sum = summarize_oracle(traj, dt);
      const double closed_nadir_dev = -d.dpu * (1.0 + shape.nadir_ratio) / p.stiffness();
      if (std::abs(sum.extremum - closed_nadir_dev) > 1e-3)
        rep.flag("freq.oracle.nadir.gap",
                 idx(o, d.t, vn::seg(d.seg_ext)), sum.extremum - closed_nadir_dev);
      const double oracle_nadir_hz = d.f_prev + sum.extremum * f0;
      const double oracle_qss_hz = d.f_prev + sum.asymptote * f0;
      const double oracle_rocof = sum.max_abs_slope * f0;
      if (oracle_nadir_hz < safe.nadir_lo_hz - 1e-3 ||
          oracle_nadir_hz > safe.nadir_hi_hz + 1e-3)
        rep.flag("freq.oracle.nadir.range", idx(o, d.t, vn::seg(d.seg_ext)),
                 oracle_nadir_hz);
      if (oracle_qss_hz < safe.qss_lo_hz - 1e-3 || oracle_qss_hz > safe.qss_hi_hz + 1e-3)
        rep.flag("freq.oracle.qss.range", idx(o, d.t, vn::seg(d.seg_ext)), oracle_qss_hz);
      if (oracle_rocof > std::max(std::abs(safe.rocof_lo_hz_s), safe.rocof_hi_hz_s) *
                             1.05 + 1e-6)
        rep.flag("freq.oracle.rocof.range", idx(o, d.t, vn::seg(d.seg_ext)),
                 oracle_rocof);
    }

    // smart-switch closings: frequency window and zero flow
    for (const auto& br : f.branches) {
      if (br.kind != BranchKind::Switch) continue;
      const auto& ssw = tr.at("ssw " + br.id);
      for (int t = 0; t < T; ++t) {
        const double before = t >= 1 ? ssw[static_cast<size_t>(t - 1)] : 0.0;
        if (ssw[static_cast<size_t>(t)] - before < 0.5) continue;
        const std::string& bi = f.buses[static_cast<size_t>(br.from)].id;
        const std::string& bj = f.buses[static_cast<size_t>(br.to)].id;
        const double df = tr.at("fbus " + bi)[static_cast<size_t>(t)] -
                          tr.at("fbus " + bj)[static_cast<size_t>(t)];
        if (std::abs(df) > cfg.eps_hz + kTolHz)
          rep.flag("ssw.freq.window", idx(o, t, br.id), df);
        for (int ph : phase_list(br.phases)) {
          const double fp =
              tr.at("flp " + br.id + "." + vn::ph(ph))[static_cast<size_t>(t)];
          const double fq =
              tr.at("flq " + br.id + "." + vn::ph(ph))[static_cast<size_t>(t)];
          if (std::abs(fp) > kTolMw || std::abs(fq) > kTolMw)
            rep.flag("ssw.zeroflow", idx(o, t, br.id + "." + vn::ph(ph)),
                     std::max(std::abs(fp), std::abs(fq)));
        }
      }
    }
  }
}

// Power audit: nodal balances, voltage drops on closed branches, boxes, flow
// gating, CLPU staircase consistency, PV identities, the BESS energy account
// and apparent-power limits against the exact disk.
inline void audit_power(const RestorationPlan& plan, const FeederModel& f,
                        const ScenarioSet& scen, const RunConfig& cfg,
                        AuditReport& rep) {
  using namespace audit_detail;
  const double vlo2 = cfg.safe.v_lo_pu * cfg.safe.v_lo_pu;
  const double vhi2 = cfg.safe.v_hi_pu * cfg.safe.v_hi_pu;
  const double dt_h = scen.dt_hours();
  std::vector<DropCoeffs> drops(f.branches.size());
  for (size_t i = 0; i < f.branches.size(); ++i) drops[i] = vdrop_coeffs(f.branches[i]);

  std::map<std::string, const SitingDecision*> siting_by_bus;
  for (const auto& sd : plan.siting) siting_by_bus[sd.bus] = &sd;

  for (size_t oi = 0; oi < plan.trajectories.size(); ++oi) {
    const PlanTrajectory& tr = plan.trajectories[oi];
    const int o = static_cast<int>(oi);
    const Scenario& sc = scen.scenarios[oi];
    const int T = static_cast<int>(tr.at("roots total").size());

    auto series = [&](const std::string& key) -> const std::vector<double>& {
      return tr.at(key);
    };
    auto maybe = [&](const std::string& key, int t) -> double {
      return tr.has(key) ? tr.at(key)[static_cast<size_t>(t)] : 0.0;
    };

    for (int t = 0; t < T; ++t) {
      // nodal balance per live and dead bus alike
      for (size_t biq = 0; biq < f.buses.size(); ++biq) {
        const Bus& bus = f.buses[biq];
        for (int ph : phase_list(bus.phases)) {
          const std::string sfx = bus.id + "." + vn::ph(ph);
          double acc_p = 0.0, acc_q = 0.0;
          for (const auto& br : f.branches) {
            if (!(br.phases & (1 << ph))) continue;
            const double fp = maybe("flp " + br.id + "." + vn::ph(ph), t);
            const double fq = maybe("flq " + br.id + "." + vn::ph(ph), t);
            if (br.to == static_cast<int>(biq)) {
              acc_p += fp;
              acc_q += fq;
            } else if (br.from == static_cast<int>(biq)) {
              acc_p -= fp;
              acc_q -= fq;
            }
          }
          acc_p += maybe("ptg " + sfx, t) + maybe("pbess " + sfx, t) +
                   maybe("ppv " + sfx, t) - maybe("pcl " + sfx, t) -
                   maybe("pnl " + sfx, t);
          acc_q += maybe("qtg " + sfx, t) + maybe("qbess " + sfx, t) +
                   maybe("qpv " + sfx, t) - maybe("qcl " + sfx, t) -
                   maybe("qnl " + sfx, t);
          if (std::abs(acc_p) > kTolMw) rep.flag("balance.p", idx(o, t, sfx), acc_p);
          if (std::abs(acc_q) > kTolMw) rep.flag("balance.q", idx(o, t, sfx), acc_q);
        }
      }

      // voltage drop and flow gating per branch
      for (size_t brq = 0; brq < f.branches.size(); ++brq) {
        const Branch& br = f.branches[brq];
        const bool closed = as_bool(series("line " + br.id)[static_cast<size_t>(t)]);
        const auto phs = phase_list(br.phases);
        const int n = static_cast<int>(phs.size());
        const Bus& fb = f.buses[static_cast<size_t>(br.from)];
        const Bus& tb = f.buses[static_cast<size_t>(br.to)];
        const double scale = 1.0e6 / (fb.vbase_v * fb.vbase_v);
        for (int a = 0; a < n; ++a) {
          const int ph = phs[static_cast<size_t>(a)];
          const double fp = series("flp " + br.id + "." + vn::ph(ph))[static_cast<size_t>(t)];
          const double fq = series("flq " + br.id + "." + vn::ph(ph))[static_cast<size_t>(t)];
          if (!closed && (std::abs(fp) > kTolMw || std::abs(fq) > kTolMw))
            rep.flag("flow.gate", idx(o, t, br.id + "." + vn::ph(ph)),
                     std::max(std::abs(fp), std::abs(fq)));
          const double lim = br.limit_mva / phase_count(br.phases);
          if (std::abs(fp) > lim + kTolMw || std::abs(fq) > lim + kTolMw)
            rep.flag("flow.limit", idx(o, t, br.id + "." + vn::ph(ph)),
                     std::max(std::abs(fp), std::abs(fq)) - lim);
          if (closed) {
            double drop = 0.0;
            for (int c = 0; c < n; ++c) {
              const int pc = phs[static_cast<size_t>(c)];
              drop += 2.0 * scale *
                      (drops[brq].r[static_cast<size_t>(a * n + c)] *
                           series("flp " + br.id + "." + vn::ph(pc))[static_cast<size_t>(t)] +
                       drops[brq].x[static_cast<size_t>(a * n + c)] *
                           series("flq " + br.id + "." + vn::ph(pc))[static_cast<size_t>(t)]);
            }
            const double vi = series("v " + fb.id + "." + vn::ph(ph))[static_cast<size_t>(t)];
            const double vj = series("v " + tb.id + "." + vn::ph(ph))[static_cast<size_t>(t)];
            if (std::abs(vj - vi + drop) > kTolV2)
              rep.flag("vdrop", idx(o, t, br.id + "." + vn::ph(ph)), vj - vi + drop);
          }
        }
      }

      // voltage boxes
      for (const auto& bus : f.buses) {
        const bool live = as_bool(series("bus " + bus.id)[static_cast<size_t>(t)]);
        for (int ph : phase_list(bus.phases)) {
          const double v = series("v " + bus.id + "." + vn::ph(ph))[static_cast<size_t>(t)];
          if (live && (v < vlo2 - kTolV2 || v > vhi2 + kTolV2))
            rep.flag("volt.box", idx(o, t, bus.id + "." + vn::ph(ph)), v);
          if (!live && std::abs(v) > kTolV2)
            rep.flag("volt.dead", idx(o, t, bus.id + "." + vn::ph(ph)), v);
        }
      }

      // CLPU staircases
      for (const auto& l : f.loads) {
        const Bus& bus = f.buses[static_cast<size_t>(l.bus)];
        const bool crit = l.kind == LoadKind::Critical;
        const std::vector<double>& status =
            crit ? series("seg " + vn::seg(f.segments[static_cast<size_t>(bus.segment)].id))
                 : series("z " + bus.id);
        const double mult = clpu_multiplier(status, static_cast<size_t>(t), cfg.clpu);
        const double nom = l.p_mw / phase_count(l.phases) *
                           sc.load_shape[static_cast<size_t>(t)];
        const double tan_th = std::tan(l.pf_angle_rad);
        for (int ph : phase_list(l.phases)) {
          const std::string sfx = bus.id + "." + vn::ph(ph);
          const double pv = series((crit ? "pcl " : "pnl ") + sfx)[static_cast<size_t>(t)];
          const double qv = series((crit ? "qcl " : "qnl ") + sfx)[static_cast<size_t>(t)];
          if (std::abs(pv - nom * mult) > kTolMw)
            rep.flag(crit ? "load.cl.staircase" : "load.nl.staircase", idx(o, t, sfx),
                     pv - nom * mult);
          if (std::abs(qv - pv * tan_th) > kTolMw)
            rep.flag("load.pf.ratio", idx(o, t, sfx), qv - pv * tan_th);
        }
        if (!crit) {
          const double z = series("z " + bus.id)[static_cast<size_t>(t)];
          const double usg =
              series("seg " +
                     vn::seg(f.segments[static_cast<size_t>(bus.segment)].id))[static_cast<size_t>(t)];
          if (z > usg + kTolBin) rep.flag("load.nl.gate", idx(o, t, bus.id), z - usg);
          if (t >= 1 && z < series("z " + bus.id)[static_cast<size_t>(t - 1)] - kTolBin)
            rep.flag("load.nl.latch", idx(o, t, bus.id), 1.0);
        }
      }

      // PV identities
      for (const auto& bus : f.buses) {
        if (bus.pv_rating_mw <= 0.0) continue;
        const double ub = series("bus " + bus.id)[static_cast<size_t>(t)];
        const double per_ph = bus.pv_rating_mw * sc.pv_shape[static_cast<size_t>(t)] /
                              phase_count(bus.phases);
        for (int ph : phase_list(bus.phases)) {
          const std::string sfx = bus.id + "." + vn::ph(ph);
          const double pv = series("ppv " + sfx)[static_cast<size_t>(t)];
          const double qv = series("qpv " + sfx)[static_cast<size_t>(t)];
          if (std::abs(pv - per_ph * ub) > kTolMw)
            rep.flag("pv.dispatch", idx(o, t, sfx), pv - per_ph * ub);
          if (std::abs(qv - cfg.pv_q_ratio * pv) > kTolMw)
            rep.flag("pv.q.ratio", idx(o, t, sfx), qv - cfg.pv_q_ratio * pv);
        }
      }

      // BESS energy account and apparent-power disk
      for (const auto& [busid, sd] : siting_by_bus) {
        const double snom = sd->installed ? sd->s_nom_mw : 0.0;
        const double enom = sd->installed ? sd->e_nom_mwh : 0.0;
        double sum_p = 0.0;
        for (int ph = 0; ph < 3; ++ph) {
          const std::string sfx = busid + "." + vn::ph(ph);
          const double pb = series("pbess " + sfx)[static_cast<size_t>(t)];
          const double qb = series("qbess " + sfx)[static_cast<size_t>(t)];
          sum_p += pb;
          if (std::hypot(pb, qb) > snom / 3.0 + kTolMw)
            rep.flag("bess.cap.disk", idx(o, t, sfx), std::hypot(pb, qb) - snom / 3.0);
        }
        const double en = series("en " + busid)[static_cast<size_t>(t)];
        const double en_prev = t >= 1
                                   ? series("en " + busid)[static_cast<size_t>(t - 1)]
                                   : cfg.safe.soc_init * enom;
        if (std::abs(en - (en_prev - dt_h * sum_p)) > kTolMw)
          rep.flag("bess.energy.rec", idx(o, t, busid), en - (en_prev - dt_h * sum_p));
        if (en < cfg.safe.soc_lo * enom - kTolMw || en > cfg.safe.soc_hi * enom + kTolMw)
          rep.flag("bess.energy.box", idx(o, t, busid), en);
      }

      // TG interface identities
      for (int busi : f.tg_buses) {
        const Bus& bus = f.buses[static_cast<size_t>(busi)];
        const double utg = series("tg " + bus.id)[static_cast<size_t>(t)];
        if (utg > (sc.tg_available[static_cast<size_t>(t)] ? 1.0 : 0.0) + kTolBin)
          rep.flag("tg.avail", idx(o, t, bus.id), utg);
        if (t >= 1 && utg < series("tg " + bus.id)[static_cast<size_t>(t - 1)] - kTolBin)
          rep.flag("tg.latch", idx(o, t, bus.id), 1.0);
        const double ub = series("bus " + bus.id)[static_cast<size_t>(t)];
        if (std::abs(ub - utg) > kTolBin) rep.flag("tg.bus.tie", idx(o, t, bus.id), ub - utg);
        const double fb = series("fbus " + bus.id)[static_cast<size_t>(t)];
        if (std::abs(fb - cfg.vsg.base_freq_hz * utg) > kTolHz)
          rep.flag("tg.freq.pin", idx(o, t, bus.id), fb - cfg.vsg.base_freq_hz * utg);
        for (int ph = 0; ph < 3; ++ph) {
          const std::string sfx = bus.id + "." + vn::ph(ph);
          const double v = series("v " + sfx)[static_cast<size_t>(t)];
          if (std::abs(v - utg) > kTolV2) rep.flag("tg.volt.pin", idx(o, t, sfx), v - utg);
          const double pt = series("ptg " + sfx)[static_cast<size_t>(t)];
          const double qt = series("qtg " + sfx)[static_cast<size_t>(t)];
          if (std::hypot(pt, qt) > utg * cfg.tg_s_max_mva / 3.0 + kTolMw)
            rep.flag("tg.cap.disk", idx(o, t, sfx),
                     std::hypot(pt, qt) - utg * cfg.tg_s_max_mva / 3.0);
        }
      }
    }
  }
}

inline AuditReport audit_plan(const RestorationPlan& plan, const FeederModel& f,
                              const ScenarioSet& scen, const RunConfig& cfg) {
  AuditReport rep;
  if (plan.trajectories.size() != scen.scenarios.size()) {
    rep.flag("plan.scenario.count", "plan",
             static_cast<double>(plan.trajectories.size()) -
                 static_cast<double>(scen.scenarios.size()));
    return rep;
  }
  if (plan.installed_count() < 1) rep.flag("fleet.min.count", "siting", 0.0);
  // smart-switch count coupling
  int placed = 0;
  for (const auto& [br, v] : plan.ssw_placement) placed += v;
  if (placed != plan.installed_count() - 1)
    rep.flag("ssw.count", "siting",
             static_cast<double>(placed - (plan.installed_count() - 1)));
  audit_topology(plan, f, rep);
  audit_frequency(plan, f, cfg, rep);
  audit_power(plan, f, scen, cfg, rep);
  return rep;
}

}  // namespace bsalloc

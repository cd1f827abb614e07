// Assembly of the two-stage stochastic restoration MILP. First stage sites
// and sizes grid-forming BESS units and smart switches; the second stage is
// one switching/dispatch recourse block per scenario. Every constraint
// belongs to a named rule family; model_stats() exposes per-family counts as
// the regression surface and the coverage audit asserts the full family set
// is present on any nontrivial model.
#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "bsalloc/clpu.hpp"
#include "bsalloc/config.hpp"
#include "bsalloc/feeder.hpp"
#include "bsalloc/linexpr.hpp"
#include "bsalloc/scenarios.hpp"
#include "bsalloc/vsg.hpp"

namespace bsalloc {

// Variable-name construction shared by the model builder and the plan
// extractor. Names are stable across runs for identical inputs.
namespace vn {
inline std::string to(int t, int o) {
  return "t" + std::to_string(t) + ".o" + std::to_string(o);
}
inline std::string seg(int ext_id) { return "g" + std::to_string(ext_id); }
inline std::string pair(int ext_k, int ext_l) {
  return "g" + std::to_string(ext_k) + "g" + std::to_string(ext_l);
}
inline std::string ph(int p) { return std::string(1, phase_letter(p)); }

inline std::string y_bess(const std::string& bus) { return "y.bess." + bus; }
inline std::string s_nom(const std::string& bus) { return "s.nom." + bus; }
inline std::string e_nom(const std::string& bus) { return "e.nom." + bus; }
inline std::string y_mg(int seg_ext) { return "y.mg." + seg(seg_ext); }
inline std::string s_mg(int seg_ext) { return "s.mg." + seg(seg_ext); }
inline std::string e_mg(int seg_ext) { return "e.mg." + seg(seg_ext); }
inline std::string y_ssw(const std::string& br) { return "y.ssw." + br; }
inline std::string mu(int k, int l) { return "mu." + pair(k, l); }

inline std::string u_sg(int seg_ext, int t, int o) {
  return "u.sg." + seg(seg_ext) + "." + to(t, o);
}
inline std::string u_b(const std::string& bus, int t, int o) {
  return "u.b." + bus + "." + to(t, o);
}
inline std::string u_l(const std::string& br, int t, int o) {
  return "u.l." + br + "." + to(t, o);
}
inline std::string u_esw(const std::string& br, int t, int o) {
  return "u.esw." + br + "." + to(t, o);
}
inline std::string u_ssw(const std::string& br, int t, int o) {
  return "u.ssw." + br + "." + to(t, o);
}
inline std::string z_b(const std::string& bus, int t, int o) {
  return "z.b." + bus + "." + to(t, o);
}
inline std::string u_tg(const std::string& bus, int t, int o) {
  return "u.tg." + bus + "." + to(t, o);
}
inline std::string u_syn(int k, int l, int t, int o) {
  return "u.syn." + pair(k, l) + "." + to(t, o);
}
inline std::string u_syn_lo(int k, int l, int t, int o) {
  return "u.syn.lo." + pair(k, l) + "." + to(t, o);
}
inline std::string u_syn_hi(int k, int l, int t, int o) {
  return "u.syn.hi." + pair(k, l) + "." + to(t, o);
}
inline std::string d_syn(int seg_ext, int t, int o) {
  return "d.syn." + seg(seg_ext) + "." + to(t, o);
}
inline std::string v(const std::string& bus, int p, int t, int o) {
  return "v." + bus + "." + ph(p) + "." + to(t, o);
}
inline std::string flp(const std::string& br, int p, int t, int o) {
  return "flp." + br + "." + ph(p) + "." + to(t, o);
}
inline std::string flq(const std::string& br, int p, int t, int o) {
  return "flq." + br + "." + ph(p) + "." + to(t, o);
}
inline std::string p_cl(const std::string& bus, int p, int t, int o) {
  return "p.cl." + bus + "." + ph(p) + "." + to(t, o);
}
inline std::string q_cl(const std::string& bus, int p, int t, int o) {
  return "q.cl." + bus + "." + ph(p) + "." + to(t, o);
}
inline std::string p_nl(const std::string& bus, int p, int t, int o) {
  return "p.nl." + bus + "." + ph(p) + "." + to(t, o);
}
inline std::string q_nl(const std::string& bus, int p, int t, int o) {
  return "q.nl." + bus + "." + ph(p) + "." + to(t, o);
}
inline std::string p_pv(const std::string& bus, int p, int t, int o) {
  return "p.pv." + bus + "." + ph(p) + "." + to(t, o);
}
inline std::string q_pv(const std::string& bus, int p, int t, int o) {
  return "q.pv." + bus + "." + ph(p) + "." + to(t, o);
}
inline std::string p_bess(const std::string& bus, int p, int t, int o) {
  return "p.bess." + bus + "." + ph(p) + "." + to(t, o);
}
inline std::string q_bess(const std::string& bus, int p, int t, int o) {
  return "q.bess." + bus + "." + ph(p) + "." + to(t, o);
}
inline std::string p_tg(const std::string& bus, int p, int t, int o) {
  return "p.tg." + bus + "." + ph(p) + "." + to(t, o);
}
inline std::string q_tg(const std::string& bus, int p, int t, int o) {
  return "q.tg." + bus + "." + ph(p) + "." + to(t, o);
}
inline std::string dv_inc(const std::string& bus, int t, int o) {
  return "dv.inc." + bus + "." + to(t, o);
}
inline std::string en(const std::string& bus, int t, int o) {
  return "en." + bus + "." + to(t, o);
}
inline std::string f_mg(int seg_ext, int t, int o) {
  return "f.mg." + seg(seg_ext) + "." + to(t, o);
}
inline std::string f_qss(int seg_ext, int t, int o) {
  return "f.qss." + seg(seg_ext) + "." + to(t, o);
}
inline std::string f_nad(int seg_ext, int t, int o) {
  return "f.nad." + seg(seg_ext) + "." + to(t, o);
}
inline std::string f_roc(int seg_ext, int t, int o) {
  return "f.roc." + seg(seg_ext) + "." + to(t, o);
}
inline std::string w_pu(int seg_ext, int t, int o) {
  return "w.pu." + seg(seg_ext) + "." + to(t, o);
}
inline std::string dp_mg(int seg_ext, int t, int o) {
  return "dp.mg." + seg(seg_ext) + "." + to(t, o);
}
inline std::string p_mg(int seg_ext, int t, int o) {
  return "p.mg." + seg(seg_ext) + "." + to(t, o);
}
inline std::string adj(int seg_ext, int t, int o) {
  return "adj." + seg(seg_ext) + "." + to(t, o);
}
inline std::string f_bus(const std::string& bus, int t, int o) {
  return "f.bus." + bus + "." + to(t, o);
}
inline std::string r_roots(int t, int o) { return "r.roots." + to(t, o); }
// Exact scaled-frequency channel (Hz * MW): the per-unit division by the
// sized rating multiplied through, so recursion and bands stay linear and
// exact while the unscaled channel handles cross-MG coupling.
inline std::string fx_mg(int seg_ext, int t, int o) {
  return "fx.mg." + seg(seg_ext) + "." + to(t, o);
}
inline std::string fx_qss(int seg_ext, int t, int o) {
  return "fx.qss." + seg(seg_ext) + "." + to(t, o);
}
inline std::string fx_nad(int seg_ext, int t, int o) {
  return "fx.nad." + seg(seg_ext) + "." + to(t, o);
}
inline std::string aj_mg(int seg_ext, int t, int o) {
  return "aj.mg." + seg(seg_ext) + "." + to(t, o);
}
}  // namespace vn

// Rule families expected in any model with loads, PV, a TG interface and at
// least two candidate MGs; the coverage audit in the test suite walks this
// list against model_stats().
inline const std::vector<std::string>& expected_rule_families() {
  static const std::vector<std::string> fams = {
      "vref.pin.ub", "vref.pin.lb",                  // GFMI voltage reference
      "freq.init", "freq.update",                     // frequency recursion
      "freq.adj.gate.ub", "freq.adj.gate.lb",         // sync jump gating
      "freq.adj.evt.sw", "freq.adj.evt.pair",         // sync jump enabling events
      "freq.dp.def", "freq.qss.def", "freq.nadir.def", "freq.rocof.def",
      "freq.pu.mc1", "freq.pu.mc2", "freq.pu.mc3", "freq.pu.mc4",
      "freq.pu.gate.ub", "freq.pu.gate.lb",
      "freq.rocof.cap.ub", "freq.rocof.cap.lb",
      "freq.dp.cap.ub", "freq.dp.cap.lb",
      "load.cl.p", "load.cl.q",                       // critical-load staircase
      "load.nl.p", "load.nl.q", "load.nl.gate", "load.nl.latch",
      "sync.zeroflow.p.ub", "sync.zeroflow.p.lb",
      "sync.zeroflow.q.ub", "sync.zeroflow.q.lb",
      "size.power.lb", "size.power.ub", "size.energy.lb", "size.energy.ub",
      "site.one.per.mg", "site.power.agg", "site.energy.agg",
      "fleet.min.count", "budget.power", "budget.energy", "ssw.count",
      "esw.block.ssw", "esw.adjacency", "esw.nojoin",
      "esw.freq.copy.ub", "esw.freq.copy.lb",
      "ssw.placed.gate", "ssw.latch", "ssw.ends.live",
      "ssw.freq.match.ub", "ssw.freq.match.lb",
      "seg.latch", "seg.bus.tie", "seg.line.tie", "seg.switch.gate",
      "seg.one.esw", "seg.selfstart", "seg.cascade", "seg.cascade.esw",
      "radial.count", "radial.roots", "switch.line.def",
      "tg.cap.oct", "tg.volt.pin", "tg.freq.pin", "tg.avail", "tg.latch",
      "tg.bus.tie",
      "freq.mg.bus.ub", "freq.mg.bus.lb", "freq.seg.uniform",
      "sync.latch", "sync.pairgate.def", "sync.indicator.sum",
      "sync.window.lb", "sync.window.ub", "sync.one.merge",
      "freq.rocof.band.ub", "freq.rocof.band.lb",
      "freq.qss.band.ub", "freq.qss.band.lb",
      "freq.nadir.band.ub", "freq.nadir.band.lb",
      "freq.band.ub", "freq.band.lb",
      "freqx.init", "freqx.update", "freqx.qss.def", "freqx.nadir.def",
      "freqx.adj.gate.ub", "freqx.adj.gate.lb",
      "freqx.band.ub", "freqx.band.lb",
      "freqx.qss.band.ub", "freqx.qss.band.lb",
      "freqx.nadir.band.ub", "freqx.nadir.band.lb",
      "balance.p", "balance.q", "vdrop.ub", "vdrop.lb",
      "flow.gate.p.ub", "flow.gate.p.lb", "flow.gate.q.ub", "flow.gate.q.lb",
      "volt.box.ub", "volt.box.lb",
      "bess.cap.oct", "bess.energy.init", "bess.energy.rec",
      "bess.energy.box.lb", "bess.energy.box.ub", "bess.mg.agg",
      "pv.p.def", "pv.q.def",
  };
  return fams;
}

struct ModelBuild {
  MilpModel model;
  const FeederModel* feeder = nullptr;
  const ScenarioSet* scenarios = nullptr;
  RunConfig cfg;
  ResponseShape shape;

  int T = 0, O = 0;
  std::vector<int> switches;              // branch indices
  std::vector<int> line_branches;         // branch indices
  std::vector<int> cand_segs;             // internal segment indices
  std::vector<std::pair<int, int>> cand_buses;  // (bus idx, internal seg idx)
  std::vector<int> nl_buses;              // buses with non-critical loads
  std::vector<int> pv_buses;
  std::vector<int> fbus;                  // buses carrying a frequency variable

  // Per-unit disturbance box and frequency-jump bound derived from config.
  double w_box = 0.0;
  double adj_box = 0.0;

  VarId id(const std::string& name) const { return model.vars().lookup(name); }
  bool has(const std::string& name) const { return model.vars().contains(name); }
};

namespace build_detail {

constexpr double kMVolt = 1.21;   // covers any |v_i - v_j| in pu^2
constexpr double kMVref = 1.6;    // covers |v - dv_inc| in the reference pin
constexpr double kMFreq = 62.0;   // covers any bus frequency in Hz
constexpr double kMSync = 65.0;   // covers |f_l - f_k| + mu in the sync window
constexpr double kMCount = 20.0;  // covers per-segment switch counts

inline double per_phase_limit(const Branch& br) {
  return br.limit_mva / phase_count(br.phases);
}

// Nominal per-phase demand of one load at (t, o), in MW.
inline double nominal_per_phase(const LoadSpec& l, const Scenario& sc, int t) {
  return l.p_mw / phase_count(l.phases) * sc.load_shape[static_cast<size_t>(t)];
}

inline void declare_entities(ModelBuild& b) {
  const FeederModel& f = *b.feeder;
  for (size_t i = 0; i < f.branches.size(); ++i)
    (f.branches[i].kind == BranchKind::Switch ? b.switches : b.line_branches)
        .push_back(static_cast<int>(i));
  b.cand_segs = f.candidate_segments();
  for (int k : b.cand_segs)
    for (int bus : f.segments[static_cast<size_t>(k)].candidate_buses)
      b.cand_buses.emplace_back(bus, k);
  std::set<int> nl, fb;
  for (const auto& l : f.loads)
    if (l.kind == LoadKind::NonCritical) nl.insert(l.bus);
  for (int s : b.switches) {
    fb.insert(f.branches[static_cast<size_t>(s)].from);
    fb.insert(f.branches[static_cast<size_t>(s)].to);
  }
  for (int t : f.tg_buses) fb.insert(t);
  b.nl_buses.assign(nl.begin(), nl.end());
  b.fbus.assign(fb.begin(), fb.end());
  for (size_t i = 0; i < f.buses.size(); ++i)
    if (f.buses[i].pv_rating_mw > 0.0) b.pv_buses.push_back(static_cast<int>(i));

  b.w_box = std::min(std::max(std::abs(b.cfg.safe.rocof_lo_hz_s),
                              b.cfg.safe.rocof_hi_hz_s) *
                         2.0 * b.cfg.vsg.inertia_s,
                     (b.cfg.safe.qss_hi_hz - b.cfg.safe.qss_lo_hz) *
                         b.cfg.vsg.stiffness()) /
            b.cfg.vsg.base_freq_hz;
  b.adj_box = b.cfg.safe.freq_hi_hz - b.cfg.safe.freq_lo_hz;
}

inline void declare_variables(ModelBuild& b) {
  const FeederModel& f = *b.feeder;
  auto& cat = b.model.vars();
  const double inf = std::numeric_limits<double>::infinity();
  const auto& safe = b.cfg.safe;
  const double smax = b.cfg.budgets.s_max_mw, emax = b.cfg.budgets.e_max_mwh;

  // First stage.
  for (const auto& [bus, seg] : b.cand_buses) {
    const std::string& id = f.buses[static_cast<size_t>(bus)].id;
    cat.add("y.bess", id, VarKind::Binary, 0, 1);
    cat.add("s.nom", id, VarKind::Continuous, 0, smax);
    cat.add("e.nom", id, VarKind::Continuous, 0, emax);
  }
  for (int k : b.cand_segs) {
    const int ext = f.segments[static_cast<size_t>(k)].id;
    cat.add("y.mg", vn::seg(ext), VarKind::Binary, 0, 1);
    cat.add("s.mg", vn::seg(ext), VarKind::Continuous, 0, smax);
    cat.add("e.mg", vn::seg(ext), VarKind::Continuous, 0, emax);
  }
  for (int s : b.switches) {
    const Branch& br = f.branches[static_cast<size_t>(s)];
    if (br.ssw_eligible) cat.add("y.ssw", br.id, VarKind::Binary, 0, 1);
  }
  for (const auto& [k, l] : f.sync_pairs) {
    const int ek = f.segments[static_cast<size_t>(k)].id;
    const int el = f.segments[static_cast<size_t>(l)].id;
    cat.add("mu", vn::pair(ek, el), VarKind::Continuous, 0, 2);
  }

  // Second stage, per (t, o).
  for (int o = 0; o < b.O; ++o)
    for (int t = 0; t < b.T; ++t) {
      const std::string to = vn::to(t, o);
      for (const auto& seg : f.segments)
        cat.add("u.sg", vn::seg(seg.id) + "." + to, VarKind::Binary, 0, 1);
      for (const auto& bus : f.buses)
        cat.add("u.b", bus.id + "." + to, VarKind::Binary, 0, 1);
      for (const auto& br : f.branches)
        cat.add("u.l", br.id + "." + to, VarKind::Binary, 0, 1);
      for (int s : b.switches) {
        const Branch& br = f.branches[static_cast<size_t>(s)];
        cat.add("u.esw", br.id + "." + to, VarKind::Binary, 0, 1);
        cat.add("u.ssw", br.id + "." + to, VarKind::Binary, 0,
                br.ssw_eligible ? 1 : 0);
      }
      for (int bus : b.nl_buses)
        cat.add("z.b", f.buses[static_cast<size_t>(bus)].id + "." + to,
                VarKind::Binary, 0, 1);
      for (int bus : f.tg_buses)
        cat.add("u.tg", f.buses[static_cast<size_t>(bus)].id + "." + to,
                VarKind::Binary, 0, 1);
      for (const auto& [k, l] : f.sync_pairs) {
        const int ek = f.segments[static_cast<size_t>(k)].id;
        const int el = f.segments[static_cast<size_t>(l)].id;
        // synchronization cannot predate the horizon
        cat.add("u.syn", vn::pair(ek, el) + "." + to, VarKind::Binary, 0,
                t == 0 ? 0 : 1);
        if (t >= 1) {
          cat.add("u.syn.lo", vn::pair(ek, el) + "." + to, VarKind::Binary, 0, 1);
          cat.add("u.syn.hi", vn::pair(ek, el) + "." + to, VarKind::Binary, 0, 1);
        }
      }
      for (int k : b.cand_segs) {
        const int ext = f.segments[static_cast<size_t>(k)].id;
        cat.add("f.mg", vn::seg(ext) + "." + to, VarKind::Continuous, 0,
                safe.freq_hi_hz);
        cat.add("p.mg", vn::seg(ext) + "." + to, VarKind::Continuous, -smax, smax);
        cat.add("fx.mg", vn::seg(ext) + "." + to, VarKind::Continuous, 0,
                safe.freq_hi_hz * smax);
        if (t >= 1) {
          cat.add("fx.qss", vn::seg(ext) + "." + to, VarKind::Continuous, 0,
                  safe.qss_hi_hz * smax);
          cat.add("fx.nad", vn::seg(ext) + "." + to, VarKind::Continuous, 0,
                  safe.nadir_hi_hz * smax);
          cat.add("aj.mg", vn::seg(ext) + "." + to, VarKind::Continuous,
                  -(safe.freq_hi_hz - safe.freq_lo_hz) * smax,
                  (safe.freq_hi_hz - safe.freq_lo_hz) * smax);
          cat.add("d.syn", vn::seg(ext) + "." + to, VarKind::Binary, 0, 1);
          cat.add("f.qss", vn::seg(ext) + "." + to, VarKind::Continuous, 0,
                  safe.qss_hi_hz);
          cat.add("f.nad", vn::seg(ext) + "." + to, VarKind::Continuous, 0,
                  safe.nadir_hi_hz);
          cat.add("f.roc", vn::seg(ext) + "." + to, VarKind::Continuous,
                  safe.rocof_lo_hz_s, safe.rocof_hi_hz_s);
          cat.add("w.pu", vn::seg(ext) + "." + to, VarKind::Continuous, -b.w_box,
                  b.w_box);
          cat.add("dp.mg", vn::seg(ext) + "." + to, VarKind::Continuous, -smax, smax);
          cat.add("adj", vn::seg(ext) + "." + to, VarKind::Continuous, -b.adj_box,
                  b.adj_box);
        }
      }
      for (int bus : b.fbus)
        cat.add("f.bus", f.buses[static_cast<size_t>(bus)].id + "." + to,
                VarKind::Continuous, 0, kMFreq);
      cat.add("r.roots", to, VarKind::Continuous, 0, inf);

      const double vhi2 = safe.v_hi_pu * safe.v_hi_pu;
      for (const auto& bus : f.buses)
        for (int p : phase_list(bus.phases))
          cat.add("v", bus.id + "." + vn::ph(p) + "." + to, VarKind::Continuous, 0,
                  vhi2);
      for (const auto& br : f.branches) {
        const double lim = per_phase_limit(br);
        for (int p : phase_list(br.phases)) {
          cat.add("flp", br.id + "." + vn::ph(p) + "." + to, VarKind::Continuous,
                  -lim, lim);
          cat.add("flq", br.id + "." + vn::ph(p) + "." + to, VarKind::Continuous,
                  -lim, lim);
        }
      }
      for (const auto& l : f.loads) {
        const std::string& id = f.buses[static_cast<size_t>(l.bus)].id;
        const char* pp = l.kind == LoadKind::Critical ? "p.cl" : "p.nl";
        const char* qq = l.kind == LoadKind::Critical ? "q.cl" : "q.nl";
        for (int p : phase_list(l.phases)) {
          cat.add(pp, id + "." + vn::ph(p) + "." + to, VarKind::Continuous, 0, inf);
          cat.add(qq, id + "." + vn::ph(p) + "." + to, VarKind::Continuous, 0, inf);
        }
      }
      for (int bus : b.pv_buses) {
        const Bus& pb = f.buses[static_cast<size_t>(bus)];
        for (int p : phase_list(pb.phases)) {
          cat.add("p.pv", pb.id + "." + vn::ph(p) + "." + to, VarKind::Continuous, 0,
                  pb.pv_rating_mw);
          cat.add("q.pv", pb.id + "." + vn::ph(p) + "." + to, VarKind::Continuous, 0,
                  pb.pv_rating_mw);
        }
      }
      for (const auto& [bus, seg] : b.cand_buses) {
        const std::string& id = f.buses[static_cast<size_t>(bus)].id;
        for (int p = 0; p < 3; ++p) {
          cat.add("p.bess", id + "." + vn::ph(p) + "." + to, VarKind::Continuous,
                  -smax / 3.0, smax / 3.0);
          cat.add("q.bess", id + "." + vn::ph(p) + "." + to, VarKind::Continuous,
                  -smax / 3.0, smax / 3.0);
        }
        cat.add("dv.inc", id + "." + to, VarKind::Continuous, -0.2, 0.2);
        cat.add("en", id + "." + to, VarKind::Continuous, 0, emax);
      }
      for (int bus : f.tg_buses) {
        const std::string& id = f.buses[static_cast<size_t>(bus)].id;
        const double lim = b.cfg.tg_s_max_mva / 3.0;
        for (int p = 0; p < 3; ++p) {
          cat.add("p.tg", id + "." + vn::ph(p) + "." + to, VarKind::Continuous, -lim,
                  lim);
          cat.add("q.tg", id + "." + vn::ph(p) + "." + to, VarKind::Continuous, -lim,
                  lim);
        }
      }
    }
}

}  // namespace build_detail

// First-stage siting/sizing: per-bus bounds, one unit per MG, fleet floor,
// budget caps and the smart-switch count coupling. Budget infeasibility is
// reported eagerly, before any solver runs.
inline void build_first_stage(ModelBuild& b) {
  const FeederModel& f = *b.feeder;
  auto& m = b.model;
  const auto& bud = b.cfg.budgets;

  if (b.cand_segs.empty())
    throw ConfigError("fleet.min.count infeasible: feeder declares no candidate MGs");
  if (bud.s_budget_mw < bud.s_min_mw)
    throw ConfigError("budget.power infeasible: budget " +
                      std::to_string(bud.s_budget_mw) + " MW below single-unit floor " +
                      std::to_string(bud.s_min_mw) + " MW");
  if (bud.e_budget_mwh < bud.e_min_mwh)
    throw ConfigError("budget.energy infeasible: budget " +
                      std::to_string(bud.e_budget_mwh) +
                      " MWh below single-unit floor " + std::to_string(bud.e_min_mwh) +
                      " MWh");

  for (const auto& [bus, seg] : b.cand_buses) {
    const std::string& id = f.buses[static_cast<size_t>(bus)].id;
    const VarId y = b.id(vn::y_bess(id)), s = b.id(vn::s_nom(id)),
                e = b.id(vn::e_nom(id));
    LinExpr lo_s;
    lo_s.add(s, 1.0).add(y, -bud.s_min_mw);
    m.add_constraint("size.power.lb", id, lo_s, Sense::Ge, 0.0);
    LinExpr hi_s;
    hi_s.add(s, 1.0).add(y, -bud.s_max_mw);
    m.add_constraint("size.power.ub", id, hi_s, Sense::Le, 0.0);
    LinExpr lo_e;
    lo_e.add(e, 1.0).add(y, -bud.e_min_mwh);
    m.add_constraint("size.energy.lb", id, lo_e, Sense::Ge, 0.0);
    LinExpr hi_e;
    hi_e.add(e, 1.0).add(y, -bud.e_max_mwh);
    m.add_constraint("size.energy.ub", id, hi_e, Sense::Le, 0.0);
  }

  LinExpr fleet, budget_s, budget_e;
  for (int k : b.cand_segs) {
    const int ext = f.segments[static_cast<size_t>(k)].id;
    const VarId ymg = b.id(vn::y_mg(ext)), smg = b.id(vn::s_mg(ext)),
                emg = b.id(vn::e_mg(ext));
    LinExpr one, sagg, eagg;
    one.add(ymg, -1.0);
    sagg.add(smg, -1.0);
    eagg.add(emg, -1.0);
    for (const auto& [bus, seg] : b.cand_buses) {
      if (seg != k) continue;
      const std::string& id = f.buses[static_cast<size_t>(bus)].id;
      one.add(b.id(vn::y_bess(id)), 1.0);
      sagg.add(b.id(vn::s_nom(id)), 1.0);
      eagg.add(b.id(vn::e_nom(id)), 1.0);
    }
    m.add_constraint("site.one.per.mg", vn::seg(ext), one, Sense::Eq, 0.0);
    m.add_constraint("site.power.agg", vn::seg(ext), sagg, Sense::Eq, 0.0);
    m.add_constraint("site.energy.agg", vn::seg(ext), eagg, Sense::Eq, 0.0);
    fleet.add(ymg, 1.0);
    budget_s.add(smg, 1.0);
    budget_e.add(emg, 1.0);
  }
  m.add_constraint("fleet.min.count", "", fleet, Sense::Ge, 1.0);
  m.add_constraint("budget.power", "", budget_s, Sense::Le, bud.s_budget_mw);
  m.add_constraint("budget.energy", "", budget_e, Sense::Le, bud.e_budget_mwh);

  LinExpr ssw_count;
  for (int s : b.switches) {
    const Branch& br = f.branches[static_cast<size_t>(s)];
    if (br.ssw_eligible) ssw_count.add(b.id(vn::y_ssw(br.id)), 1.0);
  }
  for (int k : b.cand_segs)
    ssw_count.add(b.id(vn::y_mg(f.segments[static_cast<size_t>(k)].id)), -1.0);
  m.add_constraint("ssw.count", "", ssw_count, Sense::Eq, -1.0);
}

// Switch action rules: energizing switches extend a live island into a dead
// segment and copy frequency across; smart switches latch, require both ends
// live, close only inside the frequency window and carry no flow at the
// closing step.
inline void build_switch_constraints(ModelBuild& b) {
  const FeederModel& f = *b.feeder;
  auto& m = b.model;
  using namespace build_detail;
  const double eps = b.cfg.eps_hz;

  for (int o = 0; o < b.O; ++o)
    for (int t = 0; t < b.T; ++t)
      for (int s : b.switches) {
        const Branch& br = f.branches[static_cast<size_t>(s)];
        const std::string sfx = br.id + "." + vn::to(t, o);
        const std::string& bi = f.buses[static_cast<size_t>(br.from)].id;
        const std::string& bj = f.buses[static_cast<size_t>(br.to)].id;
        const VarId uesw = b.id(vn::u_esw(br.id, t, o));
        const VarId ussw = b.id(vn::u_ssw(br.id, t, o));

        {
          LinExpr e;
          e.add(uesw, 1.0);
          if (br.ssw_eligible) e.add(b.id(vn::y_ssw(br.id)), 1.0);
          m.add_constraint("esw.block.ssw", sfx, e, Sense::Le, 1.0);
        }
        {
          LinExpr e;
          e.add(uesw, 1.0);
          if (t >= 1) {
            e.add(b.id(vn::u_b(bi, t - 1, o)), -1.0);
            e.add(b.id(vn::u_b(bj, t - 1, o)), -1.0);
          }
          m.add_constraint("esw.adjacency", sfx, e, Sense::Le, 0.0);
        }
        {
          LinExpr e;
          e.add(uesw, 1.0);
          if (t >= 1) {
            e.add(b.id(vn::u_esw(br.id, t - 1, o)), -1.0);
            e.add(b.id(vn::u_b(bi, t - 1, o)), 1.0);
            e.add(b.id(vn::u_b(bj, t - 1, o)), 1.0);
          }
          m.add_constraint("esw.nojoin", sfx, e, Sense::Le, 2.0);
        }
        {
          LinExpr ub, lb;
          ub.add(b.id(vn::f_bus(bi, t, o)), 1.0)
              .add(b.id(vn::f_bus(bj, t, o)), -1.0)
              .add(uesw, kMFreq);
          m.add_constraint("esw.freq.copy.ub", sfx, ub, Sense::Le, kMFreq);
          lb.add(b.id(vn::f_bus(bi, t, o)), 1.0)
              .add(b.id(vn::f_bus(bj, t, o)), -1.0)
              .add(uesw, -kMFreq);
          m.add_constraint("esw.freq.copy.lb", sfx, lb, Sense::Ge, -kMFreq);
        }

        {
          LinExpr e;
          e.add(ussw, 1.0);
          if (br.ssw_eligible) e.add(b.id(vn::y_ssw(br.id)), -1.0);
          m.add_constraint("ssw.placed.gate", sfx, e, Sense::Le, 0.0);
        }
        {
          LinExpr e;
          e.add(ussw, 1.0);
          if (t >= 1) e.add(b.id(vn::u_ssw(br.id, t - 1, o)), -1.0);
          m.add_constraint("ssw.latch", sfx, e, Sense::Ge, 0.0);
        }
        {
          LinExpr e;
          e.add(ussw, 2.0);
          if (t >= 1) {
            e.add(b.id(vn::u_b(bi, t - 1, o)), -1.0);
            e.add(b.id(vn::u_b(bj, t - 1, o)), -1.0);
          }
          m.add_constraint("ssw.ends.live", sfx, e, Sense::Le, 0.0);
        }
        {
          LinExpr ub, lb;
          ub.add(b.id(vn::f_bus(bi, t, o)), 1.0)
              .add(b.id(vn::f_bus(bj, t, o)), -1.0)
              .add(ussw, kMFreq);
          m.add_constraint("ssw.freq.match.ub", sfx, ub, Sense::Le,
                           kMFreq + eps / 2.0);
          lb.add(b.id(vn::f_bus(bi, t, o)), 1.0)
              .add(b.id(vn::f_bus(bj, t, o)), -1.0)
              .add(ussw, -kMFreq);
          m.add_constraint("ssw.freq.match.lb", sfx, lb, Sense::Ge,
                           -kMFreq - eps / 2.0);
        }

        // Zero flow while the switch is closing (delta of the latch).
        const double lim = per_phase_limit(br);
        for (int p : phase_list(br.phases)) {
          const std::string psfx = br.id + "." + vn::ph(p) + "." + vn::to(t, o);
          const VarId fp = b.id(vn::flp(br.id, p, t, o));
          const VarId fq = b.id(vn::flq(br.id, p, t, o));
          LinExpr pub, plb, qub, qlb;
          pub.add(fp, 1.0).add(ussw, lim);
          plb.add(fp, 1.0).add(ussw, -lim);
          qub.add(fq, 1.0).add(ussw, lim);
          qlb.add(fq, 1.0).add(ussw, -lim);
          if (t >= 1) {
            const VarId prev = b.id(vn::u_ssw(br.id, t - 1, o));
            pub.add(prev, -lim);
            plb.add(prev, lim);
            qub.add(prev, -lim);
            qlb.add(prev, lim);
          }
          m.add_constraint("sync.zeroflow.p.ub", psfx, pub, Sense::Le, lim);
          m.add_constraint("sync.zeroflow.p.lb", psfx, plb, Sense::Ge, -lim);
          m.add_constraint("sync.zeroflow.q.ub", psfx, qub, Sense::Le, lim);
          m.add_constraint("sync.zeroflow.q.lb", psfx, qlb, Sense::Ge, -lim);
        }
      }
}

// Segment energization, bus/line tying, the one-closing-switch rule, the
// root-counted radiality balance, and TG availability/recovery.
inline void build_energization_constraints(ModelBuild& b) {
  const FeederModel& f = *b.feeder;
  auto& m = b.model;
  using namespace build_detail;

  // Switch-hop distances over the segment graph (TG interfaces appended as
  // extra nodes), used by the reachability cuts: an energization wave moves
  // one segment per step from each root.
  const int S = static_cast<int>(f.segments.size());
  const int nodes = S + static_cast<int>(f.tg_buses.size());
  std::vector<std::vector<int>> adj(static_cast<size_t>(nodes));
  auto node_of_bus = [&](int bus) {
    const int seg = f.buses[static_cast<size_t>(bus)].segment;
    if (seg >= 0) return seg;
    for (size_t i = 0; i < f.tg_buses.size(); ++i)
      if (f.tg_buses[i] == bus) return S + static_cast<int>(i);
    throw std::logic_error("bus outside segments and TG set");
  };
  for (const auto& br : f.branches) {
    if (br.kind != BranchKind::Switch) continue;
    const int a = node_of_bus(br.from), c = node_of_bus(br.to);
    adj[static_cast<size_t>(a)].push_back(c);
    adj[static_cast<size_t>(c)].push_back(a);
  }
  auto bfs = [&](int src) {
    std::vector<int> dist(static_cast<size_t>(nodes), nodes + 1);
    std::vector<int> queue = {src};
    dist[static_cast<size_t>(src)] = 0;
    for (size_t qi = 0; qi < queue.size(); ++qi)
      for (int nxt : adj[static_cast<size_t>(queue[qi])])
        if (dist[static_cast<size_t>(nxt)] > dist[static_cast<size_t>(queue[qi])] + 1) {
          dist[static_cast<size_t>(nxt)] = dist[static_cast<size_t>(queue[qi])] + 1;
          queue.push_back(nxt);
        }
    return dist;
  };
  std::map<int, std::vector<int>> cand_dist;  // candidate seg -> distances
  for (int k : b.cand_segs) cand_dist[k] = bfs(k);
  std::vector<std::vector<int>> tg_dist;
  for (size_t i = 0; i < f.tg_buses.size(); ++i)
    tg_dist.push_back(bfs(S + static_cast<int>(i)));

  for (int o = 0; o < b.O; ++o) {
    const Scenario& sc = b.scenarios->scenarios[static_cast<size_t>(o)];
    for (int t = 0; t < b.T; ++t) {
      const std::string to = vn::to(t, o);

      for (size_t si = 0; si < f.segments.size(); ++si) {
        const Segment& seg = f.segments[si];
        const std::string ssfx = vn::seg(seg.id) + "." + to;
        const VarId usg = b.id(vn::u_sg(seg.id, t, o));
        {
          LinExpr e;
          e.add(usg, 1.0);
          if (t >= 1) e.add(b.id(vn::u_sg(seg.id, t - 1, o)), -1.0);
          m.add_constraint("seg.latch", ssfx, e, Sense::Ge, 0.0);
        }
        for (int bus : seg.buses) {
          LinExpr e;
          e.add(b.id(vn::u_b(f.buses[static_cast<size_t>(bus)].id, t, o)), 1.0)
              .add(usg, -1.0);
          m.add_constraint("seg.bus.tie",
                           f.buses[static_cast<size_t>(bus)].id + "." + to, e,
                           Sense::Eq, 0.0);
        }
        for (int li : seg.internal_lines) {
          LinExpr e;
          e.add(b.id(vn::u_l(f.branches[static_cast<size_t>(li)].id, t, o)), 1.0)
              .add(usg, -1.0);
          m.add_constraint("seg.line.tie",
                           f.branches[static_cast<size_t>(li)].id + "." + to, e,
                           Sense::Eq, 0.0);
        }
        LinExpr one_esw;
        for (int sw : seg.boundary_switches) {
          const Branch& br = f.branches[static_cast<size_t>(sw)];
          LinExpr e;
          e.add(usg, 1.0).add(b.id(vn::u_esw(br.id, t, o)), -1.0);
          m.add_constraint("seg.switch.gate", br.id + "." + vn::seg(seg.id) + "." + to,
                           e, Sense::Ge, 0.0);
          one_esw.add(b.id(vn::u_esw(br.id, t, o)), 1.0);
          if (t >= 1) one_esw.add(b.id(vn::u_esw(br.id, t - 1, o)), -1.0);
        }
        if (t >= 1) one_esw.add(b.id(vn::u_sg(seg.id, t - 1, o)), -kMCount);
        m.add_constraint("seg.one.esw", ssfx, one_esw, Sense::Le, 1.0);
        if (seg.is_candidate_mg) {
          LinExpr e;
          e.add(usg, 1.0).add(b.id(vn::y_mg(seg.id)), -1.0);
          m.add_constraint("seg.selfstart", ssfx, e, Sense::Ge, 0.0);
        }
        // a segment is live only if it already was, self-starts, or had a
        // live switch neighbor one step earlier (one segment hop per step)
        {
          LinExpr e;
          e.add(usg, 1.0);
          if (t >= 1) {
            e.add(b.id(vn::u_sg(seg.id, t - 1, o)), -1.0);
            for (int sw : seg.boundary_switches) {
              const Branch& br = f.branches[static_cast<size_t>(sw)];
              const int other = f.buses[static_cast<size_t>(br.from)].segment ==
                                        static_cast<int>(si)
                                    ? br.to
                                    : br.from;
              e.add(b.id(vn::u_b(f.buses[static_cast<size_t>(other)].id, t - 1, o)),
                    -1.0);
            }
          }
          if (seg.is_candidate_mg) e.add(b.id(vn::y_mg(seg.id)), -1.0);
          m.add_constraint("seg.cascade", ssfx, e, Sense::Le, 0.0);
        }
        // the first live step needs a boundary ESW closed that very step
        {
          LinExpr e;
          e.add(usg, 1.0);
          if (t >= 1) e.add(b.id(vn::u_sg(seg.id, t - 1, o)), -1.0);
          for (int sw : seg.boundary_switches)
            e.add(b.id(vn::u_esw(f.branches[static_cast<size_t>(sw)].id, t, o)),
                  -1.0);
          if (seg.is_candidate_mg) e.add(b.id(vn::y_mg(seg.id)), -1.0);
          m.add_constraint("seg.cascade.esw", ssfx, e, Sense::Le, 0.0);
        }
        // reachability: a root whose wave can arrive by t must exist
        {
          LinExpr e;
          e.add(usg, 1.0);
          for (int k : b.cand_segs)
            if (cand_dist.at(k)[si] <= t)
              e.add(b.id(vn::y_mg(f.segments[static_cast<size_t>(k)].id)), -1.0);
          double tg_reach = 0.0;
          for (size_t ti = 0; ti < f.tg_buses.size(); ++ti) {
            int first_avail = -1;
            for (int tt = 0; tt < b.T; ++tt)
              if (sc.tg_available[static_cast<size_t>(tt)]) {
                first_avail = tt;
                break;
              }
            if (first_avail >= 0 && first_avail + tg_dist[ti][si] <= t)
              tg_reach += 1.0;
          }
          m.add_constraint("seg.reach", ssfx, e, Sense::Le, tg_reach);
        }
      }

      // switch line status is the sum of its two operating modes
      for (int s : b.switches) {
        const Branch& br = f.branches[static_cast<size_t>(s)];
        LinExpr e;
        e.add(b.id(vn::u_l(br.id, t, o)), 1.0)
            .add(b.id(vn::u_esw(br.id, t, o)), -1.0)
            .add(b.id(vn::u_ssw(br.id, t, o)), -1.0);
        m.add_constraint("switch.line.def", br.id + "." + to, e, Sense::Eq, 0.0);
      }

      // radiality: lines = buses - roots, with the root count itself decided
      // by installed MGs, live TG interfaces and closed smart switches
      {
        const VarId roots = b.id(vn::r_roots(t, o));
        LinExpr count;
        for (const auto& br : f.branches) count.add(b.id(vn::u_l(br.id, t, o)), 1.0);
        for (const auto& bus : f.buses) count.add(b.id(vn::u_b(bus.id, t, o)), -1.0);
        count.add(roots, 1.0);
        m.add_constraint("radial.count", to, count, Sense::Eq, 0.0);

        LinExpr rdef;
        rdef.add(roots, 1.0);
        for (int k : b.cand_segs)
          rdef.add(b.id(vn::y_mg(f.segments[static_cast<size_t>(k)].id)), -1.0);
        for (int bus : f.tg_buses)
          rdef.add(b.id(vn::u_b(f.buses[static_cast<size_t>(bus)].id, t, o)), -1.0);
        for (int s : b.switches)
          rdef.add(b.id(vn::u_ssw(f.branches[static_cast<size_t>(s)].id, t, o)), 1.0);
        m.add_constraint("radial.roots", to, rdef, Sense::Eq, 0.0);
      }

      // TG interface: availability, latching, bus tie, voltage and frequency
      // pinned to nominal while connected, apparent power inside the polygon
      for (int bus : f.tg_buses) {
        const Bus& tb = f.buses[static_cast<size_t>(bus)];
        const std::string tsfx = tb.id + "." + to;
        const VarId utg = b.id(vn::u_tg(tb.id, t, o));
        {
          LinExpr e;
          e.add(utg, 1.0);
          m.add_constraint("tg.avail", tsfx, e, Sense::Le,
                           sc.tg_available[static_cast<size_t>(t)] ? 1.0 : 0.0);
        }
        {
          LinExpr e;
          e.add(utg, 1.0);
          if (t >= 1) e.add(b.id(vn::u_tg(tb.id, t - 1, o)), -1.0);
          m.add_constraint("tg.latch", tsfx, e, Sense::Ge, 0.0);
        }
        {
          LinExpr e;
          e.add(b.id(vn::u_b(tb.id, t, o)), 1.0).add(utg, -1.0);
          m.add_constraint("tg.bus.tie", tsfx, e, Sense::Eq, 0.0);
        }
        for (int p = 0; p < 3; ++p) {
          LinExpr e;
          e.add(b.id(vn::v(tb.id, p, t, o)), 1.0).add(utg, -1.0);
          m.add_constraint("tg.volt.pin", tb.id + "." + vn::ph(p) + "." + to, e,
                           Sense::Eq, 0.0);
        }
        {
          LinExpr e;
          e.add(b.id(vn::f_bus(tb.id, t, o)), 1.0).add(utg, -b.cfg.vsg.base_freq_hz);
          m.add_constraint("tg.freq.pin", tsfx, e, Sense::Eq, 0.0);
        }
        const double r = b.cfg.tg_s_max_mva / 3.0 * std::cos(M_PI / 8.0);
        for (int p = 0; p < 3; ++p)
          for (int j = 0; j < 8; ++j) {
            const double ang = (2.0 * j + 1.0) * M_PI / 8.0;
            LinExpr e;
            e.add(b.id(vn::p_tg(tb.id, p, t, o)), std::cos(ang));
            e.add(b.id(vn::q_tg(tb.id, p, t, o)), std::sin(ang));
            e.add(utg, -r);
            m.add_constraint("tg.cap.oct",
                             tb.id + "." + vn::ph(p) + ".k" + std::to_string(j) + "." +
                                 to,
                             e, Sense::Le, 0.0);
          }
      }
    }
  }
}

// Frequency dynamics: initialization, QSS recursion with the synchronization
// jump, per-unit disturbance coupling to the sized rating, transient-index
// definitions, safe-range bands, intra-segment propagation and the paired
// synchronization indicator window.
inline void build_frequency_constraints(ModelBuild& b) {
  const FeederModel& f = *b.feeder;
  auto& m = b.model;
  using namespace build_detail;
  const auto& safe = b.cfg.safe;
  const double f0 = b.cfg.vsg.base_freq_hz;
  const double c_qss = f0 / b.cfg.vsg.stiffness();
  const double c_roc = f0 / (2.0 * b.cfg.vsg.inertia_s);
  const double c_nad = c_qss * (1.0 + b.shape.nadir_ratio);
  const double smax = b.cfg.budgets.s_max_mw;
  const double W = b.w_box;
  const double eps = b.cfg.eps_hz;

  for (int o = 0; o < b.O; ++o)
    for (int t = 0; t < b.T; ++t) {
      const std::string to = vn::to(t, o);
      for (int k : b.cand_segs) {
        const Segment& seg = f.segments[static_cast<size_t>(k)];
        const int ext = seg.id;
        const std::string ksfx = vn::seg(ext) + "." + to;
        const VarId fmg = b.id(vn::f_mg(ext, t, o));
        const VarId ymg = b.id(vn::y_mg(ext));
        const VarId smg = b.id(vn::s_mg(ext));
        const VarId pmg = b.id(vn::p_mg(ext, t, o));

        // MG-level aggregation of BESS output (active power)
        {
          LinExpr e;
          e.add(pmg, -1.0);
          for (const auto& [bus, segi] : b.cand_buses) {
            if (segi != k) continue;
            const std::string& id = f.buses[static_cast<size_t>(bus)].id;
            for (int p = 0; p < 3; ++p) e.add(b.id(vn::p_bess(id, p, t, o)), 1.0);
          }
          m.add_constraint("bess.mg.agg", ksfx, e, Sense::Eq, 0.0);
        }

        const VarId fxmg = b.id(vn::fx_mg(ext, t, o));
        if (t == 0) {
          LinExpr e;
          e.add(fmg, 1.0).add(ymg, -f0);
          m.add_constraint("freq.init", ksfx, e, Sense::Eq, 0.0);
          LinExpr ex;
          ex.add(fxmg, 1.0).add(smg, -f0);
          m.add_constraint("freqx.init", ksfx, ex, Sense::Eq, 0.0);
        } else {
          const VarId fq = b.id(vn::f_qss(ext, t, o));
          const VarId fn = b.id(vn::f_nad(ext, t, o));
          const VarId fr = b.id(vn::f_roc(ext, t, o));
          const VarId w = b.id(vn::w_pu(ext, t, o));
          const VarId dp = b.id(vn::dp_mg(ext, t, o));
          const VarId av = b.id(vn::adj(ext, t, o));
          const VarId ds = b.id(vn::d_syn(ext, t, o));
          const VarId fprev = b.id(vn::f_mg(ext, t - 1, o));

          {
            LinExpr e;
            e.add(dp, 1.0).add(pmg, -1.0).add(b.id(vn::p_mg(ext, t - 1, o)), 1.0);
            m.add_constraint("freq.dp.def", ksfx, e, Sense::Eq, 0.0);
          }
          {
            LinExpr e;
            e.add(fq, 1.0).add(fprev, -1.0).add(w, c_qss);
            m.add_constraint("freq.qss.def", ksfx, e, Sense::Eq, 0.0);
          }
          {
            LinExpr e;
            e.add(fn, 1.0).add(fprev, -1.0).add(w, c_nad);
            m.add_constraint("freq.nadir.def", ksfx, e, Sense::Eq, 0.0);
          }
          {
            LinExpr e;
            e.add(fr, 1.0).add(w, c_roc);
            m.add_constraint("freq.rocof.def", ksfx, e, Sense::Eq, 0.0);
          }
          {
            LinExpr e;
            e.add(fmg, 1.0).add(fq, -1.0).add(av, -1.0);
            m.add_constraint("freq.update", ksfx, e, Sense::Eq, 0.0);
          }
          {
            LinExpr ub, lb;
            ub.add(av, 1.0).add(ds, -b.adj_box);
            m.add_constraint("freq.adj.gate.ub", ksfx, ub, Sense::Le, 0.0);
            lb.add(av, 1.0).add(ds, b.adj_box);
            m.add_constraint("freq.adj.gate.lb", ksfx, lb, Sense::Ge, 0.0);
          }
          {
            LinExpr esw, epair;
            esw.add(ds, 1.0);
            for (int s : b.switches) {
              const Branch& br = f.branches[static_cast<size_t>(s)];
              esw.add(b.id(vn::u_ssw(br.id, t, o)), -1.0);
              esw.add(b.id(vn::u_ssw(br.id, t - 1, o)), 1.0);
            }
            m.add_constraint("freq.adj.evt.sw", ksfx, esw, Sense::Le, 0.0);
            epair.add(ds, 1.0);
            for (const auto& [pk, pl] : f.sync_pairs) {
              if (pk != k && pl != k) continue;
              const int ek = f.segments[static_cast<size_t>(pk)].id;
              const int el = f.segments[static_cast<size_t>(pl)].id;
              epair.add(b.id(vn::u_syn(ek, el, t, o)), -1.0);
              epair.add(b.id(vn::u_syn(ek, el, t - 1, o)), 1.0);
            }
            m.add_constraint("freq.adj.evt.pair", ksfx, epair, Sense::Le, 0.0);
          }

          // per-unit disturbance: w * s_mg = dp via the McCormick envelope,
          // exact at s = 0 and s = s_max
          {
            LinExpr mc1;
            mc1.add(dp, 1.0).add(smg, W);
            m.add_constraint("freq.pu.mc1", ksfx, mc1, Sense::Ge, 0.0);
            LinExpr mc2;
            mc2.add(dp, 1.0).add(smg, -W).add(w, -smax);
            m.add_constraint("freq.pu.mc2", ksfx, mc2, Sense::Ge, -W * smax);
            LinExpr mc3;
            mc3.add(dp, 1.0).add(smg, -W);
            m.add_constraint("freq.pu.mc3", ksfx, mc3, Sense::Le, 0.0);
            LinExpr mc4;
            mc4.add(dp, 1.0).add(smg, W).add(w, -smax);
            m.add_constraint("freq.pu.mc4", ksfx, mc4, Sense::Le, W * smax);
            LinExpr gub;
            gub.add(w, 1.0).add(ymg, -W);
            m.add_constraint("freq.pu.gate.ub", ksfx, gub, Sense::Le, 0.0);
            LinExpr glb;
            glb.add(w, 1.0).add(ymg, W);
            m.add_constraint("freq.pu.gate.lb", ksfx, glb, Sense::Ge, 0.0);
          }

          // exact scaled channel: the same recursion multiplied through by
          // the rating, so the physical trajectory is pinned without any
          // envelope slack
          {
            const VarId fxq = b.id(vn::fx_qss(ext, t, o));
            const VarId fxn = b.id(vn::fx_nad(ext, t, o));
            const VarId aj = b.id(vn::aj_mg(ext, t, o));
            const VarId fxprev = b.id(vn::fx_mg(ext, t - 1, o));
            LinExpr q;
            q.add(fxq, 1.0).add(fxprev, -1.0).add(dp, c_qss);
            m.add_constraint("freqx.qss.def", ksfx, q, Sense::Eq, 0.0);
            LinExpr nd;
            nd.add(fxn, 1.0).add(fxprev, -1.0).add(dp, c_nad);
            m.add_constraint("freqx.nadir.def", ksfx, nd, Sense::Eq, 0.0);
            LinExpr up;
            up.add(fxmg, 1.0).add(fxq, -1.0).add(aj, -1.0);
            m.add_constraint("freqx.update", ksfx, up, Sense::Eq, 0.0);
            const double ajbox = (safe.freq_hi_hz - safe.freq_lo_hz) * smax;
            LinExpr gu;
            gu.add(aj, 1.0).add(ds, -ajbox);
            m.add_constraint("freqx.adj.gate.ub", ksfx, gu, Sense::Le, 0.0);
            LinExpr gl;
            gl.add(aj, 1.0).add(ds, ajbox);
            m.add_constraint("freqx.adj.gate.lb", ksfx, gl, Sense::Ge, 0.0);
            LinExpr qlo;
            qlo.add(fxq, 1.0).add(smg, -safe.qss_lo_hz);
            m.add_constraint("freqx.qss.band.lb", ksfx, qlo, Sense::Ge, 0.0);
            LinExpr qhi;
            qhi.add(fxq, 1.0).add(smg, -safe.qss_hi_hz);
            m.add_constraint("freqx.qss.band.ub", ksfx, qhi, Sense::Le, 0.0);
            LinExpr nlo;
            nlo.add(fxn, 1.0).add(smg, -safe.nadir_lo_hz);
            m.add_constraint("freqx.nadir.band.lb", ksfx, nlo, Sense::Ge, 0.0);
            LinExpr nhi;
            nhi.add(fxn, 1.0).add(smg, -safe.nadir_hi_hz);
            m.add_constraint("freqx.nadir.band.ub", ksfx, nhi, Sense::Le, 0.0);
          }

          // exact linear caps tying the physical disturbance to the rating
          {
            LinExpr rub;
            rub.add(dp, c_roc).add(smg, -safe.rocof_hi_hz_s);
            m.add_constraint("freq.rocof.cap.ub", ksfx, rub, Sense::Le, 0.0);
            LinExpr rlb;
            rlb.add(dp, -c_roc).add(smg, safe.rocof_lo_hz_s);
            m.add_constraint("freq.rocof.cap.lb", ksfx, rlb, Sense::Le, 0.0);
            const double width = safe.qss_hi_hz - safe.qss_lo_hz;
            LinExpr dub;
            dub.add(dp, c_qss).add(smg, -width);
            m.add_constraint("freq.dp.cap.ub", ksfx, dub, Sense::Le, 0.0);
            LinExpr dlb;
            dlb.add(dp, -c_qss).add(smg, -width);
            m.add_constraint("freq.dp.cap.lb", ksfx, dlb, Sense::Le, 0.0);
          }

          // safe-range bands, active for installed MGs and collapsing to the
          // blacked-out zero point otherwise
          {
            LinExpr e;
            e.add(fq, 1.0).add(ymg, -safe.qss_lo_hz);
            m.add_constraint("freq.qss.band.lb", ksfx, e, Sense::Ge, 0.0);
          }
          {
            LinExpr e;
            e.add(fq, 1.0).add(ymg, -safe.qss_hi_hz);
            m.add_constraint("freq.qss.band.ub", ksfx, e, Sense::Le, 0.0);
          }
          {
            LinExpr e;
            e.add(fn, 1.0).add(ymg, -safe.nadir_lo_hz);
            m.add_constraint("freq.nadir.band.lb", ksfx, e, Sense::Ge, 0.0);
          }
          {
            LinExpr e;
            e.add(fn, 1.0).add(ymg, -safe.nadir_hi_hz);
            m.add_constraint("freq.nadir.band.ub", ksfx, e, Sense::Le, 0.0);
          }
          {
            LinExpr e;
            e.add(fr, 1.0).add(ymg, -safe.rocof_lo_hz_s);
            m.add_constraint("freq.rocof.band.lb", ksfx, e, Sense::Ge, 0.0);
          }
          {
            LinExpr e;
            e.add(fr, 1.0).add(ymg, -safe.rocof_hi_hz_s);
            m.add_constraint("freq.rocof.band.ub", ksfx, e, Sense::Le, 0.0);
          }
        }

        {
          LinExpr e;
          e.add(fmg, 1.0).add(ymg, -safe.freq_lo_hz);
          m.add_constraint("freq.band.lb", ksfx, e, Sense::Ge, 0.0);
        }
        {
          LinExpr e;
          e.add(fmg, 1.0).add(ymg, -safe.freq_hi_hz);
          m.add_constraint("freq.band.ub", ksfx, e, Sense::Le, 0.0);
        }
        {
          LinExpr e;
          e.add(fxmg, 1.0).add(smg, -safe.freq_lo_hz);
          m.add_constraint("freqx.band.lb", ksfx, e, Sense::Ge, 0.0);
        }
        {
          LinExpr e;
          e.add(fxmg, 1.0).add(smg, -safe.freq_hi_hz);
          m.add_constraint("freqx.band.ub", ksfx, e, Sense::Le, 0.0);
        }

        // switch-end buses of an installed MG inherit its frequency
        for (int bus : seg.buses) {
          if (std::find(b.fbus.begin(), b.fbus.end(), bus) == b.fbus.end()) continue;
          const std::string& id = f.buses[static_cast<size_t>(bus)].id;
          LinExpr ub, lb;
          ub.add(b.id(vn::f_bus(id, t, o)), 1.0).add(fmg, -1.0).add(ymg, kMFreq);
          m.add_constraint("freq.mg.bus.ub", id + "." + to, ub, Sense::Le, kMFreq);
          lb.add(b.id(vn::f_bus(id, t, o)), 1.0).add(fmg, -1.0).add(ymg, -kMFreq);
          m.add_constraint("freq.mg.bus.lb", id + "." + to, lb, Sense::Ge, -kMFreq);
        }
      }

      // frequencies are uniform across the switch-end buses of any segment
      for (const auto& seg : f.segments) {
        std::vector<int> ends;
        for (int bus : seg.buses)
          if (std::find(b.fbus.begin(), b.fbus.end(), bus) != b.fbus.end())
            ends.push_back(bus);
        for (size_t i = 1; i < ends.size(); ++i) {
          const std::string& a = f.buses[static_cast<size_t>(ends[i - 1])].id;
          const std::string& c = f.buses[static_cast<size_t>(ends[i])].id;
          LinExpr e;
          e.add(b.id(vn::f_bus(a, t, o)), 1.0).add(b.id(vn::f_bus(c, t, o)), -1.0);
          m.add_constraint("freq.seg.uniform", a + "." + c + "." + to, e, Sense::Eq,
                           0.0);
        }
      }

      // pairwise synchronization capture
      for (size_t pi = 0; pi < f.sync_pairs.size(); ++pi) {
        const auto& [pk, pl] = f.sync_pairs[pi];
        const int ek = f.segments[static_cast<size_t>(pk)].id;
        const int el = f.segments[static_cast<size_t>(pl)].id;
        const std::string psfx = vn::pair(ek, el) + "." + to;
        const VarId us = b.id(vn::u_syn(ek, el, t, o));
        if (t == 0) {
          // defining row for the pair gate lives outside the time loop
          continue;
        }
        {
          LinExpr e;
          e.add(us, 1.0).add(b.id(vn::u_syn(ek, el, t - 1, o)), -1.0);
          m.add_constraint("sync.latch", psfx, e, Sense::Ge, 0.0);
        }
        const VarId ulo = b.id(vn::u_syn_lo(ek, el, t, o));
        const VarId uhi = b.id(vn::u_syn_hi(ek, el, t, o));
        {
          LinExpr e;
          e.add(ulo, 1.0).add(us, 1.0).add(uhi, 1.0);
          m.add_constraint("sync.indicator.sum", psfx, e, Sense::Eq, 1.0);
        }
        const VarId fk = b.id(vn::f_mg(ek, t, o));
        const VarId fl = b.id(vn::f_mg(el, t, o));
        const VarId muv = b.id(vn::mu(ek, el));
        {
          LinExpr e;  // eps*lo - eps/2*u - M*hi <= f_l - f_k + mu
          e.add(ulo, eps).add(us, -eps / 2.0).add(uhi, -kMSync);
          e.add(fl, -1.0).add(fk, 1.0).add(muv, -1.0);
          m.add_constraint("sync.window.lb", psfx, e, Sense::Le, 0.0);
        }
        {
          LinExpr e;  // M*lo + eps/2*u - eps*hi >= f_l - f_k + mu
          e.add(ulo, kMSync).add(us, eps / 2.0).add(uhi, -eps);
          e.add(fl, -1.0).add(fk, 1.0).add(muv, -1.0);
          m.add_constraint("sync.window.ub", psfx, e, Sense::Ge, 0.0);
        }
      }

      // at most one merge per step among overlapping pairs
      if (t >= 1)
        for (size_t xi = 0; xi < f.sync_triples.size(); ++xi) {
          const auto& tr = f.sync_triples[xi];
          auto ext = [&f](const std::pair<int, int>& pr) {
            return std::pair<int, int>{
                f.segments[static_cast<size_t>(pr.first)].id,
                f.segments[static_cast<size_t>(pr.second)].id};
          };
          const auto [ak, al] = ext(tr.pair_a);
          const auto [bk, bl] = ext(tr.pair_b);
          const auto [lk, ll] = ext(tr.leftover);
          LinExpr e;
          e.add(b.id(vn::u_syn(ak, al, t, o)), 1.0)
              .add(b.id(vn::u_syn(ak, al, t - 1, o)), -1.0)
              .add(b.id(vn::u_syn(bk, bl, t, o)), 1.0)
              .add(b.id(vn::u_syn(bk, bl, t - 1, o)), -1.0)
              .add(b.id(vn::u_syn(lk, ll, t, o)), -1.0);
          m.add_constraint("sync.one.merge", "x" + std::to_string(xi) + "." + to, e,
                           Sense::Le, 1.0);
        }
    }

  // static pair gates
  for (const auto& [pk, pl] : f.sync_pairs) {
    const int ek = f.segments[static_cast<size_t>(pk)].id;
    const int el = f.segments[static_cast<size_t>(pl)].id;
    LinExpr e;
    e.add(b.id(vn::mu(ek, el)), 1.0)
        .add(b.id(vn::y_mg(ek)), 1.0)
        .add(b.id(vn::y_mg(el)), 1.0);
    m.add_constraint("sync.pairgate.def", vn::pair(ek, el), e, Sense::Eq, 2.0);
  }
}

// Unbalanced linear power flow: per-phase nodal balance, voltage-drop pairs
// gated by line status, flow nulling on open branches, voltage boxes and the
// GFMI voltage-reference pinning.
inline void build_power_flow(ModelBuild& b) {
  const FeederModel& f = *b.feeder;
  auto& m = b.model;
  using namespace build_detail;
  const double vlo2 = b.cfg.safe.v_lo_pu * b.cfg.safe.v_lo_pu;
  const double vhi2 = b.cfg.safe.v_hi_pu * b.cfg.safe.v_hi_pu;

  // per-branch drop coefficient tables
  std::vector<DropCoeffs> drops(f.branches.size());
  for (size_t i = 0; i < f.branches.size(); ++i) drops[i] = vdrop_coeffs(f.branches[i]);

  for (int o = 0; o < b.O; ++o)
    for (int t = 0; t < b.T; ++t) {
      const std::string to = vn::to(t, o);

      // nodal balance per bus and phase
      for (size_t bi = 0; bi < f.buses.size(); ++bi) {
        const Bus& bus = f.buses[bi];
        for (int p : phase_list(bus.phases)) {
          LinExpr ep, eq;
          for (size_t ri = 0; ri < f.branches.size(); ++ri) {
            const Branch& br = f.branches[ri];
            if (!(br.phases & (1 << p))) continue;
            if (br.to == static_cast<int>(bi)) {
              ep.add(b.id(vn::flp(br.id, p, t, o)), 1.0);
              eq.add(b.id(vn::flq(br.id, p, t, o)), 1.0);
            } else if (br.from == static_cast<int>(bi)) {
              ep.add(b.id(vn::flp(br.id, p, t, o)), -1.0);
              eq.add(b.id(vn::flq(br.id, p, t, o)), -1.0);
            }
          }
          if (bus.is_tg_interface) {
            ep.add(b.id(vn::p_tg(bus.id, p, t, o)), 1.0);
            eq.add(b.id(vn::q_tg(bus.id, p, t, o)), 1.0);
          }
          if (b.has(vn::p_bess(bus.id, p, t, o))) {
            ep.add(b.id(vn::p_bess(bus.id, p, t, o)), 1.0);
            eq.add(b.id(vn::q_bess(bus.id, p, t, o)), 1.0);
          }
          if (bus.pv_rating_mw > 0.0) {
            ep.add(b.id(vn::p_pv(bus.id, p, t, o)), 1.0);
            eq.add(b.id(vn::q_pv(bus.id, p, t, o)), 1.0);
          }
          for (const auto& l : f.loads) {
            if (l.bus != static_cast<int>(bi) || !(l.phases & (1 << p))) continue;
            if (l.kind == LoadKind::Critical) {
              ep.add(b.id(vn::p_cl(bus.id, p, t, o)), -1.0);
              eq.add(b.id(vn::q_cl(bus.id, p, t, o)), -1.0);
            } else {
              ep.add(b.id(vn::p_nl(bus.id, p, t, o)), -1.0);
              eq.add(b.id(vn::q_nl(bus.id, p, t, o)), -1.0);
            }
          }
          m.add_constraint("balance.p", bus.id + "." + vn::ph(p) + "." + to, ep,
                           Sense::Eq, 0.0);
          m.add_constraint("balance.q", bus.id + "." + vn::ph(p) + "." + to, eq,
                           Sense::Eq, 0.0);
        }
      }

      // voltage drop along branches and flow gating
      for (size_t ri = 0; ri < f.branches.size(); ++ri) {
        const Branch& br = f.branches[ri];
        const auto ph = phase_list(br.phases);
        const int n = static_cast<int>(ph.size());
        const Bus& fb = f.buses[static_cast<size_t>(br.from)];
        const Bus& tb = f.buses[static_cast<size_t>(br.to)];
        const double scale = 1.0e6 / (fb.vbase_v * fb.vbase_v);
        const VarId ul = b.id(vn::u_l(br.id, t, o));
        const double lim = per_phase_limit(br);
        for (int a = 0; a < n; ++a) {
          const int p = ph[static_cast<size_t>(a)];
          const std::string sfx = br.id + "." + vn::ph(p) + "." + to;
          LinExpr drop;
          drop.add(b.id(vn::v(tb.id, p, t, o)), 1.0)
              .add(b.id(vn::v(fb.id, p, t, o)), -1.0);
          for (int c = 0; c < n; ++c) {
            const int pc = ph[static_cast<size_t>(c)];
            const double rr = drops[ri].r[static_cast<size_t>(a * n + c)];
            const double xx = drops[ri].x[static_cast<size_t>(a * n + c)];
            drop.add(b.id(vn::flp(br.id, pc, t, o)), 2.0 * scale * rr);
            drop.add(b.id(vn::flq(br.id, pc, t, o)), 2.0 * scale * xx);
          }
          LinExpr ub = drop, lb = drop;
          ub.add(ul, kMVolt);
          m.add_constraint("vdrop.ub", sfx, ub, Sense::Le, kMVolt);
          lb.add(ul, -kMVolt);
          m.add_constraint("vdrop.lb", sfx, lb, Sense::Ge, -kMVolt);

          LinExpr pub, plb, qub, qlb;
          pub.add(b.id(vn::flp(br.id, p, t, o)), 1.0).add(ul, -lim);
          m.add_constraint("flow.gate.p.ub", sfx, pub, Sense::Le, 0.0);
          plb.add(b.id(vn::flp(br.id, p, t, o)), 1.0).add(ul, lim);
          m.add_constraint("flow.gate.p.lb", sfx, plb, Sense::Ge, 0.0);
          qub.add(b.id(vn::flq(br.id, p, t, o)), 1.0).add(ul, -lim);
          m.add_constraint("flow.gate.q.ub", sfx, qub, Sense::Le, 0.0);
          qlb.add(b.id(vn::flq(br.id, p, t, o)), 1.0).add(ul, lim);
          m.add_constraint("flow.gate.q.lb", sfx, qlb, Sense::Ge, 0.0);
        }
      }

      // voltage boxed to the safe range while live, zero while dead
      for (const auto& bus : f.buses)
        for (int p : phase_list(bus.phases)) {
          const std::string sfx = bus.id + "." + vn::ph(p) + "." + to;
          const VarId vv = b.id(vn::v(bus.id, p, t, o));
          const VarId ub = b.id(vn::u_b(bus.id, t, o));
          LinExpr hi;
          hi.add(vv, 1.0).add(ub, -vhi2);
          m.add_constraint("volt.box.ub", sfx, hi, Sense::Le, 0.0);
          LinExpr lo;
          lo.add(vv, 1.0).add(ub, -vlo2);
          m.add_constraint("volt.box.lb", sfx, lo, Sense::Ge, 0.0);
        }

      // GFMI terminal voltage pinned to base + increment when installed
      for (const auto& [busi, seg] : b.cand_buses) {
        const Bus& bus = f.buses[static_cast<size_t>(busi)];
        const VarId y = b.id(vn::y_bess(bus.id));
        const VarId dv = b.id(vn::dv_inc(bus.id, t, o));
        for (int p = 0; p < 3; ++p) {
          const std::string sfx = bus.id + "." + vn::ph(p) + "." + to;
          const VarId vv = b.id(vn::v(bus.id, p, t, o));
          // installed: v - dv_inc pinned to the 1.0 pu^2 base; absent: slack M
          LinExpr ub;
          ub.add(vv, 1.0).add(dv, -1.0).add(y, kMVref - 1.0);
          m.add_constraint("vref.pin.ub", sfx, ub, Sense::Le, kMVref);
          LinExpr lb;
          lb.add(vv, 1.0).add(dv, -1.0).add(y, -(kMVref + 1.0));
          m.add_constraint("vref.pin.lb", sfx, lb, Sense::Ge, -kMVref);
        }
      }
    }
}

// Load restoration expressions (CLPU staircases), PV dispatch identities and
// BESS output/energy constraints.
inline void build_resource_constraints(ModelBuild& b) {
  const FeederModel& f = *b.feeder;
  auto& m = b.model;
  using namespace build_detail;
  const auto wts = clpu_weights(b.cfg.clpu);
  const double dt_h = b.scenarios->dt_hours();
  const auto& safe = b.cfg.safe;

  for (int o = 0; o < b.O; ++o) {
    const Scenario& sc = b.scenarios->scenarios[static_cast<size_t>(o)];
    for (int t = 0; t < b.T; ++t) {
      const std::string to = vn::to(t, o);

      // CLPU load expressions
      for (const auto& l : f.loads) {
        const Bus& bus = f.buses[static_cast<size_t>(l.bus)];
        const bool crit = l.kind == LoadKind::Critical;
        const double tan_th = std::tan(l.pf_angle_rad);
        const double nom = nominal_per_phase(l, sc, t);
        for (int p : phase_list(l.phases)) {
          const std::string sfx = bus.id + "." + vn::ph(p) + "." + to;
          const VarId pv = b.id(crit ? vn::p_cl(bus.id, p, t, o)
                                     : vn::p_nl(bus.id, p, t, o));
          const VarId qv = b.id(crit ? vn::q_cl(bus.id, p, t, o)
                                     : vn::q_nl(bus.id, p, t, o));
          LinExpr pe;
          pe.add(pv, 1.0);
          for (int i = 0; i < 4; ++i) {
            const int tt = t - 3 + i;
            if (tt < 0) continue;
            const VarId u =
                crit ? b.id(vn::u_sg(f.segments[static_cast<size_t>(bus.segment)].id,
                                     tt, o))
                     : b.id(vn::z_b(bus.id, tt, o));
            pe.add(u, -nom * wts[static_cast<size_t>(i)]);
          }
          m.add_constraint(crit ? "load.cl.p" : "load.nl.p", sfx, pe, Sense::Eq, 0.0);
          LinExpr qe;
          qe.add(qv, 1.0).add(pv, -tan_th);
          m.add_constraint(crit ? "load.cl.q" : "load.nl.q", sfx, qe, Sense::Eq, 0.0);
        }
      }

      // non-critical indicators: gated by the segment, latched once served
      for (int busi : b.nl_buses) {
        const Bus& bus = f.buses[static_cast<size_t>(busi)];
        const std::string sfx = bus.id + "." + to;
        const VarId z = b.id(vn::z_b(bus.id, t, o));
        LinExpr gate;
        gate.add(z, 1.0).add(
            b.id(vn::u_sg(f.segments[static_cast<size_t>(bus.segment)].id, t, o)),
            -1.0);
        m.add_constraint("load.nl.gate", sfx, gate, Sense::Le, 0.0);
        LinExpr latch;
        latch.add(z, 1.0);
        if (t >= 1) latch.add(b.id(vn::z_b(bus.id, t - 1, o)), -1.0);
        m.add_constraint("load.nl.latch", sfx, latch, Sense::Ge, 0.0);
      }

      // PV: fixed-ratio dispatch while the bus is live
      for (int busi : b.pv_buses) {
        const Bus& bus = f.buses[static_cast<size_t>(busi)];
        const int nph = phase_count(bus.phases);
        const double per_ph =
            bus.pv_rating_mw * sc.pv_shape[static_cast<size_t>(t)] / nph;
        for (int p : phase_list(bus.phases)) {
          const std::string sfx = bus.id + "." + vn::ph(p) + "." + to;
          LinExpr pe;
          pe.add(b.id(vn::p_pv(bus.id, p, t, o)), 1.0)
              .add(b.id(vn::u_b(bus.id, t, o)), -per_ph);
          m.add_constraint("pv.p.def", sfx, pe, Sense::Eq, 0.0);
          LinExpr qe;
          qe.add(b.id(vn::q_pv(bus.id, p, t, o)), 1.0)
              .add(b.id(vn::p_pv(bus.id, p, t, o)), -b.cfg.pv_q_ratio);
          m.add_constraint("pv.q.def", sfx, qe, Sense::Eq, 0.0);
        }
      }

      // BESS per-phase apparent-power polygon and the energy account
      for (const auto& [busi, seg] : b.cand_buses) {
        const Bus& bus = f.buses[static_cast<size_t>(busi)];
        const VarId s = b.id(vn::s_nom(bus.id));
        const VarId e = b.id(vn::e_nom(bus.id));
        const VarId env = b.id(vn::en(bus.id, t, o));
        const double rc = std::cos(M_PI / 8.0) / 3.0;
        for (int p = 0; p < 3; ++p)
          for (int j = 0; j < 8; ++j) {
            const double ang = (2.0 * j + 1.0) * M_PI / 8.0;
            LinExpr oct;
            oct.add(b.id(vn::p_bess(bus.id, p, t, o)), std::cos(ang));
            oct.add(b.id(vn::q_bess(bus.id, p, t, o)), std::sin(ang));
            oct.add(s, -rc);
            m.add_constraint("bess.cap.oct",
                             bus.id + "." + vn::ph(p) + ".k" + std::to_string(j) +
                                 "." + to,
                             oct, Sense::Le, 0.0);
          }
        LinExpr rec;
        rec.add(env, 1.0);
        for (int p = 0; p < 3; ++p) rec.add(b.id(vn::p_bess(bus.id, p, t, o)), dt_h);
        if (t == 0) {
          rec.add(e, -safe.soc_init);
          m.add_constraint("bess.energy.init", bus.id + "." + to, rec, Sense::Eq, 0.0);
        } else {
          rec.add(b.id(vn::en(bus.id, t - 1, o)), -1.0);
          m.add_constraint("bess.energy.rec", bus.id + "." + to, rec, Sense::Eq, 0.0);
        }
        LinExpr lo;
        lo.add(env, 1.0).add(e, -safe.soc_lo);
        m.add_constraint("bess.energy.box.lb", bus.id + "." + to, lo, Sense::Ge, 0.0);
        LinExpr hi;
        hi.add(env, 1.0).add(e, -safe.soc_hi);
        m.add_constraint("bess.energy.box.ub", bus.id + "." + to, hi, Sense::Le, 0.0);
      }
    }
  }
}

// Single minimization: investment cost minus probability-weighted restored
// load, integrated over the horizon.
inline void build_objective(ModelBuild& b) {
  const FeederModel& f = *b.feeder;
  auto& m = b.model;
  const auto& wts = b.cfg.weights;
  if (wts.gamma_cl <= 0.0 || wts.gamma_nl <= 0.0)
    throw ConfigError("restoration weights must be positive");
  const double dt_h = b.scenarios->dt_hours();

  LinExpr obj;
  for (int k : b.cand_segs) {
    const int ext = f.segments[static_cast<size_t>(k)].id;
    obj.add(b.id(vn::y_mg(ext)), b.cfg.budgets.cost_fixed);
    obj.add(b.id(vn::s_mg(ext)), b.cfg.budgets.cost_per_mw);
    obj.add(b.id(vn::e_mg(ext)), b.cfg.budgets.cost_per_mwh);
  }
  for (int o = 0; o < b.O; ++o) {
    const Scenario& sc = b.scenarios->scenarios[static_cast<size_t>(o)];
    for (int t = 0; t < b.T; ++t)
      for (const auto& l : f.loads) {
        const Bus& bus = f.buses[static_cast<size_t>(l.bus)];
        const bool crit = l.kind == LoadKind::Critical;
        const double wt =
            sc.probability * dt_h * (crit ? wts.gamma_cl : wts.gamma_nl);
        for (int p : phase_list(l.phases))
          obj.add(b.id(crit ? vn::p_cl(bus.id, p, t, o) : vn::p_nl(bus.id, p, t, o)),
                  -wt);
      }
  }
  m.add_objective_term(obj);
  m.finalize_objective();
}

inline ModelBuild build_model(const FeederModel& feeder, const ScenarioSet& scenarios,
                              const RunConfig& cfg) {
  ModelBuild b;
  b.feeder = &feeder;
  b.scenarios = &scenarios;
  b.cfg = cfg;
  b.cfg.validate();
  b.shape = response_shape(cfg.vsg);
  b.T = scenarios.horizon_steps;
  b.O = static_cast<int>(scenarios.scenarios.size());
  if (b.O == 0) throw ConfigError("scenario set is empty");
  b.model.big_m = cfg.big_m;
  b.model.eps_hz = cfg.eps_hz;

  build_detail::declare_entities(b);
  build_detail::declare_variables(b);
  build_first_stage(b);
  build_switch_constraints(b);
  build_energization_constraints(b);
  build_frequency_constraints(b);
  build_power_flow(b);
  build_resource_constraints(b);
  build_objective(b);
  return b;
}

}  // namespace bsalloc

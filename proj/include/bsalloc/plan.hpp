// Restoration plan: first-stage siting/sizing plus per-scenario trajectories
// of every operational quantity, extracted from a solved model by variable
// name and serializable to a line-oriented text format for the standalone
// auditor.
#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bsalloc/feeder.hpp"
#include "bsalloc/milp_build.hpp"
#include "bsalloc/scenarios.hpp"
#include "bsalloc/solve.hpp"

namespace bsalloc {

struct SitingDecision {
  std::string bus;
  int segment_ext = 0;
  bool installed = false;
  double s_nom_mw = 0.0;
  double e_nom_mwh = 0.0;
};

// One scenario's trajectories. Series keys follow the variable-name suffix
// conventions: branch/bus ids, optionally with ".<phase letter>".
struct PlanTrajectory {
  int scenario_id = 0;
  std::string season;
  int outage_min = 0;
  double probability = 0.0;

  std::map<std::string, std::vector<double>> series;

  const std::vector<double>& at(const std::string& key) const {
    auto it = series.find(key);
    if (it == series.end()) throw std::out_of_range("plan series missing: " + key);
    return it->second;
  }
  bool has(const std::string& key) const { return series.count(key) > 0; }
};

struct RestorationPlan {
  double objective = 0.0;
  double gap = 0.0;
  std::string backend;
  std::vector<SitingDecision> siting;
  std::map<std::string, int> ssw_placement;  // eligible switch id -> 0/1
  std::vector<PlanTrajectory> trajectories;

  double mg_power(const FeederModel& f, int seg_internal) const {
    double s = 0.0;
    for (const auto& sd : siting)
      if (f.buses[static_cast<size_t>(f.bus(sd.bus))].segment == seg_internal &&
          sd.installed)
        s += sd.s_nom_mw;
    return s;
  }
  int installed_count() const {
    int n = 0;
    for (const auto& sd : siting) n += sd.installed ? 1 : 0;
    return n;
  }
};

namespace plan_detail {
inline std::string key1(const std::string& fam, const std::string& id) {
  return fam + " " + id;
}
}  // namespace plan_detail

// Pulls every trajectory out of a solved model. Series are keyed
// "<family> <entity>[.<phase>]" so the plan file reads naturally.
inline RestorationPlan extract_plan(const FeederModel& f, const ScenarioSet& scen,
                                    const SolverResult& res) {
  if (!res.has_values())
    throw std::runtime_error("cannot extract a plan from a valueless solve");
  RestorationPlan plan;
  plan.objective = res.objective;
  plan.gap = res.gap;
  const int T = scen.horizon_steps;
  const int O = static_cast<int>(scen.scenarios.size());

  for (const auto& seg : f.segments)
    for (int bus : seg.candidate_buses) {
      SitingDecision sd;
      sd.bus = f.buses[static_cast<size_t>(bus)].id;
      sd.segment_ext = seg.id;
      sd.installed = res.value(vn::y_bess(sd.bus)) > 0.5;
      sd.s_nom_mw = res.value(vn::s_nom(sd.bus));
      sd.e_nom_mwh = res.value(vn::e_nom(sd.bus));
      plan.siting.push_back(std::move(sd));
    }
  for (const auto& br : f.branches)
    if (br.kind == BranchKind::Switch && br.ssw_eligible)
      plan.ssw_placement[br.id] =
          res.value(vn::y_ssw(br.id)) > 0.5 ? 1 : 0;

  using plan_detail::key1;
  for (int o = 0; o < O; ++o) {
    const Scenario& sc = scen.scenarios[static_cast<size_t>(o)];
    PlanTrajectory tr;
    tr.scenario_id = sc.id;
    tr.season = sc.season;
    tr.outage_min = sc.outage_min;
    tr.probability = sc.probability;
    auto put = [&](const std::string& key, int t, double v) {
      auto& vec = tr.series[key];
      if (vec.empty()) vec.assign(static_cast<size_t>(T), 0.0);
      vec[static_cast<size_t>(t)] = v;
    };
    for (int t = 0; t < T; ++t) {
      for (const auto& seg : f.segments)
        put(key1("seg", vn::seg(seg.id)), t, res.value(vn::u_sg(seg.id, t, o)));
      for (const auto& bus : f.buses)
        put(key1("bus", bus.id), t, res.value(vn::u_b(bus.id, t, o)));
      for (const auto& br : f.branches)
        put(key1("line", br.id), t, res.value(vn::u_l(br.id, t, o)));
      for (const auto& br : f.branches) {
        if (br.kind != BranchKind::Switch) continue;
        put(key1("esw", br.id), t, res.value(vn::u_esw(br.id, t, o)));
        put(key1("ssw", br.id), t, res.value(vn::u_ssw(br.id, t, o)));
        for (int p : phase_list(br.phases)) {
          put(key1("flp", br.id + "." + vn::ph(p)), t, res.value(vn::flp(br.id, p, t, o)));
          put(key1("flq", br.id + "." + vn::ph(p)), t, res.value(vn::flq(br.id, p, t, o)));
        }
      }
      for (const auto& br : f.branches) {
        if (br.kind != BranchKind::Line) continue;
        for (int p : phase_list(br.phases)) {
          put(key1("flp", br.id + "." + vn::ph(p)), t, res.value(vn::flp(br.id, p, t, o)));
          put(key1("flq", br.id + "." + vn::ph(p)), t, res.value(vn::flq(br.id, p, t, o)));
        }
      }
      for (const auto& bus : f.buses)
        for (int p : phase_list(bus.phases))
          put(key1("v", bus.id + "." + vn::ph(p)), t, res.value(vn::v(bus.id, p, t, o)));

      for (const auto& l : f.loads) {
        const Bus& bus = f.buses[static_cast<size_t>(l.bus)];
        const bool crit = l.kind == LoadKind::Critical;
        for (int p : phase_list(l.phases)) {
          const std::string suffix = bus.id + "." + vn::ph(p);
          if (crit) {
            put(key1("pcl", suffix), t, res.value(vn::p_cl(bus.id, p, t, o)));
            put(key1("qcl", suffix), t, res.value(vn::q_cl(bus.id, p, t, o)));
          } else {
            put(key1("pnl", suffix), t, res.value(vn::p_nl(bus.id, p, t, o)));
            put(key1("qnl", suffix), t, res.value(vn::q_nl(bus.id, p, t, o)));
          }
        }
        if (!crit) put(key1("z", bus.id), t, res.value(vn::z_b(bus.id, t, o)));
      }
      for (const auto& bus : f.buses) {
        if (bus.pv_rating_mw <= 0.0) continue;
        for (int p : phase_list(bus.phases)) {
          put(key1("ppv", bus.id + "." + vn::ph(p)), t, res.value(vn::p_pv(bus.id, p, t, o)));
          put(key1("qpv", bus.id + "." + vn::ph(p)), t, res.value(vn::q_pv(bus.id, p, t, o)));
        }
      }
      for (const auto& seg : f.segments)
        for (int busi : seg.candidate_buses) {
          const Bus& bus = f.buses[static_cast<size_t>(busi)];
          for (int p = 0; p < 3; ++p) {
            put(key1("pbess", bus.id + "." + vn::ph(p)), t,
                res.value(vn::p_bess(bus.id, p, t, o)));
            put(key1("qbess", bus.id + "." + vn::ph(p)), t,
                res.value(vn::q_bess(bus.id, p, t, o)));
          }
          put(key1("en", bus.id), t, res.value(vn::en(bus.id, t, o)));
          put(key1("dvinc", bus.id), t, res.value(vn::dv_inc(bus.id, t, o)));
        }
      for (int busi : f.tg_buses) {
        const Bus& bus = f.buses[static_cast<size_t>(busi)];
        put(key1("tg", bus.id), t, res.value(vn::u_tg(bus.id, t, o)));
        for (int p = 0; p < 3; ++p) {
          put(key1("ptg", bus.id + "." + vn::ph(p)), t, res.value(vn::p_tg(bus.id, p, t, o)));
          put(key1("qtg", bus.id + "." + vn::ph(p)), t, res.value(vn::q_tg(bus.id, p, t, o)));
        }
      }
      for (const auto& seg : f.segments) {
        if (!seg.is_candidate_mg) continue;
        const int ext = seg.id;
        // MG frequency trajectories come from the exact scaled channel; the
        // unscaled coupling variable is kept alongside for diagnostics.
        double snom = 0.0;
        for (const auto& sd : plan.siting)
          if (sd.segment_ext == ext && sd.installed) snom += sd.s_nom_mw;
        auto unscale = [&](double v) { return snom > 0.0 ? v / snom : 0.0; };
        put(key1("fmg", vn::seg(ext)), t, unscale(res.value(vn::fx_mg(ext, t, o))));
        put(key1("fcpl", vn::seg(ext)), t, res.value(vn::f_mg(ext, t, o)));
        put(key1("pmg", vn::seg(ext)), t, res.value(vn::p_mg(ext, t, o)));
        if (t >= 1) {
          put(key1("fqss", vn::seg(ext)), t,
              unscale(res.value(vn::fx_qss(ext, t, o))));
          put(key1("fnad", vn::seg(ext)), t,
              unscale(res.value(vn::fx_nad(ext, t, o))));
          const double dpv = res.value(vn::dp_mg(ext, t, o));
          put(key1("froc", vn::seg(ext)), t, res.value(vn::f_roc(ext, t, o)));
          put(key1("wpu", vn::seg(ext)), t, res.value(vn::w_pu(ext, t, o)));
          put(key1("dp", vn::seg(ext)), t, dpv);
          put(key1("adj", vn::seg(ext)), t, unscale(res.value(vn::aj_mg(ext, t, o))));
        }
      }
      {
        std::set<int> fset;
        for (const auto& br : f.branches)
          if (br.kind == BranchKind::Switch) {
            fset.insert(br.from);
            fset.insert(br.to);
          }
        for (int busi : f.tg_buses) fset.insert(busi);
        for (int busi : fset)
          put(key1("fbus", f.buses[static_cast<size_t>(busi)].id), t,
              res.value(vn::f_bus(f.buses[static_cast<size_t>(busi)].id, t, o)));
      }
      put("roots total", t, res.value(vn::r_roots(t, o)));
    }
    plan.trajectories.push_back(std::move(tr));
  }
  return plan;
}

inline void write_plan(const RestorationPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plan: " + path);
  out.precision(17);
  out << "plan v1\n";
  out << "objective " << plan.objective << "\n";
  out << "gap " << plan.gap << "\n";
  if (!plan.backend.empty()) out << "backend " << plan.backend << "\n";
  for (const auto& sd : plan.siting)
    out << "siting " << sd.bus << " " << sd.segment_ext << " " << (sd.installed ? 1 : 0)
        << " " << sd.s_nom_mw << " " << sd.e_nom_mwh << "\n";
  for (const auto& [br, placed] : plan.ssw_placement)
    out << "sswplace " << br << " " << placed << "\n";
  for (const auto& tr : plan.trajectories) {
    out << "scenario " << tr.scenario_id << " " << tr.season << " " << tr.outage_min
        << " " << tr.probability << "\n";
    for (const auto& [key, vec] : tr.series) {
      out << "row " << key;
      for (double v : vec) out << " " << v;
      out << "\n";
    }
  }
  if (!out.good()) throw std::runtime_error("plan write failed: " + path);
}

inline RestorationPlan read_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plan: " + path);
  RestorationPlan plan;
  std::string line;
  if (!std::getline(in, line) || line.rfind("plan v1", 0) != 0)
    throw std::runtime_error(path + ": not a plan file");
  PlanTrajectory* cur = nullptr;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    if (key == "objective")
      ss >> plan.objective;
    else if (key == "gap")
      ss >> plan.gap;
    else if (key == "backend")
      ss >> plan.backend;
    else if (key == "siting") {
      SitingDecision sd;
      int inst = 0;
      ss >> sd.bus >> sd.segment_ext >> inst >> sd.s_nom_mw >> sd.e_nom_mwh;
      sd.installed = inst != 0;
      plan.siting.push_back(std::move(sd));
    } else if (key == "sswplace") {
      std::string br;
      int placed;
      ss >> br >> placed;
      plan.ssw_placement[br] = placed;
    } else if (key == "scenario") {
      PlanTrajectory tr;
      ss >> tr.scenario_id >> tr.season >> tr.outage_min >> tr.probability;
      plan.trajectories.push_back(std::move(tr));
      cur = &plan.trajectories.back();
    } else if (key == "row") {
      if (!cur) throw std::runtime_error(path + ": row before scenario");
      std::string fam, ent;
      ss >> fam >> ent;
      std::vector<double> vals;
      for (double v; ss >> v;) vals.push_back(v);
      cur->series[fam + " " + ent] = std::move(vals);
    } else {
      throw std::runtime_error(path + ": unknown record " + key);
    }
  }
  return plan;
}

}  // namespace bsalloc

// Run configuration: every knob of the planning pipeline in one JSON
// document. Field defaults mirror the reference study setup; fixtures
// override what they need.
#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bsalloc/clpu.hpp"
#include "bsalloc/scenarios.hpp"
#include "bsalloc/vsg.hpp"

namespace bsalloc {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct Budgets {
  double s_budget_mw = 6.5;
  double e_budget_mwh = 10.0;
  double s_min_mw = 0.1, s_max_mw = 6.5;
  double e_min_mwh = 1.0, e_max_mwh = 10.0;
  double cost_fixed = 1.0, cost_per_mw = 1.0, cost_per_mwh = 1.0;
};

struct SafeRanges {
  double freq_lo_hz = 59.5, freq_hi_hz = 60.5;
  double qss_lo_hz = 59.5, qss_hi_hz = 60.5;
  double nadir_lo_hz = 57.8, nadir_hi_hz = 61.8;
  double rocof_lo_hz_s = -4.0, rocof_hi_hz_s = 4.0;
  double v_lo_pu = 0.95, v_hi_pu = 1.05;
  double soc_lo = 0.1, soc_hi = 0.9, soc_init = 0.9;
};

struct ObjectiveWeights {
  double gamma_cl = 10.0;
  double gamma_nl = 1.0;
};

struct SolverBackend {
  std::string name = "highs";
  // Command template; placeholders {script_dir} {model} {solution}
  // {time_limit} {gap} are substituted at spawn time.
  std::string command =
      "python3 {script_dir}/solve_highs.py {model} {solution} "
      "--time-limit {time_limit} --gap {gap}";
};

struct RunConfig {
  std::string feeder_path;
  std::string seasons_file;  // empty: synthesize from seed
  OutageDistribution outages{{60, 120, 180, 240}, {0.1340, 0.4290, 0.2733, 0.1637}};
  int horizon_steps = 21;
  int dt_min = 15;
  int start_minutes = 8 * 60 + 45;
  std::uint64_t seed = 1;

  VsgParams vsg;
  ClpuCoefficients clpu;
  Budgets budgets;
  SafeRanges safe;
  ObjectiveWeights weights;

  double eps_hz = 0.02;
  double big_m = 1.0e4;
  double tg_s_max_mva = 10.0;
  double pv_q_ratio = 0.352;

  SolverBackend backend;
  double time_limit_s = 600.0;
  double gap = 0.01;
  std::string out_dir = "out";
  int parallelism = 2;

  void validate() const {
    vsg.validate();
    clpu.validate();
    outages.validate();
    if (horizon_steps <= 0 || dt_min <= 0) throw ConfigError("bad horizon");
    if (budgets.s_min_mw > budgets.s_max_mw || budgets.e_min_mwh > budgets.e_max_mwh)
      throw ConfigError("per-unit sizing bounds are inverted");
    auto ordered = [](double lo, double hi) { return lo < hi; };
    if (!ordered(safe.freq_lo_hz, safe.freq_hi_hz) ||
        !ordered(safe.qss_lo_hz, safe.qss_hi_hz) ||
        !ordered(safe.nadir_lo_hz, safe.nadir_hi_hz) ||
        !ordered(safe.rocof_lo_hz_s, safe.rocof_hi_hz_s) ||
        !ordered(safe.v_lo_pu, safe.v_hi_pu) || !ordered(safe.soc_lo, safe.soc_hi))
      throw ConfigError("safe ranges must be ordered lo < hi");
    if (safe.soc_init < safe.soc_lo || safe.soc_init > safe.soc_hi)
      throw ConfigError("initial SoC outside the SoC box");
    if (weights.gamma_cl <= 0.0 || weights.gamma_nl <= 0.0)
      throw ConfigError("restoration weights must be positive");
    if (eps_hz <= 0.0) throw ConfigError("eps must be positive");
    if (tg_s_max_mva <= 0.0) throw ConfigError("TG rating must be positive");
  }

  double dt_hours() const { return dt_min / 60.0; }
};

namespace detail {
template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}
}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir = "") {
  RunConfig c;
  auto resolve = [&base_dir](std::string p) {
    if (p.empty() || p.front() == '/' || base_dir.empty()) return p;
    return base_dir + "/" + p;
  };
  if (j.contains("feeder")) c.feeder_path = resolve(j.at("feeder").get<std::string>());
  if (j.contains("seasons_file"))
    c.seasons_file = resolve(j.at("seasons_file").get<std::string>());
  detail::maybe(j, "horizon_steps", c.horizon_steps);
  detail::maybe(j, "dt_min", c.dt_min);
  detail::maybe(j, "start_minutes", c.start_minutes);
  detail::maybe(j, "seed", c.seed);
  detail::maybe(j, "eps_hz", c.eps_hz);
  detail::maybe(j, "big_m", c.big_m);
  detail::maybe(j, "tg_s_max_mva", c.tg_s_max_mva);
  detail::maybe(j, "pv_q_ratio", c.pv_q_ratio);
  detail::maybe(j, "time_limit_s", c.time_limit_s);
  detail::maybe(j, "gap", c.gap);
  detail::maybe(j, "out_dir", c.out_dir);
  detail::maybe(j, "parallelism", c.parallelism);

  if (j.contains("outage_pmf")) {
    const auto& o = j.at("outage_pmf");
    c.outages.durations_min = o.at("durations_min").get<std::vector<int>>();
    c.outages.probabilities = o.at("probabilities").get<std::vector<double>>();
  } else {
    c.outages.durations_min = {60, 120, 180, 240};
    c.outages.probabilities = {0.1340, 0.4290, 0.2733, 0.1637};
  }
  if (j.contains("vsg")) {
    const auto& v = j.at("vsg");
    detail::maybe(v, "inertia_s", c.vsg.inertia_s);
    detail::maybe(v, "pll_time_const_s", c.vsg.pll_time_const_s);
    detail::maybe(v, "damping", c.vsg.damping);
    detail::maybe(v, "droop_gain", c.vsg.droop_gain);
    detail::maybe(v, "base_freq_hz", c.vsg.base_freq_hz);
  }
  if (j.contains("clpu")) {
    const auto& b = j.at("clpu").at("beta");
    if (!b.is_array() || b.size() != 3) throw ConfigError("clpu.beta must have 3 entries");
    c.clpu.beta1 = b[0].get<double>();
    c.clpu.beta2 = b[1].get<double>();
    c.clpu.beta3 = b[2].get<double>();
  }
  if (j.contains("budgets")) {
    const auto& b = j.at("budgets");
    detail::maybe(b, "s_budget_mw", c.budgets.s_budget_mw);
    detail::maybe(b, "e_budget_mwh", c.budgets.e_budget_mwh);
    detail::maybe(b, "s_min_mw", c.budgets.s_min_mw);
    detail::maybe(b, "s_max_mw", c.budgets.s_max_mw);
    detail::maybe(b, "e_min_mwh", c.budgets.e_min_mwh);
    detail::maybe(b, "e_max_mwh", c.budgets.e_max_mwh);
    detail::maybe(b, "cost_fixed", c.budgets.cost_fixed);
    detail::maybe(b, "cost_per_mw", c.budgets.cost_per_mw);
    detail::maybe(b, "cost_per_mwh", c.budgets.cost_per_mwh);
  }
  if (j.contains("safe")) {
    const auto& s = j.at("safe");
    detail::maybe(s, "freq_lo_hz", c.safe.freq_lo_hz);
    detail::maybe(s, "freq_hi_hz", c.safe.freq_hi_hz);
    detail::maybe(s, "qss_lo_hz", c.safe.qss_lo_hz);
    detail::maybe(s, "qss_hi_hz", c.safe.qss_hi_hz);
    detail::maybe(s, "nadir_lo_hz", c.safe.nadir_lo_hz);
    detail::maybe(s, "nadir_hi_hz", c.safe.nadir_hi_hz);
    detail::maybe(s, "rocof_lo_hz_s", c.safe.rocof_lo_hz_s);
    detail::maybe(s, "rocof_hi_hz_s", c.safe.rocof_hi_hz_s);
    detail::maybe(s, "v_lo_pu", c.safe.v_lo_pu);
    detail::maybe(s, "v_hi_pu", c.safe.v_hi_pu);
    detail::maybe(s, "soc_lo", c.safe.soc_lo);
    detail::maybe(s, "soc_hi", c.safe.soc_hi);
    detail::maybe(s, "soc_init", c.safe.soc_init);
  }
  if (j.contains("weights")) {
    detail::maybe(j.at("weights"), "gamma_cl", c.weights.gamma_cl);
    detail::maybe(j.at("weights"), "gamma_nl", c.weights.gamma_nl);
  }
  if (j.contains("backend")) {
    const auto& b = j.at("backend");
    detail::maybe(b, "name", c.backend.name);
    detail::maybe(b, "command", c.backend.command);
  }
  c.validate();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  auto slash = path.find_last_of('/');
  const std::string base = slash == std::string::npos ? "" : path.substr(0, slash);
  return parse_config(j, base);
}

// Builds the scenario set described by the config: file-backed season curves
// when given, synthesized otherwise.
inline ScenarioSet make_scenarios(const RunConfig& c) {
  std::vector<SeasonProfile> seasons;
  if (!c.seasons_file.empty()) {
    seasons = load_season_profiles(c.seasons_file);
    for (const auto& s : seasons)
      if (static_cast<int>(s.load_shape.size()) != c.horizon_steps)
        throw ConfigError("season " + s.label + " series length != horizon");
  } else {
    seasons = synthesize_season_profiles(c.seed, c.horizon_steps, c.dt_min,
                                         c.start_minutes);
  }
  return build_scenarios(seasons, c.outages, c.horizon_steps, c.dt_min);
}

}  // namespace bsalloc

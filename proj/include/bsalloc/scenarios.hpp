// Scenario construction: season-dependent load/PV profiles crossed with a
// discrete distribution of transmission-grid outage durations. Profiles are
// either synthesized (Beta-distributed PV output, Normal load perturbations,
// deterministic per seed) or loaded from a file with the same series schema.
#pragma once

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsalloc {

struct SeasonProfile {
  std::string label;               // SP, SU, AU, W
  std::vector<double> load_shape;  // per-step demand multiplier, > 0
  std::vector<double> pv_shape;    // per-step output ratio in [0, 1]
};

struct OutageDistribution {
  std::vector<int> durations_min;
  std::vector<double> probabilities;

  void validate() const {
    if (durations_min.size() != probabilities.size() || durations_min.empty())
      throw std::invalid_argument("outage distribution is empty or ragged");
    double sum = 0.0;
    for (double p : probabilities) {
      if (p < 0.0) throw std::invalid_argument("negative outage probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("outage probabilities sum to " + std::to_string(sum));
  }
};

struct Scenario {
  int id = 0;
  std::string season;
  int outage_min = 0;
  double probability = 0.0;
  std::vector<char> tg_available;  // 0 until the outage ends, then 1
  std::vector<double> load_shape;
  std::vector<double> pv_shape;
};

struct ScenarioSet {
  int horizon_steps = 0;
  int dt_min = 15;
  std::vector<Scenario> scenarios;

  double dt_hours() const { return dt_min / 60.0; }
};

inline ScenarioSet build_scenarios(const std::vector<SeasonProfile>& seasons,
                                   const OutageDistribution& outages,
                                   int horizon_steps, int dt_min) {
  if (seasons.empty()) throw std::invalid_argument("no season profiles");
  outages.validate();
  if (horizon_steps <= 0 || dt_min <= 0)
    throw std::invalid_argument("horizon and step length must be positive");
  for (const auto& s : seasons) {
    if (static_cast<int>(s.load_shape.size()) != horizon_steps ||
        static_cast<int>(s.pv_shape.size()) != horizon_steps)
      throw std::invalid_argument("season series length mismatch for " + s.label);
    for (double v : s.load_shape)
      if (!(v > 0.0)) throw std::invalid_argument("load shape must be positive");
    for (double v : s.pv_shape)
      if (v < 0.0 || v > 1.0) throw std::invalid_argument("pv shape outside [0,1]");
  }
  for (int d : outages.durations_min)
    if (d <= 0 || d % dt_min != 0)
      throw std::invalid_argument("outage durations must be positive multiples of dt");

  ScenarioSet set;
  set.horizon_steps = horizon_steps;
  set.dt_min = dt_min;
  const double season_prob = 1.0 / static_cast<double>(seasons.size());
  int id = 0;
  for (const auto& s : seasons)
    for (size_t d = 0; d < outages.durations_min.size(); ++d) {
      Scenario sc;
      sc.id = id++;
      sc.season = s.label;
      sc.outage_min = outages.durations_min[d];
      sc.probability = season_prob * outages.probabilities[d];
      sc.load_shape = s.load_shape;
      sc.pv_shape = s.pv_shape;
      sc.tg_available.resize(static_cast<size_t>(horizon_steps));
      for (int t = 0; t < horizon_steps; ++t)
        sc.tg_available[static_cast<size_t>(t)] = t * dt_min >= sc.outage_min ? 1 : 0;
      set.scenarios.push_back(std::move(sc));
    }
  return set;
}

// Synthetic season curves. PV output is a daylight bell scaled by Beta
// samples whose mean is ordered summer > spring > autumn > winter; load is a
// season-shaped base with clamped Normal perturbations. Identical seeds give
// identical profiles.
inline std::vector<SeasonProfile> synthesize_season_profiles(
    std::uint64_t seed, int horizon_steps, int dt_min, int start_minutes = 8 * 60 + 45) {
  if (horizon_steps <= 0 || dt_min <= 0)
    throw std::invalid_argument("horizon and step length must be positive");
  std::mt19937_64 rng(seed);

  struct SeasonCfg {
    const char* label;
    double pv_mean;    // target mean of the Beta irradiance factor
    double load_base;  // base demand multiplier
  };
  const SeasonCfg cfg[4] = {{"SP", 0.70, 0.85},
                            {"SU", 0.85, 1.00},
                            {"AU", 0.55, 0.80},
                            {"W", 0.35, 0.90}};

  auto beta_sample = [&rng](double mean, double conc) {
    const double a = mean * conc, b = (1.0 - mean) * conc;
    std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
    const double x = ga(rng), y = gb(rng);
    return x + y > 0.0 ? x / (x + y) : 0.0;
  };

  std::vector<SeasonProfile> out;
  for (const auto& c : cfg) {
    SeasonProfile p;
    p.label = c.label;
    std::normal_distribution<double> load_noise(0.0, 0.04);
    for (int t = 0; t < horizon_steps; ++t) {
      const double minute = static_cast<double>(start_minutes + t * dt_min);
      // daylight bell over 06:00..18:00
      const double frac = (minute - 360.0) / 720.0;
      double bell = 0.0;
      if (frac > 0.0 && frac < 1.0) bell = std::sin(frac * M_PI);
      const double eta = bell * beta_sample(c.pv_mean, 18.0);
      p.pv_shape.push_back(std::min(1.0, std::max(0.0, eta)));
      // gentle morning ramp on top of the season base
      const double ramp = 1.0 + 0.10 * std::sin((minute - 300.0) / 1440.0 * 2.0 * M_PI);
      const double mult = c.load_base * ramp * (1.0 + load_noise(rng));
      p.load_shape.push_back(std::max(0.05, mult));
    }
    out.push_back(std::move(p));
  }
  return out;
}

// File schema: one record per season, "season <label> load=<v,..> pv=<v,..>",
// '#' comments allowed. Series must match the configured horizon.
inline std::vector<SeasonProfile> load_season_profiles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open seasons file: " + path);
  std::vector<SeasonProfile> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ss(line);
    std::string kind;
    if (!(ss >> kind)) continue;
    if (kind != "season")
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 'season' record");
    SeasonProfile p;
    ss >> p.label;
    std::string tok;
    while (ss >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": bad attribute " + tok);
      const std::string key = tok.substr(0, eq);
      std::vector<double>* dst = key == "load" ? &p.load_shape
                                : key == "pv"  ? &p.pv_shape
                                               : nullptr;
      if (!dst)
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": unknown attribute " + key);
      std::istringstream vs(tok.substr(eq + 1));
      std::string num;
      while (std::getline(vs, num, ',')) dst->push_back(std::stod(num));
    }
    if (p.label.empty() || p.load_shape.empty() || p.pv_shape.empty())
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": season needs label, load= and pv=");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace bsalloc

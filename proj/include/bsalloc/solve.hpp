// Process-boundary solver interface: the model goes out as an exchange file,
// a backend adapter is spawned from a command template, and the solution
// comes back through a small line protocol. The core stays solver-agnostic;
// adapters live in tools/.
#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "bsalloc/config.hpp"
#include "bsalloc/linexpr.hpp"
#include "bsalloc/mps.hpp"

namespace bsalloc {

enum class SolveStatus { Optimal, Feasible, Infeasible, Unbounded, Timeout, Error };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Timeout: return "timeout";
    default: return "error";
  }
}

struct SolverResult {
  SolveStatus status = SolveStatus::Error;
  double objective = 0.0;
  double gap = 0.0;
  double wall_time_s = 0.0;
  std::unordered_map<std::string, double> values;
  std::string message;

  bool has_values() const {
    return status == SolveStatus::Optimal || status == SolveStatus::Feasible;
  }
  double value(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) throw std::out_of_range("no value for " + name);
    return it->second;
  }
};

struct SolveLimits {
  double time_limit_s = 600.0;
  double gap = 0.0;
};

// Directory holding the backend adapter scripts: environment override first,
// then the build-time default.
inline std::string tools_dir() {
  if (const char* env = std::getenv("BSALLOC_TOOLS_DIR"); env && *env) return env;
#ifdef BSALLOC_TOOLS_DIR
  return BSALLOC_TOOLS_DIR;
#else
  return "tools";
#endif
}

namespace detail {
inline void replace_all(std::string& s, const std::string& key, const std::string& val) {
  for (size_t pos = 0; (pos = s.find(key, pos)) != std::string::npos; pos += val.size())
    s.replace(pos, key.size(), val);
}
}  // namespace detail

inline std::string render_backend_command(const SolverBackend& backend,
                                          const std::string& model_path,
                                          const std::string& solution_path,
                                          const SolveLimits& limits) {
  std::string cmd = backend.command;
  detail::replace_all(cmd, "{script_dir}", tools_dir());
  detail::replace_all(cmd, "{model}", model_path);
  detail::replace_all(cmd, "{solution}", solution_path);
  detail::replace_all(cmd, "{time_limit}", std::to_string(limits.time_limit_s));
  detail::replace_all(cmd, "{gap}", std::to_string(limits.gap));
  return cmd;
}

inline SolverResult parse_solution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    SolverResult r;
    r.message = "no solution file at " + path;
    return r;
  }
  SolverResult r;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "status") {
      std::string s;
      ss >> s;
      if (s == "optimal")
        r.status = SolveStatus::Optimal;
      else if (s == "feasible")
        r.status = SolveStatus::Feasible;
      else if (s == "infeasible")
        r.status = SolveStatus::Infeasible;
      else if (s == "unbounded")
        r.status = SolveStatus::Unbounded;
      else if (s == "timeout")
        r.status = SolveStatus::Timeout;
      else {
        r.status = SolveStatus::Error;
        r.message = "backend status: " + s;
      }
    } else if (key == "objective") {
      ss >> r.objective;
    } else if (key == "gap") {
      ss >> r.gap;
    } else if (key == "var") {
      std::string name;
      double val;
      ss >> name >> val;
      r.values.emplace(std::move(name), val);
    }
  }
  return r;
}

// Runs one solve end to end. Writes <workdir>/<tag>.mps, spawns the backend,
// parses the protocol, snaps binaries (rejecting anything farther than 1e-6
// from an integer) and recomputes the objective from the model expression.
inline SolverResult solve(const MilpModel& model, const SolverBackend& backend,
                          const SolveLimits& limits, const std::string& workdir,
                          const std::string& tag = "model") {
  namespace fs = std::filesystem;
  fs::create_directories(workdir);
  const std::string model_path = workdir + "/" + tag + ".mps";
  const std::string sol_path = workdir + "/" + tag + ".sol";
  const std::string log_path = workdir + "/" + tag + ".log";
  std::error_code ec;
  fs::remove(sol_path, ec);
  write_exchange_file(model, model_path);

  const std::string cmd = render_backend_command(backend, model_path, sol_path, limits) +
                          " > " + log_path + " 2>&1";
  const auto start = std::chrono::steady_clock::now();
  const int rc = std::system(cmd.c_str());
  const auto stop = std::chrono::steady_clock::now();

  SolverResult r = parse_solution_file(sol_path);
  r.wall_time_s = std::chrono::duration<double>(stop - start).count();
  if (rc != 0 && r.status != SolveStatus::Infeasible &&
      r.status != SolveStatus::Unbounded) {
    r.status = SolveStatus::Error;
    r.message = "backend exited with code " + std::to_string(rc) + " (" + cmd + ")";
    return r;
  }
  if (!r.has_values()) {
    r.values.clear();
    return r;
  }

  // integer feasibility on ingest
  const auto& cat = model.vars();
  std::vector<double> x(cat.size(), 0.0);
  for (size_t i = 0; i < cat.size(); ++i) {
    const VarInfo& vi = cat.info(static_cast<VarId>(i));
    auto it = r.values.find(vi.name);
    if (it == r.values.end()) {
      r.status = SolveStatus::Error;
      r.message = "solution missing variable " + vi.name;
      return r;
    }
    double val = it->second;
    if (vi.kind == VarKind::Binary) {
      const double snapped = std::round(val);
      if (std::abs(val - snapped) > 1e-6) {
        r.status = SolveStatus::Error;
        r.message = "integer feasibility violated at " + vi.name + " = " +
                    std::to_string(val);
        return r;
      }
      val = snapped;
      it->second = snapped;
    }
    x[i] = val;
  }
  r.objective = model.objective().evaluate(x);
  return r;
}

}  // namespace bsalloc

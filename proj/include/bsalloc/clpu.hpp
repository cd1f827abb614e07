// Cold-load-pick-up staircase model. Restored load is the nominal demand
// scaled by a decaying multiplier driven by the energization indicator
// history; critical loads bind to their segment status, non-critical loads
// to a dedicated per-bus indicator that may lag the segment.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bsalloc {

struct ClpuCoefficients {
  double beta1 = 0.6, beta2 = 0.3, beta3 = 0.1;

  void validate() const {
    if (!(beta1 >= beta2 && beta2 >= beta3 && beta3 >= 0.0))
      throw std::invalid_argument("CLPU coefficients must satisfy b1 >= b2 >= b3 >= 0");
  }
  // Peak multiplier right at energization.
  double surge() const { return 1.0 + beta1; }
};

// Weights on the last four status samples (u_{t-3}, u_{t-2}, u_{t-1}, u_t)
// such that multiplier_t = sum_i w[i] * u_{t-3+i}. Samples before the horizon
// start are zero (system begins blacked out).
inline std::array<double, 4> clpu_weights(const ClpuCoefficients& b) {
  b.validate();
  return {-b.beta3, b.beta3 - b.beta2, b.beta2 - b.beta1, 1.0 + b.beta1};
}

// Multiplier from an explicit four-sample history window. A window of all
// ones (service predating the horizon) collapses to exactly 1.
inline double clpu_multiplier(const std::array<double, 4>& window,
                              const ClpuCoefficients& b) {
  const auto w = clpu_weights(b);
  double acc = 0.0;
  for (size_t i = 0; i < 4; ++i) acc += w[i] * window[i];
  return acc;
}

// Numeric multiplier at step t of a 0/1 energization trajectory starting
// from a blacked-out system: samples before the horizon are zero. The
// trajectory must be monotone non-decreasing (energization is irreversible).
inline double clpu_multiplier(const std::vector<double>& status, size_t t,
                              const ClpuCoefficients& b) {
  if (t >= status.size()) throw std::out_of_range("step beyond trajectory");
  std::array<double, 4> window{};
  for (int i = 0; i < 4; ++i) {
    const long idx = static_cast<long>(t) - 3 + i;
    window[static_cast<size_t>(i)] = idx < 0 ? 0.0 : status[static_cast<size_t>(idx)];
  }
  return clpu_multiplier(window, b);
}

// Restored active/reactive power trajectory for one load given its nominal
// per-step demand and the energization indicator it binds to. Used for
// direct evaluation and by the plan auditor; the optimizer builds the same
// expression symbolically from clpu_weights.
struct RestoredLoad {
  std::vector<double> p_mw;
  std::vector<double> q_mvar;
};

inline RestoredLoad restored_load_series(const std::vector<double>& nominal_p_mw,
                                         const std::vector<double>& status,
                                         double pf_angle_rad,
                                         const ClpuCoefficients& b) {
  if (nominal_p_mw.size() != status.size())
    throw std::invalid_argument("nominal and status series lengths differ");
  for (size_t t = 1; t < status.size(); ++t)
    if (status[t] < status[t - 1])
      throw std::invalid_argument("energization status must be non-decreasing");
  RestoredLoad out;
  out.p_mw.resize(status.size());
  out.q_mvar.resize(status.size());
  const double tan_theta = std::tan(pf_angle_rad);
  for (size_t t = 0; t < status.size(); ++t) {
    out.p_mw[t] = nominal_p_mw[t] * clpu_multiplier(status, t, b);
    out.q_mvar[t] = out.p_mw[t] * tan_theta;
  }
  return out;
}

}  // namespace bsalloc

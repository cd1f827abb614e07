// Frequency response of a VSG-controlled grid-forming inverter with a
// droop-based primary governor: closed-form second-order shape parameters,
// transient indices per disturbance, and an independent fixed-step ODE
// integrator used as the numerical cross-check throughout the test suite
// and the plan auditor.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bsalloc {

struct VsgParams {
  double inertia_s = 8.0;          // H
  double pll_time_const_s = 0.05;  // T_PLL
  double damping = 1.0;            // D_p, per unit
  double droop_gain = 89.0;        // K_fp, per unit
  double base_freq_hz = 60.0;

  void validate() const {
    if (!(inertia_s > 0.0)) throw std::invalid_argument("inertia must be > 0");
    if (!(pll_time_const_s > 0.0))
      throw std::invalid_argument("PLL time constant must be > 0");
    if (damping < 0.0) throw std::invalid_argument("damping must be >= 0");
    if (droop_gain < 0.0) throw std::invalid_argument("droop gain must be >= 0");
    if (damping + droop_gain <= 0.0)
      throw std::invalid_argument("damping + droop must be > 0");
    if (!(base_freq_hz > 0.0)) throw std::invalid_argument("base frequency must be > 0");
  }

  double stiffness() const { return damping + droop_gain; }
};

// Second-order response parameters plus the nadir bookkeeping constants.
// For overdamped parameterizations the response has no overshoot; the
// damped-oscillation fields are zeroed and `overdamped` is set.
struct ResponseShape {
  double natural_freq_rad = 0.0;  // omega_n
  double damping_ratio = 0.0;     // xi
  double damped_freq_rad = 0.0;   // omega_r (0 when overdamped)
  double nadir_time_s = 0.0;      // first extremum time (0 when overdamped)
  double nadir_ratio = 0.0;       // lambda: overshoot beyond the QSS deviation
  double alpha = 0.0;
  bool overdamped = false;
};

inline ResponseShape response_shape(const VsgParams& p) {
  p.validate();
  ResponseShape s;
  const double wn2 = p.stiffness() / (2.0 * p.inertia_s * p.pll_time_const_s);
  s.natural_freq_rad = std::sqrt(wn2);
  s.damping_ratio = s.natural_freq_rad *
                    (2.0 * p.inertia_s + p.damping * p.pll_time_const_s) /
                    (2.0 * p.stiffness());
  if (s.damping_ratio >= 1.0) {
    s.overdamped = true;
    return s;
  }
  const double xi = s.damping_ratio, wn = s.natural_freq_rad,
               T = p.pll_time_const_s;
  s.damped_freq_rad = wn * std::sqrt(1.0 - xi * xi);
  // atan2 with positive numerator lands in (0, pi): the first strictly
  // positive root of the derivative, i.e. the principal value shifted by pi
  // whenever xi*wn*T < 1.
  const double theta = std::atan2(s.damped_freq_rad * T, xi * wn * T - 1.0);
  s.nadir_time_s = theta / s.damped_freq_rad;
  // 1 - 2*T*xi*wn + (T*wn)^2 == (1 - T*xi*wn)^2 + (T*wn)^2 (1 - xi^2) >= 0
  const double num = 1.0 - 2.0 * T * xi * wn + T * T * wn * wn;
  s.alpha = std::sqrt(std::max(num, 0.0) / (1.0 - xi * xi));
  s.nadir_ratio = s.alpha * std::sqrt(1.0 - xi * xi) *
                  std::exp(-xi * wn * s.nadir_time_s);
  return s;
}

// Transient indices for a step change `delta_p_mw` in BESS electrical output
// (load pick-up positive) on a unit rated at `s_nom_mw`.
struct FreqIndices {
  double rocof_hz_s = 0.0;
  double qss_hz = 0.0;
  double nadir_hz = 0.0;
};

inline FreqIndices freq_indices(const VsgParams& p, const ResponseShape& shape,
                                double f_prev_hz, double delta_p_mw,
                                double s_nom_mw) {
  if (!(s_nom_mw > 0.0)) throw std::invalid_argument("s_nom must be > 0");
  const double dpu = delta_p_mw / s_nom_mw;
  FreqIndices out;
  out.rocof_hz_s = -dpu / (2.0 * p.inertia_s) * p.base_freq_hz;
  const double qss_dev = dpu / p.stiffness();
  out.qss_hz = f_prev_hz - qss_dev * p.base_freq_hz;
  out.nadir_hz = f_prev_hz - qss_dev * (1.0 + shape.nadir_ratio) * p.base_freq_hz;
  return out;
}

// Fixed-step RK4 integration of the second-order transfer function under a
// step of -delta_p_pu. Returns the per-unit frequency deviation sampled at
// t = 0, dt, 2*dt, ... up to the horizon.
inline std::vector<double> step_response_oracle(const VsgParams& p,
                                                double delta_p_pu,
                                                double horizon_s, double dt_s) {
  p.validate();
  const double wn2 = p.stiffness() / (2.0 * p.inertia_s * p.pll_time_const_s);
  const double wn = std::sqrt(wn2);
  if (!(dt_s > 0.0) || dt_s > 0.05 / wn)
    throw std::invalid_argument("dt too large for the system's natural frequency");
  const double xi = wn * (2.0 * p.inertia_s + p.damping * p.pll_time_const_s) /
                    (2.0 * p.stiffness());
  const double gain = wn2 / p.stiffness();
  const double u = -delta_p_pu;

  const size_t n = static_cast<size_t>(horizon_s / dt_s) + 1;
  std::vector<double> traj(n);
  double x1 = 0.0, x2 = 0.0;
  auto f1 = [](double, double b) { return b; };
  auto f2 = [&](double a, double b) { return -wn2 * a - 2.0 * xi * wn * b + u; };
  traj[0] = 0.0;
  for (size_t i = 1; i < n; ++i) {
    const double k1a = f1(x1, x2), k1b = f2(x1, x2);
    const double k2a = f1(x1 + 0.5 * dt_s * k1a, x2 + 0.5 * dt_s * k1b),
                 k2b = f2(x1 + 0.5 * dt_s * k1a, x2 + 0.5 * dt_s * k1b);
    const double k3a = f1(x1 + 0.5 * dt_s * k2a, x2 + 0.5 * dt_s * k2b),
                 k3b = f2(x1 + 0.5 * dt_s * k2a, x2 + 0.5 * dt_s * k2b);
    const double k4a = f1(x1 + dt_s * k3a, x2 + dt_s * k3b),
                 k4b = f2(x1 + dt_s * k3a, x2 + dt_s * k3b);
    x1 += dt_s / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    x2 += dt_s / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
    traj[i] = gain * (x1 + p.pll_time_const_s * x2);
  }
  return traj;
}

// Summary statistics of an oracle trajectory, in the units of the trajectory.
struct OracleSummary {
  double extremum = 0.0;       // largest-magnitude deviation
  double extremum_time_s = 0.0;
  double asymptote = 0.0;      // last sample; QSS estimate for long horizons
  double max_abs_slope = 0.0;  // peak |d(deviation)/dt|
};

inline OracleSummary summarize_oracle(const std::vector<double>& traj, double dt_s) {
  OracleSummary s;
  if (traj.empty()) return s;
  for (size_t i = 0; i < traj.size(); ++i) {
    if (std::abs(traj[i]) > std::abs(s.extremum)) {
      s.extremum = traj[i];
      s.extremum_time_s = static_cast<double>(i) * dt_s;
    }
    if (i > 0)
      s.max_abs_slope = std::max(s.max_abs_slope, std::abs(traj[i] - traj[i - 1]) / dt_s);
  }
  s.asymptote = traj.back();
  return s;
}

// Voltage-reference pinning for a GFMI bus expressed as a pair of linear
// inequalities on the squared voltage: when installed the voltage tracks
// base + increment exactly; when absent both inequalities are slack by M.
struct VoltagePin {
  // v_sq <= rhs_ub + slack_ub and v_sq >= rhs_lb - slack_lb
  double rhs = 0.0;
  double slack = 0.0;
};

inline VoltagePin voltage_bounds(bool installed, double base_sq_pu,
                                 double delta_inc_pu, double big_m) {
  if (!(base_sq_pu > 0.0)) throw std::invalid_argument("base voltage must be > 0");
  VoltagePin pin;
  pin.rhs = base_sq_pu + delta_inc_pu;
  pin.slack = installed ? 0.0 : big_m;
  return pin;
}

}  // namespace bsalloc

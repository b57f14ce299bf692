#pragma once

#include <utility>
#include <vector>

#include "surfgrow/evolve.hpp"
#include "surfgrow/field.hpp"

namespace surfgrow {

/* Comparison data for the scalar ODE phi' <= C phi^p, p > 1, anchored at
   phi(anchor_time) = anchor_value > 0. */
struct OdeEnvelope {
  double p = 2.0;
  double C = 1.0;
  double anchor_time = 0.0;
  double anchor_value = 1.0;
};

/* [anchor_value^{-(p-1)} + C(p-1)(anchor_time - t)]^{-1/(p-1)}; +infinity
   once the bracket reaches zero (end of the guaranteed-existence horizon).
   Requires p > 1, C > 0, anchor_value > 0, t >= anchor_time. */
double envelope_upper(const OdeEnvelope& env, double t);

struct LerayCheck {
  double c_lower = 0.0;  // min_t |h(t)|_s (t0 - t)^{(2s-1)/8}
  double median = 0.0;   // median of the weighted values over the same window
  bool ok = false;       // c_lower > 0 and above 1e-3 * median
};

/* Lower-bound constant extracted from a norm history: values[i] = |h(t_i)|_s.
   Requires s > 1/2 and t0 strictly beyond the last time. */
LerayCheck leray_lower_series(const std::vector<double>& times,
                              const std::vector<double>& values, double s,
                              double t0);
LerayCheck leray_lower_check(const Trajectory& traj, double s, double t0);

/* Same minimum restricted to records with t0 - t in [tau_lo, tau_hi); NaN
   when the window holds no record.  Used for the dyadic stability check. */
double leray_lower_on_window(const Trajectory& traj, double s, double t0,
                             double tau_lo, double tau_hi);

/* Guaranteed-smoothness duration (c_s |u|_s^{8/(2s-1)})^{-1}; +infinity for
   the zero field.  Requires s > 1/2, c_s > 0. */
double regularity_window(const FourierField& u, double s, double c_s);

/* Largest constant (halved for headroom) such that every recorded step of
   every calibration run satisfies t + regularity_window(h(t), s, c) >= next
   record time.  The constant is empirical, not a theory value. */
double calibrate_regularity_constant(const std::vector<Trajectory>& runs,
                                     double s);

struct BlowupReport {
  double s = 0.0;             // Sobolev index of the fitted norm
  double t0_est = 0.0;        // fitted blow-up time
  double exponent_est = 0.0;  // fitted q in |h(t)|_s ~ C (t0 - t)^{-q}
  double C_est = 0.0;
  double leray_margin = 0.0;  // min over window of |h|_s (t0_est-t)^{(2s-1)/8}
  double window_lo = 0.0;     // fitted tail window [t_a, t_b]
  double window_hi = 0.0;
  double r2 = 0.0;            // goodness of the log-log fit
};

/* Least squares of log v = log C - q log(t0 - t) over the trailing
   tail_fraction of the samples, jointly in (C, q >= 0, t0).  The t0 search
   is one-dimensional (geometric scan plus golden-section polish) with the
   linear (log C, q) subproblem solved exactly at each candidate.  Requires
   at least 20 tail samples. */
BlowupReport fit_blowup_series(const std::vector<double>& times,
                               const std::vector<double>& values, double s,
                               double tail_fraction);
BlowupReport fit_blowup(const Trajectory& traj, double s,
                        double tail_fraction);

struct SingularBudget {
  std::vector<double> interval_integrals;  // integral of |h|_2^2 over each
  std::vector<bool> interval_ok;           // c (t2-t1)^{1/4} <= integral
  double total_budget = 0.0;               // sum of (t2-t1)^{1/4}
  double budget_cap = 0.0;                 // |h(0)|_{L^2}^2 / c
  bool ok = true;  // every interval bound holds and total <= cap
};

/* Checks c (t2-t1)^{1/4} <= int_{t1}^{t2} |h|_2^2 dt on each candidate
   interval (piecewise-linear in the recorded h2 history) and the summed
   budget against (2/c) * (1/2) |h(0)|_{L^2}^2.  Intervals must be disjoint,
   increasing, and inside the recorded span. */
SingularBudget singular_budget(
    const Trajectory& traj,
    const std::vector<std::pair<double, double>>& intervals, double c);
SingularBudget singular_budget_series(
    const std::vector<double>& times, const std::vector<double>& h2_sq,
    double initial_l2_sq,
    const std::vector<std::pair<double, double>>& intervals, double c);

struct ExpBlowupIndicator {
  std::vector<double> times;
  std::vector<double> mixed_running;  // int_0^t int |h_x|^a |h|^k dx ds
  std::vector<double> exp_history;    // int exp(-gamma h) dx at each record
};

/* Requires stored real states, a in (0,4), k >= 0, and
   gamma in (0, 2a/(4-a)); the exponential integral goes through the
   log-sum-exp path so large negative excursions do not overflow. */
ExpBlowupIndicator exp_blowup_indicator(const Trajectory& traj, double a,
                                        double k, double gamma);

/* One cell of the complex-data blow-up search: integrate the geometric
   initial datum c_j = amplitude * rho^j, then attach the fit and the
   dyadic-window stability of the Leray constant. */
struct BlowupSweepCell {
  double amplitude = 0.0;
  double rho = 0.0;
  Termination termination = Termination::kCompleted;
  double final_time = 0.0;
  double final_h2 = 0.0;  // |h|_2 at the last record
  bool fitted = false;    // enough tail samples for fit_blowup
  BlowupReport fit;
  double c_lower_last = 0.0;  // Leray constant on the last dyadic window
  double c_lower_prev = 0.0;  // and on the window before it
  bool leray_consistent = false;
};

BlowupSweepCell complex_blowup_cell(double amplitude, double rho,
                                    double period_length, int max_mode,
                                    double horizon, const StepperConfig& cfg,
                                    double s);

/* Deterministic row-major sweep over the (amplitude, rho) grid. */
std::vector<BlowupSweepCell> complex_blowup_sweep(
    const std::vector<double>& amplitudes, const std::vector<double>& rhos,
    double period_length, int max_mode, double horizon,
    const StepperConfig& cfg, double s);

}  // namespace surfgrow

#include "surfgrow/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "surfgrow/functionals.hpp"

namespace surfgrow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void Require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

/* |h(t_i)|_s for every record, from stored states when present, otherwise
   from the per-record Sobolev map (covers the monitored indices). */
std::vector<double> NormSeries(const Trajectory& traj, double s) {
  const std::size_t n = traj.times.size();
  Require(n > 0, "trajectory has no records");
  std::vector<double> out(n);
  if (traj.states.size() == n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = sobolev_norm(traj.states[i], s);
    return out;
  }
  Require(traj.records.size() == n, "trajectory records incomplete");
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = traj.records[i].sobolev.find(s);
    Require(it != traj.records[i].sobolev.end(),
            "norm index not monitored and no states stored");
    out[i] = it->second;
  }
  return out;
}

void CheckSeries(const std::vector<double>& times,
                 const std::vector<double>& values) {
  Require(times.size() == values.size(), "times/values size mismatch");
  Require(times.size() >= 2, "need at least two samples");
  for (std::size_t i = 1; i < times.size(); ++i)
    Require(times[i] > times[i - 1], "times must be strictly increasing");
}

double LerayExponent(double s) { return (2.0 * s - 1.0) / 8.0; }

/* Exact least squares of y = a - q x with the decay direction clamped out
   (q >= 0).  Returns the sum of squared residuals; a and q via out params. */
double ClampedLineFit(const std::vector<double>& x, const std::vector<double>& y,
                      double* a_out, double* q_out) {
  const std::size_t n = x.size();
  KahanSum sx, sy;
  for (std::size_t i = 0; i < n; ++i) {
    sx.Add(x[i]);
    sy.Add(y[i]);
  }
  const double mx = sx.Value() / n;
  const double my = sy.Value() / n;
  KahanSum sxx, sxy;
  for (std::size_t i = 0; i < n; ++i) {
    sxx.Add((x[i] - mx) * (x[i] - mx));
    sxy.Add((x[i] - mx) * (y[i] - my));
  }
  double slope = sxx.Value() > 0 ? sxy.Value() / sxx.Value() : 0.0;
  double q = -slope;
  if (q < 0) q = 0;  // a growing-norm model only; decaying data degenerates
  const double a = my + q * mx;
  KahanSum sse;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (a - q * x[i]);
    sse.Add(r * r);
  }
  *a_out = a;
  *q_out = q;
  return sse.Value();
}

}  // namespace

double envelope_upper(const OdeEnvelope& env, double t) {
  Require(env.p > 1.0, "envelope exponent p must exceed 1");
  Require(env.C > 0.0, "envelope constant C must be positive");
  Require(env.anchor_value > 0.0, "envelope anchor value must be positive");
  Require(std::isfinite(t) && t >= env.anchor_time,
          "envelope evaluated before its anchor time");
  const double pm1 = env.p - 1.0;
  const double bracket =
      std::pow(env.anchor_value, -pm1) + env.C * pm1 * (env.anchor_time - t);
  if (bracket <= 0.0) return kInf;
  return std::pow(bracket, -1.0 / pm1);
}

LerayCheck leray_lower_series(const std::vector<double>& times,
                              const std::vector<double>& values, double s,
                              double t0) {
  Require(s > 0.5, "Leray check needs s > 1/2");
  CheckSeries(times, values);
  Require(t0 > times.back(), "t0 must lie beyond the last sample");
  const double e = LerayExponent(s);
  std::vector<double> weighted(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    Require(std::isfinite(values[i]) && values[i] >= 0.0,
            "norm history must be finite and nonnegative");
    weighted[i] = values[i] * std::pow(t0 - times[i], e);
  }
  LerayCheck out;
  out.c_lower = *std::min_element(weighted.begin(), weighted.end());
  std::nth_element(weighted.begin(), weighted.begin() + weighted.size() / 2,
                   weighted.end());
  out.median = weighted[weighted.size() / 2];
  out.ok = out.c_lower > 0.0 && out.c_lower > 1e-3 * out.median;
  return out;
}

LerayCheck leray_lower_check(const Trajectory& traj, double s, double t0) {
  return leray_lower_series(traj.times, NormSeries(traj, s), s, t0);
}

double leray_lower_on_window(const Trajectory& traj, double s, double t0,
                             double tau_lo, double tau_hi) {
  Require(s > 0.5, "Leray check needs s > 1/2");
  Require(tau_lo >= 0.0 && tau_hi > tau_lo, "bad window");
  const std::vector<double> norms = NormSeries(traj, s);
  const double e = LerayExponent(s);
  double best = kNaN;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double tau = t0 - traj.times[i];
    if (tau < tau_lo || tau >= tau_hi) continue;
    const double w = norms[i] * std::pow(tau, e);
    if (std::isnan(best) || w < best) best = w;
  }
  return best;
}

double regularity_window(const FourierField& u, double s, double c_s) {
  Require(s > 0.5, "window formula needs s > 1/2");
  Require(c_s > 0.0 && std::isfinite(c_s), "calibration constant must be positive");
  const double norm = sobolev_norm(u, s);
  if (norm == 0.0) return kInf;
  return 1.0 / (c_s * std::pow(norm, 8.0 / (2.0 * s - 1.0)));
}

double calibrate_regularity_constant(const std::vector<Trajectory>& runs,
                                     double s) {
  Require(s > 0.5, "window formula needs s > 1/2");
  Require(!runs.empty(), "calibration needs at least one run");
  const double p = 8.0 / (2.0 * s - 1.0);
  double c_best = kInf;
  bool found = false;
  for (const Trajectory& traj : runs) {
    Require(traj.times.size() >= 2, "calibration run too short");
    const std::vector<double> norms = NormSeries(traj, s);
    double w_max = 0.0;
    for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
      const double dt = traj.times[i + 1] - traj.times[i];
      if (norms[i] > 0.0) w_max = std::max(w_max, dt * std::pow(norms[i], p));
    }
    if (w_max > 0.0) {
      found = true;
      c_best = std::min(c_best, 1.0 / w_max);
    }
  }
  Require(found, "calibration runs carry no nonzero norms");
  return 0.5 * c_best;  // halved so freshly drawn runs keep headroom
}

BlowupReport fit_blowup_series(const std::vector<double>& times,
                               const std::vector<double>& values, double s,
                               double tail_fraction) {
  CheckSeries(times, values);
  Require(tail_fraction > 0.0 && tail_fraction <= 1.0,
          "tail_fraction must lie in (0, 1]");
  const std::size_t n_total = times.size();
  const std::size_t tail =
      std::min(n_total, static_cast<std::size_t>(
                            std::ceil(tail_fraction * static_cast<double>(n_total))));
  Require(tail >= 20, "fit needs at least 20 tail samples");
  const std::size_t first = n_total - tail;

  std::vector<double> t(times.begin() + first, times.end());
  std::vector<double> y(tail);
  for (std::size_t i = 0; i < tail; ++i) {
    const double v = values[first + i];
    Require(std::isfinite(v) && v > 0.0, "tail norms must be finite and positive");
    y[i] = std::log(v);
  }
  const double t_b = t.back();
  const double span = t_b - t.front();
  const double dt_last = t_b - t[tail - 2];

  KahanSum sy;
  for (double yi : y) sy.Add(yi);
  const double my = sy.Value() / tail;
  KahanSum sst;
  for (double yi : y) sst.Add((yi - my) * (yi - my));
  const double ss_tot = sst.Value();

  std::vector<double> x(tail);
  double a = 0.0, q = 0.0;
  const auto sse_at = [&](double tau) {
    const double t0 = t_b + tau;
    for (std::size_t i = 0; i < tail; ++i) x[i] = std::log(t0 - t[i]);
    return ClampedLineFit(x, y, &a, &q);
  };

  /* Geometric scan over the gap t0 - t_b, then a golden-section polish of
     log(tau) inside the best bracket.  The inner problem is linear, so the
     scan is the only global step needed. */
  const double lo = std::log(1e-3 * dt_last);
  const double hi = std::log(1e2 * span + dt_last);
  const int n_grid = 400;
  int best_i = 0;
  double best_sse = kInf;
  for (int i = 0; i <= n_grid; ++i) {
    const double tau = std::exp(lo + (hi - lo) * i / n_grid);
    const double sse = sse_at(tau);
    if (sse < best_sse) {
      best_sse = sse;
      best_i = i;
    }
  }
  double ga = lo + (hi - lo) * std::max(best_i - 1, 0) / n_grid;
  double gb = lo + (hi - lo) * std::min(best_i + 1, n_grid) / n_grid;
  constexpr double kInvPhi = 0.6180339887498949;
  double g1 = gb - kInvPhi * (gb - ga);
  double g2 = ga + kInvPhi * (gb - ga);
  double f1 = sse_at(std::exp(g1));
  double f2 = sse_at(std::exp(g2));
  while (gb - ga > 1e-13 * std::max(1.0, std::abs(gb))) {
    if (f1 <= f2) {
      gb = g2;
      g2 = g1;
      f2 = f1;
      g1 = gb - kInvPhi * (gb - ga);
      f1 = sse_at(std::exp(g1));
    } else {
      ga = g1;
      g1 = g2;
      f1 = f2;
      g2 = ga + kInvPhi * (gb - ga);
      f2 = sse_at(std::exp(g2));
    }
  }
  const double tau_best = std::exp(0.5 * (ga + gb));
  const double sse = sse_at(tau_best);

  BlowupReport rep;
  rep.s = s;
  rep.t0_est = t_b + tau_best;
  rep.exponent_est = q;
  rep.C_est = std::exp(a);
  rep.window_lo = t.front();
  rep.window_hi = t_b;
  /* ss_tot == 0 means the tail is flat: no divergence signature, and no
     variance for the model to explain. */
  rep.r2 = ss_tot > 0.0 ? 1.0 - sse / ss_tot : 0.0;
  const double e = LerayExponent(s);
  double margin = kInf;
  for (std::size_t i = 0; i < tail; ++i) {
    margin = std::min(margin,
                      values[first + i] * std::pow(rep.t0_est - t[i], e));
  }
  rep.leray_margin = margin;
  return rep;
}

BlowupReport fit_blowup(const Trajectory& traj, double s,
                        double tail_fraction) {
  Require(traj.termination != Termination::kCompleted,
          "fit expects a run terminated by norm_cap or dt_underflow");
  return fit_blowup_series(traj.times, NormSeries(traj, s), s, tail_fraction);
}

SingularBudget singular_budget_series(
    const std::vector<double>& times, const std::vector<double>& h2_sq,
    double initial_l2_sq,
    const std::vector<std::pair<double, double>>& intervals, double c) {
  CheckSeries(times, h2_sq);
  Require(c > 0.0 && std::isfinite(c), "budget constant must be positive");
  Require(initial_l2_sq >= 0.0, "initial energy must be nonnegative");

  /* Integral of the piecewise-linear interpolant of h2_sq over [a, b]. */
  const auto integrate = [&](double a, double b) {
    const auto value_at = [&](double t) {
      const auto it = std::upper_bound(times.begin(), times.end(), t);
      std::size_t j = static_cast<std::size_t>(it - times.begin());
      if (j == 0) return h2_sq.front();
      if (j == times.size()) return h2_sq.back();
      const double w = (t - times[j - 1]) / (times[j] - times[j - 1]);
      return (1.0 - w) * h2_sq[j - 1] + w * h2_sq[j];
    };
    KahanSum acc;
    double t_prev = a;
    double v_prev = value_at(a);
    for (std::size_t j = 0; j < times.size(); ++j) {
      if (times[j] <= a || times[j] >= b) continue;
      acc.Add(0.5 * (times[j] - t_prev) * (v_prev + h2_sq[j]));
      t_prev = times[j];
      v_prev = h2_sq[j];
    }
    acc.Add(0.5 * (b - t_prev) * (v_prev + value_at(b)));
    return acc.Value();
  };

  SingularBudget out;
  out.budget_cap = initial_l2_sq / c;
  KahanSum total;
  double prev_end = -kInf;
  for (const auto& [t1, t2] : intervals) {
    Require(t1 < t2, "interval must have t1 < t2");
    Require(t1 >= times.front() && t2 <= times.back(),
            "interval outside the recorded span");
    Require(t1 >= prev_end, "intervals overlap");
    prev_end = t2;
    const double lhs = c * std::pow(t2 - t1, 0.25);
    const double integral = integrate(t1, t2);
    out.interval_integrals.push_back(integral);
    out.interval_ok.push_back(lhs <= integral);
    total.Add(std::pow(t2 - t1, 0.25));
  }
  out.total_budget = total.Value();
  out.ok = out.total_budget <= out.budget_cap;
  for (bool good : out.interval_ok) out.ok = out.ok && good;
  return out;
}

SingularBudget singular_budget(
    const Trajectory& traj,
    const std::vector<std::pair<double, double>>& intervals, double c) {
  Require(traj.records.size() == traj.times.size() && !traj.records.empty(),
          "trajectory records incomplete");
  std::vector<double> h2(traj.records.size());
  for (std::size_t i = 0; i < traj.records.size(); ++i)
    h2[i] = traj.records[i].h2_sq;
  return singular_budget_series(traj.times, h2, traj.records.front().l2_sq,
                                intervals, c);
}

ExpBlowupIndicator exp_blowup_indicator(const Trajectory& traj, double a,
                                        double k, double gamma) {
  Require(a > 0.0 && a < 4.0, "mixed-integral exponent a must lie in (0, 4)");
  Require(k >= 0.0, "amplitude exponent k must be nonnegative");
  Require(gamma > 0.0 && gamma < 2.0 * a / (4.0 - a),
          "gamma outside (0, 2a/(4-a))");
  Require(traj.states.size() == traj.times.size() && !traj.states.empty(),
          "indicator needs stored states");
  Require(traj.reality, "indicator is defined for real fields");

  ExpBlowupIndicator out;
  out.times = traj.times;
  out.mixed_running.resize(traj.times.size());
  out.exp_history.resize(traj.times.size());

  const auto space_integral = [&](const FourierField& u) {
    const int n = std::max(4 * (u.max_mode() + 1), 512);
    const PhysicalGrid g = to_physical(u, n);
    const PhysicalGrid gx = to_physical(derivative(u, 1), n);
    KahanSum acc;
    for (int m = 0; m < n; ++m) {
      acc.Add(std::pow(std::abs(gx.values[m].real()), a) *
              std::pow(std::abs(g.values[m].real()), k));
    }
    return acc.Value() * u.period_length() / n;
  };

  double prev_rate = space_integral(traj.states.front());
  KahanSum running;
  out.mixed_running[0] = 0.0;
  out.exp_history[0] = lyapunov_value(traj.states.front(), -gamma);
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    const double rate = space_integral(traj.states[i]);
    running.Add(0.5 * (traj.times[i] - traj.times[i - 1]) * (prev_rate + rate));
    prev_rate = rate;
    out.mixed_running[i] = running.Value();
    out.exp_history[i] = lyapunov_value(traj.states[i], -gamma);
  }
  return out;
}

BlowupSweepCell complex_blowup_cell(double amplitude, double rho,
                                    double period_length, int max_mode,
                                    double horizon, const StepperConfig& cfg,
                                    double s) {
  BlowupSweepCell cell;
  cell.amplitude = amplitude;
  cell.rho = rho;
  const FourierField h0 =
      geometric_complex_field(period_length, max_mode, amplitude, rho);
  const Trajectory traj = simulate(h0, horizon, cfg);
  cell.termination = traj.termination;
  cell.final_time = traj.times.back();
  const auto& sob = traj.records.back().sobolev;
  cell.final_h2 = sob.count(2.0) ? sob.at(2.0) : kNaN;

  if (traj.termination == Termination::kCompleted || traj.times.size() < 3) {
    return cell;
  }
  try {
    cell.fit = fit_blowup(traj, s, 0.5);
    cell.fitted = true;
  } catch (const std::invalid_argument&) {
    return cell;  // tail too short to fit; reported as not fitted
  }
  const double tau_min = cell.fit.t0_est - cell.final_time;
  cell.c_lower_last =
      leray_lower_on_window(traj, s, cell.fit.t0_est, tau_min, 2.0 * tau_min);
  cell.c_lower_prev = leray_lower_on_window(traj, s, cell.fit.t0_est,
                                            2.0 * tau_min, 4.0 * tau_min);
  cell.leray_consistent =
      cell.termination == Termination::kNormCapHit &&
      std::isfinite(cell.c_lower_last) && std::isfinite(cell.c_lower_prev) &&
      cell.c_lower_last > 0.0 && cell.c_lower_prev > 0.0 &&
      std::abs(cell.c_lower_last / cell.c_lower_prev - 1.0) < 0.3;
  return cell;
}

std::vector<BlowupSweepCell> complex_blowup_sweep(
    const std::vector<double>& amplitudes, const std::vector<double>& rhos,
    double period_length, int max_mode, double horizon,
    const StepperConfig& cfg, double s) {
  std::vector<BlowupSweepCell> cells;
  cells.reserve(amplitudes.size() * rhos.size());
  for (double amplitude : amplitudes) {
    for (double rho : rhos) {
      cells.push_back(complex_blowup_cell(amplitude, rho, period_length,
                                          max_mode, horizon, cfg, s));
    }
  }
  return cells;
}

}  // namespace surfgrow

// Acceptance gate: one check per shipped guarantee, one PASS/FAIL line each
// with the measured value next to its tolerance.  Exit code is the number of
// failed checks.  Every run below is deterministic (fixed seeds, fixed step
// sizes where the guarantee depends on them), so a failure here reproduces
// exactly.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "surfgrow/blowup.hpp"
#include "surfgrow/evolve.hpp"
#include "surfgrow/field.hpp"
#include "surfgrow/functionals.hpp"
#include "surfgrow/inequalities.hpp"
#include "surfgrow/profiles.hpp"
#include "surfgrow/semigroup.hpp"

namespace {

using namespace surfgrow;

int g_failures = 0;

double Seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void Report(int index, const char* name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("[%s] %2d. %s: %s\n", pass ? "PASS" : "FAIL", index, name,
              detail.c_str());
  std::fflush(stdout);
}

std::string Fmt(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return std::string(buf);
}

// Least-squares slope of y against x.
double Slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Criteria 1, 3 and 4 share this trajectory: cos(x), K = 128, fixed
// dt = 1e-4 to T = 0.1, states stored at every step.
Trajectory ReferenceRun() {
  const FourierField h0 = cosine_field(kDefaultPeriod, 128, 1, 1.0);
  StepperConfig cfg;
  cfg.dt = 1e-4;
  cfg.adaptive = false;
  cfg.record_every = 1;
  cfg.store_states = true;
  return simulate(h0, 0.1, cfg);
}

void Criterion1(const Trajectory& traj, double elapsed) {
  const double res = energy_residual(traj);
  const bool pass = res < 1e-6 && elapsed < 10.0 &&
                    traj.termination == Termination::kCompleted;
  Report(1, "energy equality",
         pass, Fmt("relative residual %.3e (tol 1e-6), %.1fs (limit 10s)",
                   res, elapsed));
}

void Criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const FourierField h0 = cosine_field(kDefaultPeriod, 32, 1, 1e-3);
  StepperConfig cfg;
  cfg.dt = 1e-4;
  cfg.adaptive = false;
  cfg.record_every = 100;
  cfg.store_states = false;
  const Trajectory traj = simulate(h0, 1.0, cfg);
  std::vector<double> ts, logs;
  for (const auto& r : traj.records) {
    ts.push_back(r.t);
    logs.push_back(std::log(r.l2_sq));
  }
  const double rate = -Slope(ts, logs);  // |h|^2 ~ e^{-2 kappa^4 t}, kappa = 1
  const double elapsed = Seconds(t0);
  const bool pass = std::abs(rate - 2.0) < 0.02 * 2.0 && elapsed < 5.0;
  Report(2, "linear decay rate",
         pass, Fmt("fitted rate %.6f vs 2 (tol 2%%), %.1fs (limit 5s)", rate,
                   elapsed));
}

void Criterion3(const Trajectory& traj, double run_elapsed) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (double alpha : {0.5, 1.0, 1.5}) {
    double worst_rise = 0.0;
    for (size_t i = 1; i < traj.records.size(); ++i) {
      const double rise = traj.records[i].lyapunov.at(alpha) -
                          traj.records[i - 1].lyapunov.at(alpha);
      if (rise > worst_rise) worst_rise = rise;
    }
    double scale = 0.0;
    const double res = lyapunov_identity_residual(traj, alpha, &scale);
    const bool ok = worst_rise <= 1e-8 && res < 1e-4 * scale;
    pass = pass && ok;
    detail += Fmt("a=%.1f rise %.1e id %.2e/%.2e; ", alpha, worst_rise, res,
                  1e-4 * scale);
  }
  const double elapsed = run_elapsed + Seconds(t0);
  pass = pass && elapsed < 10.0;
  Report(3, "Lyapunov monotonicity", pass,
         detail + Fmt("%.1fs (limit 10s)", elapsed));
}

void Criterion4(const Trajectory& traj) {
  double scale = 0.0;
  const double res = cubic_identity_residual(traj, &scale);
  Report(4, "cubic identity", res < 1e-4 * scale,
         Fmt("residual %.3e vs %.3e (1e-4 scaled)", res, 1e-4 * scale));
}

void Criterion5() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uc2(-3.0, 3.0);
  std::uniform_real_distribution<double> uc1(-1.0, 1.0);
  std::uniform_int_distribution<int> ub3(1, 5);
  std::uniform_real_distribution<double> ub2(0.5, 2.5);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const StationaryProfile p = make_stationary_profile(
        3, kDefaultPeriod, uc1(rng), uc2(rng), static_cast<double>(ub3(rng)));
    worst = std::max(worst, stationary_residual(p, 0.05));
  }
  for (int i = 0; i < 10; ++i) {
    const StationaryProfile p =
        make_stationary_profile(2, kDefaultPeriod, uc1(rng), uc2(rng), ub2(rng));
    worst = std::max(worst, stationary_residual(p, 0.05));
  }
  Report(5, "stationary first integral", worst < 1e-10,
         Fmt("max residual %.3e over 30 profiles (tol 1e-10)", worst));
}

void Criterion6() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> up(1.0 + 1e-6, 5.0);
  std::uniform_real_distribution<double> uC(1e-6, 10.0);
  std::uniform_real_distribution<double> uv(1e-3, 2.0);
  std::uniform_real_distribution<double> ua(0.0, 0.5);
  std::uniform_real_distribution<double> ufrac(0.0, 0.98);
  double worst = 0.0;
  bool horizon_ok = true;
  for (int i = 0; i < 1000; ++i) {
    OdeEnvelope env;
    env.p = up(rng);
    env.C = uC(rng);
    env.anchor_value = uv(rng);
    env.anchor_time = ua(rng);
    const double pm1 = env.p - 1.0;
    const double horizon =
        std::pow(env.anchor_value, -pm1) / (env.C * pm1);
    const double t = env.anchor_time + ufrac(rng) * horizon;
    // Independent closed form of phi' = C phi^p through the anchor.
    const double exact =
        env.anchor_value * std::pow(1.0 - env.C * pm1 *
                                              std::pow(env.anchor_value, pm1) *
                                              (t - env.anchor_time),
                                    -1.0 / pm1);
    const double got = envelope_upper(env, t);
    worst = std::max(worst, std::abs(got - exact) / exact);
    horizon_ok = horizon_ok &&
                 std::isinf(envelope_upper(env, env.anchor_time + horizon * 1.01));
  }
  Report(6, "ODE comparison envelope", worst < 1e-12 && horizon_ok,
         Fmt("max relative error %.3e over 1000 cases (tol 1e-12), "
             "past-horizon +inf %s",
             worst, horizon_ok ? "ok" : "violated"));
}

void Criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  const FourierField shape = cosine_field(kDefaultPeriod, 32, 1, 1.0);
  StepperConfig scan_cfg;
  scan_cfg.dt = 1e-3;
  const double a_star = measure_small_data_threshold(shape, 0.25, scan_cfg);
  const double target = 0.1 * a_star;
  const FourierField h0 =
      (target / sobolev_norm(shape, 0.5)) * shape;

  const PicardState st = picard_iterate(h0, 0.25, 0.25, 8, 1.0);
  bool contract = !st.diverged && st.diff_k_norms.size() >= 8;
  double worst_ratio = 0.0;
  for (size_t i = 1; i < st.diff_k_norms.size(); ++i) {
    const double ratio = st.diff_k_norms[i] / st.diff_k_norms[i - 1];
    worst_ratio = std::max(worst_ratio, ratio);
    contract = contract && ratio < 1.0 &&
               st.diff_k_norms[i] <= st.diff_k_norms[i - 1];
  }

  // Fixed point against the time stepper at the same horizon.
  StepperConfig cfg;
  cfg.dt = 1e-4;
  cfg.adaptive = false;
  cfg.record_every = 1000000;
  cfg.store_states = true;
  const Trajectory traj = simulate(h0, 0.25, cfg);
  const FourierField fixed_point = st.iterates.back().back();
  const double mismatch = sobolev_norm(fixed_point - traj.states.back(), 0.5);
  const bool pass = contract && mismatch < 1e-5;
  Report(7, "Picard contraction", pass,
         Fmt("threshold %.4f, |h0|_{1/2}=%.4f, worst ratio %.4f (<1, "
             "diffs nonincreasing %s), fixed point mismatch %.3e (tol 1e-5), "
             "%.1fs",
             a_star, target, worst_ratio, contract ? "yes" : "no", mismatch,
             Seconds(t0)));
}

void Criterion8() {
  const FourierField h0 = random_field(kDefaultPeriod, 32, -1.1, 88, true);
  const double base = sobolev_norm(h0, 0.5);
  bool decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  double last = 0.0;
  for (int n = 0; n <= 20; ++n) {
    const double val = k_zero(std::pow(2.0, -n) * h0, 0.25, 1.0);
    decreasing = decreasing && val < prev;
    prev = val;
    last = val;
  }
  const bool pass = decreasing && last < 1e-3 * base;
  Report(8, "K0 vanishing limit", pass,
         Fmt("strictly decreasing %s, K0(2^-20 h0)=%.3e vs %.3e (1e-3 "
             "|h0|_{1/2})",
             decreasing ? "yes" : "no", last, 1e-3 * base));
}

void Criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExponentTriple admissible[] = {
      {0.0, 0.0, 1.0}, {0.25, 0.25, 0.1}, {0.4, 0.4, -0.2}};
  bool pass = true;
  std::string detail;
  for (const auto& t : admissible) {
    const InequalityReport rep = trilinear_sup(t, 64, 10000, 9);
    const bool ok = std::abs(rep.stability - 1.0) <= 0.10;
    pass = pass && ok;
    detail += Fmt("(%.2g,%.2g,%.2g) stab %.4f; ", t.alpha, t.beta, t.gamma,
                  rep.stability);
  }
  const ExponentTriple control{0.0, 0.0, 0.4};
  const InequalityReport rep = trilinear_sup(control, 64, 10000, 9);
  const double growth = rep.stability - 1.0;
  const bool control_ok = growth > 0.25;
  pass = pass && control_ok;
  const double elapsed = Seconds(t0);
  pass = pass && elapsed < 300.0;
  Report(9, "trilinear stability", pass,
         detail + Fmt("control (0,0,0.4) growth %.1f%% per doubling "
                      "(needs >25%%), %.1fs (limit 300s)",
                      100.0 * growth, elapsed));
}

void Criterion10() {
  // gamma grid spanning the three regimes, three samples per regime.
  const double power[] = {0.0, 0.2, 0.4};
  const double log_g[] = {0.5, 0.5, 0.5};
  const double constant[] = {0.6, 1.0, 2.0};
  bool classify_ok = true;
  for (double g : power)
    classify_ok = classify_ok && sum_easy_regime(g) == GrowthRegime::kPower;
  for (double g : log_g)
    classify_ok = classify_ok && sum_easy_regime(g) == GrowthRegime::kLog;
  for (double g : constant)
    classify_ok =
        classify_ok && sum_easy_regime(g) == GrowthRegime::kConstant;

  bool exponent_ok = true;
  std::string detail = Fmt("regimes %s; ", classify_ok ? "ok" : "wrong");
  const double pairs[][2] = {{0.3, -0.2}, {0.1, 0.1}, {0.7, -0.2}};
  for (const auto& p : pairs) {
    const double fitted = sum_hard_growth_exponent(p[0], p[1]);
    const double sharp = 2.0 * sum_hard_sharp_beta(p[0], p[1]);
    const bool ok = std::abs(fitted - sharp) < 0.1;
    exponent_ok = exponent_ok && ok;
    detail += Fmt("(%.1f,%.1f) %.3f vs %.3f; ", p[0], p[1], fitted, sharp);
  }
  Report(10, "counting sum regimes", classify_ok && exponent_ok, detail);
}

void Criterion11() {
  std::vector<double> ts, vs;
  for (int i = 0; i < 400; ++i) {
    const double t = 0.995 * i / 399.0;
    ts.push_back(t);
    vs.push_back(2.0 * std::pow(1.0 - t, -0.375));
  }
  const BlowupReport fit = fit_blowup_series(ts, vs, 2.0, 1.0);
  const bool fit_ok = std::abs(fit.exponent_est - 0.375) < 1e-3 &&
                      std::abs(fit.t0_est - 1.0) < 1e-4;

  std::vector<double> td, vd;
  for (int i = 0; i < 400; ++i) {
    const double t = i / 399.0;
    td.push_back(t);
    vd.push_back(2.0 * std::exp(-3.0 * t));
  }
  const BlowupReport decay = fit_blowup_series(td, vd, 2.0, 1.0);
  const bool control_ok = decay.r2 < 0.5;
  Report(11, "blow-up fitter", fit_ok && control_ok,
         Fmt("q %.6f (|q-0.375|<1e-3), t0 %.6f (|t0-1|<1e-4); decaying "
             "control r2 %.3f (<0.5)",
             fit.exponent_est, fit.t0_est, decay.r2));
}

void Criterion12() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (double y : {5.0, 10.0, 20.0}) {
    SelfSimilarProblem prob;
    prob.truncation = y;
    prob.n_points = 401;
    int collapsed = 0, stalled = 0, other = 0;
    for (int i = 0; i < 50; ++i) {
      prob.guess_seed = mix_seed(0, static_cast<std::uint64_t>(i));
      const SelfSimilarResult r =
          self_similar_solve(prob, self_similar_random_guess(prob, prob.guess_seed));
      if (r.converged_to_zero)
        ++collapsed;
      else if (r.residual > 1e-2)
        ++stalled;
      else
        ++other;
    }
    pass = pass && other == 0;
    detail += Fmt("Y=%g: %d collapsed, %d stalled, %d neither; ", y, collapsed,
                  stalled, other);
  }
  const double elapsed = Seconds(t0);
  pass = pass && elapsed < 600.0;
  Report(12, "self-similar nonexistence evidence", pass,
         detail + Fmt("%.1fs (limit 600s)", elapsed));
}

void Criterion13() {
  FourierField h0 = cosine_field(kDefaultPeriod, 64, 1, 1.0);
  {
    const FourierField second = cosine_field(kDefaultPeriod, 64, 2, 0.5);
    h0 += second;
  }
  StepperConfig cfg;
  cfg.dt = 1e-4;
  cfg.adaptive = false;
  cfg.record_every = 100000;
  cfg.store_states = true;
  const Trajectory coarse = simulate(h0, 0.1, cfg);

  StepperConfig fine = cfg;
  fine.dt = 1e-4 / 16.0;
  const Trajectory halved =
      simulate(with_period(h0, kPi), 0.1 / 16.0, fine);

  const FourierField rescaled = with_period(coarse.states.back(), kPi);
  const double diff =
      (rescaled.coeffs() - halved.states.back().coeffs()).norm();
  const double rel = diff / halved.states.back().coeffs().norm();
  Report(13, "scaling covariance", rel < 1e-6,
         Fmt("relative L2 coefficient difference %.3e (tol 1e-6)", rel));
}

void Criterion14() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> amplitudes = {0.5, 1.0, 1.5, 2.0};
  const std::vector<double> rhos = {0.5, 0.6, 0.7, 0.8, 0.9};
  StepperConfig cfg;
  cfg.dt = 1e-5;
  cfg.norm_cap = 1e6;
  cfg.record_every = 4;
  cfg.store_states = false;
  const std::vector<BlowupSweepCell> cells =
      complex_blowup_sweep(amplitudes, rhos, kDefaultPeriod, 64, 1.0, cfg, 2.0);

  int n_cap = 0;
  const BlowupSweepCell* witness = nullptr;
  for (const auto& c : cells) {
    if (c.termination == Termination::kNormCapHit) {
      ++n_cap;
      if (c.leray_consistent && witness == nullptr) witness = &c;
    }
  }
  const bool completed = cells.size() == amplitudes.size() * rhos.size();
  std::string detail =
      Fmt("%zu/%zu cells, %d norm-cap, ", cells.size(),
          amplitudes.size() * rhos.size(), n_cap);
  if (witness != nullptr) {
    detail += Fmt("Leray-consistent cell A=%.2f rho=%.2f: q=%.3f t0=%.4f "
                  "r2=%.3f C_lower %.3e/%.3e",
                  witness->amplitude, witness->rho, witness->fit.exponent_est,
                  witness->fit.t0_est, witness->fit.r2, witness->c_lower_last,
                  witness->c_lower_prev);
  } else {
    detail += "no Leray-consistent cell on this grid (reported outcome: "
              "absence of blow-up evidence)";
  }
  detail += Fmt(", %.0fs", Seconds(t0));
  // Absence of a consistent cell is a reported outcome, not a failure.
  Report(14, "complex blow-up sweep", completed, detail);
}

}  // namespace

// Runs every check by default; `acceptance <from> <to>` restricts to a
// contiguous range for faster local iteration.
int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  int from = 1, to = 14;
  if (argc == 3) {
    from = std::atoi(argv[1]);
    to = std::atoi(argv[2]);
  }
  const auto want = [&](int i) { return i >= from && i <= to; };

  const auto t0 = std::chrono::steady_clock::now();
  if (want(1) || want(3) || want(4)) {
    const Trajectory reference = ReferenceRun();
    const double ref_elapsed = Seconds(t0);
    if (want(1)) Criterion1(reference, ref_elapsed);
    if (want(2)) Criterion2();
    if (want(3)) Criterion3(reference, ref_elapsed);
    if (want(4)) Criterion4(reference);
  } else if (want(2)) {
    Criterion2();
  }
  if (want(5)) Criterion5();
  if (want(6)) Criterion6();
  if (want(7)) Criterion7();
  if (want(8)) Criterion8();
  if (want(9)) Criterion9();
  if (want(10)) Criterion10();
  if (want(11)) Criterion11();
  if (want(12)) Criterion12();
  if (want(13)) Criterion13();
  if (want(14)) Criterion14();

  std::printf("%d checks failed (%.0fs total)\n", g_failures, Seconds(t0));
  return g_failures;
}

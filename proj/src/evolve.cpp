#include "surfgrow/evolve.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace surfgrow {

namespace {

void Require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

/* phi_k(z) = (e^z - sum_{n<k} z^n/n!) / z^k, k = 1..3, evaluated by series
   for small |z| so the subtraction never cancels. */
double PhiFunction(int k, double z) {
  if (std::abs(z) <= 0.5) {
    double factorial = 1.0;
    for (int m = 2; m <= k; ++m) factorial *= m;
    double term = 1.0 / factorial;
    double sum = term;
    for (int n = 1; n <= 24; ++n) {
      term *= z / (n + k);
      sum += term;
    }
    return sum;
  }
  const double ez = std::exp(z);
  double phi = (ez - 1.0) / z;                  // phi_1
  if (k >= 2) phi = (phi - 1.0) / z;            // phi_2
  if (k >= 3) phi = (phi - 0.5) / z;            // phi_3
  return phi;
}

Eigen::ArrayXd Kappa4Array(const FourierField& u) {
  const int K = u.max_mode();
  Eigen::ArrayXd k4(2 * K + 1);
  for (int j = -K; j <= K; ++j) {
    const double kap = u.wavenumber(j);
    k4[K + j] = kap * kap * kap * kap;
  }
  return k4;
}

struct Etdrk4Tables {
  Eigen::ArrayXd E, E2, Q, f1, f2, f3;
};

Etdrk4Tables MakeEtdrk4Tables(const Eigen::ArrayXd& kappa4, double dt) {
  const Eigen::Index n = kappa4.size();
  Etdrk4Tables tb;
  tb.E.resize(n);
  tb.E2.resize(n);
  tb.Q.resize(n);
  tb.f1.resize(n);
  tb.f2.resize(n);
  tb.f3.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = -kappa4[i] * dt;
    const double p1 = PhiFunction(1, z);
    const double p2 = PhiFunction(2, z);
    const double p3 = PhiFunction(3, z);
    tb.E[i] = std::exp(z);
    tb.E2[i] = std::exp(0.5 * z);
    tb.Q[i] = 0.5 * dt * PhiFunction(1, 0.5 * z);
    tb.f1[i] = dt * (p1 - 3.0 * p2 + 4.0 * p3);
    tb.f2[i] = dt * (2.0 * p2 - 4.0 * p3);
    tb.f3[i] = dt * (4.0 * p3 - p2);
  }
  return tb;
}

struct IfrkTables {
  Eigen::ArrayXd E, E2;
};

IfrkTables MakeIfrkTables(const Eigen::ArrayXd& kappa4, double dt) {
  IfrkTables tb;
  tb.E = (-dt * kappa4).exp();
  tb.E2 = (-0.5 * dt * kappa4).exp();
  return tb;
}

/* Evaluates N(h) = -B(h,h) on raw coefficients; false when the input has
   already gone non-finite (the caller treats that as a failed step). */
class NonlinearTerm {
 public:
  NonlinearTerm(double period_length, int max_mode, bool reality)
      : period_length_(period_length),
        max_mode_(max_mode),
        reality_(reality) {}

  bool operator()(const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const {
    if (!v.allFinite()) return false;
    const FourierField h = FourierField::FromCoefficientsUnchecked(
        period_length_, max_mode_, v, reality_);
    out = -nonlinearity_B(h, h).coeffs();
    return true;
  }

 private:
  double period_length_;
  int max_mode_;
  bool reality_;
};

Eigen::VectorXcd Weigh(const Eigen::ArrayXd& w, const Eigen::VectorXcd& v) {
  return (w * v.array()).matrix();
}

bool StepEtdrk4(const Etdrk4Tables& tb, const NonlinearTerm& nonlinear,
                const Eigen::VectorXcd& u, Eigen::VectorXcd& out) {
  Eigen::VectorXcd nu, na, nb, nc;
  if (!nonlinear(u, nu)) return false;
  const Eigen::VectorXcd a = Weigh(tb.E2, u) + Weigh(tb.Q, nu);
  if (!nonlinear(a, na)) return false;
  const Eigen::VectorXcd b = Weigh(tb.E2, u) + Weigh(tb.Q, na);
  if (!nonlinear(b, nb)) return false;
  const Eigen::VectorXcd c = Weigh(tb.E2, a) + Weigh(tb.Q, 2.0 * nb - nu);
  if (!nonlinear(c, nc)) return false;
  out = Weigh(tb.E, u) + Weigh(tb.f1, nu) + Weigh(tb.f2, na + nb) +
        Weigh(tb.f3, nc);
  return out.allFinite();
}

bool StepIfrk4(const IfrkTables& tb, double dt, const NonlinearTerm& nonlinear,
               const Eigen::VectorXcd& u, Eigen::VectorXcd& out) {
  Eigen::VectorXcd k1, k2, k3, k4;
  if (!nonlinear(u, k1)) return false;
  if (!nonlinear(Weigh(tb.E2, u + 0.5 * dt * k1), k2)) return false;
  if (!nonlinear(Weigh(tb.E2, u) + 0.5 * dt * k2, k3)) return false;
  if (!nonlinear(Weigh(tb.E, u) + dt * Weigh(tb.E2, k3), k4)) return false;
  out = Weigh(tb.E, u) +
        (dt / 6.0) * (Weigh(tb.E, k1) + 2.0 * Weigh(tb.E2, k2 + k3) + k4);
  return out.allFinite();
}

/* One scheme step on raw coefficients; tables prebuilt for this dt. */
struct SchemeTables {
  Scheme scheme = Scheme::kEtdrk4;
  double dt = 0.0;
  Etdrk4Tables etdrk4;
  IfrkTables ifrk;
};

SchemeTables MakeSchemeTables(const Eigen::ArrayXd& kappa4, double dt,
                              Scheme scheme) {
  SchemeTables tb;
  tb.scheme = scheme;
  tb.dt = dt;
  if (scheme == Scheme::kEtdrk4) {
    tb.etdrk4 = MakeEtdrk4Tables(kappa4, dt);
  } else {
    tb.ifrk = MakeIfrkTables(kappa4, dt);
  }
  return tb;
}

bool SchemeStep(const SchemeTables& tb, const NonlinearTerm& nonlinear,
                const Eigen::VectorXcd& u, Eigen::VectorXcd& out) {
  if (tb.scheme == Scheme::kEtdrk4) {
    return StepEtdrk4(tb.etdrk4, nonlinear, u, out);
  }
  return StepIfrk4(tb.ifrk, tb.dt, nonlinear, u, out);
}

double SequenceNorm2(const Eigen::ArrayXd& kappa4, const Eigen::VectorXcd& v) {
  KahanSum acc;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    acc.Add(kappa4[i] * std::norm(v[i]));
  }
  return std::sqrt(acc.Value());
}

}  // namespace

void StepperConfig::Validate() const {
  Require(std::isfinite(dt) && std::isfinite(dt_min) && dt_min > 0.0 &&
              dt >= dt_min,
          "StepperConfig: need 0 < dt_min <= dt");
  Require(std::isfinite(norm_cap) && norm_cap > 0.0,
          "StepperConfig: norm_cap must be positive");
  Require(std::isfinite(adapt_target) && adapt_target > 0.0,
          "StepperConfig: adapt_target must be positive");
  Require(record_every >= 1, "StepperConfig: record_every must be >= 1");
  Require(max_steps >= 1, "StepperConfig: max_steps must be >= 1");
}

FourierField step(const FourierField& u, double dt, Scheme scheme) {
  u.Validate();
  Require(std::isfinite(dt) && dt > 0.0, "step: dt must be positive");
  const Eigen::ArrayXd kappa4 = Kappa4Array(u);
  const SchemeTables tb = MakeSchemeTables(kappa4, dt, scheme);
  const NonlinearTerm nonlinear(u.period_length(), u.max_mode(), u.is_real());
  Eigen::VectorXcd out;
  if (!SchemeStep(tb, nonlinear, u.coeffs(), out)) {
    out = Eigen::VectorXcd::Constant(
        u.coeffs().size(), Complex(std::numeric_limits<double>::quiet_NaN(),
                                   std::numeric_limits<double>::quiet_NaN()));
  }
  return FourierField::FromCoefficientsUnchecked(u.period_length(),
                                                 u.max_mode(), std::move(out),
                                                 u.is_real());
}

Trajectory simulate(const FourierField& h0, double T,
                    const StepperConfig& cfg) {
  h0.Validate();
  cfg.Validate();
  Require(std::isfinite(T) && T >= 0.0, "simulate: T must be >= 0");

  const double L = h0.period_length();
  const int K = h0.max_mode();
  const bool reality = h0.is_real();
  const Eigen::ArrayXd kappa4 = Kappa4Array(h0);
  const NonlinearTerm nonlinear(L, K, reality);

  Trajectory traj;
  traj.period_length = L;
  traj.max_mode = K;
  traj.reality = reality;

  Eigen::VectorXcd u = h0.coeffs();
  double t = 0.0;
  double dissip = 0.0;
  double rate_prev = dissipation_rate(h0);

  const auto record = [&]() {
    const FourierField state =
        FourierField::FromCoefficientsUnchecked(L, K, u, reality);
    traj.times.push_back(t);
    traj.records.push_back(compute_diagnostics(state, t, dissip));
    if (cfg.store_states) traj.states.push_back(state);
  };
  const auto ensure_recorded = [&]() {
    if (traj.times.empty() || traj.times.back() != t) record();
  };

  record();
  if (SequenceNorm2(kappa4, u) >= cfg.norm_cap) {
    traj.termination = Termination::kNormCapHit;
    return traj;
  }
  if (T == 0.0) return traj;

  double dt = cfg.dt;
  double table_dt = -1.0;
  SchemeTables tb_full, tb_half;
  std::int64_t tried = 0;

  while (t < T) {
    if (++tried > cfg.max_steps) {
      throw std::runtime_error("simulate: max_steps exceeded");
    }
    /* absorbing near-T remainders into the last step keeps the recorded
       spacing bounded below by dt/4; a trailing rounding sliver would wreck
       every finite-difference consumer of the time grid */
    const bool final_step = t + dt >= T - 0.25 * dt;
    const double dt_eff = final_step ? T - t : dt;
    if (dt_eff != table_dt) {
      tb_full = MakeSchemeTables(kappa4, dt_eff, cfg.scheme);
      if (cfg.adaptive) {
        tb_half = MakeSchemeTables(kappa4, 0.5 * dt_eff, cfg.scheme);
      }
      table_dt = dt_eff;
    }

    Eigen::VectorXcd big;
    bool ok = SchemeStep(tb_full, nonlinear, u, big);
    Eigen::VectorXcd next;
    double error = 0.0;
    double tolerance = 0.0;
    bool accept;
    if (cfg.adaptive) {
      Eigen::VectorXcd mid, two;
      ok = ok && SchemeStep(tb_half, nonlinear, u, mid) &&
           SchemeStep(tb_half, nonlinear, mid, two);
      if (ok) {
        error = SequenceNorm2(kappa4, big - two);
        tolerance = cfg.adapt_target * (1.0 + SequenceNorm2(kappa4, u));
        next = std::move(two);
      }
      accept = ok && error <= tolerance;
    } else {
      /* fixed-dt mode: a non-finite step cannot be retried */
      if (!ok) {
        traj.termination = Termination::kDtUnderflow;
        ensure_recorded();
        return traj;
      }
      next = std::move(big);
      accept = true;
    }

    if (!accept) {
      ++traj.rejected_steps;
      dt = 0.5 * dt_eff;
      if (dt < cfg.dt_min) {
        traj.termination = Termination::kDtUnderflow;
        ensure_recorded();
        return traj;
      }
      continue;
    }

    u = std::move(next);
    t = final_step ? T : t + dt_eff;
    const double rate = dissipation_rate(
        FourierField::FromCoefficientsUnchecked(L, K, u, reality));
    dissip += 0.5 * dt_eff * (rate_prev + rate);
    rate_prev = rate;
    ++traj.accepted_steps;

    const bool capped = SequenceNorm2(kappa4, u) >= cfg.norm_cap;
    if (traj.accepted_steps % cfg.record_every == 0 || capped || t >= T) {
      ensure_recorded();
    }
    if (capped) {
      traj.termination = Termination::kNormCapHit;
      return traj;
    }
    if (cfg.adaptive && error < tolerance / 16.0) dt = dt_eff * 1.4;
  }
  ensure_recorded();
  return traj;
}

double weighted_k_norm(const std::vector<double>& times,
                       const std::vector<FourierField>& fields, double alpha,
                       double T) {
  Require(times.size() == fields.size() && !times.empty(),
          "weighted_k_norm: need matching nonempty samples");
  const double theta = (1.0 + 2.0 * alpha) / 8.0;
  double value = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] <= 0.0 || times[i] > T) continue;
    value = std::max(value, std::pow(times[i], theta) *
                                sobolev_norm(fields[i], 1.0 + alpha));
  }
  return value;
}

double trajectory_k_norm(const Trajectory& traj, double alpha, double T) {
  Require(traj.states.size() == traj.times.size() && !traj.times.empty(),
          "trajectory_k_norm: trajectory must store states");
  return weighted_k_norm(traj.times, traj.states, alpha, T);
}

double star_norm(const Trajectory& traj, double alpha, double T) {
  Require(!traj.times.empty(), "star_norm: empty trajectory");
  Require(traj.states.size() == traj.times.size(),
          "star_norm: trajectory must store states");
  const int K = traj.max_mode;
  const double theta = (1.0 + 2.0 * alpha) / 8.0;
  Eigen::ArrayXd per_mode = Eigen::ArrayXd::Zero(2 * K + 1);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double s = traj.times[i];
    if (s <= 0.0 || s > T) continue;
    const double w = std::pow(s, theta);
    const Eigen::VectorXcd& c = traj.states[i].coeffs();
    for (int m = 0; m < 2 * K + 1; ++m) {
      per_mode[m] = std::max(per_mode[m], w * std::abs(c[m]));
    }
  }
  KahanSum acc;
  for (int j = -K; j <= K; ++j) {
    if (j == 0) continue;
    const double kap = std::abs(2.0 * kPi * j / traj.period_length);
    acc.Add(std::pow(kap, 2.0 * (1.0 + alpha)) *
            per_mode[K + j] * per_mode[K + j]);
  }
  return std::sqrt(acc.Value());
}

double integrability_norm(const Trajectory& traj, double alpha, double T) {
  Require(!traj.times.empty(), "integrability_norm: empty trajectory");
  Require(traj.states.size() == traj.times.size(),
          "integrability_norm: trajectory must store states");
  const double p = 8.0 / (1.0 + 2.0 * alpha);
  KahanSum acc;
  for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
    if (traj.times[i + 1] > T) break;
    const double dt = traj.times[i + 1] - traj.times[i];
    const double fa = std::pow(sobolev_norm(traj.states[i], 1.0 + alpha), p);
    const double fb =
        std::pow(sobolev_norm(traj.states[i + 1], 1.0 + alpha), p);
    acc.Add(0.5 * dt * (fa + fb));
  }
  return acc.Value();
}

double duhamel_beta_constant(double alpha) {
  Require(alpha > 0.0 && alpha < 0.5,
          "duhamel_beta_constant: alpha must lie in (0, 1/2)");
  return std::beta((3.0 - 2.0 * alpha) / 4.0, (1.0 + 2.0 * alpha) / 8.0);
}

PicardState picard_iterate(const FourierField& h0, double alpha, double T,
                           int n_iter, double delta) {
  h0.Validate();
  Require(alpha > 0.0 && alpha < 0.5,
          "picard_iterate: alpha must lie in (0, 1/2)");
  Require(std::isfinite(T) && T > 0.0, "picard_iterate: T must be positive");
  Require(n_iter >= 1, "picard_iterate: n_iter must be >= 1");
  Require(std::isfinite(delta) && delta > 0.0,
          "picard_iterate: delta must be positive");

  const double L = h0.period_length();
  const int K = h0.max_mode();
  const bool reality = h0.is_real();
  const int slots = 2 * K + 1;
  const int n = 512;  // graded-grid size (>= 256)

  PicardState st;
  st.alpha = alpha;
  st.horizon = T;
  st.delta = delta;
  st.time_grid.resize(n);
  for (int i = 1; i <= n; ++i) {
    const double frac = static_cast<double>(i) / n;
    st.time_grid[i - 1] = T * frac * frac * frac * frac;
  }

  const Eigen::ArrayXd kappa4 = Kappa4Array(h0);

  /* exact per-cell linear-in-s quadrature weights: the integral over
     [s_{i-1}, s_i] of e^{-mu (t - s)} times the linear interpolant of N is
     Delta e^{-mu (t - s_i)} (g0 N_{i-1} + g1 N_i) with g1 = phi_2(-mu Delta)
     and g0 = phi_1(-mu Delta) - phi_2(-mu Delta). */
  std::vector<Eigen::ArrayXd> g0(n), g1(n);
  std::vector<double> widths(n);
  for (int i = 0; i < n; ++i) {
    const double lo = i == 0 ? 0.0 : st.time_grid[i - 1];
    const double width = st.time_grid[i] - lo;
    widths[i] = width;
    g0[i].resize(slots);
    g1[i].resize(slots);
    for (int m = 0; m < slots; ++m) {
      const double x = kappa4[m] * width;
      const double p1 = PhiFunction(1, -x);
      const double p2 = PhiFunction(2, -x);
      g0[i][m] = p1 - p2;
      g1[i][m] = p2;
    }
  }

  /* h_0-propagation samples (iterate 0 = F(0)) */
  std::vector<Eigen::VectorXcd> lin(n);
  for (int i = 0; i < n; ++i) {
    lin[i] = ((-st.time_grid[i] * kappa4).exp() *
              h0.coeffs().array()).matrix();
  }

  const auto wrap = [&](const Eigen::VectorXcd& v) {
    return FourierField::FromCoefficientsUnchecked(L, K, v, reality);
  };
  const auto sample_k_norm = [&](const std::vector<Eigen::VectorXcd>& fields) {
    const double theta = (1.0 + 2.0 * alpha) / 8.0;
    double value = 0.0;
    for (int i = 0; i < n; ++i) {
      value = std::max(value, std::pow(st.time_grid[i], theta) *
                                  sobolev_norm(wrap(fields[i]), 1.0 + alpha));
    }
    return value;
  };
  const auto store_iterate = [&](const std::vector<Eigen::VectorXcd>& fields) {
    std::vector<FourierField> sampled;
    sampled.reserve(n);
    for (int i = 0; i < n; ++i) sampled.push_back(wrap(fields[i]));
    st.iterates.push_back(std::move(sampled));
  };

  std::vector<Eigen::VectorXcd> prev = lin;
  store_iterate(prev);
  st.k_norms.push_back(sample_k_norm(prev));

  std::vector<Eigen::VectorXcd> nonlin(n);
  for (int iter = 1; iter <= n_iter; ++iter) {
    for (int i = 0; i < n; ++i) {
      nonlin[i] = nonlinearity_B(wrap(prev[i]), wrap(prev[i])).coeffs();
    }
    std::vector<Eigen::VectorXcd> next(n);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXcd duhamel = Eigen::VectorXcd::Zero(slots);
      for (int i = 0; i <= j; ++i) {
        /* the first cell has no left sample; hold N constant there */
        const Eigen::VectorXcd& left = i == 0 ? nonlin[0] : nonlin[i - 1];
        const double tail = st.time_grid[j] - st.time_grid[i];
        duhamel += (widths[i] * (-tail * kappa4).exp() *
                    (g0[i] * left.array() + g1[i] * nonlin[i].array()))
                       .matrix();
      }
      next[j] = lin[j] - duhamel;
    }
    bool finite = true;
    for (int i = 0; i < n; ++i) finite = finite && next[i].allFinite();
    if (!finite) {
      const double inf = std::numeric_limits<double>::infinity();
      st.k_norms.push_back(inf);
      st.diff_k_norms.push_back(inf);
      st.diverged = true;
      st.divergence_index = iter;
      return st;
    }
    store_iterate(next);
    const double k = sample_k_norm(next);
    st.k_norms.push_back(k);
    std::vector<Eigen::VectorXcd> diff(n);
    for (int i = 0; i < n; ++i) diff[i] = next[i] - prev[i];
    st.diff_k_norms.push_back(sample_k_norm(diff));
    if (k > 10.0 * delta) {
      st.diverged = true;
      st.divergence_index = iter;
      return st;
    }
    prev = std::move(next);
  }
  return st;
}

double measure_small_data_threshold(const FourierField& shape, double horizon,
                                    const StepperConfig& cfg) {
  shape.Validate();
  cfg.Validate();
  Require(std::isfinite(horizon) && horizon > 0.0,
          "measure_small_data_threshold: horizon must be positive");
  const double base = sobolev_norm(shape, 0.5);
  Require(base > 0.0, "measure_small_data_threshold: shape must be nonzero");

  StepperConfig probe = cfg;
  probe.store_states = false;
  probe.record_every = 1;  // the certificate needs the full recorded history

  /* Certificate of sub-threshold behavior: the recorded H^{1/2} norm must
     decay monotonically (up to rounding) and end strictly below the initial
     amplitude.  An endpoint-only test is vacuous here: dissipation
     eventually wins for any real amplitude, so transient overshoot is the
     signal that the small-data regime has been left. */
  const auto decays = [&](double amplitude) {
    const FourierField h0 = (amplitude / base) * shape;
    const Trajectory traj = simulate(h0, horizon, probe);
    if (traj.termination != Termination::kCompleted) return false;
    double prev = amplitude;
    for (const DiagnosticsRecord& rec : traj.records) {
      const double cur = rec.sobolev.at(0.5);
      if (cur > prev * (1.0 + 1e-9)) return false;
      prev = cur;
    }
    return prev < amplitude;
  };

  constexpr double kLargest = 1024.0;
  constexpr double kSmallest = 1e-6;
  double a = 0.25;
  double lo = 0.0, hi = 0.0;
  if (decays(a)) {
    lo = a;
    while (lo < kLargest) {
      a *= 2.0;
      if (!decays(a)) {
        hi = a;
        break;
      }
      lo = a;
    }
    if (hi == 0.0) return lo;  // never lost stability inside the scan range
  } else {
    hi = a;
    while (hi > kSmallest) {
      a *= 0.5;
      if (decays(a)) {
        lo = a;
        break;
      }
      hi = a;
    }
    if (lo == 0.0) return 0.0;  // no decaying amplitude found at all
  }
  for (int round = 0; round < 20; ++round) {
    const double mid = std::sqrt(lo * hi);
    (decays(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace surfgrow

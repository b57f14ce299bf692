#include "surfgrow/functionals.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "surfgrow/evolve.hpp"

namespace surfgrow {

namespace {

void Require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

int QuadraturePoints(const FourierField& u) {
  return std::max(4 * (u.max_mode() + 1), 512);
}

Eigen::VectorXd RealSamples(const FourierField& u, int deriv_order, int n) {
  const FourierField d = deriv_order > 0 ? derivative(u, deriv_order) : u;
  return to_physical(d, n).values.real();
}

double MeanTimesL(const Eigen::ArrayXd& integrand, double period_length) {
  KahanSum acc;
  for (Eigen::Index i = 0; i < integrand.size(); ++i) acc.Add(integrand[i]);
  return acc.Value() * period_length / static_cast<double>(integrand.size());
}

/* f'(t_i) from the three samples around i on a nonuniform grid. */
double CenteredDerivative(const std::vector<double>& t,
                          const std::vector<double>& f, std::size_t i) {
  const double h1 = t[i] - t[i - 1];
  const double h2 = t[i + 1] - t[i];
  return -h2 / (h1 * (h1 + h2)) * f[i - 1] +
         (h2 - h1) / (h1 * h2) * f[i] +
         h1 / (h2 * (h1 + h2)) * f[i + 1];
}

}  // namespace

double dissipation_rate(const FourierField& u) {
  const double n2 = sobolev_norm(u, 2.0);
  return u.period_length() * n2 * n2;
}

double lyapunov_value(const FourierField& u, double alpha) {
  Require(u.is_real(), "lyapunov_value: field must be real");
  Require(std::isfinite(alpha), "lyapunov_value: alpha must be finite");
  const int n = QuadraturePoints(u);
  const Eigen::ArrayXd h = RealSamples(u, 0, n).array();
  const Eigen::ArrayXd e = alpha * h;
  const double m = e.maxCoeff();
  KahanSum acc;
  for (int i = 0; i < n; ++i) acc.Add(std::exp(e[i] - m));
  const double log_value =
      m + std::log(acc.Value() * u.period_length() / n);
  return std::exp(log_value);
}

double cubic_value(const FourierField& u) {
  Require(u.is_real(), "cubic_value: field must be real");
  const int n = QuadraturePoints(u);
  const Eigen::ArrayXd h = RealSamples(u, 0, n).array();
  return MeanTimesL(h * h * h, u.period_length());
}

double quartic_gradient_value(const FourierField& u) {
  Require(u.is_real(), "quartic_gradient_value: field must be real");
  const int n = QuadraturePoints(u);
  const Eigen::ArrayXd hx = RealSamples(u, 1, n).array();
  return MeanTimesL(hx * hx * hx * hx, u.period_length());
}

double exp_weighted_curvature(const FourierField& u, double alpha) {
  Require(u.is_real(), "exp_weighted_curvature: field must be real");
  const int n = QuadraturePoints(u);
  const Eigen::ArrayXd h = RealSamples(u, 0, n).array();
  const Eigen::ArrayXd hxx = RealSamples(u, 2, n).array();
  return MeanTimesL((alpha * h).exp() * hxx * hxx, u.period_length());
}

double exp_weighted_gradient4(const FourierField& u, double alpha) {
  Require(u.is_real(), "exp_weighted_gradient4: field must be real");
  const int n = QuadraturePoints(u);
  const Eigen::ArrayXd h = RealSamples(u, 0, n).array();
  const Eigen::ArrayXd hx = RealSamples(u, 1, n).array();
  return MeanTimesL((alpha * h).exp() * hx * hx * hx * hx, u.period_length());
}

double signed_curvature_cubic(const FourierField& u) {
  Require(u.is_real(), "signed_curvature_cubic: field must be real");
  const int n = QuadraturePoints(u);
  const Eigen::ArrayXd h = RealSamples(u, 0, n).array();
  const Eigen::ArrayXd hxx = RealSamples(u, 2, n).array();
  return MeanTimesL(h * hxx * hxx, u.period_length());
}

DiagnosticsRecord compute_diagnostics(const FourierField& u, double t,
                                      double dissipation_integral) {
  DiagnosticsRecord rec;
  rec.t = t;
  const double l2 = sobolev_norm(u, 0.0);
  rec.l2_sq = u.period_length() * l2 * l2;
  const double h2 = sobolev_norm(u, 2.0);
  rec.h2_sq = h2 * h2;
  rec.dissipation_integral = dissipation_integral;
  for (double a : {0.5, 1.0, 2.0}) rec.sobolev[a] = sobolev_norm(u, a);
  const double inf = std::numeric_limits<double>::infinity();
  rec.sup_norm = lebesgue_norm(u, inf);
  rec.c1_norm = c1_norm(u);
  rec.w14_norm = w14_norm(u);
  if (u.is_real()) {
    for (double a : {0.5, 1.0, 1.5}) rec.lyapunov[a] = lyapunov_value(u, a);
    rec.cubic = cubic_value(u);
    rec.quartic_gradient = quartic_gradient_value(u);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double a : {0.5, 1.0, 1.5}) rec.lyapunov[a] = nan;
    rec.cubic = nan;
    rec.quartic_gradient = nan;
  }
  return rec;
}

double energy_residual(const Trajectory& traj) {
  Require(!traj.records.empty(), "energy_residual: empty trajectory");
  const double base = traj.records.front().l2_sq;
  double worst = 0.0;
  for (const DiagnosticsRecord& rec : traj.records) {
    worst = std::max(worst, std::abs(rec.l2_sq +
                                     2.0 * rec.dissipation_integral - base));
  }
  if (worst == 0.0) return 0.0;
  return worst / base;
}

namespace {

double IdentityResidual(const Trajectory& traj,
                        const std::vector<double>& value,
                        const std::vector<double>& drift, double* scale) {
  const std::vector<double>& t = traj.times;
  double worst = 0.0;
  double magnitude = 1.0;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double dv = CenteredDerivative(t, value, i);
    worst = std::max(worst, std::abs(dv + drift[i]));
    magnitude = std::max({magnitude, std::abs(dv), std::abs(drift[i])});
  }
  if (scale != nullptr) *scale = magnitude;
  return worst;
}

void RequireDenseStates(const Trajectory& traj, const char* op) {
  Require(traj.states.size() == traj.times.size() && traj.times.size() >= 3,
          op);
  Require(traj.reality, op);
}

}  // namespace

double lyapunov_identity_residual(const Trajectory& traj, double alpha,
                                  double* scale) {
  RequireDenseStates(traj,
                     "lyapunov_identity_residual: needs a real trajectory "
                     "with stored states at three or more times");
  const double c4 = (2.0 - alpha) * alpha * alpha * alpha / 3.0;
  std::vector<double> value(traj.states.size());
  std::vector<double> drift(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    value[i] = lyapunov_value(traj.states[i], alpha);
    drift[i] = alpha * alpha * exp_weighted_curvature(traj.states[i], alpha) +
               c4 * exp_weighted_gradient4(traj.states[i], alpha);
  }
  return IdentityResidual(traj, value, drift, scale);
}

double cubic_identity_residual(const Trajectory& traj, double* scale) {
  RequireDenseStates(traj,
                     "cubic_identity_residual: needs a real trajectory with "
                     "stored states at three or more times");
  std::vector<double> value(traj.states.size());
  std::vector<double> drift(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    value[i] = cubic_value(traj.states[i]) / 3.0;
    drift[i] = 2.0 * signed_curvature_cubic(traj.states[i]) +
               (4.0 / 3.0) * quartic_gradient_value(traj.states[i]);
  }
  return IdentityResidual(traj, value, drift, scale);
}

BudgetReport budget(const Trajectory& traj, BudgetKind kind, double param,
                    double t_lo, double t_hi) {
  Require(!traj.times.empty(), "budget: empty trajectory");
  Require(t_lo <= t_hi, "budget: window must be ordered");

  BudgetReport report;
  std::vector<std::size_t> window;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] >= t_lo && traj.times[i] <= t_hi) window.push_back(i);
  }

  const bool needs_states =
      kind == BudgetKind::kSobolev || kind == BudgetKind::kH1ToH3;
  if (needs_states) {
    Require(traj.states.size() == traj.times.size(),
            "budget: this budget kind needs stored states");
  } else {
    Require(traj.records.size() == traj.times.size(),
            "budget: records must align with recorded times");
  }

  std::vector<double> lhs(window.size(), 0.0);
  std::vector<double> rhs(window.size(), 0.0);
  switch (kind) {
    case BudgetKind::kSobolev: {
      Require(param > 0.5 && param < 4.5,
              "budget: Sobolev budget needs alpha in (1/2, 9/2)");
      report.exponent = 8.0 / (2.0 * param - 1.0);
      char buf[32];
      std::snprintf(buf, sizeof(buf), "H%g", param);
      report.name = buf;
      report.critical = true;
      for (std::size_t m = 0; m < window.size(); ++m) {
        lhs[m] = std::pow(sobolev_norm(traj.states[window[m]], param),
                          report.exponent);
      }
      break;
    }
    case BudgetKind::kW14: {
      report.exponent = 16.0 / 3.0;
      report.name = "W14";
      report.critical = true;
      for (std::size_t m = 0; m < window.size(); ++m) {
        lhs[m] = std::pow(traj.records[window[m]].w14_norm, report.exponent);
      }
      break;
    }
    case BudgetKind::kC1: {
      report.exponent = 4.0;
      report.name = "C1";
      report.critical = true;
      for (std::size_t m = 0; m < window.size(); ++m) {
        lhs[m] = std::pow(traj.records[window[m]].c1_norm, report.exponent);
      }
      break;
    }
    case BudgetKind::kH1ToH3: {
      Require(param > 0.0 && param < 10.0,
              "budget: interval inequality needs r in (0, 10)");
      report.exponent = param;
      report.name = "H1toH3";
      report.critical = false;
      for (std::size_t m = 0; m < window.size(); ++m) {
        lhs[m] = std::pow(sobolev_norm(traj.states[window[m]], 3.0),
                          param / 5.0);
        rhs[m] = std::pow(sobolev_norm(traj.states[window[m]], 1.0), param);
      }
      break;
    }
  }

  KahanSum value, companion;
  for (std::size_t m = 0; m + 1 < window.size(); ++m) {
    const double dt = traj.times[window[m + 1]] - traj.times[window[m]];
    value.Add(0.5 * dt * (lhs[m] + lhs[m + 1]));
    companion.Add(0.5 * dt * (rhs[m] + rhs[m + 1]));
  }
  report.value = value.Value();
  if (kind == BudgetKind::kH1ToH3) {
    report.rhs_value =
        std::pow(companion.Value(), (10.0 - param) / 5.0);
    report.ratio = report.value / report.rhs_value;
  }
  return report;
}

std::string diagnostics_csv_header() {
  return "t,l2_sq,h2_sq,dissip,h_half,h1,h2,sup,c1,w14,"
         "lyap_0.5,lyap_1.0,lyap_1.5,cubic,quartic_grad";
}

std::string diagnostics_csv_row(const DiagnosticsRecord& rec) {
  const double columns[] = {rec.t,
                            rec.l2_sq,
                            rec.h2_sq,
                            rec.dissipation_integral,
                            rec.sobolev.at(0.5),
                            rec.sobolev.at(1.0),
                            rec.sobolev.at(2.0),
                            rec.sup_norm,
                            rec.c1_norm,
                            rec.w14_norm,
                            rec.lyapunov.at(0.5),
                            rec.lyapunov.at(1.0),
                            rec.lyapunov.at(1.5),
                            rec.cubic,
                            rec.quartic_gradient};
  std::string row;
  for (double c : columns) {
    if (!row.empty()) row += ',';
    row += format_full(c);
  }
  return row;
}

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_diagnostics_csv: cannot open " +
                                     path);
  out << diagnostics_csv_header() << "\n";
  for (const DiagnosticsRecord& rec : records) {
    out << diagnostics_csv_row(rec) << "\n";
  }
  if (!out) {
    throw std::runtime_error("write_diagnostics_csv: write failed: " + path);
  }
}

}  // namespace surfgrow

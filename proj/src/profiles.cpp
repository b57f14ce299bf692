#include "surfgrow/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace surfgrow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void Require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

struct InnerValues {
  double g;
  double g1;  // g'
  double g2;  // g'' evaluated from the differentiated formula, not via B g
};

InnerValues Inner(const StationaryProfile& p, double x) {
  switch (p.case_id) {
    case 1:
      return {1.0 + p.c2 * x, p.c2, 0.0};
    case 2: {
      const double ch = std::cosh(p.b * x);
      const double sh = std::sinh(p.b * x);
      return {ch + (p.c2 / p.b) * sh, p.b * sh + p.c2 * ch,
              p.b * p.b * ch + p.c2 * p.b * sh};
    }
    default: {
      const double co = std::cos(p.b * x);
      const double si = std::sin(p.b * x);
      return {p.b * co + p.c2 * si, -p.b * p.b * si + p.c2 * p.b * co,
              -p.b * p.b * p.b * co - p.c2 * p.b * p.b * si};
    }
  }
}

/* Zeros of the inner function g in [lo, hi], enumerated from the closed
   form of each case. */
std::vector<double> InnerZeros(const StationaryProfile& p, double lo,
                               double hi) {
  std::vector<double> zeros;
  const auto keep = [&](double x) {
    if (x >= lo && x <= hi) zeros.push_back(x);
  };
  if (p.case_id == 1) {
    if (p.c2 != 0.0) keep(-1.0 / p.c2);
  } else if (p.case_id == 2) {
    /* cosh(bx) + (c2/b) sinh(bx) = 0  <=>  tanh(bx) = -b/c2, |c2| > b. */
    if (std::abs(p.c2) > p.b) keep(std::atanh(-p.b / p.c2) / p.b);
  } else {
    /* b cos(bx) + c2 sin(bx) = 0 at bx = atan2(b, -c2) + n pi. */
    const double theta = std::atan2(p.b, -p.c2);
    const double step = kPi / p.b;
    const double base = theta / p.b;
    const long n_lo = static_cast<long>(std::floor((lo - base) / step)) - 1;
    const long n_hi = static_cast<long>(std::ceil((hi - base) / step)) + 1;
    for (long n = n_lo; n <= n_hi; ++n) keep(base + n * step);
  }
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

double DistanceToSet(double x, const std::vector<double>& pts) {
  double d = kInf;
  for (double s : pts) d = std::min(d, std::abs(x - s));
  return d;
}

}  // namespace

StationaryProfile make_stationary_profile(int case_id, double period_length,
                                          double c1, double c2, double b) {
  Require(case_id >= 1 && case_id <= 3, "case_id must be 1, 2 or 3");
  Require(period_length > 0.0 && std::isfinite(period_length),
          "period must be positive");
  Require(std::isfinite(c1) && std::isfinite(c2), "c1, c2 must be finite");
  if (case_id != 1) Require(b > 0.0 && std::isfinite(b), "b must be positive");
  StationaryProfile p;
  p.case_id = case_id;
  p.period_length = period_length;
  p.c1 = c1;
  p.c2 = c2;
  p.b = case_id == 1 ? 0.0 : b;
  /* [0, L) zeros; the half-open end keeps x = L out of the set. */
  for (double z : InnerZeros(p, 0.0, period_length)) {
    if (z < period_length) p.singular_points.push_back(z);
  }
  return p;
}

double stationary_first_integral(const StationaryProfile& p) {
  switch (p.case_id) {
    case 1:
      return 0.0;
    case 2:
      return p.b * p.b;
    default:
      return -p.b * p.b;
  }
}

double stationary_eval(const StationaryProfile& p, double x) {
  Require(std::isfinite(x), "x must be finite");
  /* Snap to the analytic zero set so the value is -infinity exactly at a
     singular point even when g(x) rounds to a subnormal instead of 0. */
  if (DistanceToSet(x, p.singular_points) <= 1e-12 * std::max(1.0, std::abs(x)))
    return -kInf;
  return p.c1 + std::log(std::abs(Inner(p, x).g));
}

double stationary_residual(const StationaryProfile& p, double delta_exclusion,
                           int n_grid) {
  Require(delta_exclusion > 0.0, "exclusion radius must be positive");
  Require(n_grid >= 16, "grid too coarse");
  const double L = p.period_length;
  const double B = stationary_first_integral(p);
  const std::vector<double> zeros =
      InnerZeros(p, -delta_exclusion, L + delta_exclusion);
  double worst = -1.0;
  for (int i = 0; i < n_grid; ++i) {
    const double x = L * i / n_grid;
    if (DistanceToSet(x, zeros) < delta_exclusion) continue;
    const InnerValues v = Inner(p, x);
    const double hx = v.g1 / v.g;
    const double hxx = (v.g2 * v.g - v.g1 * v.g1) / (v.g * v.g);
    worst = std::max(worst, std::abs(hxx + hx * hx - B));
  }
  Require(worst >= 0.0, "exclusion radius removed every grid point");
  return worst;
}

double first_integral_residual(const std::function<double(double)>& h,
                               double period_length, double B,
                               const std::vector<double>& exclusion_points,
                               double delta_exclusion, int n_grid,
                               double fd_step) {
  Require(period_length > 0.0, "period must be positive");
  Require(delta_exclusion >= 0.0, "exclusion radius must be nonnegative");
  Require(n_grid >= 16, "grid too coarse");
  Require(fd_step > 0.0, "fd_step must be positive");
  const double d = fd_step;
  double worst = -1.0;
  for (int i = 0; i < n_grid; ++i) {
    const double x = period_length * i / n_grid;
    if (DistanceToSet(x, exclusion_points) < delta_exclusion) continue;
    const double f0 = h(x);
    const double fp1 = h(x + d), fm1 = h(x - d);
    const double fp2 = h(x + 2 * d), fm2 = h(x - 2 * d);
    if (!std::isfinite(f0) || !std::isfinite(fp1) || !std::isfinite(fm1) ||
        !std::isfinite(fp2) || !std::isfinite(fm2))
      continue;
    const double hx = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * d);
    const double hxx = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) /
                       (12 * d * d);
    worst = std::max(worst, std::abs(hxx + hx * hx - B));
  }
  Require(worst >= 0.0, "exclusion removed every grid point");
  return worst;
}

namespace {

/* Stencil weights, all 4th-order accurate on a uniform grid. */
constexpr double kD1[5] = {1.0, -8.0, 0.0, 8.0, -1.0};          // /(12 dy)
constexpr double kD2[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};      // /(12 dy^2)
constexpr double kD4[7] = {-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0};
                                                                // /(6 dy^4)
constexpr double kOneSided1[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};  // /(12 dy)

struct Grid {
  int n;
  double dy;
  Eigen::VectorXd y;
};

Grid MakeGrid(const SelfSimilarProblem& prob) {
  Require(prob.truncation > 0.0, "truncation Y must be positive");
  Require(prob.n_points >= 64, "need at least 64 nodes");
  Grid g;
  g.n = prob.n_points;
  g.dy = 2.0 * prob.truncation / (g.n - 1);
  g.y = Eigen::VectorXd::LinSpaced(g.n, -prob.truncation, prob.truncation);
  return g;
}

double At(const Eigen::VectorXd& v, int i) {
  return (i < 0 || i >= static_cast<int>(v.size())) ? 0.0 : v[i];
}

double D1At(const Eigen::VectorXd& v, int i, double dy) {
  double s = 0.0;
  for (int o = -2; o <= 2; ++o) s += kD1[o + 2] * At(v, i + o);
  return s / (12.0 * dy);
}

double D2At(const Eigen::VectorXd& v, int i, double dy) {
  double s = 0.0;
  for (int o = -2; o <= 2; ++o) s += kD2[o + 2] * At(v, i + o);
  return s / (12.0 * dy * dy);
}

double D4At(const Eigen::VectorXd& v, int i, double dy) {
  double s = 0.0;
  for (int o = -3; o <= 3; ++o) s += kD4[o + 3] * At(v, i + o);
  return s / (6.0 * dy * dy * dy * dy);
}

Eigen::VectorXd OdeResidual(const Grid& g, const Eigen::VectorXd& phi) {
  Eigen::VectorXd d1(g.n), out(g.n);
  for (int i = 0; i < g.n; ++i) d1[i] = D1At(phi, i, g.dy);
  Eigen::VectorXd w = d1.array().square();
  for (int i = 0; i < g.n; ++i)
    out[i] = D4At(phi, i, g.dy) + D2At(w, i, g.dy) + g.y[i] * d1[i];
  return out;
}

bool IsBoundaryRow(const SelfSimilarProblem& prob, int i, int n) {
  if (i == 0 || i == n - 1) return true;
  if (prob.boundary == SelfSimilarProblem::Boundary::kDecayToZero)
    return i == 1 || i == n - 2;
  return false;
}

/* Full nonlinear system: boundary rows replace the ODE rows at the edge. */
Eigen::VectorXd SystemResidual(const SelfSimilarProblem& prob, const Grid& g,
                               const Eigen::VectorXd& phi) {
  Eigen::VectorXd F = OdeResidual(g, phi);
  const int n = g.n;
  F[0] = phi[0];
  F[n - 1] = phi[n - 1];
  if (prob.boundary == SelfSimilarProblem::Boundary::kDecayToZero) {
    double fwd = 0.0, bwd = 0.0;
    for (int o = 0; o < 5; ++o) {
      fwd += kOneSided1[o] * phi[1 + o];
      bwd += kOneSided1[o] * phi[n - 2 - o];
    }
    F[1] = fwd / (12.0 * g.dy);
    F[n - 2] = -bwd / (12.0 * g.dy);
  }
  return F;
}

Eigen::SparseMatrix<double> SystemJacobian(const SelfSimilarProblem& prob,
                                           const Grid& g,
                                           const Eigen::VectorXd& phi) {
  const int n = g.n;
  const double dy = g.dy;
  Eigen::VectorXd d1(n);
  for (int i = 0; i < n; ++i) d1[i] = D1At(phi, i, dy);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 9);
  for (int i = 0; i < n; ++i) {
    if (IsBoundaryRow(prob, i, n)) {
      if (i == 0 || i == n - 1) {
        trip.emplace_back(i, i, 1.0);
      } else if (i == 1) {
        for (int o = 0; o < 5; ++o)
          trip.emplace_back(i, 1 + o, kOneSided1[o] / (12.0 * dy));
      } else {
        for (int o = 0; o < 5; ++o)
          trip.emplace_back(i, n - 2 - o, -kOneSided1[o] / (12.0 * dy));
      }
      continue;
    }
    double acc[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};  // columns i-4 .. i+4
    for (int o = -3; o <= 3; ++o)
      acc[o + 4] += kD4[o + 3] / (6.0 * dy * dy * dy * dy);
    for (int o = -2; o <= 2; ++o) acc[o + 4] += g.y[i] * kD1[o + 2] / (12.0 * dy);
    /* d/dphi of D2[(D1 phi)^2]: chain through the midpoint k. */
    for (int ok = -2; ok <= 2; ++ok) {
      const int k = i + ok;
      if (k < 0 || k >= n) continue;
      const double outer = kD2[ok + 2] / (12.0 * dy * dy) * 2.0 * d1[k];
      for (int om = -2; om <= 2; ++om)
        acc[ok + om + 4] += outer * kD1[om + 2] / (12.0 * dy);
    }
    for (int o = -4; o <= 4; ++o) {
      const int col = i + o;
      if (col >= 0 && col < n && acc[o + 4] != 0.0)
        trip.emplace_back(i, col, acc[o + 4]);
    }
  }
  Eigen::SparseMatrix<double> J(n, n);
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

}  // namespace

Eigen::VectorXd self_similar_operator(const SelfSimilarProblem& prob,
                                      const Eigen::VectorXd& phi) {
  const Grid g = MakeGrid(prob);
  Require(phi.size() == g.n, "phi size does not match the grid");
  return OdeResidual(g, phi);
}

SelfSimilarResult self_similar_solve(const SelfSimilarProblem& prob,
                                     const Eigen::VectorXd& guess) {
  const Grid g = MakeGrid(prob);
  Require(guess.size() == g.n, "guess size does not match the grid");
  const auto norm = [&](const Eigen::VectorXd& v) {
    return std::sqrt(g.dy * v.squaredNorm());
  };

  SelfSimilarResult out;
  out.y = g.y;
  Eigen::VectorXd phi = guess;
  phi[0] = phi[g.n - 1] = 0.0;

  constexpr int kMaxIter = 200;
  Eigen::VectorXd F = SystemResidual(prob, g, phi);
  double res = norm(F);
  bool tiny_step = false;
  int iter = 0;
  for (; iter < kMaxIter; ++iter) {
    out.residual_trace.push_back(res);
    if (norm(phi) < 1e-8) {
      out.converged_to_zero = true;
      break;
    }
    if (res < 1e-12 || tiny_step) break;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(SystemJacobian(prob, g, phi));
    if (lu.info() != Eigen::Success) {
      tiny_step = true;  // singular Jacobian: no usable direction
      break;
    }
    Eigen::VectorXd delta = lu.solve(-F);
    if (!delta.allFinite()) {
      tiny_step = true;
      break;
    }

    double lambda = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial, F_trial;
    double res_trial = res;
    for (int h = 0; h < 30; ++h) {
      trial = phi + lambda * delta;
      F_trial = SystemResidual(prob, g, trial);
      res_trial = norm(F_trial);
      if (std::isfinite(res_trial) && res_trial < res) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      tiny_step = true;
      break;
    }
    const double step = norm(lambda * delta);
    phi = trial;
    F = F_trial;
    res = res_trial;
    if (step < 1e-12) tiny_step = true;
  }

  out.phi = phi;
  out.residual = res;
  out.newton_iterations = iter;
  if (!out.converged_to_zero) out.converged_to_zero = norm(phi) < 1e-8;
  /* A stall is a dead iteration (no usable step, or the budget ran out)
     that still carries a visibly nonzero residual. */
  out.stalled =
      !out.converged_to_zero && res > 1e-2 && (tiny_step || iter == kMaxIter);
  return out;
}

double self_similar_weak_form(const SelfSimilarProblem& prob,
                              const Eigen::VectorXd& phi,
                              const Eigen::VectorXd& eta) {
  const Grid g = MakeGrid(prob);
  Require(phi.size() == g.n && eta.size() == g.n, "size mismatch");
  KahanSum acc;
  for (int i = 0; i < g.n; ++i) {
    const double weight = (i == 0 || i == g.n - 1) ? 0.5 : 1.0;
    const double d1phi = D1At(phi, i, g.dy);
    const double term = phi[i] * D4At(eta, i, g.dy) +
                        d1phi * d1phi * D2At(eta, i, g.dy) - phi[i] * eta[i] -
                        g.y[i] * phi[i] * D1At(eta, i, g.dy);
    acc.Add(weight * g.dy * term);
  }
  return acc.Value();
}

double self_similar_strong_pairing(const SelfSimilarProblem& prob,
                                   const Eigen::VectorXd& phi,
                                   const Eigen::VectorXd& eta) {
  const Grid g = MakeGrid(prob);
  Require(phi.size() == g.n && eta.size() == g.n, "size mismatch");
  const Eigen::VectorXd F = OdeResidual(g, phi);
  KahanSum acc;
  for (int i = 0; i < g.n; ++i) {
    const double weight = (i == 0 || i == g.n - 1) ? 0.5 : 1.0;
    acc.Add(weight * g.dy * F[i] * eta[i]);
  }
  return acc.Value();
}

Eigen::VectorXd self_similar_random_guess(const SelfSimilarProblem& prob,
                                          std::uint64_t seed) {
  const Grid g = MakeGrid(prob);
  std::mt19937_64 gen(mix_seed(seed, 1));
  std::uniform_real_distribution<double> amp(-1.5, 1.5);
  std::uniform_real_distribution<double> center(-0.5 * prob.truncation,
                                                0.5 * prob.truncation);
  std::uniform_real_distribution<double> width(
      std::max(0.3, prob.truncation / 20.0), prob.truncation / 4.0);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(g.n);
  for (int bump = 0; bump < 4; ++bump) {
    const double a = amp(gen);
    const double mu = center(gen);
    const double sigma = width(gen);
    for (int i = 0; i < g.n; ++i) {
      const double z = (g.y[i] - mu) / sigma;
      phi[i] += a * std::exp(-z * z);
    }
  }
  phi[0] = phi[g.n - 1] = 0.0;
  return phi;
}

}  // namespace surfgrow

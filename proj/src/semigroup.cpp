#include "surfgrow/semigroup.hpp"

#include <cmath>
#include <stdexcept>

namespace surfgrow {

namespace {

void Require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

FourierField apply_semigroup(const FourierField& u, double t) {
  u.Validate();
  Require(std::isfinite(t) && t >= 0.0, "apply_semigroup: t must be >= 0");
  FourierField out = u;
  for (int j = 1; j <= u.max_mode(); ++j) {
    const double kap = u.wavenumber(j);
    const double factor = std::exp(-t * kap * kap * kap * kap);
    out.set_coeff(j, factor * u.coeff(j));
    if (!u.is_real()) out.set_coeff(-j, factor * u.coeff(-j));
  }
  return out;
}

FourierField apply_fractional_power(const FourierField& u, double gamma) {
  u.Validate();
  Require(std::isfinite(gamma), "apply_fractional_power: gamma must be finite");
  FourierField out = u;
  for (int j = 1; j <= u.max_mode(); ++j) {
    const double factor = std::pow(std::abs(u.wavenumber(j)), 4.0 * gamma);
    out.set_coeff(j, factor * u.coeff(j));
    if (!u.is_real()) out.set_coeff(-j, factor * u.coeff(-j));
  }
  return out;
}

double smoothing_constant(double gamma) {
  Require(std::isfinite(gamma) && gamma >= 0.0,
          "smoothing_constant: gamma must be >= 0");
  if (gamma == 0.0) return 1.0;
  return std::exp(gamma * (std::log(gamma) - 1.0));
}

namespace {

/* Squared supremand: G(s) = s^{2 theta} sum_j w_j exp(-2 s kappa_j^4). */
struct KZeroObjective {
  Eigen::ArrayXd weights;  // kappa^{2(1+alpha)} (|c_j|^2 + |c_-j|^2), j >= 1
  Eigen::ArrayXd kappa4;
  double two_theta;

  double operator()(double s) const {
    const double decayed = (weights * (-2.0 * s * kappa4).exp()).sum();
    return std::pow(s, two_theta) * decayed;
  }
};

}  // namespace

double k_zero(const FourierField& h0, double alpha, double t,
              double* argmax_s) {
  h0.Validate();
  Require(alpha > 0.0 && alpha < 0.5, "k_zero: alpha must lie in (0, 1/2)");
  Require(std::isfinite(t) && t > 0.0, "k_zero: t must be positive");

  const int K = h0.max_mode();
  KZeroObjective g;
  g.weights.resize(K);
  g.kappa4.resize(K);
  g.two_theta = (2.0 * alpha + 1.0) / 4.0;
  for (int j = 1; j <= K; ++j) {
    const double kap = h0.wavenumber(j);
    g.weights[j - 1] = std::pow(kap, 2.0 * (1.0 + alpha)) *
                       (std::norm(h0.coeff(j)) + std::norm(h0.coeff(-j)));
    g.kappa4[j - 1] = kap * kap * kap * kap;
  }

  /* Geometric grid over six decades below t, 200 points per decade. */
  constexpr int kDecades = 6;
  constexpr int kPerDecade = 200;
  const int n = kDecades * kPerDecade;
  const double ratio = std::pow(10.0, 1.0 / kPerDecade);
  auto grid_point = [&](int i) { return t * std::pow(ratio, i - n); };
  double best = 0.0, best_s = t;
  int best_i = n;
  for (int i = 0; i <= n; ++i) {
    const double si = (i == n) ? t : grid_point(i);
    const double gi = g(si);
    if (gi > best) {
      best = gi;
      best_s = si;
      best_i = i;
    }
  }

  /* Golden-section refinement on the bracket around the grid argmax. */
  const double lo = grid_point(best_i - 1);
  const double hi = (best_i >= n) ? t : grid_point(best_i + 1);
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double gc = g(c), gd = g(d);
  while ((b - a) > 1e-10 * b) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - kInvPhi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + kInvPhi * (b - a);
      gd = g(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double gm = g(mid);
  if (gm > best) {
    best = gm;
    best_s = mid;
  }
  if (argmax_s != nullptr) *argmax_s = best_s;
  return std::sqrt(best);
}

}  // namespace surfgrow

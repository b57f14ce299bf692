#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "surfgrow/field.hpp"

namespace surfgrow {

/* Closed-form stationary solutions h(x) = c1 + log|g(x)| of
   h_xxxx + (h_x^2)_xx = 0, classified by the first-integral constant:
     case 1: g = 1 + c2 x                    (B = 0)
     case 2: g = cosh(b x) + (c2/b) sinh(b x) (B = b^2)
     case 3: g = b cos(b x) + c2 sin(b x)     (B = -b^2)
   singular_points lists the zeros of g inside [0, L); h = -infinity there. */
struct StationaryProfile {
  int case_id = 3;
  double period_length = kDefaultPeriod;
  double c1 = 0.0;
  double c2 = 0.0;
  double b = 1.0;  // cases 2 and 3 only
  std::vector<double> singular_points;
};

/* Validates the parameters and enumerates the singular set analytically.
   Case 3 is L-periodic iff b is an integer multiple of 2 pi / L; other b
   values are legal (the profile is then a non-periodic formula on the line,
   which the periodicity property test relies on). */
StationaryProfile make_stationary_profile(int case_id, double period_length,
                                          double c1, double c2,
                                          double b = 1.0);

/* Closed-form evaluation at any real x; -infinity exactly on the singular
   set (nearest-point snap absorbs the last-bit rounding of the root). */
double stationary_eval(const StationaryProfile& p, double x);

/* First-integral constant B of the case. */
double stationary_first_integral(const StationaryProfile& p);

/* max |h_xx + h_x^2 - B| over a uniform grid on [0, L), skipping points
   within delta_exclusion of a zero of g.  Derivatives use the differentiated
   closed forms, so the result measures floating-point consistency of the
   implemented profile, not discretization error. */
double stationary_residual(const StationaryProfile& p, double delta_exclusion,
                           int n_grid = 4096);

/* Finite-difference detector for arbitrary profile evaluations: the same
   first-integral residual, but with h_x and h_xx from five-point stencils of
   h, step fd_step.  Used to expose profiles that merely look stationary. */
double first_integral_residual(const std::function<double(double)>& h,
                               double period_length, double B,
                               const std::vector<double>& exclusion_points,
                               double delta_exclusion, int n_grid = 4096,
                               double fd_step = 1e-4);

/* Truncated boundary-value problem for the self-similar profile equation
   phi'''' + (phi'^2)'' + y phi' = 0 on [-Y, Y]. */
struct SelfSimilarProblem {
  enum class Boundary { kDecayToZero, kFree };

  double truncation = 10.0;  // Y
  int n_points = 401;        // >= 64 uniform nodes on [-Y, Y]
  Boundary boundary = Boundary::kDecayToZero;
  std::uint64_t guess_seed = 0;  // descriptor carried into reports
};

struct SelfSimilarResult {
  Eigen::VectorXd y;
  Eigen::VectorXd phi;
  double residual = 0.0;  // discrete L2 norm of the full nonlinear system
  bool converged_to_zero = false;  // ||phi|| < 1e-8 (discrete L2)
  bool stalled = false;  // step < 1e-12 (or budget out) with residual > 1e-2
  int newton_iterations = 0;
  std::vector<double> residual_trace;  // per-iteration, for divergence reports
};

/* Damped Newton on the fourth-order collocation system: centered 4th-order
   stencils with zero extension beyond +-Y, phi pinned to 0 at the ends, and
   (for decay boundaries) one-sided phi' = 0 rows just inside.  Backtracking
   halves the step up to 30 times per iteration. */
SelfSimilarResult self_similar_solve(const SelfSimilarProblem& prob,
                                     const Eigen::VectorXd& guess);

/* The discrete operator phi'''' + (phi'^2)'' + y phi' at every node (zero
   extension, no boundary rows); consistency oracle for smooth phi. */
Eigen::VectorXd self_similar_operator(const SelfSimilarProblem& prob,
                                      const Eigen::VectorXd& phi);

/* Quadrature of the weak form
   int phi eta'''' + int (phi')^2 eta'' - int phi eta - int y phi eta'
   and of the strong pairing int (operator phi) eta; both trapezoid on the
   problem grid.  eta should vanish near +-Y so the zero extension is exact. */
double self_similar_weak_form(const SelfSimilarProblem& prob,
                              const Eigen::VectorXd& phi,
                              const Eigen::VectorXd& eta);
double self_similar_strong_pairing(const SelfSimilarProblem& prob,
                                   const Eigen::VectorXd& phi,
                                   const Eigen::VectorXd& eta);

/* Smooth random initial guess: a few Gaussian bumps inside |y| < Y/2,
   deterministic in the seed. */
Eigen::VectorXd self_similar_random_guess(const SelfSimilarProblem& prob,
                                          std::uint64_t seed);

}  // namespace surfgrow

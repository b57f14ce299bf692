#pragma once

#include <cstdint>
#include <vector>

#include "surfgrow/field.hpp"
#include "surfgrow/functionals.hpp"

namespace surfgrow {

enum class Scheme { kEtdrk4, kIfrk4 };

enum class Termination { kCompleted, kNormCapHit, kDtUnderflow };

struct StepperConfig {
  double dt = 1e-4;
  double dt_min = 1e-13;
  Scheme scheme = Scheme::kEtdrk4;
  double norm_cap = 1e8;      // stop once |h|_2 reaches this
  double adapt_target = 1e-7; // local-error tolerance (step doubling)
  int record_every = 1;       // diagnostics cadence in accepted steps
  bool adaptive = true;       // false pins dt (final step still clipped to T)
  bool store_states = true;   // keep the field at every recorded time
  std::int64_t max_steps = 20000000;

  void Validate() const;  // 0 < dt_min <= dt, norm_cap > 0, adapt_target > 0
};

struct Trajectory {
  double period_length = kDefaultPeriod;
  int max_mode = 1;
  bool reality = true;
  std::vector<double> times;           // recorded times, strictly increasing
  std::vector<FourierField> states;    // empty when store_states is false
  std::vector<DiagnosticsRecord> records;
  Termination termination = Termination::kCompleted;
  std::int64_t accepted_steps = 0;
  std::int64_t rejected_steps = 0;
};

/* One step of c_k' = -kappa_k^4 c_k - B(h,h)_k with the linear factor exact.
   A non-finite result (all_finite() false) signals step failure or blow-up
   to the caller; no exception is raised for that. */
FourierField step(const FourierField& u, double dt, Scheme scheme);

/* Integrates to time T, or stops early at norm_cap (|h|_2 >= cap) or when
   step-doubling rejections push dt below dt_min; both early stops are
   recorded terminations, not errors.  Acceptance test: local error e =
   |u_dt - u_{dt/2,x2}|_2 <= adapt_target * (1 + |h|_2); accepted steps
   advance with the two-half-step solution and accumulate the dissipation
   integral by trapezoid.  Exceeding max_steps throws (misconfiguration). */
Trajectory simulate(const FourierField& h0, double T, const StepperConfig& cfg);

struct PicardState {
  double alpha = 0.25;
  double horizon = 1.0;   // T
  double delta = 0.0;     // ball radius of S_alpha^delta
  std::vector<double> time_grid;                   // s_i = T (i/n)^4, i = 1..n
  std::vector<std::vector<FourierField>> iterates; // iterate -> field per s_i
  std::vector<double> k_norms;                     // K(T, h_n)
  std::vector<double> diff_k_norms;                // K(T, h_{n+1} - h_n)
  bool diverged = false;
  int divergence_index = -1;  // iterate whose K-norm exceeded 10 delta
};

/* Picard iterates h_{n+1} = F(h_n), starting from h_0-propagation, with
   F(h)(t) = e^{-tA} h_0 - int_0^t e^{-(t-s)A} B(h,h)(s) ds (the sign of the
   evolution equation).  The Duhamel integral uses piecewise-linear product
   quadrature on the graded grid with the per-mode linear factor exact. */
PicardState picard_iterate(const FourierField& h0, double alpha, double T,
                           int n_iter, double delta);

/* K(T, h) = max_i s_i^{(1+2 alpha)/8} |h(s_i)|_{1+alpha} over the samples. */
double weighted_k_norm(const std::vector<double>& times,
                       const std::vector<FourierField>& fields, double alpha,
                       double T);
double trajectory_k_norm(const Trajectory& traj, double alpha, double T);

/* (sum_{k != 0} |kappa_k|^{2(1+alpha)} (sup_{0 < s <= T} s^{(1+2 alpha)/8}
   |c_k(s)|)^2)^{1/2}: the per-mode supremum taken before summing, so it
   dominates the sampled K-norm. */
double star_norm(const Trajectory& traj, double alpha, double T);

/* Trapezoid quadrature of |h(t)|_{1+alpha}^{8/(1+2 alpha)} over recorded
   times up to T. */
double integrability_norm(const Trajectory& traj, double alpha, double T);

/* Euler beta function B((3-2 alpha)/4, (1+2 alpha)/8): the alpha-dependent
   factor of the contraction constant of F. */
double duhamel_beta_constant(double alpha);

/* Largest amplitude a (in the |.|_{1/2} norm) for which the run from the
   rescaled shape still decays: a * shape / |shape|_{1/2} integrated to
   horizon must complete with the recorded H^{1/2} norm monotonically
   nonincreasing and ending below a.  Geometric scan followed by bisection;
   the returned threshold is a measured artifact quantity. */
double measure_small_data_threshold(const FourierField& shape, double horizon,
                                    const StepperConfig& cfg);

}  // namespace surfgrow

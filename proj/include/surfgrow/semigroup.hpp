#pragma once

#include "surfgrow/field.hpp"

namespace surfgrow {

/* e^{-tA} with A = d^4/dx^4: coefficient j multiplied by exp(-t kappa_j^4).
   Requires t >= 0. */
FourierField apply_semigroup(const FourierField& u, double t);

/* A^gamma: coefficient j multiplied by |kappa_j|^{4 gamma}.  gamma may be
   negative since no zero mode exists. */
FourierField apply_fractional_power(const FourierField& u, double gamma);

/* Sharp constant of sup_{x>0} x^gamma e^{-x}: (gamma/e)^gamma, 1 at 0.
   Bounds |A^gamma e^{-tA}| <= c_gamma t^{-gamma} on the diagonal symbol. */
double smoothing_constant(double gamma);

/* sup_{s in (0,t]} s^{(2 alpha + 1)/8} |e^{-sA} h0|_{1+alpha} for
   alpha in (0, 1/2).  Geometric grid (>= 200 points per decade over >= 6
   decades below t) plus golden-section refinement around the grid argmax,
   relative tolerance 1e-10.  Nondecreasing in t. */
double k_zero(const FourierField& h0, double alpha, double t,
              double* argmax_s = nullptr);

}  // namespace surfgrow

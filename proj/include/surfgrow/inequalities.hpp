#pragma once

#include <cstdint>

#include "surfgrow/field.hpp"

namespace surfgrow {

struct ExponentTriple {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/* Admissibility of (alpha, beta, gamma):
     - alpha, beta >= 0;
     - alpha + beta + gamma >= 1/2, strictly when any entry equals 1/2;
     - if gamma < 0: alpha or beta <= 1/2, or alpha or beta >= -gamma. */
bool condition_holds(const ExponentTriple& t);

enum class GrowthRegime { kPower, kLog, kConstant };

/* Regime of sum_{0<|k|<=a} |k|^{-2 gamma}: a^{1-2 gamma} for gamma < 1/2,
   log a at gamma = 1/2, bounded above it. */
GrowthRegime sum_easy_regime(double gamma);

/* The exact finite sum over 0 < |k| <= a (a >= 1). */
double sum_easy(double gamma, double a);

/* Smallest constant making the regime envelope an upper bound over the
   sweep a = 2^4 .. 2^14 (reported empirical constant). */
double sum_easy_constant(double gamma);

/* Exact sum over |k| < 2|m|, 0 < |k-m| < |k|/2 of
   |k-m|^{-2 alpha} |k|^{-2 gamma}; m != 0. */
double sum_hard(double alpha, double gamma, long m);

/* Least-squares slope of log sum_hard vs log m over m = 2^3 .. 2^12. */
double sum_hard_growth_exponent(double alpha, double gamma);

/* The exponent beta the counting bound c|m|^{2 beta} is sharp at:
   beta = max(1/2 - alpha, 0) - gamma (log-corrected on alpha = 1/2). */
double sum_hard_sharp_beta(double alpha, double gamma);

/* Hypothesis of the hard counting bound: the admissibility condition plus,
   when gamma < 0, alpha <= 1/2 or beta >= -gamma. */
bool sum_hard_admissible(double alpha, double beta, double gamma);

/* |<B(u,v), w>| / (|u|_{1+alpha} |v|_{1+beta} |w|_{2+gamma}) with B by exact
   convolution and <f,g> = L sum c_f conj(c_g).  Inadmissible triples are
   legal inputs (the growth of the ratio is itself the measurement); zero
   norms are not. */
double trilinear_ratio(const FourierField& u, const FourierField& v,
                       const FourierField& w, const ExponentTriple& t);

struct InequalityReport {
  ExponentTriple triple;
  int k_used = 0;
  long sample_count = 0;
  double max_ratio = 0.0;     // at k_used, after hill climbing
  double max_ratio_2k = 0.0;  // same procedure at 2 * k_used
  double stability = 0.0;     // max_ratio_2k / max_ratio
  std::uint64_t argmax_seed = 0;  // substream seed of the best raw sample
  double slope_u = 0.0;           // spectral slopes of that sample
  double slope_v = 0.0;
  double slope_w = 0.0;
};

/* Empirical sup of the ratio at resolutions K and 2K: random complex
   Gaussian fields with slopes drawn from [-3, 0], one substream per sample
   index (so worker count never changes the result), then 500 coordinate
   hill-climbing perturbations from the best sample. */
InequalityReport trilinear_sup(const ExponentTriple& t, int max_mode,
                               long samples, std::uint64_t seed);

}  // namespace surfgrow

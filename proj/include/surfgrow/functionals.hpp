#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "surfgrow/field.hpp"

namespace surfgrow {

struct Trajectory;  // evolve.hpp

/* Everything monitored along a run.  The sobolev map holds |h|_alpha for
   alpha in {0.5, 1, 2}; the lyapunov map holds int e^{alpha h} dx for
   alpha in {0.5, 1.0, 1.5}.  lyapunov, cubic and quartic_gradient are
   pointwise functionals of a real-valued profile; complex runs record NaN
   there while every norm column stays meaningful. */
struct DiagnosticsRecord {
  double t = 0.0;
  double l2_sq = 0.0;
  double h2_sq = 0.0;
  double dissipation_integral = 0.0;
  std::map<double, double> sobolev;
  double sup_norm = 0.0;
  double c1_norm = 0.0;
  double w14_norm = 0.0;
  std::map<double, double> lyapunov;
  double cubic = 0.0;
  double quartic_gradient = 0.0;
};

DiagnosticsRecord compute_diagnostics(const FourierField& u, double t,
                                      double dissipation_integral);

/* Instantaneous dissipation rate |h_xx|^2_{L^2} = L sum kappa^4 |c|^2. */
double dissipation_rate(const FourierField& u);

/* int e^{alpha h} dx by quadrature; evaluated as exp(max) * int e^{alpha h -
   max} so a deep valley cannot overflow the accumulator.  A genuine overflow
   of the value itself returns +infinity (a legitimate blow-up signal). */
double lyapunov_value(const FourierField& u, double alpha);

double cubic_value(const FourierField& u);             // int h^3 dx
double quartic_gradient_value(const FourierField& u);  // int h_x^4 dx

/* Weighted integrals entering the dissipation identities. */
double exp_weighted_curvature(const FourierField& u, double alpha);   // int e^{alpha h} h_xx^2
double exp_weighted_gradient4(const FourierField& u, double alpha);   // int e^{alpha h} h_x^4
double signed_curvature_cubic(const FourierField& u);                 // int h h_xx^2

/* max_t |(|h(t)|^2 + 2 int_0^t |h_xx|^2) - |h(0)|^2| / |h(0)|^2 from the
   recorded diagnostics (zero data returns 0). */
double energy_residual(const Trajectory& traj);

/* Residual of d/dt int e^{alpha h} + alpha^2 int e^{alpha h} h_xx^2
   + ((2-alpha) alpha^3 / 3) int e^{alpha h} h_x^4 = 0, maximized over
   interior record times; d/dt by centered differences on the recorded
   (nonuniform) times.  If scale is non-null it receives
   max(1, largest term magnitude) for tolerance scaling. */
double lyapunov_identity_residual(const Trajectory& traj, double alpha,
                                  double* scale = nullptr);

/* Residual of (1/3) d/dt int h^3 + 2 int h h_xx^2 + (4/3) int h_x^4 = 0,
   same differencing and scale convention. */
double cubic_identity_residual(const Trajectory& traj, double* scale = nullptr);

enum class BudgetKind { kSobolev, kW14, kC1, kH1ToH3 };

/* Time-quadrature of a named norm power.  For kH1ToH3, value is the left
   side int |h|_3^{r/5} dt, rhs_value is (int |h|_1^r dt)^{(10-r)/5} and
   ratio their quotient; the other kinds leave rhs_value and ratio NaN. */
struct BudgetReport {
  std::string name;
  double exponent = 0.0;
  double value = 0.0;
  bool critical = false;
  double rhs_value = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
};

/* param is alpha for kSobolev (must lie in (1/2, 9/2)) and r for kH1ToH3
   (must lie in (0, 10)); ignored otherwise.  The quadrature runs over
   recorded times clipped to [t_lo, t_hi]. */
BudgetReport budget(const Trajectory& traj, BudgetKind kind, double param = 0.0,
                    double t_lo = 0.0,
                    double t_hi = std::numeric_limits<double>::infinity());

std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRecord& rec);
void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                           const std::string& path);

}  // namespace surfgrow

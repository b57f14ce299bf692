#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace surfgrow {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kDefaultPeriod = 2.0 * kPi;

/* Compensated (Kahan) accumulator; norm and quadrature reductions use it so
   results do not depend on accumulation luck and stay reproducible. */
class KahanSum {
 public:
  void Add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double Value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

/* Zero-mean periodic function on [0, L) held as truncated Fourier
   coefficients: u(x) = sum_{0 < |j| <= K} c_j exp(i kappa_j x) with
   kappa_j = 2*pi*j/L.  Slot j = 0 exists for indexing convenience but must
   stay zero.  A field flagged real keeps c_{-j} = conj(c_j); the setter
   maintains that mirror automatically. */
class FourierField {
 public:
  FourierField(double period_length, int max_mode, bool reality = true);

  /* coeffs has size 2K+1, entry index j+K for mode j; entry K must be 0. */
  static FourierField FromCoefficients(double period_length, int max_mode,
                                       const Eigen::VectorXcd& coeffs,
                                       bool reality);

  /* Assembly path for integrators: zeroes the mean slot and symmetrizes real
     fields but skips the finiteness check, so an overflowing step can be
     reported through all_finite() instead of an exception. */
  static FourierField FromCoefficientsUnchecked(double period_length,
                                                int max_mode,
                                                Eigen::VectorXcd coeffs,
                                                bool reality);

  double period_length() const { return period_length_; }
  int max_mode() const { return max_mode_; }
  bool is_real() const { return reality_; }

  double wavenumber(int j) const { return 2.0 * kPi * j / period_length_; }

  Complex coeff(int j) const { return coeffs_[j + max_mode_]; }
  void set_coeff(int j, Complex value);

  const Eigen::VectorXcd& coeffs() const { return coeffs_; }

  bool all_finite() const;
  /* Throws std::invalid_argument when an invariant is broken (non-finite
     amplitude, populated zero mode, conjugate symmetry violated). */
  void Validate() const;

  FourierField& operator+=(const FourierField& other);
  FourierField& operator-=(const FourierField& other);
  FourierField& operator*=(double scale);

 private:
  double period_length_;
  int max_mode_;
  bool reality_;
  Eigen::VectorXcd coeffs_;
};

FourierField operator+(FourierField a, const FourierField& b);
FourierField operator-(FourierField a, const FourierField& b);
FourierField operator*(double scale, FourierField a);

/* Uniform samples of a field on [0, L): values[m] = u(m L / n). */
struct PhysicalGrid {
  double period_length = kDefaultPeriod;
  bool reality = true;
  Eigen::VectorXcd values;

  int n_points() const { return static_cast<int>(values.size()); }
  double x(int m) const { return period_length * m / values.size(); }
};

/* |u|_alpha = (sum_j |kappa_j|^{2 alpha} |c_j|^2)^{1/2}; for L = 2*pi the
   weights are plain integers.  alpha may be negative (no zero mode exists). */
double sobolev_norm(const FourierField& u, double alpha);

/* Spectral derivative: coefficient j multiplied by (i kappa_j)^order. */
FourierField derivative(const FourierField& u, int order);

/* B(u, v) = (u_x v_x)_xx truncated back to max_mode (Galerkin projection).
   The default path multiplies on a zero-padded grid, which is alias-free for
   a quadratic product; the direct path is the O(K^2) convolution. */
FourierField nonlinearity_B(const FourierField& u, const FourierField& v);
FourierField nonlinearity_B_convolution(const FourierField& u,
                                        const FourierField& v);

/* |D^k u|_{L^p} by trapezoid quadrature on a uniform grid of at least
   4(K+1) points (n_points = 0 picks the default); p may be infinity. */
double lebesgue_norm(const FourierField& u, double p, int deriv_order = 0,
                     int n_points = 0);

/* sup|u| + sup|u_x| and |u|_{L^4} + |u_x|_{L^4} on the oversampled grid. */
double c1_norm(const FourierField& u, int n_points = 0);
double w14_norm(const FourierField& u, int n_points = 0);

/* <f, g> = integral_0^L f conj(g) dx = L sum_j c_j(f) conj(c_j(g)). */
Complex inner_product(const FourierField& f, const FourierField& g);

/* Requires n_points >= 2K+2 so the round-trip through from_physical is
   lossless. */
PhysicalGrid to_physical(const FourierField& u, int n_points = 0);
FourierField from_physical(const PhysicalGrid& grid, int max_mode,
                           bool reality);

/* Same coefficients reinterpreted on a different period; mode j then carries
   wavenumber 2*pi*j/new_period (the x -> L/new_period rescaling). */
FourierField with_period(const FourierField& u, double new_period);

/* Builders used by presets and tests. */
FourierField cosine_field(double period_length, int max_mode, int mode,
                          double amplitude);
FourierField complex_exponential_field(double period_length, int max_mode,
                                       int mode, Complex amplitude);
/* c_j = amplitude * rho^j on modes j = 1..K only; not conjugate-symmetric. */
FourierField geometric_complex_field(double period_length, int max_mode,
                                     double amplitude, double rho);
/* Gaussian coefficients with envelope |j|^slope; deterministic in seed. */
FourierField random_field(double period_length, int max_mode, double slope,
                          std::uint64_t seed, bool reality = true);

/* splitmix64 stream mixer: derives independent substream seeds from a base
   seed and an index, so sample order and worker count never matter. */
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/* Snapshot text format: one header line `L <real> K <int> t <real>
   complex <0|1>`, then one `j re im` line per nonzero-eligible mode, written
   with 17 significant digits so the decimal round-trip is exact. */
struct Snapshot {
  FourierField field;
  double t = 0.0;
};

void write_snapshot(const FourierField& u, double t, const std::string& path);
Snapshot read_snapshot(const std::string& path);

/* Formats a double with 17 significant digits (exact decimal round-trip). */
std::string format_full(double x);

}  // namespace surfgrow

#include "surfgrow/field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace surfgrow {

namespace {

constexpr double kIngestTol = 1e-12;

void Require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

Eigen::FFT<double>& FftEngine() {
  /* Eigen's FFT object caches one plan per transform size. */
  thread_local Eigen::FFT<double> fft;
  return fft;
}

/* x_m = sum_k bins_k exp(+2 pi i k m / n), unscaled. */
Eigen::VectorXcd InverseDft(const Eigen::VectorXcd& bins) {
  Eigen::VectorXcd out(bins.size());
  FftEngine().inv(out, bins);
  return out * static_cast<double>(bins.size());
}

/* X_k = sum_m x_m exp(-2 pi i k m / n), unscaled. */
Eigen::VectorXcd ForwardDft(const Eigen::VectorXcd& x) {
  Eigen::VectorXcd out(x.size());
  FftEngine().fwd(out, x);
  return out;
}

int NextPow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

/* Modes j in [-K, K] go to DFT bins (j mod n); needs n >= 2K+1. */
Eigen::VectorXcd ScatterToBins(const FourierField& u, int n) {
  const int K = u.max_mode();
  Eigen::VectorXcd bins = Eigen::VectorXcd::Zero(n);
  for (int j = 1; j <= K; ++j) {
    bins[j] = u.coeff(j);
    bins[n - j] = u.coeff(-j);
  }
  return bins;
}

int DefaultQuadraturePoints(int max_mode) {
  return std::max(4 * (max_mode + 1), 512);
}

/* (i)^order as an exact unit. */
Complex ImagUnitPower(int order) {
  switch (((order % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void SymmetrizeReal(Eigen::VectorXcd& coeffs, int K) {
  for (int j = 1; j <= K; ++j) {
    const Complex avg = 0.5 * (coeffs[K + j] + std::conj(coeffs[K - j]));
    coeffs[K + j] = avg;
    coeffs[K - j] = std::conj(avg);
  }
  coeffs[K] = Complex(0.0, 0.0);
}

}  // namespace

FourierField::FourierField(double period_length, int max_mode, bool reality)
    : period_length_(period_length),
      max_mode_(max_mode),
      reality_(reality),
      coeffs_(Eigen::VectorXcd::Zero(2 * max_mode + 1)) {
  Require(std::isfinite(period_length) && period_length > 0.0,
          "FourierField: period_length must be positive");
  Require(max_mode >= 1, "FourierField: max_mode must be >= 1");
}

FourierField FourierField::FromCoefficients(double period_length, int max_mode,
                                            const Eigen::VectorXcd& coeffs,
                                            bool reality) {
  FourierField u(period_length, max_mode, reality);
  Require(coeffs.size() == 2 * max_mode + 1,
          "FromCoefficients: coefficient vector must have size 2K+1");
  Require(coeffs.allFinite(), "FromCoefficients: non-finite amplitude");
  const double scale = 1.0 + coeffs.cwiseAbs().maxCoeff();
  Require(std::abs(coeffs[max_mode]) <= kIngestTol * scale,
          "FromCoefficients: zero mode must vanish");
  u.coeffs_ = coeffs;
  u.coeffs_[max_mode] = Complex(0.0, 0.0);
  if (reality) {
    for (int j = 1; j <= max_mode; ++j) {
      Require(std::abs(u.coeffs_[max_mode + j] -
                       std::conj(u.coeffs_[max_mode - j])) <=
                  kIngestTol * scale,
              "FromCoefficients: reality flag set but coefficients are not "
              "conjugate-symmetric");
    }
    SymmetrizeReal(u.coeffs_, max_mode);
  }
  return u;
}

FourierField FourierField::FromCoefficientsUnchecked(double period_length,
                                                     int max_mode,
                                                     Eigen::VectorXcd coeffs,
                                                     bool reality) {
  FourierField u(period_length, max_mode, reality);
  Require(coeffs.size() == 2 * max_mode + 1,
          "FromCoefficientsUnchecked: coefficient vector must have size 2K+1");
  u.coeffs_ = std::move(coeffs);
  u.coeffs_[max_mode] = Complex(0.0, 0.0);
  if (reality) SymmetrizeReal(u.coeffs_, max_mode);
  return u;
}

void FourierField::set_coeff(int j, Complex value) {
  Require(j >= -max_mode_ && j <= max_mode_, "set_coeff: mode out of range");
  Require(std::isfinite(value.real()) && std::isfinite(value.imag()),
          "set_coeff: non-finite amplitude");
  if (j == 0) {
    Require(value == Complex(0.0, 0.0), "set_coeff: zero mode must stay zero");
    return;
  }
  coeffs_[max_mode_ + j] = value;
  if (reality_) coeffs_[max_mode_ - j] = std::conj(value);
}

bool FourierField::all_finite() const { return coeffs_.allFinite(); }

void FourierField::Validate() const {
  Require(coeffs_.allFinite(), "FourierField: non-finite amplitude");
  Require(coeffs_[max_mode_] == Complex(0.0, 0.0),
          "FourierField: zero mode populated");
  if (reality_) {
    const double scale = 1.0 + coeffs_.cwiseAbs().maxCoeff();
    for (int j = 1; j <= max_mode_; ++j) {
      Require(std::abs(coeffs_[max_mode_ + j] -
                       std::conj(coeffs_[max_mode_ - j])) <=
                  kIngestTol * scale,
              "FourierField: conjugate symmetry violated on a real field");
    }
  }
}

FourierField& FourierField::operator+=(const FourierField& other) {
  Require(period_length_ == other.period_length_ &&
              max_mode_ == other.max_mode_,
          "field arithmetic: period or mode count mismatch");
  coeffs_ += other.coeffs_;
  reality_ = reality_ && other.reality_;
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& other) {
  Require(period_length_ == other.period_length_ &&
              max_mode_ == other.max_mode_,
          "field arithmetic: period or mode count mismatch");
  coeffs_ -= other.coeffs_;
  reality_ = reality_ && other.reality_;
  return *this;
}

FourierField& FourierField::operator*=(double scale) {
  coeffs_ *= scale;
  return *this;
}

FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
FourierField operator*(double scale, FourierField a) { return a *= scale; }

double sobolev_norm(const FourierField& u, double alpha) {
  u.Validate();
  Require(std::isfinite(alpha), "sobolev_norm: alpha must be finite");
  KahanSum acc;
  for (int j = 1; j <= u.max_mode(); ++j) {
    const double w = std::pow(u.wavenumber(j), 2.0 * alpha);
    acc.Add(w * std::norm(u.coeff(j)));
    acc.Add(w * std::norm(u.coeff(-j)));
  }
  return std::sqrt(acc.Value());
}

FourierField derivative(const FourierField& u, int order) {
  Require(order >= 0, "derivative: order must be >= 0");
  FourierField out = u;
  if (order == 0) return out;
  const Complex unit = ImagUnitPower(order);
  for (int j = -u.max_mode(); j <= u.max_mode(); ++j) {
    if (j == 0) continue;
    const double mag = std::pow(u.wavenumber(j), order);
    out.set_coeff(j, unit * mag * u.coeff(j));
  }
  /* reality is preserved: (i kappa_{-j})^n c_{-j} = conj((i kappa_j)^n c_j) */
  return out;
}

namespace {

void CheckSameShape(const FourierField& u, const FourierField& v,
                    const char* op) {
  Require(u.period_length() == v.period_length() &&
              u.max_mode() == v.max_mode(),
          std::string(op) + ": fields must share period and mode count");
}

/* Assembles B from the product coefficients P_k of u_x v_x. */
FourierField AssembleB(const FourierField& u, const FourierField& v,
                       const std::vector<Complex>& product) {
  const int K = u.max_mode();
  const bool real_out = u.is_real() && v.is_real();
  Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(2 * K + 1);
  for (int k = -K; k <= K; ++k) {
    if (k == 0) continue;
    const double kap = u.wavenumber(k);
    coeffs[K + k] = -kap * kap * product[K + k];
  }
  /* unchecked assembly: an overflowing product must reach the caller as
     non-finite coefficients (all_finite() false), not as an exception */
  return FourierField::FromCoefficientsUnchecked(u.period_length(), K,
                                                 std::move(coeffs), real_out);
}

}  // namespace

FourierField nonlinearity_B(const FourierField& u, const FourierField& v) {
  CheckSameShape(u, v, "nonlinearity_B");
  const bool self = &u == &v;
  u.Validate();
  if (!self) v.Validate();
  const int K = u.max_mode();
  /* Bins >= 3K+1 keep every retained mode of the quadratic product
     alias-free; the power of two keeps the transform on its fast path. */
  const int n = NextPow2(3 * K + 2);
  const Eigen::VectorXcd pu = InverseDft(ScatterToBins(derivative(u, 1), n));
  const Eigen::VectorXcd pv =
      self ? pu : InverseDft(ScatterToBins(derivative(v, 1), n));
  const Eigen::VectorXcd prod =
      ForwardDft(pu.cwiseProduct(pv)) / static_cast<double>(n);
  std::vector<Complex> product(2 * K + 1, Complex(0.0, 0.0));
  for (int k = -K; k <= K; ++k) {
    if (k == 0) continue;
    product[K + k] = prod[(k % n + n) % n];
  }
  return AssembleB(u, v, product);
}

FourierField nonlinearity_B_convolution(const FourierField& u,
                                        const FourierField& v) {
  CheckSameShape(u, v, "nonlinearity_B");
  u.Validate();
  v.Validate();
  const int K = u.max_mode();
  const Eigen::VectorXcd a = derivative(u, 1).coeffs();
  const Eigen::VectorXcd b = derivative(v, 1).coeffs();
  std::vector<Complex> product(2 * K + 1, Complex(0.0, 0.0));
  for (int k = -K; k <= K; ++k) {
    if (k == 0) continue;
    /* P_k = sum_l a_l b_{k-l}; storage index i = l + K. */
    const int i0 = std::max(0, k);
    const int i1 = std::min(2 * K, k + 2 * K);
    Complex sum(0.0, 0.0);
    for (int i = i0; i <= i1; ++i) sum += a[i] * b[k + 2 * K - i];
    product[K + k] = sum;
  }
  return AssembleB(u, v, product);
}

double lebesgue_norm(const FourierField& u, double p, int deriv_order,
                     int n_points) {
  u.Validate();
  Require(p >= 1.0, "lebesgue_norm: p must be in [1, infinity]");
  Require(deriv_order >= 0, "lebesgue_norm: derivative order must be >= 0");
  const FourierField d = deriv_order > 0 ? derivative(u, deriv_order) : u;
  int n = n_points > 0 ? n_points : DefaultQuadraturePoints(u.max_mode());
  n = std::max(n, 2 * u.max_mode() + 2);
  const PhysicalGrid grid = to_physical(d, n);
  if (std::isinf(p)) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(grid.values[i]));
    return m;
  }
  const double dx = u.period_length() / n;
  KahanSum acc;
  for (int i = 0; i < n; ++i) {
    acc.Add(std::pow(std::abs(grid.values[i]), p) * dx);
  }
  return std::pow(acc.Value(), 1.0 / p);
}

double c1_norm(const FourierField& u, int n_points) {
  const double inf = std::numeric_limits<double>::infinity();
  return lebesgue_norm(u, inf, 0, n_points) +
         lebesgue_norm(u, inf, 1, n_points);
}

double w14_norm(const FourierField& u, int n_points) {
  return lebesgue_norm(u, 4.0, 0, n_points) +
         lebesgue_norm(u, 4.0, 1, n_points);
}

Complex inner_product(const FourierField& f, const FourierField& g) {
  CheckSameShape(f, g, "inner_product");
  /* Eigen's dot conjugates its first argument, so g.dot(f) is
     sum_j c_j(f) conj(c_j(g)). */
  return f.period_length() * g.coeffs().dot(f.coeffs());
}

PhysicalGrid to_physical(const FourierField& u, int n_points) {
  u.Validate();
  const int K = u.max_mode();
  const int n = n_points > 0 ? n_points : DefaultQuadraturePoints(K);
  Require(n >= 2 * K + 2, "to_physical: need n_points >= 2K+2");
  PhysicalGrid grid;
  grid.period_length = u.period_length();
  grid.reality = u.is_real();
  grid.values = InverseDft(ScatterToBins(u, n));
  if (grid.reality) {
    /* imaginary residue is transform noise on a conjugate-symmetric input */
    grid.values = grid.values.real().cast<Complex>();
  }
  return grid;
}

FourierField from_physical(const PhysicalGrid& grid, int max_mode,
                           bool reality) {
  const int n = grid.n_points();
  Require(max_mode >= 1, "from_physical: max_mode must be >= 1");
  Require(n >= 2 * max_mode + 2, "from_physical: need n_points >= 2K+2");
  Require(grid.values.allFinite(), "from_physical: non-finite samples");
  const Eigen::VectorXcd spectrum = ForwardDft(grid.values);
  FourierField out(grid.period_length, max_mode, reality);
  for (int j = 1; j <= max_mode; ++j) {
    const Complex cp = spectrum[j] / static_cast<double>(n);
    if (reality) {
      out.set_coeff(j, cp);  // mirror writes conj(cp) at -j
    } else {
      out.set_coeff(j, cp);
      out.set_coeff(-j, spectrum[n - j] / static_cast<double>(n));
    }
  }
  return out;
}

FourierField with_period(const FourierField& u, double new_period) {
  Require(std::isfinite(new_period) && new_period > 0.0,
          "with_period: period must be positive");
  FourierField out(new_period, u.max_mode(), u.is_real());
  for (int j = 1; j <= u.max_mode(); ++j) {
    out.set_coeff(j, u.coeff(j));
    if (!u.is_real()) out.set_coeff(-j, u.coeff(-j));
  }
  return out;
}

FourierField cosine_field(double period_length, int max_mode, int mode,
                          double amplitude) {
  Require(mode >= 1 && mode <= max_mode, "cosine_field: mode out of range");
  FourierField u(period_length, max_mode, true);
  u.set_coeff(mode, Complex(0.5 * amplitude, 0.0));
  return u;
}

FourierField complex_exponential_field(double period_length, int max_mode,
                                       int mode, Complex amplitude) {
  Require(mode != 0 && std::abs(mode) <= max_mode,
          "complex_exponential_field: mode out of range");
  FourierField u(period_length, max_mode, false);
  u.set_coeff(mode, amplitude);
  return u;
}

FourierField geometric_complex_field(double period_length, int max_mode,
                                     double amplitude, double rho) {
  Require(rho > 0.0 && rho < 1.0, "geometric_complex_field: rho in (0,1)");
  FourierField u(period_length, max_mode, false);
  double envelope = amplitude;
  for (int j = 1; j <= max_mode; ++j) {
    envelope *= rho;
    u.set_coeff(j, Complex(envelope, 0.0));
  }
  return u;
}

FourierField random_field(double period_length, int max_mode, double slope,
                          std::uint64_t seed, bool reality) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  FourierField u(period_length, max_mode, reality);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 1; j <= max_mode; ++j) {
    const double env = std::pow(static_cast<double>(j), slope);
    const Complex g(normal(eng), normal(eng));
    u.set_coeff(j, env * inv_sqrt2 * g);
  }
  if (!reality) {
    for (int j = 1; j <= max_mode; ++j) {
      const double env = std::pow(static_cast<double>(j), slope);
      const Complex g(normal(eng), normal(eng));
      u.set_coeff(-j, env * inv_sqrt2 * g);
    }
  }
  return u;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string format_full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

void write_snapshot(const FourierField& u, double t, const std::string& path) {
  u.Validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
  out << "L " << format_full(u.period_length()) << " K " << u.max_mode()
      << " t " << format_full(t) << " complex " << (u.is_real() ? 0 : 1)
      << "\n";
  for (int j = -u.max_mode(); j <= u.max_mode(); ++j) {
    if (j == 0) continue;
    const Complex c = u.coeff(j);
    out << j << " " << format_full(c.real()) << " " << format_full(c.imag())
        << "\n";
  }
  if (!out) throw std::runtime_error("write_snapshot: write failed: " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("read_snapshot: missing header in " + path);
  }
  std::istringstream header(line);
  std::string tok_l, tok_k, tok_t, tok_c;
  double L = 0.0, t = 0.0;
  int K = 0, complex_flag = -1;
  header >> tok_l >> L >> tok_k >> K >> tok_t >> t >> tok_c >> complex_flag;
  if (header.fail() || tok_l != "L" || tok_k != "K" || tok_t != "t" ||
      tok_c != "complex" || (complex_flag != 0 && complex_flag != 1)) {
    throw std::runtime_error("read_snapshot: malformed header in " + path);
  }
  if (!(L > 0.0) || K < 1) {
    throw std::runtime_error("read_snapshot: invalid L or K in " + path);
  }
  Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(2 * K + 1);
  std::vector<bool> seen(2 * K + 1, false);
  int count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    int j = 0;
    double re = 0.0, im = 0.0;
    row >> j >> re >> im;
    if (row.fail() || j == 0 || j < -K || j > K) {
      throw std::runtime_error("read_snapshot: malformed mode line in " + path);
    }
    if (seen[K + j]) {
      throw std::runtime_error("read_snapshot: duplicate mode in " + path);
    }
    seen[K + j] = true;
    coeffs[K + j] = Complex(re, im);
    ++count;
  }
  if (count != 2 * K) {
    throw std::runtime_error("read_snapshot: expected " + std::to_string(2 * K) +
                             " mode lines in " + path);
  }
  Snapshot snap{FourierField::FromCoefficients(L, K, coeffs, complex_flag == 0),
                t};
  return snap;
}

}  // namespace surfgrow

#pragma once

// Hardy-space tools on full-line grids: Fourier spectrum, the orthogonal
// split L2 = H2_plus (+) H2_minus, membership leakage, and continuation of
// boundary data into the half-planes.
//
// Transform convention: F(w) = (2 pi)^-1/2 \int f(E) exp(+i w E) dE.
// With this sign H2_plus (analytic for Im z > 0) has its spectrum on w < 0
// and H2_minus on w > 0.
//
// Discretization: the grid of n points and spacing h is treated as one
// period of an anti-periodic sequence, so the frequencies are
// w_k = 2 pi (k + 1/2) / (n h), k = -n/2 .. n/2 - 1. There is no w = 0
// sample; every bin belongs to exactly one half, so the masks are exact
// projections. Samples are weighted by sqrt(w_i / h) before transforming,
// which makes the split orthogonal in the trapezoid inner product.

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "gamowlab/error.hpp"
#include "gamowlab/fft.hpp"
#include "gamowlab/grid.hpp"

namespace gamowlab {

struct HardyOptions {
  /// Largest spectral leakage accepted as membership.
  double leakage_threshold = 1e-6;
};

struct FrequencySpectrum {
  std::vector<double> freqs;  // ascending
  std::vector<cplx> amplitudes;
  double spacing = 0.0;  // frequency step
  std::string convention =
      "F(w) = (2pi)^-1/2 int f(E) exp(+i w E) dE; H2_plus on w < 0, H2_minus on w > 0";

  /// sum |F_k|^2 dw, equal to the trapezoid norm squared of the input.
  double energy() const {
    double acc = 0.0;
    for (const auto& a : amplitudes) acc += std::norm(a);
    return acc * spacing;
  }
};

enum class Sheet { physical, second };

struct HalfPlanePoint {
  cplx z;
  Sheet sheet = Sheet::physical;  // informational only
};

namespace detail {

inline void require_spectral_grid(const EnergyGrid& grid) {
  require(grid.is_full_line(), errc::needs_full_line, "operation needs a full-line grid");
  require(grid.size() % 2 == 0, errc::invalid_argument,
          "spectral operations need an even number of grid points");
}

/// Half-bin-shifted DFT of sqrt(w/h) f. Index m < n/2 carries w > 0.
inline std::vector<cplx> shifted_dft(const SampledWaveFunction& f) {
  const auto& grid = f.grid();
  require_spectral_grid(grid);
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  std::vector<cplx> x(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phase = pi * static_cast<double>(j) / static_cast<double>(n);
    x[j] = std::sqrt(grid.weight(j) / h) * f[j] * std::polar(1.0, phase);
  }
  fft::transform(x, fft::direction::backward);
  return x;
}

inline std::vector<cplx> inverse_shifted_dft(std::vector<cplx> x, const EnergyGrid& grid) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  fft::transform(x, fft::direction::forward);
  for (std::size_t j = 0; j < n; ++j) {
    const double phase = -pi * static_cast<double>(j) / static_cast<double>(n);
    x[j] *= std::polar(1.0, phase) / (static_cast<double>(n) * std::sqrt(grid.weight(j) / h));
  }
  return x;
}

inline bool bin_in_plus(std::size_t m, std::size_t n) { return m >= n / 2; }

inline double leakage_from_dft(const std::vector<cplx>& x, HardyClass target) {
  const std::size_t n = x.size();
  double total = 0.0, forbidden = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double e = std::norm(x[m]);
    total += e;
    const bool plus = bin_in_plus(m, n);
    if ((target == HardyClass::H2_plus) != plus) forbidden += e;
  }
  require(total > 0.0, errc::undefined_leakage, "leakage of the zero function is undefined");
  return forbidden / total;
}

inline Role role_for(HardyClass cls) {
  return cls == HardyClass::H2_minus ? Role::state : Role::observable;
}

/// 1 / sin(theta) without overflow when |Im theta| is large.
inline cplx inv_sin(cplx theta) {
  if (theta.imag() < 0.0) {
    const cplx p = std::exp(cplx(0.0, -1.0) * theta);  // |p| < 1
    return cplx(0.0, 2.0) * p / (1.0 - p * p);
  }
  const cplx q = std::exp(cplx(0.0, 1.0) * theta);  // |q| <= 1
  return cplx(0.0, 2.0) * q / (q * q - 1.0);
}

}  // namespace detail

inline FrequencySpectrum fourier_transform(const SampledWaveFunction& f) {
  const auto x = detail::shifted_dft(f);
  const auto& grid = f.grid();
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const double dw = 2.0 * pi / (static_cast<double>(n) * h);
  const double scale = h / std::sqrt(2.0 * pi);

  FrequencySpectrum s;
  s.spacing = dw;
  s.freqs.resize(n);
  s.amplitudes.resize(n);
  const auto half = static_cast<long>(n / 2);
  for (long k = -half; k < half; ++k) {
    const auto idx = static_cast<std::size_t>(k + half);
    const auto m = static_cast<std::size_t>(k < 0 ? k + static_cast<long>(n) : k);
    const double w = dw * (static_cast<double>(k) + 0.5);
    s.freqs[idx] = w;
    s.amplitudes[idx] = scale * std::polar(1.0, w * grid.lower()) * x[m];
  }
  return s;
}

inline double hardy_leakage(const SampledWaveFunction& f, HardyClass target) {
  detail::require(target != HardyClass::unknown, errc::invalid_argument,
                  "leakage target must be H2_plus or H2_minus");
  return detail::leakage_from_dft(detail::shifted_dft(f), target);
}

/// Orthogonal projection onto `target`. The result carries that class and
/// the matching role.
inline SampledWaveFunction project(const SampledWaveFunction& f, HardyClass target) {
  detail::require(target != HardyClass::unknown, errc::invalid_argument,
                  "projection target must be H2_plus or H2_minus");
  auto x = detail::shifted_dft(f);
  const std::size_t n = x.size();
  for (std::size_t m = 0; m < n; ++m)
    if ((target == HardyClass::H2_plus) != detail::bin_in_plus(m, n)) x[m] = 0.0;
  return f.with_class(detail::inverse_shifted_dft(std::move(x), f.grid()),
                      detail::role_for(target), target);
}

inline SampledWaveFunction project_plus(const SampledWaveFunction& f) {
  return project(f, HardyClass::H2_plus);
}
inline SampledWaveFunction project_minus(const SampledWaveFunction& f) {
  return project(f, HardyClass::H2_minus);
}

/// Both projections from one forward transform.
inline std::pair<SampledWaveFunction, SampledWaveFunction> decompose(const SampledWaveFunction& f) {
  auto plus = detail::shifted_dft(f);
  auto minus = plus;
  const std::size_t n = plus.size();
  for (std::size_t m = 0; m < n; ++m) (detail::bin_in_plus(m, n) ? minus[m] : plus[m]) = 0.0;
  return {f.with_class(detail::inverse_shifted_dft(std::move(plus), f.grid()), Role::observable,
                       HardyClass::H2_plus),
          f.with_class(detail::inverse_shifted_dft(std::move(minus), f.grid()), Role::state,
                       HardyClass::H2_minus)};
}

/// Validated boundary data ready for repeated evaluation off the axis.
///
/// The value at z is the Cauchy sum (+-1/2 pi i) sum_j c_j K(E_j - z) with
/// the anti-periodic kernel K(x) = (pi/P) / sin(pi x / P), P = n h, and
/// c_j = sqrt(w_j h) f_j. This is the exact continuation of the sampled
/// band-limited interpolant, up to aliasing of order exp(-2 pi |Im z| / h).
/// Points closer than two spacings to the axis are refused.
class HardyContinuation {
 public:
  HardyContinuation(const SampledWaveFunction& f, HardyClass cls, HardyOptions opt = {})
      : grid_(f.grid_ptr()), class_(cls) {
    detail::require(cls != HardyClass::unknown, errc::class_required,
                    "continuation needs a target half-plane");
    detail::require(f.hardy_class() == HardyClass::unknown || f.hardy_class() == cls,
                    errc::class_mismatch,
                    std::string("function is declared ") + to_string(f.hardy_class()) +
                        " but continuation into the " +
                        (cls == HardyClass::H2_plus ? "upper" : "lower") +
                        " half-plane was requested");
    leakage_ = hardy_leakage(f, cls);
    detail::require(leakage_ <= opt.leakage_threshold, errc::class_mismatch,
                    "leakage " + std::to_string(leakage_) + " exceeds threshold for " +
                        to_string(cls));
    const double h = grid_->spacing();
    coef_.resize(f.size());
    for (std::size_t j = 0; j < coef_.size(); ++j)
      coef_[j] = std::sqrt(grid_->weight(j) * h) * f[j];
  }

  HardyClass hardy_class() const noexcept { return class_; }
  double leakage() const noexcept { return leakage_; }
  const EnergyGrid& grid() const noexcept { return *grid_; }

  cplx operator()(cplx z) const {
    const double h = grid_->spacing();
    detail::require(std::abs(z.imag()) >= 2.0 * h, errc::too_close_to_axis,
                    "|Im z| is below two grid spacings");
    const bool upper = z.imag() > 0.0;
    detail::require(upper == (class_ == HardyClass::H2_plus), errc::class_mismatch,
                    std::string(to_string(class_)) + " data cannot be continued into the " +
                        (upper ? "upper" : "lower") + " half-plane");

    const std::size_t n = coef_.size();
    const double period = grid_->period();
    const double k = pi / period;
    // Upper: p_j = exp(-i k (E_j - z)), |p_j| < 1, 1/sin = 2i p / (1 - p^2).
    // Lower: q_j = exp(+i k (E_j - z)), |q_j| < 1, 1/sin = 2i q / (q^2 - 1).
    const double sgn = upper ? -1.0 : 1.0;
    const cplx step = std::polar(1.0, sgn * pi / static_cast<double>(n));
    cplx acc = 0.0;
    cplx u;
    for (std::size_t j = 0; j < n; ++j) {
      if (j % 256 == 0) u = std::exp(cplx(0.0, sgn * k) * (grid_->point(j) - z));
      const cplx inv = upper ? u / (1.0 - u * u) : u / (u * u - 1.0);
      acc += coef_[j] * inv;
      u *= step;
    }
    // (+-1/2 pi i) * (pi/P) * 2i * acc
    const double orient = upper ? 1.0 : -1.0;
    return orient * (k / pi) * acc;
  }

  cplx operator()(const HalfPlanePoint& p) const { return (*this)(p.z); }

  /// Values f(E_i + i alpha) at every grid abscissa, by one FFT correlation
  /// with the same kernel. alpha > 0 for H2_plus data, alpha < 0 for H2_minus.
  std::vector<cplx> on_line(double alpha) const {
    const double h = grid_->spacing();
    detail::require(std::abs(alpha) >= 2.0 * h, errc::too_close_to_axis,
                    "|alpha| is below two grid spacings");
    const bool upper = alpha > 0.0;
    detail::require(upper == (class_ == HardyClass::H2_plus), errc::class_mismatch,
                    "line lies in the wrong half-plane for this continuation");
    const std::size_t n = coef_.size();
    const double nn = static_cast<double>(n);
    const double period = grid_->period();
    const double orient = upper ? 1.0 : -1.0;

    // F_i = sum_j a_j b_{j-i} rho^i with rho = exp(i pi/n), a_j = c_j rho^-j,
    // b_d = kern(d) rho^d periodic in d.
    std::vector<cplx> a(n), b(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double ph = pi * static_cast<double>(j) / nn;
      a[j] = coef_[j] * std::polar(1.0, -ph);
      const cplx x(static_cast<double>(j) * h, -alpha);
      const cplx kern = orient / (2.0 * pi * cplx(0.0, 1.0)) * (pi / period) *
                        detail::inv_sin(pi * x / period);
      b[j] = std::conj(kern * std::polar(1.0, ph));
    }
    fft::transform(a, fft::direction::forward);
    fft::transform(b, fft::direction::forward);
    for (std::size_t m = 0; m < n; ++m) a[m] *= std::conj(b[m]) / nn;
    fft::transform(a, fft::direction::backward);
    for (std::size_t i = 0; i < n; ++i) a[i] *= std::polar(1.0, pi * static_cast<double>(i) / nn);
    return a;
  }

 private:
  GridPtr grid_;
  HardyClass class_;
  double leakage_ = 0.0;
  std::vector<cplx> coef_;
};

inline HardyClass half_plane_class(cplx z) {
  return z.imag() > 0.0 ? HardyClass::H2_plus : HardyClass::H2_minus;
}

/// Value of the analytic continuation of f at z, Im z != 0.
inline cplx extend(const SampledWaveFunction& f, cplx z, HardyOptions opt = {}) {
  const double h = f.grid().spacing();
  detail::require(std::abs(z.imag()) >= 2.0 * h, errc::too_close_to_axis,
                  "|Im z| is below two grid spacings");
  return HardyContinuation(f, half_plane_class(z), opt)(z);
}

inline cplx extend(const SampledWaveFunction& f, const HalfPlanePoint& p, HardyOptions opt = {}) {
  return extend(f, p.z, opt);
}

/// Line norms \int |f(x + i alpha)|^2 dx for f in H2_plus, trapezoid rule on
/// the grid abscissae.
inline std::vector<double> norm_profile(const SampledWaveFunction& f,
                                        const std::vector<double>& alphas,
                                        HardyOptions opt = {}) {
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    detail::require(alphas[i] > 0.0, errc::invalid_argument, "alphas must be positive");
    detail::require(i == 0 || alphas[i] > alphas[i - 1], errc::invalid_argument,
                    "alphas must be ascending");
  }
  const HardyContinuation cont(f, HardyClass::H2_plus, opt);
  const auto w = f.grid().weights();
  std::vector<double> out;
  out.reserve(alphas.size());
  for (double alpha : alphas) {
    const auto line = cont.on_line(alpha);
    double acc = 0.0;
    for (std::size_t i = 0; i < line.size(); ++i) acc += w[i] * std::norm(line[i]);
    out.push_back(acc);
  }
  return out;
}

}  // namespace gamowlab

#pragma once

// Rational unitary S-matrix models, the half-line S-matrix element
// \int_0^inf psi*(E) S(E) phi(E) dE, and its split into a resonance pole
// term plus a background integral along the negative imaginary axis.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "gamowlab/error.hpp"
#include "gamowlab/grid.hpp"
#include "gamowlab/hardy.hpp"

namespace gamowlab {

/// S(E) = prod_k (E - conj(p_k)) / (E - p_k), all p_k with Im p_k < 0.
/// No poles means S = 1.
class SMatrixModel {
 public:
  SMatrixModel() = default;
  explicit SMatrixModel(std::vector<cplx> poles) : poles_(std::move(poles)) {
    for (const auto& p : poles_) {
      detail::require(std::isfinite(p.real()) && std::isfinite(p.imag()), errc::invalid_argument,
                      "pole must be finite");
      detail::require(p.imag() < 0.0, errc::pole_not_in_lower_half_plane,
                      "S-matrix poles must satisfy Im z < 0");
    }
  }

  const std::vector<cplx>& poles() const noexcept { return poles_; }

  cplx operator()(cplx z) const {
    cplx s = 1.0;
    for (const auto& p : poles_) s *= (z - std::conj(p)) / (z - p);
    return s;
  }

  /// Residue at poles()[k].
  cplx residue(std::size_t k) const {
    const cplx pk = poles_.at(k);
    cplx r = pk - std::conj(pk);
    for (std::size_t m = 0; m < poles_.size(); ++m)
      if (m != k) r *= (pk - std::conj(poles_[m])) / (pk - poles_[m]);
    return r;
  }

 private:
  std::vector<cplx> poles_;
};

inline SMatrixModel single_pole_smatrix(cplx z_R) { return SMatrixModel({z_R}); }

struct SMatrixOptions {
  HardyOptions hardy;
  /// Relative closure |pole + background - direct| / |direct| accepted.
  double closure_tolerance = 1e-6;
  /// Throw decomposition-inconsistent when closure fails.
  bool enforce_closure = true;
  /// Ray end: stop once |integrand| drops below this.
  double ray_cutoff = 1e-12;
  /// Gauss-Legendre points per unit of log(y) on the ray.
  int points_per_panel = 8;
};

struct SMatrixDecomposition {
  cplx direct;
  cplx pole_term;
  cplx background;
  double closure_defect = 0.0;
  double ray_length = 0.0;     // Y, the ray runs from 0 to -iY
  double ray_endpoint = 0.0;   // |integrand| at -iY
  bool consistent = true;
};

namespace detail {

inline void check_pair(const SampledWaveFunction& psi, const SampledWaveFunction& phi,
                       const HardyOptions& opt) {
  require_same_grid(psi, phi);
  require(psi.hardy_class() != HardyClass::H2_minus, errc::class_mismatch,
          "psi must be H2_plus (an observable)");
  require(phi.hardy_class() != HardyClass::H2_plus, errc::class_mismatch,
          "phi must be H2_minus (a state)");
  const double lp = hardy_leakage(psi, HardyClass::H2_plus);
  require(lp <= opt.leakage_threshold, errc::class_mismatch,
          "psi leakage " + std::to_string(lp) + " exceeds threshold for H2_plus");
  const double lf = hardy_leakage(phi, HardyClass::H2_minus);
  require(lf <= opt.leakage_threshold, errc::class_mismatch,
          "phi leakage " + std::to_string(lf) + " exceeds threshold for H2_minus");
}

inline cplx smatrix_direct(const SampledWaveFunction& psi, const SampledWaveFunction& phi,
                           const SMatrixModel& S) {
  const auto& grid = psi.grid();
  std::vector<cplx> prod(grid.size());
  for (std::size_t i = 0; i < prod.size(); ++i)
    prod[i] = std::conj(psi[i]) * S(cplx(grid.point(i), 0.0)) * phi[i];
  return halfline_integral(grid, prod);
}

/// Cubic Lagrange interpolation of samples at E = 0.
inline cplx value_at_zero(const SampledWaveFunction& f) {
  const auto pts = f.grid().points();
  const auto it = std::lower_bound(pts.begin(), pts.end(), 0.0);
  const auto k0 = static_cast<std::size_t>(it - pts.begin());
  require(k0 >= 2 && k0 + 1 < pts.size(), errc::invalid_argument,
          "grid must extend on both sides of E = 0");
  if (pts[k0] == 0.0) return f[k0];
  const double h = f.grid().spacing();
  const double s = -pts[k0 - 2] / h;
  cplx v = 0.0;
  for (int a = 0; a < 4; ++a) {
    double basis = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) basis *= (s - b) / static_cast<double>(a - b);
    v += basis * f[k0 - 2 + static_cast<std::size_t>(a)];
  }
  return v;
}

inline double legendre_weight(double z, int n) {
  double p0 = 1.0, p1 = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double p2 = p1;
    p1 = p0;
    p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
  }
  const double dp = n * (z * p0 - p1) / (z * z - 1.0);
  return 2.0 / ((1.0 - z * z) * dp * dp);
}

/// Gauss-Legendre rule with `n` points on [-1, 1].
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      const double dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = legendre_weight(z, n);
  }
}

}  // namespace detail

/// \int_0^inf psi*(E) S(E) phi(E) dE over the E >= 0 samples.
inline cplx smatrix_element(const SampledWaveFunction& psi, const SampledWaveFunction& phi,
                            const SMatrixModel& S, HardyOptions opt = {}) {
  detail::check_pair(psi, phi, opt);
  return detail::smatrix_direct(psi, phi, S);
}

/// Contour deformation of the S-matrix element into the fourth quadrant.
///
///   direct = pole_term + background
///   pole_term  = -2 pi i sum_k Res S(p_k) psibar(p_k) phi(p_k), Re p_k > 0
///   background = -i \int_0^Y G(-iy) dy,  G(z) = psibar(z) S(z) phi(z)
///
/// with psibar(z) = conj(psi(conj z)). Continuations come from
/// HardyContinuation. The ray runs until |G| < ray_cutoff or Y reaches one
/// eighth of the grid period, whichever is first. The piece [0, 3h] next to
/// the axis, where continuation is refused, is a quartic through the
/// boundary value G(0) and four ray samples.
inline SMatrixDecomposition pole_background_decomposition(const SampledWaveFunction& psi,
                                                          const SampledWaveFunction& phi,
                                                          const SMatrixModel& S,
                                                          SMatrixOptions opt = {}) {
  detail::check_pair(psi, phi, opt.hardy);
  const HardyContinuation cpsi(psi, HardyClass::H2_plus, opt.hardy);
  const HardyContinuation cphi(phi, HardyClass::H2_minus, opt.hardy);
  const auto psibar = [&](cplx z) { return std::conj(cpsi(std::conj(z))); };
  const auto G = [&](cplx z) { return psibar(z) * S(z) * cphi(z); };

  SMatrixDecomposition out;
  out.direct = detail::smatrix_direct(psi, phi, S);

  out.pole_term = 0.0;
  const auto& poles = S.poles();
  for (std::size_t k = 0; k < poles.size(); ++k) {
    if (poles[k].real() <= 0.0) continue;  // outside the fourth quadrant
    out.pole_term += cplx(0.0, -2.0 * pi) * S.residue(k) * psibar(poles[k]) * cphi(poles[k]);
  }

  const double h = psi.grid().spacing();
  const double delta = 3.0 * h;
  const double y_cap = psi.grid().period() / 8.0;
  detail::require(y_cap > 5.0 * delta, errc::insufficient_grid,
                  "grid period too short for the background ray");

  // Y: double from 4 delta until the integrand is negligible or the cap is hit.
  double Y = 4.0 * delta;
  double gY = std::abs(G(cplx(0.0, -Y)));
  while (gY >= opt.ray_cutoff && Y < y_cap) {
    Y = std::min(2.0 * Y, y_cap);
    gY = std::abs(G(cplx(0.0, -Y)));
  }
  out.ray_length = Y;
  out.ray_endpoint = gY;

  // [0, delta]: quartic through y = 0, delta, .., 4 delta.
  static constexpr double near_w[5] = {251.0 / 720.0, 646.0 / 720.0, -264.0 / 720.0,
                                       106.0 / 720.0, -19.0 / 720.0};
  const cplx g0 = std::conj(detail::value_at_zero(psi)) * S(cplx(0.0, 0.0)) *
                  detail::value_at_zero(phi);
  cplx near = near_w[0] * g0;
  for (int m = 1; m <= 4; ++m) near += near_w[m] * G(cplx(0.0, -m * delta));
  near *= delta;

  // [delta, Y]: y = delta e^u, composite Gauss-Legendre in u.
  std::vector<double> gx, gw;
  detail::gauss_legendre(opt.points_per_panel, gx, gw);
  const double U = std::log(Y / delta);
  const int panels = std::max(1, static_cast<int>(std::ceil(U)));
  const double du = U / panels;
  cplx far = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * du;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double y = delta * std::exp(mid + 0.5 * du * gx[i]);
      far += 0.5 * du * gw[i] * y * G(cplx(0.0, -y));
    }
  }
  out.background = cplx(0.0, -1.0) * (near + far);

  const double scale = std::abs(out.direct);
  const double diff = std::abs(out.pole_term + out.background - out.direct);
  out.closure_defect = scale > 0.0 ? diff / scale : diff;
  out.consistent = out.closure_defect <= opt.closure_tolerance;
  if (opt.enforce_closure)
    detail::require(out.consistent, errc::decomposition_inconsistent,
                    "pole + background misses direct by " + std::to_string(out.closure_defect) +
                        " (relative)");
  return out;
}

}  // namespace gamowlab

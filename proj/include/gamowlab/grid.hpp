#pragma once

// Energy grids, sampled energy wave functions and the quadrature inner
// products built on them. Units: hbar = 1, energies and times are reciprocal.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gamowlab/error.hpp"

namespace gamowlab {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

enum class GridKind { full_line, half_line };

/// Uniform grid with trapezoidal weights. Immutable; shared between the
/// wave functions sampled on it through `GridPtr`.
class EnergyGrid {
 public:
  GridKind kind() const noexcept { return kind_; }
  bool is_full_line() const noexcept { return kind_ == GridKind::full_line; }
  std::size_t size() const noexcept { return points_.size(); }
  double spacing() const noexcept { return spacing_; }
  double lower() const noexcept { return points_.front(); }
  double upper() const noexcept { return points_.back(); }
  /// Declared center (full line) or E_max / 2 (half line).
  double center() const noexcept { return center_; }
  double half_width() const noexcept { return half_width_; }
  /// Period of the anti-periodic extension used by the spectral routines.
  double period() const noexcept { return spacing_ * static_cast<double>(size()); }

  std::span<const double> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// Exact equality of construction parameters.
  friend bool operator==(const EnergyGrid& a, const EnergyGrid& b) noexcept {
    return a.kind_ == b.kind_ && a.size() == b.size() && a.center_ == b.center_ &&
           a.half_width_ == b.half_width_;
  }

 private:
  friend std::shared_ptr<const EnergyGrid> make_line_grid(double, double, std::size_t);
  friend std::shared_ptr<const EnergyGrid> make_halfline_grid(double, std::size_t);

  EnergyGrid(GridKind kind, double center, double half_width, std::size_t n)
      : kind_(kind), center_(center), half_width_(half_width) {
    spacing_ = 2.0 * half_width / static_cast<double>(n - 1);
    points_.resize(n);
    const double mid = 0.5 * static_cast<double>(n - 1);
    if (kind == GridKind::full_line) {
      // Offsets are exact negatives of each other, so the grid is symmetric
      // about `center` up to the final rounding of center + offset.
      for (std::size_t i = 0; i < n; ++i)
        points_[i] = center + (static_cast<double>(i) - mid) * spacing_;
    } else {
      for (std::size_t i = 0; i < n; ++i) points_[i] = static_cast<double>(i) * spacing_;
      points_.back() = 2.0 * half_width;
    }
    weights_.assign(n, spacing_);
    weights_.front() = weights_.back() = 0.5 * spacing_;
  }

  GridKind kind_;
  double center_;
  double half_width_;
  double spacing_ = 0.0;
  std::vector<double> points_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const EnergyGrid>;

/// Uniform full-line grid on [center - half_width, center + half_width].
inline GridPtr make_line_grid(double center, double half_width, std::size_t n) {
  detail::require(std::isfinite(center), errc::invalid_argument, "grid center must be finite");
  detail::require(std::isfinite(half_width) && half_width > 0.0, errc::invalid_argument,
                  "half_width must be positive");
  detail::require(n >= 8, errc::invalid_argument, "grid needs at least 8 points");
  return GridPtr(new EnergyGrid(GridKind::full_line, center, half_width, n));
}

/// Uniform half-line grid on [0, E_max]; the first point is exactly 0.
inline GridPtr make_halfline_grid(double e_max, std::size_t n) {
  detail::require(std::isfinite(e_max) && e_max > 0.0, errc::invalid_argument,
                  "E_max must be positive");
  detail::require(n >= 8, errc::invalid_argument, "grid needs at least 8 points");
  return GridPtr(new EnergyGrid(GridKind::half_line, 0.5 * e_max, 0.5 * e_max, n));
}

inline bool same_grid(const GridPtr& a, const GridPtr& b) noexcept {
  return a == b || (a && b && *a == *b);
}

/// Fraction of a unit Lorentzian (center e_r, FWHM gamma) lying outside the grid.
inline double lorentzian_tail_mass(const EnergyGrid& grid, double e_r, double gamma) {
  const double g = 0.5 * gamma;
  return (std::atan2(g, grid.upper() - e_r) + std::atan2(g, e_r - grid.lower())) / pi;
}

// ---------------------------------------------------------------------------

enum class Role { state, observable };
enum class HardyClass { unknown, H2_plus, H2_minus };

/// Quantum-number labels carried along but never used in computation.
struct QuantumLabels {
  std::optional<double> j;
  std::optional<double> j3;
  std::string eta;
};

inline bool role_allows(Role role, HardyClass cls) noexcept {
  if (cls == HardyClass::unknown) return true;
  return role == Role::state ? cls == HardyClass::H2_minus : cls == HardyClass::H2_plus;
}

inline HardyClass opposite(HardyClass cls) noexcept {
  switch (cls) {
    case HardyClass::H2_plus: return HardyClass::H2_minus;
    case HardyClass::H2_minus: return HardyClass::H2_plus;
    default: return HardyClass::unknown;
  }
}

/// Complex amplitudes on a grid, tagged with physical role and claimed Hardy
/// class. A state is prepared (H2_minus), an observable registered (H2_plus).
class SampledWaveFunction {
 public:
  SampledWaveFunction(GridPtr grid, std::vector<cplx> values, Role role,
                      HardyClass cls = HardyClass::unknown, QuantumLabels labels = {},
                      bool pairing_exempt = false)
      : grid_(std::move(grid)),
        values_(std::move(values)),
        role_(role),
        class_(cls),
        labels_(std::move(labels)),
        pairing_exempt_(pairing_exempt) {
    detail::require(grid_ != nullptr, errc::invalid_argument, "wave function needs a grid");
    detail::require(values_.size() == grid_->size(), errc::invalid_argument,
                    "value count does not match grid size");
    for (const auto& v : values_)
      detail::require(std::isfinite(v.real()) && std::isfinite(v.imag()),
                      errc::invalid_argument, "wave function values must be finite");
    detail::require(pairing_exempt_ || role_allows(role_, class_), errc::class_mismatch,
                    "role is incompatible with the declared Hardy class");
  }

  template <class Fn>
  static SampledWaveFunction sample(GridPtr grid, Fn&& fn, Role role,
                                    HardyClass cls = HardyClass::unknown) {
    std::vector<cplx> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(fn(grid->point(i)));
    return SampledWaveFunction(std::move(grid), std::move(v), role, cls);
  }

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const EnergyGrid& grid() const noexcept { return *grid_; }
  std::span<const cplx> values() const noexcept { return values_; }
  cplx operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  Role role() const noexcept { return role_; }
  HardyClass hardy_class() const noexcept { return class_; }
  const QuantumLabels& labels() const noexcept { return labels_; }
  bool pairing_exempt() const noexcept { return pairing_exempt_; }

  /// Same metadata, new samples.
  SampledWaveFunction with_values(std::vector<cplx> values) const {
    return SampledWaveFunction(grid_, std::move(values), role_, class_, labels_, pairing_exempt_);
  }
  SampledWaveFunction with_class(std::vector<cplx> values, Role role, HardyClass cls) const {
    return SampledWaveFunction(grid_, std::move(values), role, cls, labels_, false);
  }

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
  Role role_;
  HardyClass class_;
  QuantumLabels labels_;
  bool pairing_exempt_;
};

/// Complex conjugate. Conjugation exchanges H2_plus and H2_minus, and the
/// role flips with it so the pairing stays valid.
inline SampledWaveFunction conjugate(const SampledWaveFunction& f) {
  std::vector<cplx> v(f.values().begin(), f.values().end());
  for (auto& x : v) x = std::conj(x);
  const Role role = f.role() == Role::state ? Role::observable : Role::state;
  return SampledWaveFunction(f.grid_ptr(), std::move(v), role, opposite(f.hardy_class()),
                             f.labels(), f.pairing_exempt());
}

inline SampledWaveFunction scaled(const SampledWaveFunction& f, cplx c) {
  std::vector<cplx> v(f.values().begin(), f.values().end());
  for (auto& x : v) x *= c;
  return f.with_values(std::move(v));
}

inline void require_same_grid(const SampledWaveFunction& f, const SampledWaveFunction& g) {
  detail::require(same_grid(f.grid_ptr(), g.grid_ptr()), errc::incompatible_grids,
                  "wave functions live on different grids");
}

/// (f, g) = sum_i w_i conj(f_i) g_i.
inline cplx inner_product(const SampledWaveFunction& f, const SampledWaveFunction& g) {
  require_same_grid(f, g);
  const auto w = f.grid().weights();
  cplx acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * std::conj(f[i]) * g[i];
  return acc;
}

inline double l2_norm(const SampledWaveFunction& f) {
  const auto w = f.grid().weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * std::norm(f[i]);
  return std::sqrt(acc);
}

/// Integral over E >= 0 of samples on `grid`. Fourth-order end-corrected
/// trapezoid on the nodes E >= 0, plus a cubic-interpolation piece covering
/// [0, first node) when 0 is not itself a node.
inline cplx halfline_integral(const EnergyGrid& grid, std::span<const cplx> samples) {
  detail::require(samples.size() == grid.size(), errc::invalid_argument,
                  "sample count does not match grid size");
  const auto pts = grid.points();
  const auto first = std::lower_bound(pts.begin(), pts.end(), 0.0);
  const auto k0 = static_cast<std::size_t>(first - pts.begin());
  const std::size_t m = grid.size() - k0;
  detail::require(m >= 8, errc::invalid_argument,
                  "grid has fewer than 8 nodes on the positive half-line");
  const double h = grid.spacing();

  static constexpr double end_w[4] = {17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0};
  cplx acc = 0.0;
  for (std::size_t i = 4; i + 4 < m; ++i) acc += samples[k0 + i];
  for (std::size_t i = 0; i < 4; ++i)
    acc += end_w[i] * (samples[k0 + i] + samples[k0 + m - 1 - i]);
  acc *= h;

  if (pts[k0] > 0.0) {
    detail::require(k0 >= 2, errc::invalid_argument,
                    "need two nodes below E = 0 to close the half-line integral");
    // Cubic through nodes k0-2 .. k0+1 in s = (E - E_{k0-2}) / h, integrated
    // over [s(0), 2] with two-point Gauss-Legendre (exact for cubics).
    const double sa = -pts[k0 - 2] / h;
    const double sb = 2.0;
    const double mid = 0.5 * (sa + sb);
    const double rad = 0.5 * (sb - sa);
    const double g = 1.0 / std::sqrt(3.0);
    for (double s : {mid - rad * g, mid + rad * g}) {
      cplx value = 0.0;
      for (int a = 0; a < 4; ++a) {
        double basis = 1.0;
        for (int b = 0; b < 4; ++b)
          if (b != a) basis *= (s - b) / static_cast<double>(a - b);
        value += basis * samples[k0 - 2 + static_cast<std::size_t>(a)];
      }
      acc += h * rad * value;
    }
  }
  return acc;
}

/// Inner product restricted to E >= 0, with the half-line rule above.
inline cplx halfline_inner_product(const SampledWaveFunction& f, const SampledWaveFunction& g) {
  require_same_grid(f, g);
  std::vector<cplx> prod(f.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = std::conj(f[i]) * g[i];
  return halfline_integral(f.grid(), prod);
}

// --- JSON ------------------------------------------------------------------

inline const char* to_string(GridKind k) {
  return k == GridKind::full_line ? "full-line" : "half-line";
}
inline const char* to_string(Role r) { return r == Role::state ? "state" : "observable"; }
inline const char* to_string(HardyClass c) {
  switch (c) {
    case HardyClass::H2_plus: return "H2_plus";
    case HardyClass::H2_minus: return "H2_minus";
    default: return "unknown";
  }
}

inline nlohmann::json grid_to_json(const EnergyGrid& grid) {
  return {{"kind", to_string(grid.kind())},
          {"points", std::vector<double>(grid.points().begin(), grid.points().end())},
          {"weights", std::vector<double>(grid.weights().begin(), grid.weights().end())}};
}

/// Rebuilds a grid from its serialized points. Only grids this library can
/// construct (uniform, trapezoidal) are accepted.
inline GridPtr grid_from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    const auto pts = j.at("points").get<std::vector<double>>();
    const auto wts = j.at("weights").get<std::vector<double>>();
    detail::require(pts.size() == wts.size(), errc::parse_error,
                    "points and weights differ in length");
    detail::require(pts.size() >= 8, errc::parse_error, "grid needs at least 8 points");
    GridPtr grid;
    if (kind == "full-line") {
      grid = make_line_grid(0.5 * (pts.front() + pts.back()), 0.5 * (pts.back() - pts.front()),
                            pts.size());
    } else if (kind == "half-line") {
      detail::require(pts.front() == 0.0, errc::parse_error, "half-line grid must start at 0");
      grid = make_halfline_grid(pts.back(), pts.size());
    } else {
      throw error(errc::parse_error, "unknown grid kind '" + kind + "'");
    }
    const double tol = 1e-12 * std::max({1.0, std::abs(pts.front()), std::abs(pts.back())});
    for (std::size_t i = 0; i < pts.size(); ++i) {
      detail::require(std::abs(grid->point(i) - pts[i]) <= tol &&
                          std::abs(grid->weight(i) - wts[i]) <= tol,
                      errc::parse_error, "grid is not uniform with trapezoidal weights");
    }
    return grid;
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::parse_error, e.what());
  }
}

inline nlohmann::json wave_function_to_json(const SampledWaveFunction& f) {
  std::vector<double> re(f.size()), im(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    re[i] = f[i].real();
    im[i] = f[i].imag();
  }
  nlohmann::json labels = nlohmann::json::object();
  if (f.labels().j) labels["j"] = *f.labels().j;
  if (f.labels().j3) labels["j3"] = *f.labels().j3;
  if (!f.labels().eta.empty()) labels["eta"] = f.labels().eta;
  return {{"grid", grid_to_json(f.grid())},
          {"re", re},
          {"im", im},
          {"role", to_string(f.role())},
          {"hardy_class", to_string(f.hardy_class())},
          {"labels", labels}};
}

inline SampledWaveFunction wave_function_from_json(const nlohmann::json& j) {
  try {
    auto grid = grid_from_json(j.at("grid"));
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    detail::require(re.size() == im.size(), errc::parse_error, "re and im differ in length");
    std::vector<cplx> v(re.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = {re[i], im[i]};

    const auto role_s = j.value("role", std::string("state"));
    detail::require(role_s == "state" || role_s == "observable", errc::parse_error,
                    "unknown role '" + role_s + "'");
    const Role role = role_s == "state" ? Role::state : Role::observable;

    const auto cls_s = j.value("hardy_class", std::string("unknown"));
    HardyClass cls = HardyClass::unknown;
    if (cls_s == "H2_plus") cls = HardyClass::H2_plus;
    else if (cls_s == "H2_minus") cls = HardyClass::H2_minus;
    else detail::require(cls_s == "unknown", errc::parse_error, "unknown hardy_class '" + cls_s + "'");

    QuantumLabels labels;
    if (j.contains("labels")) {
      const auto& l = j.at("labels");
      if (l.contains("j")) labels.j = l.at("j").get<double>();
      if (l.contains("j3")) labels.j3 = l.at("j3").get<double>();
      if (l.contains("eta")) labels.eta = l.at("eta").get<std::string>();
    }
    return SampledWaveFunction(std::move(grid), std::move(v), role, cls, std::move(labels));
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::parse_error, e.what());
  }
}

}  // namespace gamowlab

#pragma once

// Gamow states: the Lorentzian-amplitude wave function of a resonance pole,
// its survival amplitude under t >= 0 evolution, and the weak form of the
// complex eigenvalue equation.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "gamowlab/error.hpp"
#include "gamowlab/grid.hpp"
#include "gamowlab/hardy.hpp"

namespace gamowlab {

/// Largest Lorentzian tail mass outside the grid accepted by make_gamow.
inline constexpr double gamow_tail_tolerance = 1e-4;

struct GamowState {
  cplx z_R;
  /// Values i sqrt(Gamma / 2 pi) / (E - z_R). Tagged role = state and
  /// hardy_class = H2_plus; it is the one function exempt from the
  /// role/class pairing rule (it decays like a state but its pole makes it
  /// upper-half-plane analytic).
  SampledWaveFunction wavefunction;
  /// sqrt(2 pi Gamma), the factor relating the normalized ket to the raw
  /// pole ket.
  double normalization;
  /// Lorentzian mass lying outside the grid; the norm deficit is about half.
  double tail_mass;

  double E_R() const { return z_R.real(); }
  double Gamma() const { return -2.0 * z_R.imag(); }
};

struct DecaySeries {
  std::vector<double> times;
  std::vector<cplx> amplitude;
  std::vector<double> survival;
};

namespace detail {

inline void require_lower_pole(cplx z_R) {
  require(std::isfinite(z_R.real()) && std::isfinite(z_R.imag()), errc::invalid_argument,
          "pole must be finite");
  require(z_R.imag() < 0.0, errc::pole_not_in_lower_half_plane,
          "pole must satisfy Im z_R < 0");
}

inline std::vector<cplx> lorentzian_amplitude(const EnergyGrid& grid, cplx z_R) {
  const double gamma = -2.0 * z_R.imag();
  const cplx c(0.0, std::sqrt(gamma / (2.0 * pi)));
  std::vector<cplx> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = c / (grid.point(i) - z_R);
  return v;
}

inline void require_time(double t) {
  require(std::isfinite(t), errc::invalid_argument, "time must be finite");
  require(t >= 0.0, errc::outside_semigroup,
          "time " + std::to_string(t) + " is before the preparation time t = 0");
}

}  // namespace detail

inline GamowState make_gamow(cplx z_R, const GridPtr& grid) {
  detail::require_lower_pole(z_R);
  detail::require(grid != nullptr, errc::invalid_argument, "grid is null");
  detail::require(grid->is_full_line(), errc::needs_full_line,
                  "Gamow states live on the full energy line");
  const double gamma = -2.0 * z_R.imag();
  const double tail = lorentzian_tail_mass(*grid, z_R.real(), gamma);
  detail::require(tail <= gamow_tail_tolerance, errc::insufficient_grid,
                  "Lorentzian tail outside the grid is " + std::to_string(tail) +
                      ", above 1e-4; widen the grid");
  SampledWaveFunction wf(grid, detail::lorentzian_amplitude(*grid, z_R), Role::state,
                         HardyClass::H2_plus, {}, /*pairing_exempt=*/true);
  return GamowState{z_R, std::move(wf), std::sqrt(2.0 * pi * gamma), tail};
}

/// The same Lorentzian amplitude restricted to [0, E_max] and renormalized.
/// Has no Hardy class: the cut at E = 0 destroys analyticity.
inline SampledWaveFunction truncated_gamow(cplx z_R, const GridPtr& grid) {
  detail::require_lower_pole(z_R);
  detail::require(grid != nullptr, errc::invalid_argument, "grid is null");
  detail::require(grid->kind() == GridKind::half_line, errc::invalid_argument,
                  "truncated Gamow state needs a half-line grid");
  const double gamma = -2.0 * z_R.imag();
  const double upper_tail = std::atan2(0.5 * gamma, grid->upper() - z_R.real()) / pi;
  detail::require(upper_tail <= gamow_tail_tolerance, errc::insufficient_grid,
                  "Lorentzian tail above E_max is " + std::to_string(upper_tail) +
                      ", above 1e-4; raise E_max");
  auto v = detail::lorentzian_amplitude(*grid, z_R);
  SampledWaveFunction raw(grid, v, Role::state);
  const double norm = l2_norm(raw);
  for (auto& x : v) x /= norm;
  return SampledWaveFunction(grid, std::move(v), Role::state);
}

/// A(t) = sum_i w_i |f_i|^2 exp(-i E_i t), the overlap of f with its own
/// evolved self. Defined for t >= 0 only.
inline cplx survival_amplitude(const SampledWaveFunction& f, double t) {
  detail::require_time(t);
  const auto& grid = f.grid();
  const cplx step = std::polar(1.0, -grid.spacing() * t);
  cplx acc = 0.0, phase;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i % 256 == 0) phase = std::polar(1.0, -grid.point(i) * t);
    acc += grid.weight(i) * std::norm(f[i]) * phase;
    phase *= step;
  }
  return acc;
}

inline cplx survival_amplitude(const GamowState& g, double t) {
  return survival_amplitude(g.wavefunction, t);
}

inline DecaySeries decay_curve(const SampledWaveFunction& f, const std::vector<double>& times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    detail::require_time(times[i]);
    detail::require(i == 0 || times[i] >= times[i - 1], errc::invalid_argument,
                    "times must be ascending");
  }
  DecaySeries out;
  out.times = times;
  out.amplitude.reserve(times.size());
  out.survival.reserve(times.size());
  for (double t : times) {
    const cplx a = survival_amplitude(f, t);
    out.amplitude.push_back(a);
    out.survival.push_back(std::norm(a));
  }
  return out;
}

inline DecaySeries decay_curve(const GamowState& g, const std::vector<double>& times) {
  return decay_curve(g.wavefunction, times);
}

/// <test|E g> / <test|g> - z_R for a test function in H2_plus.
inline cplx eigenvalue_defect(const GamowState& g, const SampledWaveFunction& test,
                              HardyOptions opt = {}) {
  require_same_grid(g.wavefunction, test);
  detail::require(test.hardy_class() != HardyClass::H2_minus, errc::class_mismatch,
                  "test function is declared H2_minus; an H2_plus test is required");
  const double leak = hardy_leakage(test, HardyClass::H2_plus);
  detail::require(leak <= opt.leakage_threshold, errc::class_mismatch,
                  "test function leakage " + std::to_string(leak) + " exceeds threshold for H2_plus");
  const auto& grid = test.grid();
  const auto& psi = g.wavefunction;
  cplx overlap = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const cplx term = grid.weight(i) * std::conj(test[i]) * psi[i];
    overlap += term;
    moment += grid.point(i) * term;
  }
  detail::require(std::abs(overlap) >= 1e-8, errc::degenerate_test,
                  "test function has vanishing overlap with the Gamow state");
  return moment / overlap - g.z_R;
}

}  // namespace gamowlab

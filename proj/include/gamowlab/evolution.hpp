#pragma once

// Time evolution in the energy representation. States evolve by
// exp(-i E t), observables by exp(+i E t), both only for t >= 0 unless the
// caller explicitly opts into diagnostic mode.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "gamowlab/error.hpp"
#include "gamowlab/grid.hpp"
#include "gamowlab/hardy.hpp"

namespace gamowlab {

enum class Direction { schrodinger_state, heisenberg_observable };

struct EvolutionOptions {
  /// Refuse t < 0. Turning this off is diagnostic mode.
  bool enforce_semigroup = true;
  /// Refuse a state where an observable is expected and vice versa.
  /// Ignored in diagnostic mode.
  bool check_roles = true;

  static EvolutionOptions diagnostic() { return {false, false}; }
};

struct EvolutionRequest {
  double t = 0.0;
  Direction direction = Direction::schrodinger_state;
  bool enforce_semigroup = true;
};

namespace detail {

inline void check_evolution_time(double t, const EvolutionOptions& opt) {
  require(std::isfinite(t), errc::invalid_argument, "time must be finite");
  if (opt.enforce_semigroup)
    require(t >= 0.0, errc::outside_semigroup,
            "t = " + std::to_string(t) + " < 0 is outside the semigroup; use diagnostic mode");
}

inline void check_role(const SampledWaveFunction& f, Role expected, const EvolutionOptions& opt) {
  if (!opt.enforce_semigroup || !opt.check_roles) return;
  require(f.role() == expected, errc::role_mismatch,
          std::string("expected a ") + to_string(expected) + ", got a " + to_string(f.role()));
}

inline SampledWaveFunction multiply_phase(const SampledWaveFunction& f, double sign_t) {
  const auto& grid = f.grid();
  std::vector<cplx> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[i] * std::polar(1.0, sign_t * grid.point(i));
  return f.with_values(std::move(v));
}

}  // namespace detail

/// phi(t) = exp(-i E t) phi.
inline SampledWaveFunction evolve_state(const SampledWaveFunction& phi, double t,
                                        EvolutionOptions opt = {}) {
  detail::check_evolution_time(t, opt);
  detail::check_role(phi, Role::state, opt);
  return detail::multiply_phase(phi, -t);
}

/// psi(t) = exp(+i E t) psi.
inline SampledWaveFunction evolve_observable(const SampledWaveFunction& psi, double t,
                                             EvolutionOptions opt = {}) {
  detail::check_evolution_time(t, opt);
  detail::check_role(psi, Role::observable, opt);
  return detail::multiply_phase(psi, t);
}

inline SampledWaveFunction evolve(const SampledWaveFunction& f, const EvolutionRequest& req) {
  EvolutionOptions opt;
  opt.enforce_semigroup = req.enforce_semigroup;
  opt.check_roles = req.enforce_semigroup;
  return req.direction == Direction::schrodinger_state ? evolve_state(f, req.t, opt)
                                                       : evolve_observable(f, req.t, opt);
}

/// |(psi, phi(t))|^2, Schrodinger picture.
inline double born_probability(const SampledWaveFunction& psi, const SampledWaveFunction& phi,
                               double t, EvolutionOptions opt = {}) {
  require_same_grid(psi, phi);
  detail::check_role(psi, Role::observable, opt);
  return std::norm(inner_product(psi, evolve_state(phi, t, opt)));
}

/// |(psi(t), phi)|^2, Heisenberg picture. Same number as born_probability.
inline double born_probability_heisenberg(const SampledWaveFunction& psi,
                                          const SampledWaveFunction& phi, double t,
                                          EvolutionOptions opt = {}) {
  require_same_grid(psi, phi);
  detail::check_role(phi, Role::state, opt);
  return std::norm(inner_product(evolve_observable(psi, t, opt), phi));
}

/// Leakage of f out of its declared Hardy class after evolving for time t
/// (any sign). H2_minus functions are moved by exp(-i E t), H2_plus by
/// exp(+i E t); for t >= 0 both shift the spectrum away from the forbidden
/// half, for t < 0 towards it.
inline double causality_leak(const SampledWaveFunction& f, double t) {
  detail::require(f.hardy_class() != HardyClass::unknown, errc::class_required,
                  "causality_leak needs a declared Hardy class");
  detail::require(f.grid().is_full_line(), errc::needs_full_line,
                  "causality_leak needs a full-line grid");
  detail::require(std::isfinite(t), errc::invalid_argument, "time must be finite");
  const double sign_t = f.hardy_class() == HardyClass::H2_minus ? -t : t;
  return hardy_leakage(detail::multiply_phase(f, sign_t), f.hardy_class());
}

}  // namespace gamowlab

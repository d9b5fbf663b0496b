#include <catch_amalgamated.hpp>

#include <random>

#include "gamowlab/evolution.hpp"
#include "gamowlab/gamow.hpp"
#include "oracles.hpp"

using namespace gamowlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

template <class Fn>
void expect_errc(errc code, Fn&& fn) {
  try {
    fn();
    FAIL("expected " << to_string(code));
  } catch (const error& e) {
    CHECK(e.code() == code);
  }
}

SampledWaveFunction random_unit(const GridPtr& g, Role role, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<cplx> v(g->size());
  for (auto& x : v) x = {n(rng), n(rng)};
  SampledWaveFunction f(g, std::move(v), role);
  return scaled(f, 1.0 / l2_norm(f));
}

double max_diff(const SampledWaveFunction& a, const SampledWaveFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// 1/(E - (1 + 0.5i)): an H2_minus state with b = 0.5.
SampledWaveFunction pole_state() {
  static const auto g = make_line_grid(0.0, 1000.0, 1 << 15);
  return SampledWaveFunction::sample(
      g, [](double E) { return 1.0 / (E - cplx(1.0, 0.5)); }, Role::state, HardyClass::H2_minus);
}

}  // namespace

TEST_CASE("evolution at t = 0 is the identity") {
  std::mt19937_64 rng(1);
  const auto g = make_line_grid(0.0, 20.0, 512);
  const auto phi = random_unit(g, Role::state, rng);
  const auto psi = random_unit(g, Role::observable, rng);
  CHECK(max_diff(evolve_state(phi, 0.0), phi) <= 1e-15);
  CHECK(max_diff(evolve_observable(psi, 0.0), psi) <= 1e-15);
}

TEST_CASE("evolution composes additively") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const auto g = make_line_grid(1.0, 20.0, 512);
  const auto phi = random_unit(g, Role::state, rng);
  const auto psi = random_unit(g, Role::observable, rng);
  for (int k = 0; k < 20; ++k) {
    const double t1 = u(rng), t2 = u(rng);
    REQUIRE(max_diff(evolve_state(evolve_state(phi, t1), t2), evolve_state(phi, t1 + t2)) <=
            1e-12);
    REQUIRE(max_diff(evolve_observable(evolve_observable(psi, t1), t2),
                     evolve_observable(psi, t1 + t2)) <= 1e-12);
  }
}

TEST_CASE("evolution preserves norm, role and grid") {
  std::mt19937_64 rng(3);
  const auto g = make_line_grid(0.0, 30.0, 1024);
  const auto phi = random_unit(g, Role::state, rng);
  const auto e = evolve_state(phi, 3.7);
  CHECK_THAT(l2_norm(e), WithinAbs(l2_norm(phi), 1e-12));
  CHECK(e.role() == Role::state);
  CHECK(e.grid_ptr() == phi.grid_ptr());
  const auto d = evolve_state(phi, -3.7, EvolutionOptions::diagnostic());
  CHECK_THAT(l2_norm(d), WithinAbs(l2_norm(phi), 1e-12));
}

TEST_CASE("conjugate of an evolved observable is the evolved conjugate state") {
  std::mt19937_64 rng(4);
  const auto g = make_line_grid(-3.0, 40.0, 700);
  const auto psi = random_unit(g, Role::observable, rng);
  for (double t : {0.0, 0.3, 2.0, 17.5}) {
    const auto lhs = conjugate(evolve_observable(psi, t));
    const auto rhs = evolve_state(conjugate(psi), t);
    REQUIRE(max_diff(lhs, rhs) <= 1e-15);
  }
}

TEST_CASE("semigroup domain is enforced") {
  std::mt19937_64 rng(5);
  const auto g = make_line_grid(0.0, 10.0, 64);
  const auto phi = random_unit(g, Role::state, rng);
  const auto psi = random_unit(g, Role::observable, rng);
  expect_errc(errc::outside_semigroup, [&] { evolve_state(phi, -1.0); });
  expect_errc(errc::outside_semigroup, [&] { evolve_observable(psi, -0.01); });
  expect_errc(errc::outside_semigroup, [&] { born_probability(psi, phi, -2.0); });
  expect_errc(errc::outside_semigroup, [&] { born_probability_heisenberg(psi, phi, -2.0); });
  expect_errc(errc::outside_semigroup, [&] { evolve(phi, {-1.0, Direction::schrodinger_state}); });
  CHECK_NOTHROW(evolve(phi, {-1.0, Direction::schrodinger_state, false}));
  CHECK_NOTHROW(evolve_state(phi, -1.0, EvolutionOptions::diagnostic()));
  expect_errc(errc::invalid_argument, [&] { evolve_state(phi, std::nan("")); });
}

TEST_CASE("states and observables evolve in their own direction") {
  std::mt19937_64 rng(6);
  const auto g = make_line_grid(0.0, 10.0, 64);
  const auto phi = random_unit(g, Role::state, rng);
  const auto psi = random_unit(g, Role::observable, rng);
  expect_errc(errc::role_mismatch, [&] { evolve_state(psi, 1.0); });
  expect_errc(errc::role_mismatch, [&] { evolve_observable(phi, 1.0); });
  expect_errc(errc::role_mismatch, [&] { evolve(psi, {1.0, Direction::schrodinger_state}); });
  const auto a = evolve(phi, {1.5, Direction::schrodinger_state});
  CHECK(max_diff(a, evolve_state(phi, 1.5)) == 0.0);
  const auto b = evolve(psi, {1.5, Direction::heisenberg_observable});
  CHECK(max_diff(b, evolve_observable(psi, 1.5)) == 0.0);
}

TEST_CASE("Born probability of a state with itself at t = 0") {
  std::mt19937_64 rng(7);
  const auto g = make_line_grid(0.0, 10.0, 256);
  const auto phi = random_unit(g, Role::state, rng);
  CHECK_THAT(born_probability(phi, phi, 0.0, EvolutionOptions::diagnostic()), WithinAbs(1.0, 1e-13));
  expect_errc(errc::role_mismatch, [&] { born_probability(phi, phi, 0.0); });
}

TEST_CASE("Born probability of a Gamow state is its survival probability") {
  const auto g = make_gamow({2.0, -0.2}, make_line_grid(2.0, 5000.0, 1 << 18));
  EvolutionOptions same_roles;
  same_roles.check_roles = false;
  for (double t : {0.0, 1.0, 2.5, 7.0, 12.5}) {
    const double p = born_probability(g.wavefunction, g.wavefunction, t, same_roles);
    REQUIRE_THAT(p, WithinAbs(std::norm(survival_amplitude(g, t)), 1e-10));
  }
}

TEST_CASE("Schrodinger and Heisenberg pictures agree") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  const auto g = make_line_grid(0.5, 25.0, 2048);
  for (int k = 0; k < 100; ++k) {
    const auto psi = random_unit(g, Role::observable, rng);
    const auto phi = random_unit(g, Role::state, rng);
    const double t = u(rng);
    const double s = born_probability(psi, phi, t);
    const double h = born_probability_heisenberg(psi, phi, t);
    REQUIRE(std::abs(s - h) <= 1e-12);
    REQUIRE(s <= 1.0 + 1e-12);
  }
}

TEST_CASE("causality leak of a lower-pole state") {
  const auto phi = pole_state();
  const double base = hardy_leakage(phi, HardyClass::H2_minus);
  CHECK(base <= 1e-4);
  CHECK(causality_leak(phi, 0.0) == base);
  CHECK(causality_leak(phi, 2.0) <= 1e-6);
  for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) REQUIRE(causality_leak(phi, t) <= base + 1e-8);
  for (double t : {-0.5, -1.0, -2.0}) {
    INFO("t = " << t);
    CHECK_THAT(causality_leak(phi, t), WithinAbs(oracle::shifted_pole_leakage(0.5, t), 1e-3));
  }
}

TEST_CASE("causality leak grows as t goes further back") {
  const auto phi = pole_state();
  double prev = causality_leak(phi, 0.0);
  for (double t = -0.1; t >= -4.0; t -= 0.1) {
    const double l = causality_leak(phi, t);
    REQUIRE(l >= prev);
    prev = l;
  }
  CHECK(prev > 0.97);
}

TEST_CASE("causality leak of an observable uses the observable direction") {
  // conj of the pole state is an H2_plus observable with the same b.
  const auto psi = conjugate(pole_state());
  CHECK(causality_leak(psi, 1.0) <= 1e-6);
  CHECK_THAT(causality_leak(psi, -1.0), WithinAbs(oracle::shifted_pole_leakage(0.5, -1.0), 1e-3));
}

TEST_CASE("causality leak needs a class and a full line") {
  std::mt19937_64 rng(9);
  const auto f = random_unit(make_line_grid(0.0, 10.0, 64), Role::state, rng);
  expect_errc(errc::class_required, [&] { causality_leak(f, 1.0); });
  const auto h = SampledWaveFunction(make_halfline_grid(10.0, 64), std::vector<cplx>(64, 1.0),
                                     Role::state, HardyClass::H2_minus);
  expect_errc(errc::needs_full_line, [&] { causality_leak(h, 1.0); });
}

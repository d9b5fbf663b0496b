#pragma once

// Fixed rational test pairs for the S-matrix checks. psi = 1/prod(E - a_i)
// with Im a_i < 0 (H2_plus), phi = 1/prod(E - b_i) with Im b_i > 0 (H2_minus).

#include <complex>
#include <vector>

#include "gamowlab/grid.hpp"

namespace corpus {

using cplx = std::complex<double>;

struct RationalPair {
  std::vector<cplx> a;
  std::vector<cplx> b;
};

inline const std::vector<RationalPair>& rational_pairs() {
  static const std::vector<RationalPair> pairs = {
      {{{1.0, -0.5}, {3.0, -1.0}}, {{1.5, 0.7}, {2.5, 0.4}}},
      {{{2.0, -0.3}, {2.5, -0.8}}, {{1.8, 0.5}, {2.2, 0.9}}},
      {{{0.5, -1.0}, {4.0, -0.6}}, {{1.0, 0.3}, {3.0, 1.2}}},
      {{{-1.0, -0.7}, {2.0, -0.4}}, {{0.0, 0.8}, {2.0, 0.6}}},
      {{{1.5, -1.5}, {2.8, -0.5}}, {{2.1, 0.35}, {4.0, 1.0}}},
      {{{3.0, -0.4}, {5.0, -2.0}}, {{2.6, 0.5}, {-0.5, 1.1}}},
      {{{1.9, -0.6}, {2.1, -1.1}}, {{1.7, 0.45}, {2.4, 0.75}}},
      {{{0.0, -0.5}, {1.0, -0.9}}, {{0.5, 0.6}, {1.5, 1.4}}},
      {{{6.0, -1.0}, {2.0, -0.7}}, {{2.0, 0.4}, {6.0, 2.0}}},
      {{{2.3, -0.35}, {-2.0, -1.3}}, {{1.2, 0.9}, {3.5, 0.55}}},
  };
  return pairs;
}

inline cplx rational(double E, const std::vector<cplx>& poles) {
  cplx v = 1.0;
  for (const auto& p : poles) v /= (E - p);
  return v;
}

inline gamowlab::SampledWaveFunction observable(const gamowlab::GridPtr& g,
                                                const std::vector<cplx>& a) {
  return gamowlab::SampledWaveFunction::sample(
      g, [&](double E) { return rational(E, a); }, gamowlab::Role::observable,
      gamowlab::HardyClass::H2_plus);
}

inline gamowlab::SampledWaveFunction state(const gamowlab::GridPtr& g,
                                           const std::vector<cplx>& b) {
  return gamowlab::SampledWaveFunction::sample(
      g, [&](double E) { return rational(E, b); }, gamowlab::Role::state,
      gamowlab::HardyClass::H2_minus);
}

}  // namespace corpus

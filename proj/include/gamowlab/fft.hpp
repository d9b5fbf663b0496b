#pragma once

// Thin FFTW wrapper. Planning is not thread safe in FFTW, so plan creation
// and destruction go through one mutex; execution does not.

#include <complex>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "gamowlab/error.hpp"

namespace gamowlab::fft {

enum class direction : int { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct plan_deleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

}  // namespace detail

/// Unnormalized in-place transform. `forward` uses exp(-2 pi i jk/n),
/// `backward` exp(+2 pi i jk/n).
inline void transform(std::vector<std::complex<double>>& data, direction dir) {
  if (data.empty()) return;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  std::unique_ptr<fftw_plan_s, detail::plan_deleter> plan;
  {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    plan.reset(fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, static_cast<int>(dir),
                                FFTW_ESTIMATE));
  }
  gamowlab::detail::require(plan != nullptr, errc::invalid_argument, "FFTW planning failed");
  fftw_execute(plan.get());
}

}  // namespace gamowlab::fft

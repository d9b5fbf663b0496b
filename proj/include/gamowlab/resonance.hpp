#pragma once

// Breit-Wigner amplitude and cross section, and recovery of (E_R, Gamma)
// from a sampled line shape by Levenberg-Marquardt.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gamowlab/error.hpp"
#include "gamowlab/grid.hpp"

namespace gamowlab {

struct BreitWignerParams {
  double E_R = 1.0;
  double Gamma = 1.0;
  cplx R = 1.0;
  double j = 0.0;

  /// z_R = E_R - i Gamma/2.
  cplx pole() const { return {E_R, -0.5 * Gamma}; }

  void validate() const {
    detail::require(std::isfinite(E_R) && E_R > 0.0, errc::invalid_argument,
                    "E_R must be positive");
    detail::require(std::isfinite(Gamma) && Gamma > 0.0, errc::invalid_argument,
                    "Gamma must be positive");
    detail::require(std::isfinite(R.real()) && std::isfinite(R.imag()), errc::invalid_argument,
                    "R must be finite");
    detail::require(j >= 0.0 && std::floor(2.0 * j) == 2.0 * j, errc::invalid_argument,
                    "j must be a non-negative half-integer");
  }
};

/// a(E) = R / (E - z_R).
inline cplx bw_amplitude(const BreitWignerParams& p, double E) { return p.R / (E - p.pole()); }

/// (Gamma/2)^2 / ((E - E_R)^2 + (Gamma/2)^2), unity at the peak.
inline double lorentzian_factor(double E, double e_r, double gamma) {
  const double g = 0.5 * gamma;
  const double d = E - e_r;
  return g * g / (d * d + g * g);
}

inline double bw_peak(double momentum, double j) {
  return 4.0 * pi / (momentum * momentum) * (2.0 * j + 1.0);
}

/// sigma(E) = (4 pi / p^2)(2j + 1) (Gamma/2)^2 / ((E - E_R)^2 + (Gamma/2)^2).
inline double bw_cross_section(const BreitWignerParams& p, double momentum, double E) {
  detail::require(std::isfinite(momentum) && momentum > 0.0, errc::invalid_argument,
                  "momentum must be positive");
  return bw_peak(momentum, p.j) * lorentzian_factor(E, p.E_R, p.Gamma);
}

struct LineShapeSample {
  double E;
  double sigma;
};

struct FitReport {
  double residual = 0.0;  // sqrt of the residual sum of squares
  int iterations = 0;
  bool converged = false;
  double scale = 1.0;  // fitted amplitude relative to (4 pi/p^2)(2j+1)
  /// Covariance of (E_R, Gamma, scale), RSS/(m - 3) (J^T J)^-1.
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double gradient_norm = 0.0;  // |J^T r| at the solution
  double initial_gradient_norm = 0.0;
};

struct FitResult {
  BreitWignerParams params;
  FitReport report;
};

/// Thrown when the iteration budget runs out; carries the best point seen.
class fit_error : public error {
 public:
  fit_error(const std::string& what, FitResult best)
      : error(errc::fit_failed, what), best_(std::move(best)) {}
  const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

struct FitOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-13;
  double lambda0 = 1e-3;
};

namespace detail {

struct LineShapeModel {
  const std::vector<LineShapeSample>& s;
  double amp;

  double rss(const Eigen::Vector3d& th, Eigen::VectorXd* r = nullptr,
             Eigen::MatrixXd* J = nullptr) const {
    const auto m = static_cast<Eigen::Index>(s.size());
    if (r) r->resize(m);
    if (J) J->resize(m, 3);
    double acc = 0.0;
    const double g = 0.5 * th[1];
    for (Eigen::Index i = 0; i < m; ++i) {
      const double d = s[static_cast<std::size_t>(i)].E - th[0];
      const double den = d * d + g * g;
      const double L = g * g / den;
      const double ri = th[2] * amp * L - s[static_cast<std::size_t>(i)].sigma;
      acc += ri * ri;
      if (r) (*r)[i] = ri;
      if (J) {
        (*J)(i, 0) = th[2] * amp * 2.0 * g * g * d / (den * den);
        (*J)(i, 1) = th[2] * amp * g * d * d / (den * den);
        (*J)(i, 2) = amp * L;
      }
    }
    return acc;
  }
};

/// Peak position (smallest E among equal maxima) and FWHM from linearly
/// interpolated half-maximum crossings.
inline BreitWignerParams initial_guess(const std::vector<LineShapeSample>& s, double j) {
  std::size_t ip = 0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i].sigma > s[ip].sigma) ip = i;
  const double half = 0.5 * s[ip].sigma;
  std::optional<double> left, right;
  for (std::size_t i = ip; i > 0; --i) {
    if (s[i - 1].sigma <= half) {
      const double t = (s[i].sigma - half) / (s[i].sigma - s[i - 1].sigma);
      left = s[i].E - t * (s[i].E - s[i - 1].E);
      break;
    }
  }
  for (std::size_t i = ip; i + 1 < s.size(); ++i) {
    if (s[i + 1].sigma <= half) {
      const double t = (s[i].sigma - half) / (s[i].sigma - s[i + 1].sigma);
      right = s[i].E + t * (s[i + 1].E - s[i].E);
      break;
    }
  }
  const double e_r = s[ip].E;
  double width;
  if (left && right) width = *right - *left;
  else if (left) width = 2.0 * (e_r - *left);
  else if (right) width = 2.0 * (*right - e_r);
  else width = 0.5 * (s.back().E - s.front().E);
  if (!(width > 0.0)) width = 0.5 * (s.back().E - s.front().E);

  BreitWignerParams p;
  p.E_R = e_r;
  p.Gamma = width;
  p.j = j;
  return p;
}

}  // namespace detail

/// Least-squares fit of the cross-section shape to samples. The amplitude
/// is a free scale, so only the shape determines (E_R, Gamma).
inline FitResult fit_pole(std::vector<LineShapeSample> samples, double momentum, double j,
                          std::optional<BreitWignerParams> init = std::nullopt,
                          FitOptions opt = {}) {
  detail::require(std::isfinite(momentum) && momentum > 0.0, errc::invalid_argument,
                  "momentum must be positive");
  detail::require(j >= 0.0 && std::floor(2.0 * j) == 2.0 * j, errc::invalid_argument,
                  "j must be a non-negative half-integer");
  detail::require(samples.size() >= 5, errc::invalid_argument, "fit needs at least 5 samples");
  for (const auto& s : samples) {
    detail::require(std::isfinite(s.E) && std::isfinite(s.sigma), errc::invalid_argument,
                    "samples must be finite");
    detail::require(s.sigma >= 0.0, errc::invalid_argument, "sigma values must be non-negative");
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const auto& a, const auto& b) { return a.E < b.E; });
  detail::require(samples.front().E < samples.back().E, errc::invalid_argument,
                  "samples are all at one energy");

  const double amp = bw_peak(momentum, j);
  const detail::LineShapeModel model{samples, amp};

  BreitWignerParams start = init ? *init : detail::initial_guess(samples, j);
  detail::require(start.Gamma > 0.0, errc::invalid_argument, "initial Gamma must be positive");
  double smax = 0.0;
  for (const auto& s : samples) smax = std::max(smax, s.sigma);
  detail::require(smax > 0.0, errc::invalid_argument, "all sigma values are zero");

  Eigen::Vector3d th(start.E_R, start.Gamma, 0.0);
  {
    // Best scale for the starting shape, closed form.
    double num = 0.0, den = 0.0;
    for (const auto& s : samples) {
      const double L = amp * lorentzian_factor(s.E, th[0], th[1]);
      num += L * s.sigma;
      den += L * L;
    }
    th[2] = den > 0.0 ? num / den : smax / amp;
  }

  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  double cost = model.rss(th, &r, &J);
  Eigen::Vector3d grad = J.transpose() * r;
  const double grad0 = grad.norm();
  double lambda = opt.lambda0;
  bool converged = false;
  int it = 0;

  for (; it < opt.max_iterations; ++it) {
    const Eigen::Matrix3d A = J.transpose() * J;
    if (grad.norm() == 0.0) {
      converged = true;
      break;
    }
    bool accepted = false;
    Eigen::Vector3d step = Eigen::Vector3d::Zero();
    for (int tries = 0; tries < 60; ++tries) {
      Eigen::Matrix3d M = A;
      for (int k = 0; k < 3; ++k) M(k, k) += lambda * std::max(A(k, k), 1e-300);
      step = M.ldlt().solve(-grad);
      const Eigen::Vector3d trial = th + step;
      if (trial[1] > 0.0 && step.allFinite()) {
        const double trial_cost = model.rss(trial);
        if (trial_cost <= cost) {
          th = trial;
          cost = model.rss(th, &r, &J);
          grad = J.transpose() * r;
          lambda = std::max(lambda / 10.0, 1e-15);
          accepted = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    bool small = true;
    for (int k = 0; k < 3; ++k)
      small = small && std::abs(step[k]) <= opt.step_tolerance * (std::abs(th[k]) + 1e-300);
    if (!accepted || small) {
      converged = true;
      ++it;
      break;
    }
  }

  FitResult out;
  out.params.E_R = th[0];
  out.params.Gamma = th[1];
  out.params.j = j;
  out.report.residual = std::sqrt(cost);
  out.report.iterations = it;
  out.report.converged = converged;
  out.report.scale = th[2];
  out.report.gradient_norm = grad.norm();
  out.report.initial_gradient_norm = grad0;
  const auto m = static_cast<double>(samples.size());
  const Eigen::Matrix3d A = J.transpose() * J;
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
  if (lu.isInvertible() && m > 3.0) out.report.covariance = cost / (m - 3.0) * lu.inverse();

  if (!converged)
    throw fit_error("no convergence after " + std::to_string(opt.max_iterations) + " iterations",
                    out);
  return out;
}

/// Line-shape samples on a uniform energy window, optionally with
/// multiplicative Gaussian noise of relative size `noise`.
inline std::vector<LineShapeSample> synthesize_line_shape(const BreitWignerParams& p,
                                                          double momentum, double e_min,
                                                          double e_max, std::size_t points,
                                                          double noise = 0.0,
                                                          std::uint64_t seed = 0) {
  p.validate();
  detail::require(points >= 2 && e_max > e_min, errc::invalid_argument,
                  "synthetic window needs E_max > E_min and at least 2 points");
  detail::require(noise >= 0.0, errc::invalid_argument, "noise must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<LineShapeSample> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double E =
        e_min + (e_max - e_min) * static_cast<double>(i) / static_cast<double>(points - 1);
    double s = bw_cross_section(p, momentum, E);
    if (noise > 0.0) s *= 1.0 + noise * gauss(rng);
    out[i] = {E, std::max(s, 0.0)};
  }
  return out;
}

}  // namespace gamowlab

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gamowlab {

/// Failure categories reported by the library. Every throwing operation
/// raises `gamowlab::error` tagged with one of these.
enum class errc {
  invalid_argument,
  incompatible_grids,
  needs_full_line,
  undefined_leakage,
  class_mismatch,
  class_required,
  role_mismatch,
  too_close_to_axis,
  pole_not_in_lower_half_plane,
  insufficient_grid,
  outside_semigroup,
  degenerate_test,
  fit_failed,
  decomposition_inconsistent,
  parse_error,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::invalid_argument: return "invalid-argument";
    case errc::incompatible_grids: return "incompatible-grids";
    case errc::needs_full_line: return "needs-full-line";
    case errc::undefined_leakage: return "undefined-leakage";
    case errc::class_mismatch: return "class-mismatch";
    case errc::class_required: return "class-required";
    case errc::role_mismatch: return "role-mismatch";
    case errc::too_close_to_axis: return "too-close-to-axis";
    case errc::pole_not_in_lower_half_plane: return "pole-not-in-lower-half-plane";
    case errc::insufficient_grid: return "insufficient-grid";
    case errc::outside_semigroup: return "outside-semigroup";
    case errc::degenerate_test: return "degenerate-test";
    case errc::fit_failed: return "fit-failed";
    case errc::decomposition_inconsistent: return "decomposition-inconsistent";
    case errc::parse_error: return "parse-error";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

namespace detail {

inline void require(bool condition, errc code, const char* what) {
  if (!condition) throw error(code, what);
}

inline void require(bool condition, errc code, const std::string& what) {
  if (!condition) throw error(code, what);
}

}  // namespace detail
}  // namespace gamowlab

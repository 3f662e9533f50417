#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace critwave {

enum class Errc {
  invalid_argument,
  invalid_grid,
  extrapolation,
  out_of_domain,
  branch,
  invalid_velocity,
  solver,
  fit_window,
  normalization,
  coverage,
  ill_posed_constraints,
  undefined_ratio,
  hypothesis_violated,
  io,
};

std::string_view to_string(Errc code);

/// Single exception type for the library; `code()` tells callers what went wrong.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace critwave

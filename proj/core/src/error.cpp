#include "critwave/error.hpp"

namespace critwave {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::invalid_grid: return "invalid-grid";
    case Errc::extrapolation: return "extrapolation";
    case Errc::out_of_domain: return "out-of-domain";
    case Errc::branch: return "branch";
    case Errc::invalid_velocity: return "invalid-velocity";
    case Errc::solver: return "solver";
    case Errc::fit_window: return "fit-window";
    case Errc::normalization: return "normalization";
    case Errc::coverage: return "coverage";
    case Errc::ill_posed_constraints: return "ill-posed-constraints";
    case Errc::undefined_ratio: return "undefined-ratio";
    case Errc::hypothesis_violated: return "hypothesis-violated";
    case Errc::io: return "io";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace critwave

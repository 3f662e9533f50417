#pragma once

// Small numerical kernels shared across modules: symmetric tridiagonal
// algebra, Gauss-Legendre rules, scalar root finding and an embedded
// Runge-Kutta integrator.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace critwave::numerics {

/// Symmetric tridiagonal matrix: diag[i], off[i] couples i and i+1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }
  void multiply(std::span<const double> x, std::span<double> y) const;
};

/// Number of eigenvalues strictly below `shift` (Sturm sequence / LDL^T inertia).
std::size_t count_below(const SymTridiag& m, double shift);

/// Solves (m - shift I) x = rhs with partial pivoting. Returns false if singular.
bool solve_shifted(const SymTridiag& m, double shift, std::span<const double> rhs,
                   std::span<double> x);

/// k-th smallest eigenvalue (k = 0 is the lowest) by bisection on the Sturm count.
double kth_eigenvalue(const SymTridiag& m, std::size_t k, double tol = 1e-14);

/// Gershgorin interval enclosing the spectrum.
std::array<double, 2> gershgorin(const SymTridiag& m);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [lo, hi].
GaussRule gauss_legendre(std::size_t n, double lo = -1.0, double hi = 1.0);

/// Bisection for a sign change of f on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol = 1e-12, int max_iter = 200);

/// Golden-section minimisation on [lo, hi]; returns the argmin.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol = 1e-10);

/// Cubic Lagrange weights for nodes at offsets -1,0,1,2 (unit spacing), evaluated at t in [0,1].
std::array<double, 4> cubic_weights(double t);
/// Derivative (with respect to t) of the cubic Lagrange weights.
std::array<double, 4> cubic_weight_derivs(double t);

/// Ordinary least squares fit y = c0 + c1 x. Returns {c0, c1}.
std::array<double, 2> linear_fit(std::span<const double> x, std::span<const double> y);

using OdeRhs = std::function<void(double, std::span<const double>, std::span<double>)>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 1e-3;
  double h_max = 0.0;  // 0: unlimited
  std::size_t max_steps = 10'000'000;
};

/// Dormand-Prince 5(4) from t0 to t1 (either direction). Calls `observer` after
/// every accepted step; returning false from the observer stops integration.
/// Returns the final time reached.
double integrate_dopri(const OdeRhs& rhs, double t0, double t1, std::vector<double>& y,
                       const OdeOptions& opts,
                       const std::function<bool(double, std::span<const double>)>& observer = {});

}  // namespace critwave::numerics

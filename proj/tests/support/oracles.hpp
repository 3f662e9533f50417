#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the library, so a shared bug cannot cancel out.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Bisection on a bracketing interval.
inline double root(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2).
inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Ground state (1 + r^2/(N(N-2)))^{-(N-2)/2} and its derivative.
inline double W(int n, double r) {
  return std::pow(1.0 + r * r / (n * (n - 2.0)), -(n - 2.0) / 2.0);
}
inline double dW(int n, double r) {
  return -(n - 2.0) / 2.0 * std::pow(1.0 + r * r / (n * (n - 2.0)), -n / 2.0) * 2.0 * r /
         (n * (n - 2.0));
}

/// int_{R^N} |grad W|^2 via the substitution r = tan(theta).
inline double grad_W_sq(int n) {
  return sphere_area(n) * simpson(
                              [n](double th) {
                                // The integrand has a finite limit at pi/2.
                                th = std::min(th, 0.5 * std::numbers::pi - 1e-6);
                                const double r = std::tan(th);
                                const double c = std::cos(th);
                                return dW(n, r) * dW(n, r) * std::pow(r, n - 1) / (c * c);
                              },
                              0.0, 0.5 * std::numbers::pi, 200000);
}

/// int_{R^N} W^{2N/(N-2)}.
inline double critical_power_W(int n) {
  const double p = 2.0 * n / (n - 2.0);
  return sphere_area(n) * simpson(
                              [n, p](double th) {
                                // The integrand has a finite limit at pi/2.
                                th = std::min(th, 0.5 * std::numbers::pi - 1e-6);
                                const double r = std::tan(th);
                                const double c = std::cos(th);
                                return std::pow(W(n, r), p) * std::pow(r, n - 1) / (c * c);
                              },
                              0.0, 0.5 * std::numbers::pi, 200000);
}

/// Inverted translation psi_a(x) = (x - a|x|^2) / (1 - 2<a,x> + |a|^2|x|^2), arrays of length n.
inline void inverted_translation(int n, const double* a, const double* x, double* y) {
  double ax = 0, aa = 0, xx = 0;
  for (int i = 0; i < n; ++i) {
    ax += a[i] * x[i];
    aa += a[i] * a[i];
    xx += x[i] * x[i];
  }
  const double d = 1.0 - 2.0 * ax + aa * xx;
  for (int i = 0; i < n; ++i) y[i] = (x[i] - a[i] * xx) / d;
}

}  // namespace oracle

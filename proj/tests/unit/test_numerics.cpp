#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "critwave/numerics.hpp"
#include "oracles.hpp"

using namespace critwave::numerics;

TEST_CASE("Gauss-Legendre rule integrates polynomials of degree 2n-1 exactly") {
  const auto rule = gauss_legendre(5, 0.0, 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 9);
  CHECK(s == doctest::Approx(std::pow(2.0, 10) / 10.0).epsilon(1e-13));
}

TEST_CASE("Sturm count and bisection match the closed-form spectrum of the 1-D Laplacian") {
  const std::size_t n = 50;
  SymTridiag m{std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0)};
  for (std::size_t k : {0u, 7u, 49u}) {
    const double exact = 2.0 - 2.0 * std::cos((k + 1.0) * std::numbers::pi / (n + 1.0));
    CHECK(kth_eigenvalue(m, k) == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK(count_below(m, 0.0) == 0);
  CHECK(count_below(m, 4.0) == n);
  const auto g = gershgorin(m);
  CHECK(g[0] <= 0.0);
  CHECK(g[1] >= 4.0);
}

TEST_CASE("shifted solve inverts the shifted matrix") {
  SymTridiag m{{4.0, 5.0, 6.0, 7.0}, {1.0, -2.0, 0.5}};
  const std::vector<double> rhs{1.0, -1.0, 2.0, 0.25};
  std::vector<double> x(4), back(4);
  REQUIRE(solve_shifted(m, 1.5, rhs, x));
  m.multiply(x, back);
  for (std::size_t i = 0; i < 4; ++i) CHECK(back[i] - 1.5 * x[i] == doctest::Approx(rhs[i]).epsilon(1e-13));
}

TEST_CASE("cubic weights reproduce cubics and their derivatives") {
  auto p = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x + 0.25 * x * x * x; };
  auto dp = [](double x) { return -2.0 + x + 0.75 * x * x; };
  for (double t : {0.0, 0.3, 0.77, 1.0}) {
    const auto w = cubic_weights(t);
    const auto dw = cubic_weight_derivs(t);
    double v = 0.0, d = 0.0;
    for (int k = 0; k < 4; ++k) {
      v += w[k] * p(k - 1.0);
      d += dw[k] * p(k - 1.0);
    }
    CHECK(v == doctest::Approx(p(t)).epsilon(1e-13));
    CHECK(d == doctest::Approx(dp(t)).epsilon(1e-12));
  }
}

TEST_CASE("scalar root finding and minimisation") {
  CHECK(bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(golden_min([](double x) { return (x - 0.3) * (x - 0.3); }, -1.0, 1.0) ==
        doctest::Approx(0.3).epsilon(1e-6));
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto c = linear_fit(x, y);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(2.0));
}

TEST_CASE("Dormand-Prince integrates the harmonic oscillator both ways") {
  const OdeRhs rhs = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  std::vector<double> y{1.0, 0.0};
  integrate_dopri(rhs, 0.0, 10.0, y, {});
  CHECK(y[0] == doctest::Approx(std::cos(10.0)).epsilon(1e-8));
  CHECK(y[1] == doctest::Approx(-std::sin(10.0)).epsilon(1e-8));
  integrate_dopri(rhs, 10.0, 0.0, y, {});
  CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-8));
}

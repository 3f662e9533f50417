#include <doctest.h>

#include <cmath>
#include <numbers>

#include "critwave/discretization.hpp"
#include "critwave/error.hpp"
#include "oracles.hpp"

using namespace critwave;

TEST_CASE("sphere area and critical exponent") {
  for (int n : {3, 4, 5}) CHECK(sphere_area(n) == doctest::Approx(oracle::sphere_area(n)));
  CHECK(critical_exponent(3) == 6.0);
  CHECK(critical_exponent(4) == 4.0);
}

TEST_CASE("radial grid geometry") {
  const auto g = make_radial_grid(3, 100, 10.0);
  CHECK(g->spacing() == doctest::Approx(0.1));
  CHECK(g->node(0) == doctest::Approx(0.05));
  CHECK(g->hull() == doctest::Approx(9.95));
  double vol = 0.0;
  for (double v : g->cell_volumes()) vol += v;
  CHECK(vol == doctest::Approx(oracle::sphere_area(3) * 1000.0 / 3.0).epsilon(1e-12));
  CHECK(g->face_area(99) == doctest::Approx(oracle::sphere_area(3) * 100.0));
  CHECK_THROWS_AS(make_radial_grid(3, 1, 1.0), Error);
  CHECK_THROWS_AS(make_radial_grid(3, 100, -1.0), Error);
}

TEST_CASE("conservative Laplacian is exact on r^2 and second order on a Gaussian") {
  for (int n : {3, 4, 5}) {
    const auto g = make_radial_grid(n, 200, 4.0);
    const auto f = RadialField::sample(g, [](double r) { return r * r; }, Extension::none);
    // The outer row needs a ghost; check the interior only.
    const auto lap = laplacian(f.with_extension(Extension::zero));
    for (std::size_t i = 0; i + 1 < g->size(); ++i) CHECK(lap[i] == doctest::Approx(2.0 * n).epsilon(1e-10));
  }
  auto err = [](std::size_t cells) {
    const int n = 3;
    const auto g = make_radial_grid(n, cells, 12.0);
    const auto f = RadialField::sample(g, [](double r) { return std::exp(-r * r); }, Extension::zero);
    const auto lap = laplacian(f);
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < g->size(); ++i) {
      const double r = g->node(i);
      const double exact = (4.0 * r * r - 2.0 * n) * std::exp(-r * r);
      e = std::max(e, std::abs(lap[i] - exact));
    }
    return e;
  };
  const double order = std::log2(err(400) / err(800));
  CHECK(order == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("radial Laplacian is symmetric in the cell-volume inner product") {
  const auto g = make_radial_grid(4, 300, 10.0);
  const auto f = RadialField::sample(g, [](double r) { return std::exp(-r) * std::cos(r); }, Extension::zero);
  const auto h = RadialField::sample(g, [](double r) { return 1.0 / (1.0 + r * r * r * r); }, Extension::zero);
  CHECK(volume_product(laplacian(f), h) == doctest::Approx(volume_product(f, laplacian(h))).epsilon(1e-12));
}

TEST_CASE("radial integrals converge to closed forms") {
  const auto g = make_radial_grid(3, 4000, 20.0);
  const auto f = RadialField::sample(g, [](double r) { return std::exp(-r * r); }, Extension::zero);
  const double pi = std::numbers::pi;
  CHECK(integrate(f) == doctest::Approx(std::pow(pi, 1.5)).epsilon(1e-5));
  // int |grad e^{-r^2}|^2 = 4 int r^2 e^{-2r^2} = 4 * (3/4) (pi/2)^{3/2}.
  CHECK(hdot_norm_squared(f) == doctest::Approx(3.0 * std::pow(pi / 2.0, 1.5)).epsilon(1e-4));
  CHECK(l2_norm(f) == doctest::Approx(std::pow(pi / 2.0, 0.75)).epsilon(1e-5));
  // int e^{-6 r^2} = (pi/6)^{3/2}.
  CHECK(lp_integral(f, 6.0) == doctest::Approx(std::pow(pi / 6.0, 1.5)).epsilon(1e-5));
}

TEST_CASE("power-law tail adds the exterior contribution") {
  // f = 1/r on [0, R] in N = 3 has ||grad f||^2 over r >= a equal to 4 pi / a.
  const auto g = make_radial_grid(3, 2000, 20.0);
  const auto f = RadialField::sample(g, [](double r) { return 1.0 / std::sqrt(1.0 + r * r); },
                                     Extension::power_law);
  CHECK(f.tail_coefficient() == doctest::Approx(1.0).epsilon(2e-3));
  const double exact = oracle::sphere_area(3) *
                       oracle::simpson([](double t) {
                         const double r = std::tan(t), c = std::cos(t);
                         const double d = r / std::pow(1.0 + r * r, 1.5);
                         return d * d * r * r / (c * c);
                       }, 0.0, 0.5 * std::numbers::pi - 1e-9);
  CHECK(hdot_norm_squared(f) == doctest::Approx(exact).epsilon(2e-3));
  CHECK(f(100.0) == doctest::Approx(f.tail_coefficient() / 100.0));
}

TEST_CASE("extension modes") {
  const auto g = make_radial_grid(3, 50, 5.0);
  const auto f = RadialField::sample(g, [](double r) { return r; });
  CHECK_THROWS_AS(f(6.0), Error);
  CHECK(f.with_extension(Extension::zero)(6.0) == 0.0);
  CHECK(f(2.345) == doctest::Approx(2.345).epsilon(1e-12));
  CHECK(f.derivative(2.345) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Cartesian grid, interpolation and Laplacian") {
  const auto g = make_cartesian_grid(3, 2.0, 0.25);
  CHECK(g->per_axis() == 17);
  CHECK(g->size() == 17u * 17u * 17u);
  auto cubic = [](const double* x) { return x[0] * x[0] * x[1] - 2.0 * x[2] * x[2] * x[2] + x[1]; };
  const auto f = CartesianField::sample(g, cubic, Extension::zero);
  const double p[3] = {0.13, -0.71, 0.4};
  CHECK(f(p) == doctest::Approx(cubic(p)).epsilon(1e-12));
  const auto lap = laplacian(f);
  for (std::size_t k = 0; k < g->size(); ++k) {
    if (g->on_boundary(k)) continue;
    double x[3];
    g->point(k, x);
    CHECK(lap[k] == doctest::Approx(2.0 * x[1] - 12.0 * x[2]).epsilon(1e-10));
  }
  const double far[3] = {5.0, 0.0, 0.0};
  CHECK(f(far) == 0.0);
}

TEST_CASE("spherical quadrature integrates a Gaussian over R^N") {
  for (int n : {3, 4}) {
    const SphericalQuadrature q(n, 80, 24, 32, 1.0);
    const double v = q.integrate([n](const double* x) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += x[i] * x[i];
      return std::exp(-s);
    });
    CHECK(v == doctest::Approx(std::pow(std::numbers::pi, 0.5 * n)).epsilon(1e-8));
  }
}

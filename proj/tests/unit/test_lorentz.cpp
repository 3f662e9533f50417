#include <doctest.h>

#include <cmath>
#include <random>

#include "critwave/error.hpp"
#include "critwave/lorentz.hpp"
#include "oracles.hpp"

using namespace critwave;

TEST_CASE("boost map preserves the Minkowski form and inverts") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (double l : {0.0, 0.5, -0.8, 0.99}) {
    const BoostMap b(l);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> y{u(rng), u(rng), u(rng)}, x(3), y2(3);
      const double s = u(rng);
      double t = 0.0, s2 = 0.0;
      b.forward(s, y, t, x);
      b.inverse(t, x, s2, y2);
      const double q0 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] - s * s;
      const double q1 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - t * t;
      CHECK(std::abs(q1 - q0) <= 1e-12 * (1.0 + std::abs(s * s) + y[0] * y[0]) * b.lorentz_factor() * b.lorentz_factor());
      CHECK(s2 == doctest::Approx(s).epsilon(1e-12));
      CHECK(y2[0] == doctest::Approx(y[0]).epsilon(1e-12));
      CHECK(x[1] == y[1]);
    }
  }
  CHECK_THROWS_AS(BoostMap(1.0), Error);
  CHECK_THROWS_AS(BoostMap(-1.2), Error);
}

TEST_CASE("speed composition and the cone constant") {
  CHECK(compose_speeds(0.5, 0.5) == doctest::Approx(0.8));
  CHECK(compose_speeds(0.3, -0.3) == doctest::Approx(0.0));
  CHECK(cone_constant(0.6) == doctest::Approx(2.0));
  // Composing boosts multiplies rapidities, so cone constants multiply.
  CHECK(cone_constant(compose_speeds(0.6, 0.6)) == doctest::Approx(4.0));
}

TEST_CASE("boosting the static ground state gives the travelling profile") {
  const auto Q = RadialProfile::ground_state(3);
  const double l = 0.6, dx = 0.05;
  const auto src = static_field(Q, -30.0, 0.5, 121, dx, 600);
  src.validate();
  const SliceWindow win{0.0, 0.1, 11, -5.0, dx, 201};
  const auto f = transform_field(src, l, win);
  const BoostedProfile exact(Q, Eigen::Vector3d(l, 0.0, 0.0));
  double err = 0.0, err_t = 0.0;
  for (std::size_t k = 0; k < f.nt; ++k) {
    for (std::size_t i = 0; i < f.nx; ++i) {
      const double x[3] = {f.coord(i), 0.0, 0.0};
      err = std::max(err, std::abs(f.at(k, i) - exact.value(f.time(k), x)));
      err_t = std::max(err_t, std::abs(f.dt_at(k, i) - exact.time_derivative(f.time(k), x)));
    }
  }
  CHECK(err < 1e-6);
  CHECK(err_t < 1e-4);
  // The zero boost reproduces the source slice.
  const auto same = transform_field(src, 0.0, win);
  for (std::size_t i = 0; i < same.nx; i += 17) {
    CHECK(same.at(3, i) == doctest::Approx(oracle::W(3, std::abs(same.coord(i)))).epsilon(1e-7));
  }
}

TEST_CASE("leaving the source window is a coverage error") {
  const auto src = static_field(RadialProfile::ground_state(3), 0.0, 0.1, 11, 0.1, 50);
  CHECK_THROWS_AS(src.interpolate(2.0, 0.0), Error);
  CHECK_THROWS_AS(src.interpolate(0.5, 10.0), Error);
  CHECK(src.interpolate(0.5, -1.0).u == doctest::Approx(oracle::W(3, 1.0)).epsilon(1e-6));
  const SliceWindow win{0.0, 0.1, 5, -10.0, 0.1, 201};
  CHECK_THROWS_AS(transform_field(src, 0.5, win), Error);
}

TEST_CASE("compactly supported data stays in the light cone") {
  SpaceTimeField f;
  f.geometry = SliceGeometry::axis;
  f.t0 = 0.0;
  f.dt = 0.1;
  f.nt = 11;
  f.x0 = -3.0;
  f.dx = 0.05;
  f.nx = 121;
  f.u.assign(f.nt * f.nx, 0.0);
  f.ut.assign(f.nt * f.nx, 0.0);
  for (std::size_t k = 0; k < f.nt; ++k) {
    for (std::size_t i = 0; i < f.nx; ++i) {
      if (std::abs(f.coord(i)) <= f.time(k)) f.at(k, i) = 1.0;
    }
  }
  CHECK(cone_support_excess(f, 0.0, 0.0, 1e-12) <= 1.0);
  f.at(2, 0) = 1.0;
  CHECK(cone_support_excess(f, 0.0, 0.0, 1e-12) > 10.0);
}

TEST_CASE("momentum over energy equals the boost speed") {
  const auto Q = RadialProfile::ground_state(3);
  const AxisymmetricQuadrature quad(3);
  for (double l : {0.5, 0.8}) {
    const auto r = momentum_ratio_check(Q, l, quad);
    CHECK(r.ratio[0] == doctest::Approx(l).epsilon(1e-8));
    CHECK(r.mismatch < 1e-8);
  }
  // Box quadrature of a sampled boosted profile: the truncation error shrinks with the box.
  double prev = 1e300;
  CartesianGridPtr box;
  for (double L : {6.0, 12.0}) {
    box = make_cartesian_grid(3, L, 0.25);
    const auto [u0, u1] = boost_profile(Q, Eigen::Vector3d(0.5, 0.0, 0.0), 0.0, box);
    const auto r = momentum_ratio_check(u0, u1, 0.5);
    CHECK(r.mismatch < prev);
    prev = r.mismatch;
  }
  CHECK(prev < 0.2);
  const auto zero = CartesianField(box, std::vector<double>(box->size()));
  CHECK_THROWS_AS(momentum_ratio_check(zero, zero, 0.5), Error);
}

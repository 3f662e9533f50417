#include <doctest.h>

#include <cmath>

#include "critwave/stationary.hpp"
#include "oracles.hpp"

using namespace critwave;

TEST_CASE("closed-form ground state and its ODE") {
  for (int n : {3, 4, 5}) {
    CHECK(W_tail_constant(n) == doctest::Approx(std::pow(n * (n - 2.0), (n - 2.0) / 2.0)));
    for (double r : {0.1, 1.0, 3.7, 12.0}) {
      CHECK(eval_W(n, r) == doctest::Approx(oracle::W(n, r)));
      CHECK(eval_W_derivative(n, r) == doctest::Approx(oracle::dW(n, r)));
      // W'' + (N-1)/r W' + W^{(N+2)/(N-2)} = 0 by central differences.
      const double h = 1e-4;
      const double d2 = (oracle::W(n, r + h) - 2 * oracle::W(n, r) + oracle::W(n, r - h)) / (h * h);
      const double res = d2 + (n - 1) / r * oracle::dW(n, r) + std::pow(oracle::W(n, r), (n + 2.0) / (n - 2.0));
      CHECK(std::abs(res) < 1e-6);
    }
  }
}

TEST_CASE("nonlinearity is odd and its derivative matches") {
  for (int n : {3, 4, 5}) {
    CHECK(critical_nonlinearity(n, -0.7) == doctest::Approx(-critical_nonlinearity(n, 0.7)));
    const double u = 0.8, h = 1e-6;
    const double fd = (critical_nonlinearity(n, u + h) - critical_nonlinearity(n, u - h)) / (2 * h);
    CHECK(critical_nonlinearity_derivative(n, u) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK(critical_nonlinearity(3, 2.0) == doctest::Approx(32.0));
}

TEST_CASE("stationary residual is second order in every dimension") {
  for (int n : {3, 4, 5}) {
    const double coarse = stationary_residual(sample_W(make_radial_grid(n, 1000, 20.0)));
    const double fine = stationary_residual(sample_W(make_radial_grid(n, 2000, 20.0)));
    CHECK(std::log2(coarse / fine) == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("ground-state integrals") {
  for (int n : {3, 4, 5}) {
    const auto W = sample_W(make_radial_grid(n, 65536, 200.0));
    const double grad = oracle::grad_W_sq(n);
    CHECK(hdot_norm_squared(W) == doctest::Approx(grad).epsilon(1e-3));
    // Stationarity pairs the gradient with the critical power.
    CHECK(oracle::critical_power_W(n) == doctest::Approx(grad).epsilon(1e-6));
    CHECK(lp_integral(W, critical_exponent(n)) == doctest::Approx(grad).epsilon(1e-3));
    const auto zero = RadialField(W.grid(), std::vector<double>(W.size()), Extension::zero);
    CHECK(energy(W, zero) == doctest::Approx(grad / n).epsilon(1e-3));
  }
}

TEST_CASE("discrete ground state solves the scheme and stays O(h^2) from W") {
  const int n = 3;
  double prev = 0.0;
  for (std::size_t cells : {500u, 1000u}) {
    const auto g = make_radial_grid(n, cells, 20.0);
    const auto Wh = discrete_ground_state(g);
    const auto W = sample_W(g);
    double dev = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) dev = std::max(dev, std::abs(Wh[i] - W[i]));
    if (prev > 0.0) CHECK(std::log2(prev / dev) == doctest::Approx(2.0).epsilon(0.1));
    prev = dev;
  }
}

TEST_CASE("uniqueness threshold") {
  const auto W = sample_W(make_radial_grid(3, 8000, 100.0));
  CHECK(below_uniqueness_threshold(W));
  CHECK_FALSE(below_uniqueness_threshold(1.5 * W));
}

TEST_CASE("threshold function and its infimum") {
  for (int n : {3, 4, 5}) {
    CHECK(threshold_function(n, 0.0) == doctest::Approx(2.0));
    double best = 1e300;
    for (int k = 0; k < 200000; ++k) {
      const double l = k / 200000.0;
      best = std::min(best, (2.0 * n - 2.0 * (n - 1) * l * l) / (n * std::sqrt(1 - l * l)));
    }
    CHECK(threshold_infimum(n) == doctest::Approx(best).epsilon(1e-8));
  }
}

TEST_CASE("ground state family evaluation") {
  GroundState q = GroundState::standard(3);
  q.lambda = 2.0;
  q.center = Eigen::Vector3d(1.0, 0.0, 0.0);
  q.sign = -1;
  const double x[3] = {1.5, 0.0, 0.0};
  CHECK(q(x) == doctest::Approx(-std::sqrt(2.0) * oracle::W(3, 1.0)));
}

TEST_CASE("boosted profile reduces to Q at rest and moves with the boost") {
  const auto Q = RadialProfile::ground_state(3);
  const BoostedProfile rest(Q, Eigen::Vector3d::Zero());
  const double x[3] = {0.3, -0.2, 1.1};
  CHECK(rest.value(5.0, x) == doctest::Approx(oracle::W(3, std::hypot(0.3, 0.2, 1.1))));
  const BoostedProfile moving(Q, Eigen::Vector3d(0.6, 0.0, 0.0));
  CHECK(moving.lorentz_factor() == doctest::Approx(1.25));
  // Along the axis the profile is W(g (x_1 - l t)).
  const double y[3] = {2.0, 0.0, 0.0};
  CHECK(moving.value(1.0, y) == doctest::Approx(oracle::W(3, 1.25 * (2.0 - 0.6))));
  const double h = 1e-6;
  CHECK(moving.time_derivative(1.0, y) ==
        doctest::Approx((moving.value(1.0 + h, y) - moving.value(1.0 - h, y)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("axisymmetric quadrature integrates a displaced Gaussian") {
  const AxisymmetricQuadrature q(3, 200, 64, 2.0);
  const double v = q.integrate([](double z, double rho) {
    return std::exp(-(z - 0.5) * (z - 0.5) - rho * rho);
  });
  CHECK(v == doctest::Approx(std::pow(M_PI, 1.5)).epsilon(1e-8));
}

TEST_CASE("boosted ground-state identities") {
  const AxisymmetricQuadrature q(3);
  const auto Q = RadialProfile::ground_state(3);
  for (double l : {0.0, 0.5, 0.8}) {
    const auto r = boost_checks(Q, l, q);
    CHECK(r.pohozaev_mismatch < 1e-6);
    CHECK(r.gradient_mismatch < 1e-6);
    CHECK(r.time_derivative_mismatch < 1e-6);
    CHECK(r.energy_mismatch < 1e-6);
    CHECK(r.momentum_ratio == doctest::Approx(l).epsilon(1e-6));
  }
  const auto bi = boost_integrals(Q, 0.0, q);
  CHECK(bi.grad_sq == doctest::Approx(oracle::grad_W_sq(3)).epsilon(1e-6));
}

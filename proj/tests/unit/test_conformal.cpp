#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "critwave/conformal.hpp"
#include "critwave/error.hpp"
#include "critwave/stationary.hpp"
#include "oracles.hpp"

using namespace critwave;

namespace {

GroupParams random_params(int n, double size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(group_dimension(n));
  double s = 0.0;
  for (auto& x : v) {
    x = u(rng);
    s += x * x;
  }
  for (auto& x : v) x *= size / std::sqrt(s);
  return GroupParams::from_flat(n, v);
}

Eigen::VectorXd random_point(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

}  // namespace

TEST_CASE("parameter counts and rotation coordinates") {
  CHECK(group_dimension(3) == 10);
  CHECK(group_dimension(4) == 15);
  CHECK(rotation_dimension(5) == 10);
  for (int n : {3, 4, 5}) {
    for (std::size_t k = 0; k < rotation_dimension(n); ++k) {
      const auto [i, j] = zeta_pair(n, k);
      CHECK(i < j);
      CHECK(zeta(n, i, j) == k);
    }
  }
  CHECK(zeta(3, 0, 1) == 0);
  CHECK(zeta(3, 0, 2) == 1);
  CHECK(zeta(3, 1, 2) == 2);
}

TEST_CASE("rotation coordinates round trip and the branch cut is reported") {
  std::mt19937_64 rng(3);
  for (int n : {3, 4}) {
    Eigen::VectorXd c = Eigen::VectorXd::Random(static_cast<int>(rotation_dimension(n))) * 0.5;
    const auto R = rotation_from_coords(n, c);
    CHECK((R.transpose() * R - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-13);
    CHECK(R.determinant() == doctest::Approx(1.0));
    CHECK((coords_from_rotation(R) - c).norm() < 1e-12);
  }
  Eigen::VectorXd half_turn = Eigen::VectorXd::Zero(3);
  half_turn[0] = M_PI;
  CHECK_THROWS_AS(coords_from_rotation(rotation_from_coords(3, half_turn)), Error);
}

TEST_CASE("Moebius map matches its factor composition") {
  std::mt19937_64 rng(5);
  for (int n : {3, 4}) {
    const auto A = random_params(n, 0.4, rng);
    const auto x = random_point(n, rng);
    const auto y = apply_point(A, x);
    REQUIRE(y);
    Eigen::VectorXd z(n);
    oracle::inverted_translation(n, A.a.data(), x.data(), z.data());
    const Eigen::VectorXd expected =
        A.b + std::exp(A.s) * rotation_from_coords(n, A.c) * z;
    CHECK((*y - expected).norm() < 1e-13);
  }
}

TEST_CASE("composition and inverse obey the group law pointwise") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 3;
    const auto A = random_params(n, 0.3, rng);
    const auto B = random_params(n, 0.3, rng);
    const auto x = random_point(n, rng);
    const auto lhs = apply_point(compose(A, B), x);
    const auto inner = apply_point(B, x);
    REQUIRE(lhs);
    REQUIRE(inner);
    const auto rhs = apply_point(A, *inner);
    REQUIRE(rhs);
    CHECK((*lhs - *rhs).norm() < 1e-11);
    const auto back = apply_point(inverse(A), *apply_point(A, x));
    REQUIRE(back);
    CHECK((*back - x).norm() < 1e-11);
    CHECK(compose(A, inverse(A)).flat().norm() < 1e-12);
  }
}

TEST_CASE("Jacobian determinant matches finite differences") {
  std::mt19937_64 rng(13);
  const int n = 3;
  const auto A = random_params(n, 0.5, rng);
  const auto x = random_point(n, rng);
  Eigen::MatrixXd J(n, n);
  const double h = 1e-6;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (*apply_point(A, xp) - *apply_point(A, xm)) / (2 * h);
  }
  CHECK(jacobian_det(A, x) == doctest::Approx(std::abs(J.determinant())).epsilon(1e-7));
}

TEST_CASE("swap formula moves the inversion past a translation") {
  std::mt19937_64 rng(17);
  const int n = 3;
  Eigen::VectorXd a = 0.3 * Eigen::VectorXd::Random(n), b = 0.4 * Eigen::VectorXd::Random(n);
  const auto sw = swap_inversion_translation(a, b);
  for (int k = 0; k < 5; ++k) {
    const auto x = random_point(n, rng);
    Eigen::VectorXd lhs(n), inner(n);
    const Eigen::VectorXd xb = x + b;
    oracle::inverted_translation(n, a.data(), xb.data(), lhs.data());
    oracle::inverted_translation(n, sw.alpha.data(), x.data(), inner.data());
    const Eigen::VectorXd rhs = sw.beta + sw.M * (sw.mu * inner);
    CHECK((lhs - rhs).norm() < 1e-12);
  }
}

TEST_CASE("factorization round trip") {
  std::mt19937_64 rng(19);
  const auto A = random_params(4, 0.6, rng);
  const auto B = from_factorization(factorize(A));
  CHECK((A.flat() - B.flat()).norm() < 1e-12);
}

TEST_CASE("pushforward of W by dilations and translations is a rescaled and moved W") {
  const int n = 3;
  const auto g = make_radial_grid(n, 20000, 200.0);
  const auto W = sample_W(g);
  auto A = GroupParams::identity(n);
  A.s = 0.3;
  A.b[1] = 0.5;
  const double lam = std::exp(0.3);
  for (double x0 : {0.0, 0.7, -2.0}) {
    const double x[3] = {x0, 0.2, -0.4};
    // phi(x) = b + e^s x, so F(x) = e^{s/2} W(e^s x + b).
    const double r = std::hypot(lam * x[0], lam * x[1] + 0.5, lam * x[2]);
    CHECK(transform_at(A, pushforward_exponent(n), W, x) ==
          doctest::Approx(std::sqrt(lam) * oracle::W(n, r)).epsilon(1e-7));
  }
}

TEST_CASE("transforms compose as a cocycle") {
  std::mt19937_64 rng(23);
  const int n = 3;
  const auto g = make_radial_grid(n, 20000, 200.0);
  const auto W = sample_W(g);
  const double q = pushforward_exponent(n);
  for (int k = 0; k < 5; ++k) {
    const auto A = random_params(n, 0.15, rng);
    const auto B = random_params(n, 0.15, rng);
    const Eigen::VectorXd x = random_point(n, rng) * 0.5;
    // F(compose(B, A), W)(x) = w_A(x) F(B, W)(phi_A x).
    const ConformalTransform TA(A, q);
    const ConformalTransform TB(B, q);
    double y[3], wa = 0.0;
    REQUIRE(TA.map(x.data(), y, wa));
    CHECK(transform_at(compose(B, A), q, W, x.data()) == doctest::Approx(wa * TB(W, y)).epsilon(1e-9));
  }
}

TEST_CASE("critical norm of W is invariant under the family") {
  std::mt19937_64 rng(29);
  const int n = 3;
  const auto g = make_radial_grid(n, 65536, 400.0);
  const auto W = sample_W(g);
  const SphericalQuadrature q(n, 120, 32, 64, 2.0);
  const double ref = std::pow(oracle::critical_power_W(n), 1.0 / 6.0);
  for (int k = 0; k < 4; ++k) {
    const auto A = random_params(n, 0.2, rng);
    const double v = q.integrate([&](const double* x) {
      return std::pow(std::abs(transform_at(A, pushforward_exponent(n), W, x)), 6.0);
    });
    CHECK(std::pow(v, 1.0 / 6.0) == doctest::Approx(ref).epsilon(1e-4));
  }
}

TEST_CASE("parameter derivatives match finite differences of the transform") {
  const int n = 3;
  const auto g = make_radial_grid(n, 20000, 200.0);
  const auto W = sample_W(g);
  const auto box = make_cartesian_grid(n, 1.0, 0.5);
  const double q = pushforward_exponent(n);
  const auto D = parameter_derivatives(W, q, box);
  REQUIRE(D.size() == group_dimension(n));
  const double h = 1e-5;
  for (std::size_t j = 0; j < D.size(); ++j) {
    std::vector<double> e(group_dimension(n), 0.0);
    e[j] = h;
    const auto Ap = GroupParams::from_flat(n, e);
    e[j] = -h;
    const auto Am = GroupParams::from_flat(n, e);
    for (std::size_t k = 0; k < box->size(); k += 7) {
      double x[3];
      box->point(k, x);
      const double fd = (transform_at(Ap, q, W, x) - transform_at(Am, q, W, x)) / (2 * h);
      CHECK(D[j][k] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("dilation derivative of W is Lambda W") {
  const int n = 4;
  const auto g = make_radial_grid(n, 4000, 20.0);
  const auto d = dilation_derivative(sample_W(g), pushforward_exponent(n));
  for (std::size_t i = 10; i + 10 < g->size(); i += 97) {
    const double r = g->node(i);
    CHECK(d[i] == doctest::Approx(0.5 * (n - 2) * oracle::W(n, r) + r * oracle::dW(n, r)).epsilon(1e-5));
  }
}

TEST_CASE("the weight N+2 transform is the L2 adjoint of the inverse pushforward") {
  std::mt19937_64 rng(31);
  const int n = 3;
  const auto g = make_radial_grid(n, 8000, 16.0);
  const auto f = RadialField::sample(g, [](double r) { return std::exp(-r * r); }, Extension::zero);
  const auto h = RadialField::sample(g, [](double r) { return 1.0 / (1.0 + r * r * r * r); },
                                     Extension::zero);
  const SphericalQuadrature quad(n, 160, 40, 64, 1.0);
  const auto A = random_params(n, 0.2, rng);
  const auto Ainv = inverse(A);
  const double lhs = quad.integrate([&](const double* x) {
    return transform_at(A, pullback_exponent(n), h, x) * f(std::hypot(x[0], x[1], x[2]));
  });
  const double rhs = quad.integrate([&](const double* y) {
    return h(std::hypot(y[0], y[1], y[2])) * transform_at(Ainv, pushforward_exponent(n), f, y);
  });
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-5));
}

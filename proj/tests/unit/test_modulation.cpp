#include <doctest.h>

#include <cmath>
#include <random>

#include "critwave/error.hpp"
#include "critwave/modulation.hpp"
#include "critwave/stationary.hpp"
#include "oracles.hpp"

using namespace critwave;

namespace {

struct Setup {
  RadialField W;
  std::vector<EigenPair> eig;
};

const Setup& setup() {
  static const Setup s = [] {
    Setup out;
    out.W = sample_W(make_radial_grid(3, 8000, 40.0));
    out.eig = negative_spectrum(assemble(out.W));
    return out;
  }();
  return s;
}

}  // namespace

TEST_CASE("left translation Jacobian is the identity at the identity") {
  const auto T = left_translation_jacobian(GroupParams::identity(3));
  CHECK((T - Eigen::MatrixXd::Identity(10, 10)).norm() < 1e-8);
}

TEST_CASE("generator values match parameter derivatives of the transform") {
  const auto& s = setup();
  AxisFunction f{s.W.with_extension(Extension::power_law), -1};
  const double q = pushforward_exponent(3);
  const double x[3] = {0.4, -0.3, 0.9};
  std::vector<double> g(10);
  generator_values(f, q, x, g.data());
  const double h = 1e-5;
  for (std::size_t j = 0; j < 10; ++j) {
    std::vector<double> e(10, 0.0);
    e[j] = h;
    const double up = transform_at(GroupParams::from_flat(3, e), q, f.profile, x);
    e[j] = -h;
    const double dn = transform_at(GroupParams::from_flat(3, e), q, f.profile, x);
    CHECK(g[j] == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("Cartesian modulation recovers an in-slice transform of W") {
  const auto& s = setup();
  const auto box = make_cartesian_grid(3, 7.0, 0.25);
  const auto fam = build_dual_family(s.W, s.eig, 6.0, box);
  const CartesianModulation mod(s.W, fam, box);
  const auto at_q = mod.fit(mod.q_box());
  CHECK(at_q.A.norm() < 1e-8);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Eigen::VectorXd B(4);
  for (int i = 0; i < 4; ++i) B[i] = nd(rng);
  Eigen::VectorXd a0 = mod.slice() * B;
  a0 *= 0.05 / a0.norm();
  const auto A0 = GroupParams::from_flat(3, std::span<const double>(a0.data(), a0.size()));
  const auto fit = mod.fit(pushforward(A0, s.W, box));
  CHECK((fit.A.flat() - a0).norm() < 1e-6);
  CHECK(fit.max_residual < 1e-8);
  // Data far from the family is rejected.
  CHECK_THROWS_AS(mod.fit(0.5 * mod.q_box()), Error);
}

TEST_CASE("radial modulation recovers a dilation") {
  const auto& s = setup();
  const auto fam = build_dual_family(s.W, s.eig, 24.0);
  const RadialModulation mod(s.W, fam);
  auto A = GroupParams::identity(3);
  A.s = 0.04;
  const auto fit = mod.fit(pushforward(A, s.W.with_extension(Extension::power_law)));
  CHECK(fit.A.s == doctest::Approx(0.04).epsilon(1e-5));
  CHECK(std::abs(mod.residual(s.W, 0.0)) < 1e-10);
}

TEST_CASE("mode amplitudes of W + a Y with velocity b Y") {
  const auto& s = setup();
  const auto& Y = s.eig[0].Y;
  const double a = 1e-3, b = -2e-3;
  const auto amp = mode_amplitudes(s.W + a * Y, b * Y, GroupParams::identity(3), s.W, s.eig);
  REQUIRE(amp.alpha.size() == 1);
  CHECK(amp.alpha[0] == doctest::Approx(a).epsilon(1e-6));
  CHECK(amp.beta[0] == doctest::Approx(b).epsilon(1e-6));
  CHECK(amp.delta == doctest::Approx(a).epsilon(1e-6));
  CHECK(amp.upper_ratio > 0.0);
}

TEST_CASE("exponential-mode fit separates the two rates") {
  const double w = 1.1;
  std::vector<double> t, sigma;
  for (int i = 0; i <= 1000; ++i) {
    t.push_back(i * 0.01 / w * 10.0);
    sigma.push_back(2.0 * std::exp(-w * t.back()) + 0.1 * std::exp(-2.0 * w * t.back()));
  }
  const auto fit = fit_exponential_modes(t, sigma, w, 5.0 / w, 10.0 / w);
  CHECK(fit.S == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fit.fast_rate == doctest::Approx(2.0 * w).epsilon(1e-3));
  CHECK_THROWS_AS(fit_exponential_modes(t, sigma, w, 1.0 / w, 2.0 / w), Error);
}

TEST_CASE("centre selection against an erfc oracle") {
  // Phi Gaussian with mean c and variance 1/2: right mass = erfc(y - c)/2.
  for (double c : {0.0, 0.4, -1.3}) {
    std::vector<double> y, phi;
    for (int i = 0; i <= 4000; ++i) {
      y.push_back(-20.0 + 0.01 * i);
      phi.push_back(std::exp(-(y.back() - c) * (y.back() - c)) / std::sqrt(M_PI));
    }
    const double expect = oracle::root(
        [c](double y1) { return 0.5 * std::erfc(y1 - c) + std::erfc(y1) / 6.0 - 2.0 / 3.0; }, -10.0, 10.0);
    // Trapezoid density: O(dy^2) from the continuous oracle.
    CHECK(center_select(y, phi) == doctest::Approx(expect).epsilon(1e-4).scale(1.0));
    CHECK(right_mass(y, phi, c) == doctest::Approx(0.5).epsilon(1e-6));
  }
  std::vector<double> y{0.0, 1.0, 2.0}, phi{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(center_select(y, phi), Error);
}

#include <doctest.h>

#include <cmath>

#include "critwave/error.hpp"
#include "critwave/modulation.hpp"

using namespace critwave;

TEST_CASE("integral bound constant") {
  CHECK(integral_bound_constant(1.0) == doctest::Approx(8.0 * std::sqrt(2.0) / 3.0));
  CHECK(integral_bound_constant(2.0) == doctest::Approx(4.0 * std::sqrt(2.0) / 3.0));
}

TEST_CASE("unperturbed system follows the decaying exponential") {
  const double w = 1.1;
  ModeSimOptions o;
  o.T0 = 5.0 / w;
  o.init = {1.0, -w};
  const std::vector<double> f{w};
  const auto st = ode_simulate(f, 0.0, 1, o);
  REQUIRE(st.t.size() > 10);
  for (std::size_t i = 0; i < st.t.size(); ++i) {
    CHECK(st.alpha[i][0] == doctest::Approx(std::exp(-w * st.t[i])).epsilon(1e-8));
  }
  CHECK_FALSE(st.finite_escape);
}

TEST_CASE("growing data escapes and fails decay verification") {
  const std::vector<double> f{1.0};
  ModeSimOptions o;
  o.init = {1.0, 1.0};
  const auto st = ode_simulate(f, 0.05, 3, o);
  CHECK(st.finite_escape);
  CHECK_THROWS_AS(verify_decay(st), Error);
}

TEST_CASE("invalid inputs are rejected") {
  ModeSimOptions o;
  o.init = {1.0, -1.0, 0.0, 0.0};
  CHECK_THROWS_AS(ode_simulate(std::vector<double>{1.4, 1.0}, 0.01, 1, o), Error);
  CHECK_THROWS_AS(ode_simulate(std::vector<double>{1.0, 1.4}, 0.2, 1, o), Error);
  o.init = {1.0};
  CHECK_THROWS_AS(ode_simulate(std::vector<double>{1.0}, 0.01, 1, o), Error);
}

TEST_CASE("runs are reproducible from the seed") {
  const std::vector<double> f{1.0, 1.4};
  ModeSimOptions o;
  o.kind = ModeRunKind::bounded_decay;
  o.init = {1.0, 0.0, -1.0, 0.0};
  const auto a = ode_simulate(f, 0.05, 42, o);
  const auto b = ode_simulate(f, 0.05, 42, o);
  const auto c = ode_simulate(f, 0.05, 43, o);
  CHECK(a.gamma == b.gamma);
  CHECK(a.gamma != c.gamma);
  CHECK(a.gamma.front() == doctest::Approx(1.0));
}

TEST_CASE("bounded runs decay, obey the integral bound and the energy inequalities") {
  for (std::size_t p = 1; p <= 3; ++p) {
    std::vector<double> f{1.0, 1.4, 2.0};
    f.resize(p);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ModeSimOptions o;
      o.kind = ModeRunKind::bounded_decay;
      o.init.assign(2 * p, 0.0);
      o.init[0] = 1.0;
      o.init[p] = -1.0;
      const auto st = ode_simulate(f, f[0] / 20.0, seed, o);
      const auto d = verify_decay(st);
      CHECK(d.passed);
      CHECK(d.integral_bound_holds);
      CHECK(d.integral <= integral_bound_constant(f[0]) * d.sup);
      CHECK_FALSE(check_cone_property(st).violated);
      const auto ineq = check_differential_inequalities(st);
      CHECK(ineq.plus_margin >= -1e-8);
      CHECK(ineq.minus_margin >= -1e-8);
    }
  }
}

TEST_CASE("forward runs keep the cone property") {
  const std::vector<double> f{1.0, 1.4};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ModeSimOptions o;
    o.init = {0.3, -0.2, 1.0, 0.5};
    const auto st = ode_simulate(f, 0.05, seed, o);
    CHECK_FALSE(check_cone_property(st).violated);
  }
}

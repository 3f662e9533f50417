#include <doctest.h>

#include <cmath>

#include "critwave/error.hpp"
#include "critwave/evolution.hpp"
#include "oracles.hpp"

using namespace critwave;

namespace {

struct Background {
  RadialGridPtr grid;
  RadialField Wh;
  EigenPair mode;
  double ghost = 0.0;
};

Background background(std::size_t cells) {
  Background b;
  b.grid = make_radial_grid(3, cells, 40.0);
  b.Wh = discrete_ground_state(b.grid);
  b.mode = negative_spectrum(assemble(b.Wh)).at(0);
  b.ghost = eval_W(3, b.grid->hull() + b.grid->spacing());
  return b;
}

RadialField zeros(const RadialGridPtr& g) { return RadialField(g, std::vector<double>(g->size())); }

}  // namespace

TEST_CASE("free waves conserve energy and keep the radial d'Alembert profile") {
  // r u = F(r - t) - F(-r - t) with F odd Gaussian derivative: exact outgoing/incoming pair.
  const auto g = make_radial_grid(3, 4000, 40.0);
  auto F = [](double s) { return std::exp(-(s - 10.0) * (s - 10.0)); };
  auto exact = [&](double t, double r) { return (F(r - t) - F(-r - t)) / r; };
  auto exact_t = [&](double t, double r) {
    const double h = 1e-6;
    return (exact(t + h, r) - exact(t - h, r)) / (2 * h);
  };
  const auto u0 = RadialField::sample(g, [&](double r) { return exact(0.0, r); }, Extension::zero);
  const auto u1 = RadialField::sample(g, [&](double r) { return exact_t(0.0, r); }, Extension::zero);
  EvolutionOptions o;
  o.T = 5.0;
  o.stride = 200;
  const auto tr = evolve_linearized(zeros(g), u0, u1, o);
  CHECK(tr.energy_drift < 1e-4);
  const auto& last = tr.u.back();
  double err = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) err = std::max(err, std::abs(last[i] - exact(tr.t.back(), g->node(i))));
  CHECK(err < 1e-3);
}

TEST_CASE("discrete ground state is stationary and O(h^2) from W") {
  double prev = 0.0;
  for (std::size_t cells : {1000u, 2000u}) {
    const auto b = background(cells);
    EvolutionOptions o;
    o.T = 20.0;
    o.stride = 500;
    o.ghost = b.ghost;
    const auto tr = evolve_nonlinear(b.Wh, zeros(b.grid), o);
    CHECK(tr.energy_drift < 1e-10);
    CHECK_FALSE(tr.blowup);
    const auto W = sample_W(b.grid).with_extension(Extension::none);
    double dev = 0.0;
    for (const auto& u : tr.u) dev = std::max(dev, deviation_gradient_norm(u - W));
    if (prev > 0.0) CHECK(prev / dev == doctest::Approx(4.0).epsilon(0.1));
    prev = dev;
  }
}

TEST_CASE("linearised unstable mode decays at rate omega") {
  const auto b = background(2000);
  const double w = b.mode.omega;
  EvolutionOptions o;
  o.T = 3.0 / w;
  o.ghost = 0.0;
  const auto tr = evolve_linearized(b.Wh, b.mode.Y, (-w) * b.mode.Y, o);
  const double n0 = product_norm(tr.u.front(), tr.du.front());
  const double n1 = product_norm(tr.u.back(), tr.du.back());
  CHECK(-std::log(n1 / n0) / tr.t.back() == doctest::Approx(w).epsilon(0.02));
  CHECK(tr.energy_drift < 1e-4);
  CHECK(std::abs(linearized_energy(b.Wh, b.mode.Y, (-w) * b.mode.Y, 0.0)) < 1e-6 * n0 * n0);
}

TEST_CASE("nonlinear flow tracks the decaying expansion") {
  const auto b = background(4000);
  const double w = b.mode.omega, eps = 1e-3;
  const double t_end = std::log(1.0 / eps) / (2.0 * w);
  EvolutionOptions o;
  o.T = t_end;
  o.stride = 10;
  o.ghost = b.ghost;
  const auto tr = evolve_nonlinear(b.Wh + eps * b.mode.Y, (-eps * w) * b.mode.Y, o);
  const auto ex = track_expansion(tr, b.Wh, b.mode.Y, w, eps, t_end);
  CHECK(ex.max_deviation <= 10.0 * eps * eps);
  CHECK_FALSE(ex.tracking_lost);
  CHECK(tr.energy_drift < 1e-4);
}

TEST_CASE("blow-up above the ground state and the CFL guard") {
  const auto b = background(1000);
  EvolutionOptions o;
  o.T = 5.0;
  o.ghost = 1.2 * b.ghost;
  const auto tr = evolve_nonlinear(1.2 * b.Wh, zeros(b.grid), o);
  CHECK(tr.blowup);
  CHECK(tr.blowup_time > 0.0);
  CHECK(tr.blowup_time < 5.0);
  o.dt = 0.95 * b.grid->spacing();
  CHECK_THROWS_AS(evolve_nonlinear(b.Wh, zeros(b.grid), o), Error);
}

TEST_CASE("discrete energy agrees with the continuous energy of W") {
  const auto b = background(4000);
  const double e = discrete_energy(b.Wh, zeros(b.grid), b.ghost, true);
  // Truncated to the grid: 1/2 int_0^R |W'|^2 - 1/6 int_0^R W^6 over the ball.
  const double R = b.grid->r_max();
  const double area = oracle::sphere_area(3);
  const double grad = area * oracle::simpson([](double r) { return oracle::dW(3, r) * oracle::dW(3, r) * r * r; }, 0.0, R);
  const double pot = area * oracle::simpson([](double r) { return std::pow(oracle::W(3, r), 6) * r * r; }, 0.0, R);
  CHECK(e == doctest::Approx(0.5 * grad - pot / 6.0).epsilon(1e-4));
}

TEST_CASE("exterior residual of the pure linear mode vanishes and the channel bound holds") {
  const auto b = background(4000);
  const double w = b.mode.omega, eps = 1e-3;
  const ChannelWindow win{2.0, 2.0};
  CHECK(win.radius(5.0) == doctest::Approx(5.0));
  CHECK(win.radius(0.0) == doctest::Approx(4.0));
  EvolutionOptions o;
  o.T = 3.0;
  o.ghost = 0.0;
  o.stride = 4;
  const auto tl = evolve_linearized(b.Wh, eps * b.mode.Y, (-eps * w) * b.mode.Y, o);
  const auto z = zeros(b.grid);
  CHECK(exterior_energy(tl, win, z, b.mode.Y, w, eps).max_norm < 1e-6);
  const auto ch = channel_lower_bound(tl, z, b.mode.Y, w, eps, win);
  CHECK_FALSE(ch.vacuous);
  CHECK(ch.C1 > 0.0);
  CHECK(ch.contamination < 0.05);
  CHECK(ch.envelope == doctest::Approx(std::exp(-w * 4.0)));
}

TEST_CASE("tail envelopes scale like the predicted powers") {
  const auto b = background(4000);
  const auto S = RadialProfile::ground_state(3);
  const auto Y = RadialProfile::from_field(b.mode.Y.with_extension(Extension::zero));
  const double w = b.mode.omega;
  const auto a = tail_bounds_check(S, Y, w, {5.0, 5.0});
  const auto c = tail_bounds_check(S, Y, w, {10.0, 10.0});
  CHECK(c.s_ratio == doctest::Approx(a.s_ratio).epsilon(0.1));
  const auto d = tail_bounds_check(S, Y, w, {5.0, 10.0});
  CHECK(d.y_norm / a.y_norm == doctest::Approx(std::exp(-5.0 * w)).epsilon(0.1));
}

TEST_CASE("radial modulation pipeline on the perturbed ground state") {
  const auto b = background(2000);
  const double w = b.mode.omega, eps = 1e-3;
  EvolutionOptions o;
  o.T = 2.0;
  o.stride = 20;
  o.ghost = b.ghost;
  const auto tr = evolve_nonlinear(b.Wh + eps * b.mode.Y, (-eps * w) * b.mode.Y, o);
  const std::vector<EigenPair> eig{b.mode};
  const auto fam = build_dual_family(b.Wh, eig, 24.0);
  const auto rep = modulation_pipeline(tr, b.Wh, eig, fam, 2.0);
  REQUIRE(rep.samples.size() > 3);
  CHECK_FALSE(rep.truncated);
  CHECK(rep.samples.front().amp.alpha[0] == doctest::Approx(eps).epsilon(0.02));
  CHECK(std::isfinite(rep.max_alpha_ratio));
}

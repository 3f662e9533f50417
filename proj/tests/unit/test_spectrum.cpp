#include <doctest.h>

#include <cmath>

#include "critwave/spectrum.hpp"
#include "critwave/stationary.hpp"
#include "oracles.hpp"

using namespace critwave;

namespace {

// s-wave bound states of -Delta - depth 1{r < a} in R^3: u = sin(k r) inside,
// e^{-kappa r} outside, with k cot(k a) = -kappa and k^2 + kappa^2 = depth.
std::vector<double> square_well_omegas(double depth, double a) {
  std::vector<double> out;
  const double k_max = std::sqrt(depth);
  const double pi = M_PI;
  for (int m = 0; (m + 0.5) * pi / a < k_max; ++m) {
    const double lo = (m + 0.5) * pi / a + 1e-12;
    const double hi = std::min((m + 1.0) * pi / a, k_max) - 1e-12;
    const double k = oracle::root(
        [&](double k) { return k / std::tan(k * a) + std::sqrt(std::max(depth - k * k, 0.0)); }, lo, hi);
    out.push_back(std::sqrt(depth - k * k));
  }
  return out;
}

}  // namespace

TEST_CASE("square well: bound-state count and energies") {
  const double depth = 9.0, a = 2.0;
  const auto omegas = square_well_omegas(depth, a);
  CHECK(square_well_bound_states(depth, a) == omegas.size());
  const auto g = make_radial_grid(3, 8000, 20.0);
  std::vector<double> pot(g->size());
  for (std::size_t i = 0; i < pot.size(); ++i) pot[i] = g->node(i) < a ? depth : 0.0;
  const auto eig = negative_spectrum(RadialOperator(g, pot));
  REQUIRE(eig.size() == omegas.size());
  // Descending omega order from the lowest eigenvalue.
  for (std::size_t k = 0; k < eig.size(); ++k) {
    CHECK(eig[k].omega == doctest::Approx(omegas[k]).epsilon(1e-3));
  }
}

TEST_CASE("linearised operator around W has exactly one negative eigenvalue") {
  const auto W = sample_W(make_radial_grid(3, 8000, 40.0));
  const auto eig = negative_spectrum(assemble(W));
  REQUIRE(eig.size() == 1);
  const auto& e = eig[0];
  CHECK(e.residual < 1e-8);
  CHECK(volume_product(e.Y, e.Y) == doctest::Approx(1.0));
  CHECK(e.Y[0] > 0.0);
  // Same eigenvalue on an independent grid.
  const auto alt = negative_spectrum(assemble(sample_W(make_radial_grid(3, 12000, 50.0))));
  REQUIRE(alt.size() == 1);
  CHECK(alt[0].omega == doctest::Approx(e.omega).epsilon(1e-5));
  // The eigenpair satisfies L Y = -omega^2 Y.
  const auto LY = assemble(W).apply(e.Y);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < LY.size(); ++i) worst = std::max(worst, std::abs(LY[i] + e.omega * e.omega * e.Y[i]));
  CHECK(worst < 1e-6);
}

TEST_CASE("Lambda W and d_1 W are null directions at second order") {
  const auto box_c = make_cartesian_grid(3, 6.0, 0.4);
  const auto box_f = make_cartesian_grid(3, 6.0, 0.2);
  const auto c = kernel_residuals_W(make_radial_grid(3, 400, 40.0), box_c);
  const auto f = kernel_residuals_W(make_radial_grid(3, 800, 40.0), box_f);
  CHECK(std::log2(c.lambda_residual / f.lambda_residual) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::log2(c.translation_residual / f.translation_residual) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(f.rotation_max < 1e-12);
  CHECK(f.kernel_dimension == 4);
  for (double r : {0.5, 2.0, 7.0}) {
    CHECK(eval_LambdaW(3, r) == doctest::Approx(0.5 * oracle::W(3, r) + r * oracle::dW(3, r)));
  }
}

TEST_CASE("Cartesian operator is symmetric") {
  const auto box = make_cartesian_grid(3, 3.0, 0.5);
  const auto op = assemble(sample_W(box));
  CHECK(op.symmetry_defect() < 1e-12);
}

TEST_CASE("eigenfunction decays like e^{-omega r} r^{-(N-1)/2}") {
  const auto W = sample_W(make_radial_grid(3, 32768, 100.0));
  const auto eig = negative_spectrum(assemble(W));
  REQUIRE(!eig.empty());
  const auto mk = meshkov_fit(eig[0].Y, eig[0].omega);
  CHECK(std::abs(mk.slope) < 0.05);
  CHECK(mk.c_lower > 0.0);
  CHECK(mk.c_upper / mk.c_lower < 1.1);
  const auto d = exterior_decay_rate(eig[0].Y, eig[0].omega, 10.0, 40.0);
  CHECK(d.slope == doctest::Approx(-2.0 * eig[0].omega).epsilon(0.05));
  const auto tail = tail_critical_norm(eig[0].Y, eig[0].omega, 20.0);
  CHECK_FALSE(tail.zero);
  CHECK(std::isfinite(tail.ratio));
}

TEST_CASE("dual family and coercivity") {
  const auto g = make_radial_grid(3, 800, 40.0);
  const auto W = sample_W(g);
  const auto eig = negative_spectrum(assemble(W));
  REQUIRE(eig.size() == 1);
  const auto fam = build_dual_family(W, eig, 24.0);
  const auto dr = check_duality(fam, g);
  CHECK(dr.max_duality_error < 1e-8);
  CHECK(dr.max_orthogonality_error < 1e-8);
  std::vector<RadialField> with_y{eig[0].Y, RadialField::sample(g, [&](double r) { return fam.E[0].profile(r); })};
  std::vector<RadialField> without_y{with_y[1]};
  CHECK(coercivity_min(W, with_y) > 0.05);
  // The unstable direction makes the form indefinite.
  CHECK(coercivity_min(W, without_y) < 0.0);
  CHECK(smooth_cutoff(1.0, 4.0) == 1.0);
  CHECK(smooth_cutoff(4.5, 4.0) == 0.0);
}

TEST_CASE("Cartesian dual family and the Lipschitz estimate") {
  const auto g = make_radial_grid(3, 4000, 40.0);
  const auto W = sample_W(g);
  const auto eig = negative_spectrum(assemble(W));
  const auto box = make_cartesian_grid(3, 7.0, 0.25);
  const auto fam = build_dual_family(W, eig, 6.0, box);
  REQUIRE(fam.E.size() == 4);
  const auto dr = check_duality(fam, box);
  CHECK(dr.max_duality_error < 1e-8);
  CHECK(dr.max_orthogonality_error < 1e-8);
  auto A = GroupParams::identity(3);
  A.s = 0.02;
  A.b[0] = 0.03;
  const auto lip = lipschitz_estimate_check(W, fam, A, box);
  CHECK(lip.lhs > 0.0);
  CHECK(std::isfinite(lip.ratio));
  CHECK(lip.ratio < 100.0);
}

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "critwave/conformal.hpp"
#include "critwave/error.hpp"
#include "critwave/evolution.hpp"
#include "critwave/io.hpp"
#include "critwave/lorentz.hpp"
#include "critwave/modulation.hpp"
#include "critwave/spectrum.hpp"
#include "critwave/stationary.hpp"

namespace critwave::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int dimension(const RunConfig& cfg) {
  const long n = cfg.get_int("N");
  if (n < 3 || n > 5) throw UsageError("N must be 3, 4 or 5");
  return static_cast<int>(n);
}

std::size_t positive_size(const RunConfig& cfg, const std::string& key, std::size_t min = 1) {
  const auto v = cfg.get_size(key);
  if (v < min) throw UsageError("'" + key + "' must be at least " + std::to_string(min));
  return v;
}

double positive(const RunConfig& cfg, const std::string& key) {
  const double v = cfg.get_double(key);
  if (!(v > 0.0)) throw UsageError("'" + key + "' must be positive");
  return v;
}

// Ground state of the scheme and its unstable mode on one grid.
struct Background {
  RadialGridPtr grid;
  RadialField Wh;
  std::vector<EigenPair> eig;
  double ghost = 0.0;
};

Background background(int n, std::size_t cells, double r_max) {
  Background b;
  b.grid = make_radial_grid(n, cells, r_max);
  b.Wh = discrete_ground_state(b.grid);
  b.eig = negative_spectrum(assemble(b.Wh));
  require(!b.eig.empty(), Errc::solver, "no negative eigenvalue found");
  b.ghost = eval_W(n, b.grid->hull() + b.grid->spacing());
  return b;
}

RadialField zeros(const RadialGridPtr& g) { return RadialField(g, std::vector<double>(g->size())); }

// ---- spectrum ------------------------------------------------------------------------

void run_spectrum(const RunConfig& cfg, const fs::path& out, Report& rep) {
  const int n = dimension(cfg);
  const auto cells = positive_size(cfg, "cells", 16);
  const double r_max = positive(cfg, "r_max");
  const auto alt_cells = positive_size(cfg, "alt_cells", 16);
  const double alt_r_max = positive(cfg, "alt_r_max");
  const auto coarse = cfg.get_doubles("coarse_cells");
  const double coarse_r_max = positive(cfg, "coarse_r_max");
  // Box sizes that keep the N-dimensional grids within memory.
  const bool auto_box = cfg.get("box_spacings") == "auto";
  const double box_l = cfg.get("box_half_width") == "auto" ? (n == 5 ? 3.0 : 6.0)
                                                            : positive(cfg, "box_half_width");
  const auto spacings = auto_box ? std::vector<double>{n == 3 ? 0.4 : 0.6, n == 3 ? 0.2 : 0.3}
                                 : cfg.get_doubles("box_spacings");
  if (coarse.size() != 2 || coarse[0] < 16 || coarse[1] <= coarse[0]) {
    throw UsageError("'coarse_cells' must list two increasing grid sizes");
  }
  if (spacings.size() != 2 || !(spacings[1] > 0.0) || spacings[1] >= spacings[0]) {
    throw UsageError("'box_spacings' must list two decreasing positive spacings");
  }

  const auto eig = negative_spectrum(assemble(sample_W(make_radial_grid(n, cells, r_max))));
  const auto alt = negative_spectrum(assemble(sample_W(make_radial_grid(n, alt_cells, alt_r_max))));
  json pairs = json::array();
  double worst = 0.0;
  for (const auto& e : eig) {
    pairs.push_back({{"omega", e.omega}, {"residual", e.residual}});
    worst = std::max(worst, e.residual);
  }
  rep.results["p"] = eig.size();
  rep.results["eigenpairs"] = pairs;
  rep.check_true("exactly one negative eigenvalue", eig.size() == 1);
  rep.check_le("eigen residual", worst, 1e-6);
  if (eig.empty() || alt.empty()) return;
  const double omega_change = std::abs(alt[0].omega / eig[0].omega - 1.0);
  rep.results["omega_alternative"] = alt[0].omega;
  rep.check_le("omega across discretizations", omega_change, 1e-5);

  // Null directions and coercivity on two coarse grids.
  json kernel = json::array();
  std::vector<double> lam, tra, coer;
  for (std::size_t k = 0; k < 2; ++k) {
    const auto g = make_radial_grid(n, static_cast<std::size_t>(coarse[k]), coarse_r_max);
    const auto kr = kernel_residuals_W(g, make_cartesian_grid(n, box_l, spacings[k]));
    const auto W = sample_W(g);
    const auto eig_c = negative_spectrum(assemble(W));
    require(!eig_c.empty(), Errc::solver, "no negative eigenvalue on the coarse grid");
    const auto fam = build_dual_family(W, eig_c, 0.6 * coarse_r_max);
    std::vector<RadialField> constraints;
    for (const auto& e : eig_c) constraints.push_back(e.Y);
    constraints.push_back(RadialField::sample(g, [&](double r) { return fam.E[0].profile(r); }));
    lam.push_back(kr.lambda_residual);
    tra.push_back(kr.translation_residual);
    coer.push_back(coercivity_min(W, constraints));
    kernel.push_back({{"cells", coarse[k]},
                      {"box_spacing", spacings[k]},
                      {"lambda", kr.lambda_residual},
                      {"translation", kr.translation_residual},
                      {"rotation", kr.rotation_max},
                      {"dimension", kr.kernel_dimension},
                      {"coercivity_min", coer.back()}});
  }
  const double lam_order = std::log(lam[0] / lam[1]) / std::log(coarse[1] / coarse[0]);
  const double tra_order = std::log(tra[0] / tra[1]) / std::log(spacings[0] / spacings[1]);
  rep.results["kernel"] = kernel;
  rep.results["kernel_orders"] = {lam_order, tra_order};
  rep.check_true("null space dimension N + 1", kernel[1]["dimension"] == static_cast<std::size_t>(n + 1));
  rep.check_ge("scaling generator residual order", lam_order, 1.8);
  rep.check_ge("translation generator residual order", tra_order, 1.8);
  rep.check_ge("coercivity minimum", std::min(coer[0], coer[1]), 1e-12);
  rep.check_le("coercivity change across grids", std::abs(coer[1] / coer[0] - 1.0), 0.1);

  const auto mk = meshkov_fit(eig[0].Y, eig[0].omega);
  const auto decay = exterior_decay_rate(eig[0].Y, eig[0].omega, 0.1 * r_max, 0.4 * r_max);
  rep.results["meshkov"] = {{"slope", mk.slope},
                            {"c_upper", mk.c_upper},
                            {"c_lower", mk.c_lower},
                            {"window", {mk.window_lo, mk.window_hi}}};
  rep.results["exterior_decay"] = {{"slope", decay.slope},
                                   {"relative_error", decay.relative_error}};
  rep.check_le("far-field slope", std::abs(mk.slope), 0.05);
  rep.check_le("exterior functional decay rate error", decay.relative_error, 0.05);
  io::write_field_csv(out / "eigenfunction_1.csv", eig[0].Y);
}

// ---- stationary-check ----------------------------------------------------------------

void run_stationary(const RunConfig& cfg, const fs::path& out, Report& rep) {
  const int n = dimension(cfg);
  auto cells = cfg.get_doubles("cells");
  const double r_max = positive(cfg, "r_max");
  const auto norm_cells = positive_size(cfg, "norm_cells", 16);
  const double norm_r_max = positive(cfg, "norm_r_max");
  if (cells.size() < 2) throw UsageError("'cells' needs at least two grid sizes");
  for (double c : cells) {
    if (c < 16 || c != std::floor(c)) throw UsageError("'cells' entries must be integers >= 16");
  }

  json levels = json::array();
  std::vector<double> res;
  for (double c : cells) {
    const auto g = make_radial_grid(n, static_cast<std::size_t>(c), r_max);
    res.push_back(stationary_residual(sample_W(g)));
    levels.push_back({{"cells", c}, {"residual", res.back()}});
  }
  double worst_order = 1e300;
  for (std::size_t i = 1; i < res.size(); ++i) {
    const double order = std::log(res[i - 1] / res[i]) / std::log(cells[i] / cells[i - 1]);
    levels[i]["order"] = order;
    worst_order = std::min(worst_order, order);
  }
  rep.results["refinement"] = levels;
  rep.check_ge("residual convergence order", worst_order, 1.8);

  const auto g = make_radial_grid(n, norm_cells, norm_r_max);
  const auto W = sample_W(g);
  const double grad = hdot_norm_squared(W);
  const double pot = lp_integral(W, critical_exponent(n));
  const double identity = std::abs(grad - pot) / grad;
  const auto bc = boost_checks(RadialProfile::ground_state(n), 0.0, AxisymmetricQuadrature(n));
  const double e = energy(W, zeros(g).with_extension(Extension::zero));
  const double energy_mismatch = std::abs(e - grad / n) / (grad / n);
  rep.results["norms"] = {{"gradient_sq", grad},
                          {"critical_power", pot},
                          {"energy", e},
                          {"pohozaev_mismatch", bc.pohozaev_mismatch}};
  rep.check_le("gradient vs critical power", identity, 0.01);
  rep.check_le("Pohozaev identity", bc.pohozaev_mismatch, 0.01);
  rep.check_le("energy vs gradient / N", energy_mismatch, 0.01);
  io::write_json(out / "refinement.json", levels);
}

// ---- group-check -----------------------------------------------------------------------

GroupParams random_params(int n, double max_norm, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> v(group_dimension(n));
  double n2 = 0.0;
  for (auto& x : v) {
    x = normal(rng);
    n2 += x * x;
  }
  const double scale = max_norm * uniform(rng) / std::sqrt(n2);
  for (auto& x : v) x *= scale;
  return GroupParams::from_flat(n, v);
}

void run_group(const RunConfig& cfg, const fs::path& out, Report& rep) {
  const int n = dimension(cfg);
  const auto samples = positive_size(cfg, "samples");
  const double max_norm = positive(cfg, "norm_max");
  const auto seed = static_cast<std::uint64_t>(cfg.get_size("seed"));
  const auto radial = positive_size(cfg, "quad_radial", 8);
  const auto polar = positive_size(cfg, "quad_polar", 4);
  const auto azimuth = positive_size(cfg, "quad_azimuth", 4);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  double law = 0.0, inv = 0.0, assoc = 0.0, iso = 0.0;
  const auto grid = make_radial_grid(n, 65536, 400.0);
  const auto W = sample_W(grid);
  const SphericalQuadrature quad(n, radial, polar, azimuth, 2.0);
  const double p = critical_exponent(n);
  const double crit_w = critical_norm(W);
  json rows = json::array();
  for (std::size_t k = 0; k < samples; ++k) {
    const auto A = random_params(n, max_norm, rng);
    const auto B = random_params(n, max_norm, rng);
    const auto C = random_params(n, max_norm, rng);
    const auto AB = compose(A, B);
    const auto Ainv = inverse(A);
    for (int j = 0; j < 5; ++j) {
      Eigen::VectorXd x(n);
      for (int a = 0; a < n; ++a) x[a] = coord(rng);
      const auto lhs = apply_point(AB, x);
      const auto mid = apply_point(B, x);
      if (lhs && mid) {
        const auto rhs = apply_point(A, *mid);
        if (rhs) law = std::max(law, (*lhs - *rhs).norm());
      }
      const auto ax = apply_point(A, x);
      if (ax) {
        const auto back = apply_point(Ainv, *ax);
        if (back) inv = std::max(inv, (*back - x).norm());
      }
    }
    assoc = std::max(assoc, (compose(compose(A, B), C).flat() - compose(A, compose(B, C)).flat())
                                .cwiseAbs()
                                .maxCoeff());
    const double integral = quad.integrate([&](const double* x) {
      return std::pow(std::abs(transform_at(A, pushforward_exponent(n), W, x)), p);
    });
    const double dev = std::abs(std::pow(integral, 1.0 / p) - crit_w);
    iso = std::max(iso, dev);
    rows.push_back({{"params", io::to_json(A)}, {"isometry_deviation", dev}});
  }
  rep.results["group_law_max"] = law;
  rep.results["inverse_max"] = inv;
  rep.results["associativity_max"] = assoc;
  rep.results["isometry_max"] = iso;
  rep.check_le("group law point deviation", law, 1e-9);
  rep.check_le("inverse point deviation", inv, 1e-9);
  rep.check_le("associativity deviation", assoc, 1e-9);
  rep.check_le("critical norm isometry", iso, 1e-3);
  io::write_json(out / "samples.json", rows);
}

// ---- modulation-sim --------------------------------------------------------------------

void run_modulation_sim(const RunConfig& cfg, const fs::path& out, Report& rep) {
  const auto p = positive_size(cfg, "p");
  auto freqs = cfg.get_doubles("freqs");
  if (freqs.size() < p) throw UsageError("'freqs' lists fewer than p frequencies");
  freqs.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    if (!(freqs[j] > 0.0) || (j > 0 && freqs[j] < freqs[j - 1])) {
      throw UsageError("'freqs' must be positive and non-decreasing");
    }
  }
  double eps3 = cfg.get_double("eps3");
  if (eps3 == 0.0) eps3 = freqs[0] / 20.0;
  if (eps3 < 0.0 || eps3 > freqs[0] / 20.0 * (1.0 + 1e-12)) {
    throw UsageError("'eps3' must lie in [0, omega_1/20]");
  }
  const auto seeds = positive_size(cfg, "seeds");
  const auto seed_base = static_cast<std::uint64_t>(cfg.get_size("seed_base"));
  const double T0 = cfg.get_double("T0");
  if (T0 < 0.0) throw UsageError("'T0' must be non-negative");

  std::size_t bounded = 0, bound_ok = 0, decay_ok = 0, cone_bad = 0;
  double plus_margin = 1e300, minus_margin = 1e300;
  json rows = json::array();
  for (std::size_t k = 0; k < seeds; ++k) {
    const std::uint64_t seed = seed_base + k;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal;
    ModeSimOptions opts;
    opts.T0 = T0;
    opts.init.resize(2 * p);
    for (auto& v : opts.init) v = normal(rng);

    opts.kind = ModeRunKind::bounded_decay;
    const auto decaying = ode_simulate(freqs, eps3, seed, opts);
    opts.kind = ModeRunKind::forward;
    const auto forward = ode_simulate(freqs, eps3, seed, opts);

    const auto d = verify_decay(decaying);
    ++bounded;
    bound_ok += d.integral_bound_holds ? 1 : 0;
    decay_ok += d.passed ? 1 : 0;
    const bool cone = check_cone_property(decaying).violated || check_cone_property(forward).violated;
    cone_bad += cone ? 1 : 0;
    for (const auto* st : {&decaying, &forward}) {
      const auto ineq = check_differential_inequalities(*st);
      plus_margin = std::min(plus_margin, ineq.plus_margin);
      minus_margin = std::min(minus_margin, ineq.minus_margin);
    }
    rows.push_back({{"seed", seed},
                    {"decay_ratio", d.ratio},
                    {"integral", d.integral},
                    {"sup", d.sup},
                    {"integral_bound", d.integral_bound_holds},
                    {"cone_violated", cone},
                    {"forward_escape", forward.finite_escape}});
    if (k == 0) {
      io::write_mode_trajectory(out / "bounded_seed0.csv", decaying);
      io::write_mode_trajectory(out / "forward_seed0.csv", forward);
    }
  }
  const double bound_rate = static_cast<double>(bound_ok) / static_cast<double>(bounded);
  const double decay_rate = static_cast<double>(decay_ok) / static_cast<double>(bounded);
  rep.results["eps3"] = eps3;
  rep.results["freqs"] = freqs;
  rep.results["integral_bound_rate"] = bound_rate;
  rep.results["decay_rate"] = decay_rate;
  rep.results["cone_violations"] = cone_bad;
  rep.results["inequality_margins"] = {plus_margin, minus_margin};
  rep.check_ge("integral bound pass rate", bound_rate, 1.0);
  rep.check_le("cone property violations", static_cast<double>(cone_bad), 0.0);
  rep.check_ge("decay pass rate", decay_rate, 0.95);
  rep.check_ge("E_plus inequality margin", plus_margin, -1e-6);
  rep.check_ge("E_minus inequality margin", minus_margin, -1e-6);
  io::write_json(out / "seeds.json", rows);
}

// ---- evolve ----------------------------------------------------------------------------

void run_evolve(const RunConfig& cfg, const fs::path& out, Report& rep) {
  const int n = dimension(cfg);
  const auto cells = positive_size(cfg, "cells", 16);
  const double r_max = positive(cfg, "r_max");
  const double T = positive(cfg, "T");
  const double eps = positive(cfg, "eps");
  const double scale = positive(cfg, "scale");
  const auto stride = positive_size(cfg, "stride");
  const auto init = cfg.get("init");
  const std::vector<std::string> kinds{"stationary", "mode", "linear-mode", "kernel", "blowup",
                                       "bump"};
  if (std::find(kinds.begin(), kinds.end(), init) == kinds.end()) {
    throw UsageError("'init' must be one of stationary, mode, linear-mode, kernel, blowup, bump");
  }

  const auto bg = background(n, cells, r_max);
  const auto& g = bg.grid;
  const auto& Y = bg.eig[0].Y;
  const double w = bg.eig[0].omega;
  const auto z = zeros(g);
  EvolutionOptions opts;
  opts.T = T;
  opts.stride = stride;
  opts.ghost = bg.ghost;
  Trajectory tr;
  rep.results["omega"] = w;

  if (init == "stationary") {
    tr = evolve_nonlinear(bg.Wh, z, opts);
    auto max_dev = [&](const Trajectory& t, const RadialField& ref) {
      double d = 0.0;
      for (const auto& u : t.u) d = std::max(d, deviation_gradient_norm(u - ref));
      return d;
    };
    const double dev_wh = max_dev(tr, bg.Wh.with_extension(Extension::none));
    const double dev_w = max_dev(tr, sample_W(g).with_extension(Extension::none));
    // The same run on a grid twice as coarse measures the order of the O(h^2) offset.
    const auto half = background(n, cells / 2, r_max);
    EvolutionOptions half_opts = opts;
    half_opts.ghost = half.ghost;
    const auto tr_half = evolve_nonlinear(half.Wh, zeros(half.grid), half_opts);
    const double dev_half = max_dev(tr_half, sample_W(half.grid).with_extension(Extension::none));
    const double order = std::log2(dev_half / dev_w);
    rep.results["deviation_from_W"] = dev_w;
    rep.results["deviation_from_W_half_grid"] = dev_half;
    rep.results["deviation_from_W_over_h2"] = dev_w / (g->spacing() * g->spacing());
    rep.results["deviation_from_initial"] = dev_wh;
    rep.check_ge("order of the deviation from W", order, 1.8);
    rep.check_le("deviation from the discrete ground state", dev_wh, 1e-5);
  } else if (init == "mode") {
    const double t_end = std::log(1.0 / eps) / (2.0 * w);
    opts.T = t_end;
    tr = evolve_nonlinear(bg.Wh + eps * Y, (-eps * w) * Y, opts);
    const auto ex = track_expansion(tr, bg.Wh, Y, w, eps, t_end);
    rep.results["tracking_window"] = t_end;
    rep.results["max_deviation"] = ex.max_deviation;
    rep.results["deviation_over_eps_sq"] = ex.max_deviation / (eps * eps);
    rep.check_le("tracking deviation / eps^2", ex.max_deviation / (eps * eps), 10.0);
  } else if (init == "linear-mode") {
    opts.T = 3.0 / w;
    opts.ghost = 0.0;
    tr = evolve_linearized(bg.Wh, Y, (-w) * Y, opts);
    std::vector<double> t, l;
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
      t.push_back(tr.t[k]);
      l.push_back(std::log(product_norm(tr.u[k], tr.du[k])));
    }
    const double rate = -numerics::linear_fit(t, l)[1];
    rep.results["fitted_rate"] = rate;
    rep.check_le("decay rate relative error", std::abs(rate / w - 1.0), 0.02);
  } else if (init == "kernel") {
    auto lw = scaling_generator(bg.Wh.with_extension(Extension::power_law))
                  .with_extension(Extension::none);
    const double a = volume_product(lw, Y);
    lw -= a * Y;
    rep.results["removed_unstable_component"] = a;
    opts.ghost = eval_LambdaW(n, g->hull() + g->spacing());
    tr = evolve_linearized(bg.Wh, lw, z, opts);
    const double sup0 = interior_max_abs(tr.u.front());
    double worst = 0.0;
    for (const auto& u : tr.u) worst = std::max(worst, interior_max_abs(u) / sup0);
    rep.results["max_sup_ratio"] = worst;
    rep.check_le("kernel mode sup norm ratio", worst, 2.0);
  } else if (init == "blowup") {
    opts.ghost = scale * bg.ghost;
    tr = evolve_nonlinear(scale * bg.Wh, z, opts);
    rep.results["blowup_time"] = tr.blowup ? json(tr.blowup_time) : json(nullptr);
    rep.check_true("finite-time blow-up detected", tr.blowup);
  } else {
    const auto bump = RadialField::sample(g, [&](double r) {
      return 0.01 * std::exp(-(r - 5.0) * (r - 5.0));
    });
    opts.ghost = 0.0;
    tr = evolve_nonlinear(bump, z, opts);
    const double s0 = interior_max_abs(tr.u.front());
    const double s1 = interior_max_abs(tr.u.back());
    rep.results["sup_ratio"] = s1 / s0;
    rep.check_le("local sup norm decays", s1 / s0, 1.0);
  }
  rep.results["energy_drift"] = tr.energy_drift;
  rep.results["cfl"] = tr.cfl;
  if (init != "blowup") rep.check_le("energy drift", tr.energy_drift, 1e-4);
  io::write_trajectory(out / "trajectory.csv", tr, 1, {{"init", init}});
}

// ---- channel ---------------------------------------------------------------------------

void run_channel(const RunConfig& cfg, const fs::path& out, Report& rep) {
  const int n = dimension(cfg);
  const auto cells = positive_size(cfg, "cells", 16);
  const double r_max = positive(cfg, "r_max");
  const ChannelWindow win{positive(cfg, "r0"), positive(cfg, "t0")};
  const auto eps = cfg.get_doubles("eps");
  const double tail_r0 = positive(cfg, "tail_r0");
  const double tail_t0 = positive(cfg, "tail_t0");
  if (eps.size() != 2 || !(eps[0] > 0.0) || !(eps[1] > eps[0])) {
    throw UsageError("'eps' must list two increasing positive amplitudes");
  }
  if (tail_r0 < 1.0) throw UsageError("'tail_r0' must be at least 1");

  const auto bg = background(n, cells, r_max);
  const auto& Y = bg.eig[0].Y;
  const double w = bg.eig[0].omega;
  const auto z = zeros(bg.grid);

  // Pure linear mode: the residual vanishes and the shell norm defines C1.
  EvolutionOptions lin;
  lin.T = win.t0 + 1.0;
  lin.ghost = 0.0;
  lin.stride = 4;
  const auto tl = evolve_linearized(bg.Wh, eps[0] * Y, (-eps[0] * w) * Y, lin);
  const auto ext_lin = exterior_energy(tl, win, z, Y, w, eps[0]);
  const auto ch_lin = channel_lower_bound(tl, z, Y, w, eps[0], win);
  rep.results["linear_exterior_residual"] = ext_lin.max_norm;
  rep.results["C1_linear"] = ch_lin.C1;
  rep.check_le("linear-mode exterior residual", ext_lin.max_norm, 1e-6);

  std::vector<double> ext;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    EvolutionOptions on;
    on.T = std::log(1.0 / eps[k]) / (2.0 * w);
    on.ghost = bg.ghost;
    on.stride = 4;
    const auto tn = evolve_nonlinear(bg.Wh + eps[k] * Y, (-eps[k] * w) * Y, on);
    ext.push_back(exterior_energy(tn, win, bg.Wh, Y, w, eps[k]).max_norm);
    if (k == 0) {
      const auto ch = channel_lower_bound(tn, bg.Wh, Y, w, eps[k], win);
      rep.results["C1_nonlinear"] = ch.C1;
      rep.results["contamination"] = ch.contamination;
      rep.check_le("contamination below half the mode", ch.contamination, 0.5);
      rep.check_le("lower bound with doubled C1", ch.C1, 2.0 * ch_lin.C1);
    }
  }
  const double expected = (eps[1] / eps[0]) * (eps[1] / eps[0]);
  const double ratio = ext[1] / ext[0];
  rep.results["exterior_norms"] = ext;
  rep.results["exterior_scaling"] = {{"ratio", ratio}, {"quadratic", expected}};
  rep.check_le("exterior residual scaling vs eps^2 (factor)",
               std::max(ratio / expected, expected / ratio), 2.0);

  const auto S = RadialProfile::ground_state(n);
  const auto Yp = RadialProfile::from_field(Y.with_extension(Extension::zero));
  const auto a = tail_bounds_check(S, Yp, w, ChannelWindow{tail_r0, tail_t0});
  const auto b = tail_bounds_check(S, Yp, w, ChannelWindow{2.0 * tail_r0, 2.0 * tail_t0});
  const auto c = tail_bounds_check(S, Yp, w, ChannelWindow{tail_r0, 2.0 * tail_t0});
  const double s_var = std::max(a.s_ratio, b.s_ratio) / std::min(a.s_ratio, b.s_ratio) - 1.0;
  const double y_fac = (c.y_norm / a.y_norm) / std::exp(-w * tail_t0);
  rep.results["tail_bounds"] = {{"s_ratio", {a.s_ratio, b.s_ratio}},
                                {"y_norm", {a.y_norm, c.y_norm}},
                                {"y_doubling_factor", y_fac}};
  rep.check_le("ground-state envelope ratio variation", s_var, 0.5);
  rep.check_le("mode envelope doubling factor", std::max(y_fac, 1.0 / y_fac), 2.0);
  io::write_json(out / "exterior.json",
                 {{"t", ext_lin.t}, {"linear_residual", ext_lin.norm}, {"shell", ch_lin.shell_norm}});
}

// ---- boost -----------------------------------------------------------------------------

void run_boost(const RunConfig& cfg, const fs::path& out, Report& rep) {
  const int n = dimension(cfg);
  const double ell = cfg.get_double("ell");
  if (!(std::abs(ell) < 1.0)) throw UsageError("'ell' must satisfy |ell| < 1");
  const auto samples = positive_size(cfg, "samples");
  const auto seed = static_cast<std::uint64_t>(cfg.get_size("seed"));
  const double dx = positive(cfg, "dx");

  const BoostMap boost(ell);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  double inv_err = 0.0, quad_err = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    std::vector<double> y(n), x(n), y2(n);
    const double s = u(rng);
    for (auto& v : y) v = u(rng);
    double t = 0.0, s2 = 0.0;
    boost.forward(s, y, t, x);
    boost.inverse(t, x, s2, y2);
    double ny = 0.0, nx = 0.0;
    for (int j = 0; j < n; ++j) {
      ny += y[j] * y[j];
      nx += x[j] * x[j];
      inv_err = std::max(inv_err, std::abs(y2[j] - y[j]));
    }
    inv_err = std::max(inv_err, std::abs(s2 - s));
    quad_err = std::max(quad_err, std::abs((nx - t * t) - (ny - s * s)) / std::max(1.0, ny + s * s));
  }
  rep.results["cone_constant"] = cone_constant(ell);
  rep.check_le("quadratic invariant", quad_err, 1e-12);
  rep.check_le("map round trip", inv_err, 1e-12);

  const auto Q = RadialProfile::ground_state(n);
  const AxisymmetricQuadrature quad(n);
  const auto mr = momentum_ratio_check(Q, ell, quad);
  const auto bc = boost_checks(Q, ell, quad);
  rep.results["momentum_ratio"] = mr.ratio[0];
  rep.results["boost_identities"] = {{"gradient", bc.gradient_mismatch},
                                     {"time_derivative", bc.time_derivative_mismatch},
                                     {"energy", bc.energy_mismatch}};
  rep.check_le("-P/E mismatch", mr.mismatch, std::abs(ell) > 0.5 ? 0.02 : 0.01);
  rep.check_le("boosted gradient identity", bc.gradient_mismatch, 0.01);
  rep.check_le("boosted time-derivative identity", bc.time_derivative_mismatch, 0.01);
  rep.check_le("boosted energy identity", bc.energy_mismatch, 0.01);

  // Reinterpolated boost of the static ground state against the closed form.
  const double g = boost.lorentz_factor();
  const double X = 5.0, T = 1.0;
  const double a = std::abs(ell);
  // The second leg samples the middle window on t in g[-aX, T + aX], x in g[-X - aT, X + aT].
  const double mt_lo = -g * a * X - 1.0, mt_hi = g * (T + a * X) + 1.0;
  const double mx = g * (X + a * T) + 1.0;
  const double mt = std::max(std::abs(mt_lo), std::abs(mt_hi));
  const double s_span = g * (mt + a * mx) + 1.0;
  const auto nr = static_cast<std::size_t>(std::ceil((g * (mx + a * mt) + 1.0) / dx)) + 4;
  const auto src = static_field(Q, -s_span, 0.5, static_cast<std::size_t>(std::ceil(4.0 * s_span)) + 1,
                                dx, nr);
  const SliceWindow mid{mt_lo, dx, static_cast<std::size_t>(std::ceil((mt_hi - mt_lo) / dx)) + 1,
                        -mx, dx, static_cast<std::size_t>(std::ceil(2.0 * mx / dx)) + 1};
  const SliceWindow final_w{0.0, 0.1, static_cast<std::size_t>(T / 0.1) + 1, -X, dx,
                            static_cast<std::size_t>(std::ceil(2.0 * X / dx)) + 1};
  const auto boosted = transform_field(src, ell, mid);
  auto exact = [&](const SpaceTimeField& f, double speed) {
    const BoostedProfile bp(Q, Eigen::VectorXd::Unit(n, 0) * speed);
    double err = 0.0;
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < f.nt; ++k) {
      for (std::size_t i = 0; i < f.nx; ++i) {
        x[0] = f.coord(i);
        err = std::max(err, std::abs(f.at(k, i) - bp.value(f.time(k), x.data())));
      }
    }
    return err;
  };
  const double leg1 = exact(boosted, ell);
  SpaceTimeField ideal = boosted;
  {
    const BoostedProfile bp(Q, Eigen::VectorXd::Unit(n, 0) * ell);
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < ideal.nt; ++k) {
      for (std::size_t i = 0; i < ideal.nx; ++i) {
        x[0] = ideal.coord(i);
        ideal.at(k, i) = bp.value(ideal.time(k), x.data());
        ideal.dt_at(k, i) = bp.time_derivative(ideal.time(k), x.data());
      }
    }
  }
  const double leg2 = exact(transform_field(ideal, -ell, final_w), 0.0);
  const double round_trip = exact(transform_field(boosted, -ell, final_w), 0.0);
  const double interp = std::max(leg1, leg2);
  rep.results["interpolation_error"] = interp;
  rep.results["round_trip_error"] = round_trip;
  rep.check_le("boosted profile vs closed form", leg1, 0.01);
  rep.check_le("double boost round trip / interpolation error", round_trip / interp, 2.0);
  io::write_spacetime(out / "boosted", transform_field(src, ell, final_w));
}

}  // namespace

const std::vector<Command>& commands() {
  static const std::vector<Command> list{
      {"spectrum",
       "negative spectrum, kernel residuals, coercivity and far-field decay of L_W",
       {{"N", "3"},
        {"cells", "131072"},
        {"r_max", "100"},
        {"alt_cells", "98304"},
        {"alt_r_max", "80"},
        {"coarse_cells", "400,800"},
        {"coarse_r_max", "40"},
        {"box_half_width", "auto"},
        {"box_spacings", "auto"}},
       run_spectrum},
      {"stationary-check",
       "convergence of the stationary residual and the ground-state norm identities",
       {{"N", "3"},
        {"cells", "1000,2000,4000"},
        {"r_max", "20"},
        {"norm_cells", "65536"},
        {"norm_r_max", "200"}},
       run_stationary},
      {"group-check",
       "group law, inverse and critical-norm isometry of the conformal family",
       {{"N", "3"},
        {"samples", "100"},
        {"norm_max", "0.2"},
        {"seed", "1"},
        {"quad_radial", "80"},
        {"quad_polar", "24"},
        {"quad_azimuth", "48"}},
       run_group},
      {"modulation-sim",
       "Monte-Carlo runs of the perturbed mode system",
       {{"p", "2"},
        {"freqs", "1,1.4,2"},
        {"eps3", "0"},
        {"seeds", "100"},
        {"seed_base", "0"},
        {"T0", "0"}},
       run_modulation_sim},
      {"evolve",
       "radial evolution from a named initial state",
       {{"N", "3"},
        {"cells", "4000"},
        {"r_max", "40"},
        {"T", "20"},
        {"init", "stationary"},
        {"eps", "0.001"},
        {"scale", "1.2"},
        {"stride", "100"}},
       run_evolve},
      {"channel",
       "exterior-energy residuals, channel lower bound and tail envelopes",
       {{"N", "3"},
        {"cells", "4000"},
        {"r_max", "40"},
        {"r0", "2"},
        {"t0", "2"},
        {"eps", "0.001,0.003"},
        {"tail_r0", "5"},
        {"tail_t0", "5"}},
       run_channel},
      {"boost",
       "Lorentz map invariants, -P/E ratio and space-time reinterpolation",
       {{"N", "3"}, {"ell", "0.5"}, {"samples", "1000"}, {"seed", "1"}, {"dx", "0.05"}},
       run_boost},
  };
  return list;
}

}  // namespace critwave::cli

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "critwave/error.hpp"
#include "critwave/modulation.hpp"
#include "critwave/numerics.hpp"

namespace critwave {

namespace {

struct Piece {
  double rho = 0.0;
  std::vector<double> dir;  // unit vector in R^{2p}
};

std::vector<Piece> draw_pieces(std::size_t count, std::size_t p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<Piece> out(count);
  for (auto& piece : out) {
    piece.dir.resize(2 * p);
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (auto& d : piece.dir) {
        d = normal(rng);
        n2 += d * d;
      }
    } while (n2 < 1e-24);
    for (auto& d : piece.dir) d /= std::sqrt(n2);
    piece.rho = uniform(rng);
  }
  return out;
}

double gamma_of(std::span<const double> w, std::span<const double> y) {
  const std::size_t p = w.size();
  double g2 = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double wa = w[j] * y[j];
    g2 += wa * wa + y[p + j] * y[p + j];
  }
  return std::sqrt(g2);
}

// Vector field of the perturbed system with the perturbation of `piece`.
void mode_rhs(std::span<const double> w, double eps3, const Piece& piece,
              std::span<const double> y, std::span<double> dy) {
  const std::size_t p = w.size();
  const double scale = eps3 * gamma_of(w, y) * piece.rho;
  for (std::size_t j = 0; j < p; ++j) {
    dy[j] = y[p + j] + scale * piece.dir[j];
    dy[p + j] = w[j] * w[j] * y[j] + scale * piece.dir[p + j];
  }
}

}  // namespace

double integral_bound_constant(double omega1) {
  return 8.0 * std::sqrt(2.0) / (3.0 * omega1);
}

ModeSystemState ode_simulate(std::span<const double> freqs, double eps3, std::uint64_t seed,
                             const ModeSimOptions& opts) {
  const std::size_t p = freqs.size();
  require(p >= 1, Errc::invalid_argument, "at least one frequency is needed");
  for (std::size_t j = 0; j < p; ++j) {
    require(freqs[j] > 0.0 && (j == 0 || freqs[j] >= freqs[j - 1]), Errc::invalid_argument,
            "frequencies must be positive and non-decreasing");
  }
  require(opts.init.size() == 2 * p, Errc::invalid_argument, "init needs 2p entries");
  const double w1 = freqs[0];
  require(eps3 >= 0.0 && eps3 <= w1 / 20.0 * (1.0 + 1e-12), Errc::invalid_argument,
          "eps3 exceeds omega_1 / 20");
  const double T0 = opts.T0 > 0.0 ? opts.T0 : 40.0 / w1;
  const double dt_piece = 0.1 / w1;
  const auto n_pieces = static_cast<std::size_t>(std::ceil(T0 / dt_piece - 1e-9));
  const auto pieces = draw_pieces(n_pieces, p, seed);
  const std::size_t sub =
      opts.sample_dt > 0.0
          ? std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt_piece / opts.sample_dt)))
          : 1;

  ModeSystemState st;
  st.freqs.assign(freqs.begin(), freqs.end());
  st.eps3 = eps3;
  st.seed = seed;
  st.backward = opts.kind == ModeRunKind::bounded_decay;

  numerics::OdeOptions ode;
  ode.rtol = opts.rtol;
  ode.atol = opts.rtol * 1e-2;
  ode.h_init = dt_piece / 8.0;

  std::vector<double> y = opts.init;
  std::vector<double> ts{st.backward ? T0 : 0.0};
  std::vector<std::vector<double>> ys{y};
  for (std::size_t step = 0; step < n_pieces; ++step) {
    const std::size_t k = st.backward ? n_pieces - 1 - step : step;
    const double a = static_cast<double>(k) * dt_piece;
    const double b = std::min(T0, a + dt_piece);
    const double from = st.backward ? b : a;
    const double to = st.backward ? a : b;
    const auto rhs = [&](double, std::span<const double> yy, std::span<double> dy) {
      mode_rhs(freqs, eps3, pieces[k], yy, dy);
    };
    for (std::size_t s = 0; s < sub; ++s) {
      const double t0 = from + (to - from) * static_cast<double>(s) / static_cast<double>(sub);
      const double t1 = from + (to - from) * static_cast<double>(s + 1) / static_cast<double>(sub);
      numerics::integrate_dopri(rhs, t0, t1, y, ode);
      ts.push_back(t1);
      ys.push_back(y);
    }
    if (!st.backward && gamma_of(freqs, y) > opts.escape_level) {
      st.finite_escape = true;
      st.escape_time = ts.back();
      break;
    }
  }
  if (st.backward) {
    std::reverse(ts.begin(), ts.end());
    std::reverse(ys.begin(), ys.end());
    const double g0 = gamma_of(freqs, ys.front());
    require(g0 > 0.0 && std::isfinite(g0), Errc::solver, "degenerate backward run");
    for (auto& v : ys) {
      for (auto& x : v) x /= g0;
    }
  }

  const std::size_t n = ts.size();
  st.t = ts;
  st.alpha.resize(n);
  st.beta.resize(n);
  st.gamma.resize(n);
  st.e_plus.resize(n);
  st.e_minus.resize(n);
  st.e_plus_rate.resize(n);
  st.e_minus_rate.resize(n);
  std::vector<double> dy(2 * p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = ys[i];
    st.alpha[i].assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(p));
    st.beta[i].assign(v.begin() + static_cast<std::ptrdiff_t>(p), v.end());
    // Right derivative: the piece that starts at or contains t (last piece at T0).
    auto k = static_cast<std::size_t>(std::floor(ts[i] / dt_piece + 1e-9));
    k = std::min(k, n_pieces - 1);
    mode_rhs(freqs, eps3, pieces[k], v, dy);
    double ep = 0.0, em = 0.0, dep = 0.0, dem = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double plus = v[p + j] + freqs[j] * v[j];
      const double minus = v[p + j] - freqs[j] * v[j];
      ep += plus * plus;
      em += minus * minus;
      dep += 2.0 * plus * (dy[p + j] + freqs[j] * dy[j]);
      dem += 2.0 * minus * (dy[p + j] - freqs[j] * dy[j]);
    }
    st.gamma[i] = gamma_of(freqs, v);
    st.e_plus[i] = ep;
    st.e_minus[i] = em;
    st.e_plus_rate[i] = dep;
    st.e_minus_rate[i] = dem;
  }
  return st;
}

DecayReport verify_decay(const ModeSystemState& st) {
  require(!st.t.empty(), Errc::invalid_argument, "empty trajectory");
  require(!st.finite_escape, Errc::hypothesis_violated, "gamma is unbounded (finite escape)");
  for (double g : st.gamma) {
    require(std::isfinite(g), Errc::hypothesis_violated, "gamma is not finite");
  }
  const double w1 = st.freqs.front();
  const double T = st.t.back();
  DecayReport rep;
  rep.sup = *std::max_element(st.gamma.begin(), st.gamma.end());
  for (std::size_t i = 0; i + 1 < st.t.size(); ++i) {
    rep.integral += 0.5 * (st.gamma[i] + st.gamma[i + 1]) * (st.t[i + 1] - st.t[i]);
  }
  rep.integral_bound_holds = rep.integral <= integral_bound_constant(w1) * rep.sup;
  // A run that ends far above where it started is growing, not decaying.
  require(st.gamma.back() <= 10.0 * st.gamma.front(), Errc::hypothesis_violated,
          "gamma grows over the run");

  const double t_half = st.t.front() + 0.5 * (T - st.t.front());
  const double t_tail = T - 0.1 * (T - st.t.front());
  double start = 0.0;
  double tail_max = 0.0;
  for (std::size_t i = 0; i < st.t.size(); ++i) {
    const double v = std::exp(0.5 * w1 * st.t[i]) * st.gamma[i];
    if (start == 0.0 && st.t[i] >= t_half - 1e-12) start = v;
    if (st.t[i] >= t_tail - 1e-12) tail_max = std::max(tail_max, v);
  }
  require(start > 0.0, Errc::undefined_ratio, "gamma vanishes at the window start");
  rep.ratio = tail_max / start;
  rep.passed = rep.ratio <= 0.1;
  return rep;
}

ConeReport check_cone_property(const ModeSystemState& st) {
  ConeReport rep;
  for (std::size_t i = 0; i < st.t.size(); ++i) {
    const bool inside = st.e_plus[i] > st.e_minus[i];
    if (!rep.entered && inside) {
      rep.entered = true;
      rep.first_time = st.t[i];
    } else if (rep.entered && !inside) {
      rep.violated = true;
    }
  }
  return rep;
}

InequalityReport check_differential_inequalities(const ModeSystemState& st) {
  const double w1 = st.freqs.front();
  InequalityReport rep;
  rep.plus_margin = rep.minus_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < st.t.size(); ++i) {
    const double g = st.gamma[i];
    if (g == 0.0) continue;
    const double g2 = g * g;
    const double ep = st.e_plus[i], em = st.e_minus[i];
    rep.plus_margin = std::min(
        rep.plus_margin, (st.e_plus_rate[i] - (2.0 * w1 * ep - 0.5 * w1 * std::sqrt(ep) * g)) / g2);
    rep.minus_margin = std::min(
        rep.minus_margin, ((-2.0 * w1 * em + 0.5 * w1 * std::sqrt(em) * g) - st.e_minus_rate[i]) / g2);
  }
  return rep;
}

}  // namespace critwave

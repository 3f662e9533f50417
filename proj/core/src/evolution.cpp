#include "critwave/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "critwave/error.hpp"
#include "critwave/numerics.hpp"

namespace critwave {

namespace {

double initial_ghost(const RadialField& f) {
  if (f.extension() == Extension::none) return 0.0;
  const auto& g = *f.grid();
  return f(g.hull() + g.spacing());
}

double potential_density(int dim, double u) {
  const double p = 2.0 * dim / (dim - 2.0);
  return (dim - 2.0) / (2.0 * dim) * std::pow(std::abs(u), p);
}

// V^{-1} (K u + ghost flux): the discrete Laplacian with a fixed ghost.
void apply_laplacian(const RadialGrid& g, std::span<const double> u, double ghost,
                     std::span<double> out) {
  const std::size_t m = g.size();
  const auto vol = g.cell_volumes();
  const double inv_h = 1.0 / g.spacing();
  double inner = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double next = i + 1 < m ? u[i + 1] : ghost;
    const double outer = g.face_area(i) * (next - u[i]) * inv_h;
    out[i] = (outer - inner) / vol[i];
    inner = outer;
  }
}

double gradient_energy(const RadialGrid& g, std::span<const double> u, double ghost) {
  const std::size_t m = g.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = (i + 1 < m ? u[i + 1] : ghost) - u[i];
    acc += g.face_area(i) * d * d;
  }
  return 0.5 * acc / g.spacing();
}

void require_same_grid(const RadialField& a, const RadialField& b) {
  require(a.grid()->size() == b.grid()->size() && a.grid()->r_max() == b.grid()->r_max() &&
              a.dim() == b.dim(),
          Errc::invalid_grid, "fields live on different radial grids");
}

// Shared leapfrog loop; `source` adds the zeroth-order term to the acceleration.
template <class Source, class Energy>
Trajectory leapfrog(const RadialField& u0, const RadialField& u1, const EvolutionOptions& opts,
                    Source&& source, Energy&& energy_of) {
  require_same_grid(u0, u1);
  const auto& grid = u0.grid();
  const auto& g = *grid;
  const std::size_t m = g.size();
  Trajectory tr;
  tr.grid = grid;
  tr.dt = opts.dt > 0.0 ? opts.dt : 0.5 * g.spacing();
  tr.cfl = tr.dt / g.spacing();
  require(tr.cfl <= 0.9, Errc::invalid_argument, "time step violates CFL <= 0.9");
  require(opts.T > 0.0 && opts.stride >= 1, Errc::invalid_argument, "bad run length or stride");
  tr.ghost = opts.ghost ? *opts.ghost : initial_ghost(u0);

  std::vector<double> u(u0.values().begin(), u0.values().end());
  std::vector<double> v(u1.values().begin(), u1.values().end());
  std::vector<double> acc(m);
  const double dt = tr.dt;
  const auto steps = static_cast<std::size_t>(std::llround(opts.T / dt));
  auto accel = [&] {
    apply_laplacian(g, u, tr.ghost, acc);
    source(u, acc);
  };
  auto snapshot = [&](double t, double e) {
    tr.t.push_back(t);
    tr.u.emplace_back(grid, u);
    tr.du.emplace_back(grid, v);
    tr.energy.push_back(e);
  };
  const double e0 = energy_of(u, v, tr.ghost);
  // Relative to the quadratic part as well, so zero-energy data (eigenmodes) stay meaningful.
  double kin = 0.0;
  for (std::size_t i = 0; i < m; ++i) kin += g.cell_volumes()[i] * v[i] * v[i];
  const double quad = 0.5 * kin + gradient_energy(g, u, tr.ghost);
  const double e_scale = std::max({std::abs(e0), quad, 1e-300});
  snapshot(0.0, e0);
  accel();
  for (std::size_t n = 1; n <= steps; ++n) {
    for (std::size_t i = 0; i < m; ++i) v[i] += 0.5 * dt * acc[i];
    for (std::size_t i = 0; i < m; ++i) u[i] += dt * v[i];
    accel();
    for (std::size_t i = 0; i < m; ++i) v[i] += 0.5 * dt * acc[i];
    const double t = static_cast<double>(n) * dt;
    double sup = 0.0;
    for (double x : u) sup = std::max(sup, std::abs(x));
    if (!(sup <= opts.blowup_level)) {
      tr.blowup = true;
      tr.blowup_time = t;
      snapshot(t, std::numeric_limits<double>::quiet_NaN());
      return tr;
    }
    const double e = energy_of(u, v, tr.ghost);
    tr.energy_drift = std::max(tr.energy_drift, std::abs(e - e0) / e_scale);
    if (n % opts.stride == 0 || n == steps) snapshot(t, e);
  }
  return tr;
}

}  // namespace

double discrete_energy(const RadialField& u, const RadialField& du, double ghost, bool nonlinear) {
  require_same_grid(u, du);
  const auto& g = *u.grid();
  const auto vol = g.cell_volumes();
  double kin = 0.0, pot = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    kin += vol[i] * du[i] * du[i];
    if (nonlinear) pot += vol[i] * potential_density(g.dim(), u[i]);
  }
  return 0.5 * kin + gradient_energy(g, u.values(), ghost) - pot;
}

double linearized_energy(const RadialField& S, const RadialField& h, const RadialField& dh,
                         double ghost) {
  require_same_grid(S, h);
  const auto& g = *h.grid();
  const auto vol = g.cell_volumes();
  const auto pot = linearized_potential(g.dim(), S.values());
  double kin = 0.0, p = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    kin += vol[i] * dh[i] * dh[i];
    p += vol[i] * pot[i] * h[i] * h[i];
  }
  return 0.5 * kin + gradient_energy(g, h.values(), ghost) - 0.5 * p;
}

Trajectory evolve_nonlinear(const RadialField& u0, const RadialField& u1,
                            const EvolutionOptions& opts) {
  const int n = u0.dim();
  const auto vol = u0.grid()->cell_volumes();
  return leapfrog(
      u0, u1, opts,
      [n](std::span<const double> u, std::span<double> acc) {
        for (std::size_t i = 0; i < u.size(); ++i) acc[i] += critical_nonlinearity(n, u[i]);
      },
      [&](std::span<const double> u, std::span<const double> v, double ghost) {
        double kin = 0.0, pot = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
          kin += vol[i] * v[i] * v[i];
          pot += vol[i] * potential_density(n, u[i]);
        }
        return 0.5 * kin + gradient_energy(*u0.grid(), u, ghost) - pot;
      });
}

Trajectory evolve_linearized(const RadialField& S, const RadialField& h0, const RadialField& h1,
                             const EvolutionOptions& opts) {
  require_same_grid(S, h0);
  const auto pot = linearized_potential(S.dim(), S.values());
  const auto vol = S.grid()->cell_volumes();
  return leapfrog(
      h0, h1, opts,
      [&pot](std::span<const double> u, std::span<double> acc) {
        for (std::size_t i = 0; i < u.size(); ++i) acc[i] += pot[i] * u[i];
      },
      [&](std::span<const double> u, std::span<const double> v, double ghost) {
        double kin = 0.0, p = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
          kin += vol[i] * v[i] * v[i];
          p += vol[i] * pot[i] * u[i] * u[i];
        }
        return 0.5 * kin + gradient_energy(*S.grid(), u, ghost) - 0.5 * p;
      });
}

double deviation_gradient_norm(const RadialField& f) {
  return hdot_norm(f.with_extension(Extension::none));
}

double product_norm(const RadialField& f, const RadialField& g) {
  const double a = deviation_gradient_norm(f);
  const double b = l2_norm(g.with_extension(Extension::none));
  return std::sqrt(a * a + b * b);
}

namespace {

// u - S - c Y and du + w c Y with c = eps e^{-w t}.
std::pair<RadialField, RadialField> expansion_residual(const RadialField& u, const RadialField& du,
                                                       const RadialField& S, const RadialField& Y,
                                                       double omega, double eps, double t) {
  const double c = eps * std::exp(-omega * t);
  std::vector<double> a(u.size()), b(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    a[i] = u[i] - S[i] - c * Y[i];
    b[i] = du[i] + omega * c * Y[i];
  }
  return {RadialField(u.grid(), std::move(a)), RadialField(u.grid(), std::move(b))};
}

}  // namespace

ExpansionReport track_expansion(const Trajectory& traj, const RadialField& S, const RadialField& Y,
                                double omega, double eps, double t_max, double lost_level) {
  require(!traj.u.empty(), Errc::invalid_argument, "empty trajectory");
  require_same_grid(traj.u.front(), S);
  require_same_grid(S, Y);
  ExpansionReport rep;
  std::vector<double> lt, ld;
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    const double t = traj.t[k];
    if (t > t_max + 1e-12) break;
    const auto [a, b] = expansion_residual(traj.u[k], traj.du[k], S, Y, omega, eps, t);
    const double d = product_norm(a, b);
    rep.t.push_back(t);
    rep.deviation.push_back(d);
    if (!(d <= lost_level)) {
      rep.tracking_lost = true;
      rep.exit_time = t;
      break;
    }
    rep.max_deviation = std::max(rep.max_deviation, d);
    if (d > 0.0) {
      lt.push_back(t);
      ld.push_back(std::log(d));
    }
  }
  if (lt.size() >= 3) rep.fitted_rate = -numerics::linear_fit(lt, ld)[1];
  return rep;
}

double ChannelWindow::radius(double t) const { return r0 + std::abs(t - t0); }

ExteriorEnergySeries exterior_energy(const Trajectory& traj, const ChannelWindow& w,
                                     const RadialField& S, const RadialField& Y, double omega,
                                     double eps) {
  require(w.r0 > 0.0 && w.t0 > 0.0, Errc::invalid_argument, "window needs r0, t0 > 0");
  require_same_grid(traj.u.front(), S);
  require_same_grid(S, Y);
  const auto& g = *traj.grid;
  const auto vol = g.cell_volumes();
  const double h = g.spacing();
  ExteriorEnergySeries out;
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    const double t = traj.t[k];
    const double rho = w.radius(t);
    const auto [a, b] = expansion_residual(traj.u[k], traj.du[k], S, Y, omega, eps, t);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.node(i) >= rho) acc += vol[i] * b[i] * b[i];
      if (i + 1 < g.size() && g.node(i) + 0.5 * h >= rho) {
        const double d = a[i + 1] - a[i];
        acc += g.face_area(i) * d * d / h;
      }
    }
    out.t.push_back(t);
    out.norm.push_back(std::sqrt(acc));
    out.max_norm = std::max(out.max_norm, out.norm.back());
  }
  return out;
}

ChannelReport channel_lower_bound(const Trajectory& traj, const RadialField& S,
                                  const RadialField& Y, double omega, double eps,
                                  const ChannelWindow& w) {
  require_same_grid(traj.u.front(), S);
  require_same_grid(S, Y);
  const auto& g = *traj.grid;
  const auto vol = g.cell_volumes();
  ChannelReport rep;
  rep.envelope = std::exp(-omega * (w.t0 + w.r0));
  double ymax = 0.0;
  for (double y : Y.values()) ymax = std::max(ymax, std::abs(y));
  if (ymax == 0.0 || eps == 0.0) {
    rep.vacuous = true;
    return rep;
  }
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    const double t = traj.t[k];
    if (t > w.t0 + 1e-12) break;
    const double lo = w.radius(t), hi = lo + 1.0;
    require(hi <= g.hull(), Errc::fit_window, "channel shell extends beyond the grid");
    const double c = eps * omega * std::exp(-omega * t);
    double s = 0.0, m = 0.0, e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = g.node(i);
      if (r < lo || r > hi) continue;
      const double dw = traj.du[k][i];
      const double mode = -c * Y[i];
      s += vol[i] * dw * dw;
      m += vol[i] * mode * mode;
      e += vol[i] * (dw - mode) * (dw - mode);
    }
    rep.t.push_back(t);
    rep.shell_norm.push_back(std::sqrt(s));
    rep.mode_norm.push_back(std::sqrt(m));
    require(s > 0.0, Errc::undefined_ratio, "shell norm vanishes");
    rep.C1 = std::max(rep.C1, rep.envelope / std::sqrt(s));
    if (m > 0.0) rep.contamination = std::max(rep.contamination, std::sqrt(e / m));
  }
  return rep;
}

namespace {

// (|S^{N-1}| int_rho^inf |f|^b r^{N-1} dr)^{1/b}; Gauss-Legendre near rho, mapped beyond.
double exterior_lb_norm(const RadialProfile& f, double rho, double b) {
  const int n = f.dim;
  const double mid = 2.0 * rho + 1.0;
  static const auto near = numerics::gauss_legendre(160, 0.0, 1.0);
  static const auto far = numerics::gauss_legendre(96, 0.0, 1.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < near.nodes.size(); ++k) {
    const double r = rho + (mid - rho) * near.nodes[k];
    acc += near.weights[k] * (mid - rho) * std::pow(std::abs(f.value(r)), b) * std::pow(r, n - 1);
  }
  for (std::size_t k = 0; k < far.nodes.size(); ++k) {
    const double xi = far.nodes[k];
    const double r = mid + mid * xi / (1.0 - xi);
    const double jac = mid / ((1.0 - xi) * (1.0 - xi));
    acc += far.weights[k] * jac * std::pow(std::abs(f.value(r)), b) * std::pow(r, n - 1);
  }
  return std::pow(sphere_area(n) * acc, 1.0 / b);
}

// (int_0^inf (weight(t) ||f||_{L^b(rho(t))})^a dt)^{1/a}.
template <class Weight>
double mixed_norm(const RadialProfile& f, const ChannelWindow& w, double a, double b,
                  Weight&& weight) {
  static const auto before = numerics::gauss_legendre(160, 0.0, 1.0);
  static const auto after = numerics::gauss_legendre(128, 0.0, 1.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < before.nodes.size(); ++k) {
    const double t = w.t0 * before.nodes[k];
    const double v = weight(t) * exterior_lb_norm(f, w.radius(t), b);
    acc += before.weights[k] * w.t0 * std::pow(v, a);
  }
  const double L = w.r0;
  for (std::size_t k = 0; k < after.nodes.size(); ++k) {
    const double xi = after.nodes[k];
    const double t = w.t0 + L * xi / (1.0 - xi);
    const double jac = L / ((1.0 - xi) * (1.0 - xi));
    const double v = weight(t) * exterior_lb_norm(f, w.radius(t), b);
    acc += after.weights[k] * jac * std::pow(v, a);
  }
  return std::pow(acc, 1.0 / a);
}

}  // namespace

TailBoundsReport tail_bounds_check(const RadialProfile& S, const RadialProfile& Y, double omega,
                                   const ChannelWindow& w) {
  require(w.r0 >= 1.0 && w.t0 > 0.0, Errc::invalid_argument, "window needs r0 >= 1, t0 > 0");
  require(S.dim == Y.dim, Errc::invalid_argument, "dimension mismatch");
  const int n = S.dim;
  const double a = (n + 2.0) / (n - 2.0);
  const double b = 2.0 * (n + 2.0) / (n - 2.0);
  TailBoundsReport rep;
  rep.s_norm = mixed_norm(S, w, a, b, [](double) { return 1.0; });
  rep.y_norm = mixed_norm(Y, w, a, b, [omega](double t) { return std::exp(-omega * t); });
  rep.s_ratio = rep.s_norm * std::pow(w.r0, 0.5 * n - 1.0);
  rep.y_ratio = rep.y_norm * std::exp(omega * (w.t0 + w.r0));
  return rep;
}

PipelineReport modulation_pipeline(const Trajectory& traj, const RadialField& Q,
                                   std::span<const EigenPair> eig, const DualFamily& fam,
                                   double t_max) {
  const RadialModulation mod(Q, fam);
  PipelineReport rep;
  double s_prev = 0.0;
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    const double t = traj.t[k];
    if (t > t_max + 1e-12) break;
    PipelineSample smp;
    smp.t = t;
    try {
      const auto fit = mod.fit(traj.u[k], s_prev);
      smp.A = fit.A;
      s_prev = fit.A.s;
      smp.amp = mode_amplitudes(traj.u[k], traj.du[k], fit.A, Q, eig);
    } catch (const Error& e) {
      if (e.code() != Errc::out_of_domain) throw;
      rep.truncated = true;
      rep.exit_time = t;
      break;
    }
    rep.samples.push_back(std::move(smp));
  }
  const std::size_t n = rep.samples.size();
  const std::size_t p = eig.size();
  for (std::size_t k = 0; k < n; ++k) {
    auto& s = rep.samples[k];
    s.dalpha_residual.assign(p, 0.0);
    s.dbeta_residual.assign(p, 0.0);
    if (n < 3) continue;
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 < n ? k + 1 : n - 1;
    const double dt = rep.samples[hi].t - rep.samples[lo].t;
    for (std::size_t j = 0; j < p; ++j) {
      const double da = (rep.samples[hi].amp.alpha[j] - rep.samples[lo].amp.alpha[j]) / dt;
      const double db = (rep.samples[hi].amp.beta[j] - rep.samples[lo].amp.beta[j]) / dt;
      const double w2 = eig[j].omega * eig[j].omega;
      s.dalpha_residual[j] = std::abs(da - s.amp.beta[j]);
      s.dbeta_residual[j] = std::abs(db - w2 * s.amp.alpha[j]);
    }
    const double d = s.amp.delta;
    if (d > 0.0) {
      const double ea = *std::max_element(s.dalpha_residual.begin(), s.dalpha_residual.end());
      const double eb = *std::max_element(s.dbeta_residual.begin(), s.dbeta_residual.end());
      rep.max_alpha_ratio = std::max(rep.max_alpha_ratio, ea / (d * d));
      rep.max_beta_ratio = std::max(rep.max_beta_ratio, eb / (s.A.norm() * d + d * d));
    }
  }
  return rep;
}

}  // namespace critwave

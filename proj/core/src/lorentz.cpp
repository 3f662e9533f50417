#include "critwave/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "critwave/error.hpp"
#include "critwave/numerics.hpp"

namespace critwave {

BoostMap::BoostMap(double speed) : l_(speed) {
  require(std::isfinite(speed) && std::abs(speed) < 1.0, Errc::invalid_velocity,
          "boost speed must satisfy |l| < 1");
  g_ = 1.0 / std::sqrt(1.0 - speed * speed);
}

void BoostMap::forward(double s, std::span<const double> y, double& t, std::span<double> x) const {
  const double y1 = y[0];
  t = g_ * (s + l_ * y1);
  for (std::size_t j = 1; j < y.size(); ++j) x[j] = y[j];
  x[0] = g_ * (y1 + l_ * s);
}

void BoostMap::inverse(double t, std::span<const double> x, double& s, std::span<double> y) const {
  const double x1 = x[0];
  s = g_ * (t - l_ * x1);
  for (std::size_t j = 1; j < x.size(); ++j) y[j] = x[j];
  y[0] = g_ * (x1 - l_ * t);
}

double cone_constant(double speed) {
  require(std::abs(speed) < 1.0, Errc::invalid_velocity, "boost speed must satisfy |l| < 1");
  const double a = std::abs(speed);
  return std::sqrt((1.0 + a) / (1.0 - a));
}

double compose_speeds(double l1, double l2) {
  require(std::abs(l1) < 1.0 && std::abs(l2) < 1.0, Errc::invalid_velocity,
          "boost speed must satisfy |l| < 1");
  return (l1 + l2) / (1.0 + l1 * l2);
}

void SpaceTimeField::validate() const {
  require(dim >= 3 && dim <= 5, Errc::invalid_argument, "dimension must be 3, 4 or 5");
  require(nt >= 4 && nx >= 4, Errc::invalid_grid, "space-time grid needs at least 4x4 nodes");
  require(dt > 0.0 && dx > 0.0, Errc::invalid_grid, "grid spacings must be positive");
  require(u.size() == nt * nx && ut.size() == nt * nx, Errc::invalid_grid,
          "value arrays do not match the grid");
  if (geometry == SliceGeometry::radial) {
    require(x0 == 0.0 || std::abs(x0 - 0.5 * dx) <= 1e-12 * dx, Errc::invalid_grid,
            "radial nodes must start at 0 or dx/2");
  }
  for (std::size_t k = 0; k < u.size(); ++k) {
    require(std::isfinite(u[k]) && std::isfinite(ut[k]), Errc::invalid_argument,
            "space-time field holds non-finite values");
  }
}

namespace {

// Stencil start and local coordinate for node spacing 1 in index space.
struct Stencil {
  long first;
  double frac;
};

Stencil time_stencil(double tau, std::size_t n) {
  long k = static_cast<long>(std::floor(tau));
  k = std::clamp<long>(k, 0, static_cast<long>(n) - 2);
  long first = std::clamp<long>(k - 1, 0, static_cast<long>(n) - 4);
  return {first, tau - static_cast<double>(first + 1)};
}

std::string range_message(const char* what, double v, double lo, double hi) {
  std::ostringstream os;
  os << what << " " << v << " lies outside the source coverage [" << lo << ", " << hi << "]";
  return os.str();
}

}  // namespace

SpaceTimeField::Sample SpaceTimeField::interpolate(double s, double y1) const {
  const double t_hi = time(nt - 1);
  const double tol = 1e-9 * std::max(1.0, std::abs(t_hi));
  require(s >= t0 - tol && s <= t_hi + tol, Errc::coverage, range_message("time", s, t0, t_hi));
  const double x_hi = coord(nx - 1);
  const double xtol = 1e-9 * std::max(1.0, std::abs(x_hi));
  double y = y1, sign = 1.0;
  if (geometry == SliceGeometry::radial) {
    y = std::abs(y1);
    sign = y1 < 0.0 ? -1.0 : 1.0;
    require(y <= x_hi + xtol, Errc::coverage, range_message("radius", y, 0.0, x_hi));
  } else {
    require(y >= x0 - xtol && y <= x_hi + xtol, Errc::coverage,
            range_message("position", y, x0, x_hi));
  }

  const auto ts = time_stencil((s - t0) / dt, nt);
  const auto tw = numerics::cubic_weights(ts.frac);

  // Spatial stencil; radial fields reflect evenly through r = 0.
  std::array<long, 4> idx{};
  double frac = 0.0;
  const double xi = (y - x0) / dx;
  if (geometry == SliceGeometry::radial && xi < 1.0) {
    const long k = static_cast<long>(std::floor(xi));
    for (int a = 0; a < 4; ++a) idx[static_cast<std::size_t>(a)] = k - 1 + a;
    frac = xi - static_cast<double>(k);
    for (auto& i : idx) {
      if (i < 0) i = x0 == 0.0 ? -i : -1 - i;
    }
  } else {
    const auto st = time_stencil(xi, nx);
    for (int a = 0; a < 4; ++a) idx[static_cast<std::size_t>(a)] = st.first + a;
    frac = st.frac;
  }
  const auto xw = numerics::cubic_weights(frac);
  const auto xd = numerics::cubic_weight_derivs(frac);

  Sample out;
  for (int a = 0; a < 4; ++a) {
    const auto k = static_cast<std::size_t>(ts.first + a);
    double row_u = 0.0, row_ut = 0.0, row_uy = 0.0;
    for (int b = 0; b < 4; ++b) {
      const auto i = static_cast<std::size_t>(idx[static_cast<std::size_t>(b)]);
      row_u += xw[static_cast<std::size_t>(b)] * at(k, i);
      row_ut += xw[static_cast<std::size_t>(b)] * dt_at(k, i);
      row_uy += xd[static_cast<std::size_t>(b)] * at(k, i);
    }
    out.u += tw[static_cast<std::size_t>(a)] * row_u;
    out.ut += tw[static_cast<std::size_t>(a)] * row_ut;
    out.uy += tw[static_cast<std::size_t>(a)] * row_uy;
  }
  out.uy *= sign / dx;
  if (geometry == SliceGeometry::radial && y1 == 0.0) out.uy = 0.0;
  return out;
}

SpaceTimeField from_trajectory(const Trajectory& traj) {
  require(traj.t.size() >= 4, Errc::invalid_grid, "trajectory needs at least 4 snapshots");
  const double dt = traj.t[1] - traj.t[0];
  for (std::size_t k = 1; k < traj.t.size(); ++k) {
    require(std::abs(traj.t[k] - traj.t[k - 1] - dt) <= 1e-9 * dt, Errc::invalid_grid,
            "snapshot times must be uniform");
  }
  const auto& g = *traj.grid;
  SpaceTimeField f;
  f.dim = g.dim();
  f.geometry = SliceGeometry::radial;
  f.t0 = traj.t.front();
  f.dt = dt;
  f.nt = traj.t.size();
  f.dx = g.spacing();
  f.x0 = 0.5 * g.spacing();
  f.nx = g.size();
  f.u.reserve(f.nt * f.nx);
  f.ut.reserve(f.nt * f.nx);
  for (std::size_t k = 0; k < f.nt; ++k) {
    f.u.insert(f.u.end(), traj.u[k].values().begin(), traj.u[k].values().end());
    f.ut.insert(f.ut.end(), traj.du[k].values().begin(), traj.du[k].values().end());
  }
  f.validate();
  return f;
}

SpaceTimeField static_field(const RadialProfile& Q, double t0, double dt, std::size_t nt,
                            double dx, std::size_t nx) {
  SpaceTimeField f;
  f.dim = Q.dim;
  f.geometry = SliceGeometry::radial;
  f.t0 = t0;
  f.dt = dt;
  f.nt = nt;
  f.x0 = 0.0;
  f.dx = dx;
  f.nx = nx;
  std::vector<double> row(nx);
  for (std::size_t i = 0; i < nx; ++i) row[i] = Q.value(f.coord(i));
  for (std::size_t k = 0; k < nt; ++k) f.u.insert(f.u.end(), row.begin(), row.end());
  f.ut.assign(nt * nx, 0.0);
  f.validate();
  return f;
}

SpaceTimeField transform_field(const SpaceTimeField& src, double speed, const SliceWindow& w) {
  src.validate();
  const BoostMap boost(speed);
  const double g = boost.lorentz_factor();
  SpaceTimeField out;
  out.dim = src.dim;
  out.geometry = SliceGeometry::axis;
  out.t0 = w.t0;
  out.dt = w.dt;
  out.nt = w.nt;
  out.x0 = w.x0;
  out.dx = w.dx;
  out.nx = w.nx;
  out.u.resize(w.nt * w.nx);
  out.ut.resize(w.nt * w.nx);
  for (std::size_t k = 0; k < w.nt; ++k) {
    const double t = out.time(k);
    for (std::size_t i = 0; i < w.nx; ++i) {
      const double x[1] = {out.coord(i)};
      double s = 0.0, y[1];
      boost.inverse(t, x, s, y);
      const auto smp = src.interpolate(s, y[0]);
      out.at(k, i) = smp.u;
      out.dt_at(k, i) = g * (smp.ut - speed * smp.uy);
    }
  }
  out.validate();
  return out;
}

double cone_support_excess(const SpaceTimeField& f, double apex_t, double apex_x,
                           double threshold) {
  double excess = 0.0;
  for (std::size_t k = 0; k < f.nt; ++k) {
    const double radius = std::abs(f.time(k) - apex_t);
    for (std::size_t i = 0; i < f.nx; ++i) {
      if (std::abs(f.at(k, i)) <= threshold) continue;
      const double x = f.geometry == SliceGeometry::radial ? f.coord(i) : f.coord(i) - apex_x;
      excess = std::max(excess, (std::abs(x) - radius) / f.dx);
    }
  }
  return excess;
}

namespace {

MomentumReport finish(double energy, Eigen::VectorXd momentum, double speed, double scale) {
  require(energy > 1e-12 * scale, Errc::undefined_ratio,
          "energy is within quadrature noise; -P/E is undefined");
  MomentumReport rep;
  rep.energy = energy;
  rep.momentum = std::move(momentum);
  rep.ratio = -rep.momentum / energy;
  Eigen::VectorXd target = Eigen::VectorXd::Zero(rep.ratio.size());
  target[0] = speed;
  const double err = (rep.ratio - target).cwiseAbs().maxCoeff();
  rep.mismatch = speed != 0.0 ? err / std::abs(speed) : err;
  return rep;
}

}  // namespace

MomentumReport momentum_ratio_check(const CartesianField& u0, const CartesianField& u1,
                                    double speed) {
  require(std::abs(speed) < 1.0, Errc::invalid_velocity, "boost speed must satisfy |l| < 1");
  const double e = energy(u0, u1);
  return finish(e, momentum(u0, u1), speed, hdot_norm_squared(u0) + l2_norm(u1) * l2_norm(u1));
}

MomentumReport momentum_ratio_check(const RadialProfile& Q, double speed,
                                    const AxisymmetricQuadrature& quad) {
  const auto in = boost_integrals(Q, speed, quad);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(Q.dim);
  p[0] = in.momentum;
  return finish(in.energy, std::move(p), speed, in.grad_sq + in.dt_sq);
}

}  // namespace critwave

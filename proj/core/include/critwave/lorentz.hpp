#pragma once

// Lorentz boosts along e_1: coordinates, space-time reinterpolation of fields
// and the momentum/energy ratio of boosted stationary profiles.
//
//   (t, x) = phi_l(s, y) = (g (s + l y_1), g (y_1 + l s), y'),  g = 1/sqrt(1 - l^2),
//   u_l(t, x) = u(g (t - l x_1), g (x_1 - l t), x').

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "critwave/discretization.hpp"
#include "critwave/evolution.hpp"
#include "critwave/stationary.hpp"

namespace critwave {

class BoostMap {
 public:
  explicit BoostMap(double speed);

  double speed() const { return l_; }
  double lorentz_factor() const { return g_; }
  /// (s, y) -> (t, x); y and x hold dim entries (x may alias y).
  void forward(double s, std::span<const double> y, double& t, std::span<double> x) const;
  /// (t, x) -> (s, y).
  void inverse(double t, std::span<const double> x, double& s, std::span<double> y) const;

 private:
  double l_;
  double g_;
};

/// c_l = sqrt((1 + |l|) / (1 - |l|)).
double cone_constant(double speed);
/// Relativistic velocity addition (l1 + l2) / (1 + l1 l2).
double compose_speeds(double l1, double l2);

enum class SliceGeometry {
  radial,  ///< u(t, |x|); nodes r_i = x0 + i dx with x0 = 0 or dx/2
  axis,    ///< u(t, x_1 e_1) on the symmetry axis; nodes x_i = x0 + i dx
};

/// u and d_t u on a uniform space-time grid, row k holding time t0 + k dt.
struct SpaceTimeField {
  int dim = 3;
  SliceGeometry geometry = SliceGeometry::axis;
  double t0 = 0.0, dt = 1.0;
  std::size_t nt = 0;
  double x0 = 0.0, dx = 1.0;
  std::size_t nx = 0;
  std::vector<double> u, ut;

  double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
  double coord(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  double& at(std::size_t k, std::size_t i) { return u[k * nx + i]; }
  double at(std::size_t k, std::size_t i) const { return u[k * nx + i]; }
  double& dt_at(std::size_t k, std::size_t i) { return ut[k * nx + i]; }
  double dt_at(std::size_t k, std::size_t i) const { return ut[k * nx + i]; }

  /// Checks sizes, uniform spacing and finiteness.
  void validate() const;

  struct Sample {
    double u = 0.0, ut = 0.0, uy = 0.0;  ///< value, time derivative, d/dy_1
  };
  /// Tensor-product cubic interpolation at (s, y_1) on the axis; radial
  /// fields are evaluated at |y_1|. Raises Errc::coverage outside the grid.
  Sample interpolate(double s, double y1) const;
};

/// Radial space-time field from uniformly spaced trajectory snapshots.
SpaceTimeField from_trajectory(const Trajectory& traj);
/// Time-independent radial field u(t, r) = Q(r) on [t0, t0 + (nt-1) dt] x [0, r_max].
SpaceTimeField static_field(const RadialProfile& Q, double t0, double dt, std::size_t nt,
                            double dx, std::size_t nx);

/// Output window of a transform: axis slice with the given uniform grids.
struct SliceWindow {
  double t0 = 0.0, dt = 1.0;
  std::size_t nt = 0;
  double x0 = 0.0, dx = 1.0;
  std::size_t nx = 0;
};

/// u_l on the window, with d_t u_l = g (u_s - l u_{y_1}).
SpaceTimeField transform_field(const SpaceTimeField& src, double speed, const SliceWindow& window);

/// Largest distance (in grid cells) by which the support {|u| > threshold}
/// of row k exceeds the cone |x_1 - apex_x| <= |t - apex_t|; max over rows.
double cone_support_excess(const SpaceTimeField& f, double apex_t, double apex_x,
                           double threshold);

struct MomentumReport {
  double energy = 0.0;
  Eigen::VectorXd momentum;  ///< int d_t u grad u
  Eigen::VectorXd ratio;     ///< -P / E
  double mismatch = 0.0;     ///< max_j |ratio_j - l delta_1j|, relative to |l| when l != 0
};

/// Box quadrature of a sampled boosted profile at fixed time.
MomentumReport momentum_ratio_check(const CartesianField& u0, const CartesianField& u1,
                                    double speed);
/// Quadrature over R^N of Q boosted by speed e_1 (transverse momentum vanishes by symmetry).
MomentumReport momentum_ratio_check(const RadialProfile& Q, double speed,
                                    const AxisymmetricQuadrature& quad);

}  // namespace critwave

#pragma once

// Ground state, stationary residuals, conserved quantities and boosted profiles.

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "critwave/discretization.hpp"

namespace critwave {

/// W(r) = (1 + r^2/(N(N-2)))^{-(N-2)/2}.
double eval_W(int dim, double r);
/// dW/dr.
double eval_W_derivative(int dim, double r);
/// lim r^{N-2} W(r) = (N(N-2))^{(N-2)/2}.
double W_tail_constant(int dim);

/// sign * lambda^{(N-2)/2} W(lambda (x - center)).
struct GroundState {
  int dim = 3;
  double lambda = 1.0;
  Eigen::VectorXd center;
  int sign = 1;

  static GroundState standard(int dim);
  double operator()(const double* x) const;
};

/// |u|^{4/(N-2)} u, computed without fractional powers of negative numbers.
double critical_nonlinearity(int dim, double u);
/// Derivative (N+2)/(N-2) |u|^{4/(N-2)}.
double critical_nonlinearity_derivative(int dim, double u);

/// W sampled on the grid, power-law tail enabled.
RadialField sample_W(RadialGridPtr grid);
/// W sampled on a Cartesian box, zero extension.
CartesianField sample_W(CartesianGridPtr grid);

/// Solution of the discrete stationary equation on `grid` with the outer ghost
/// value pinned to W; Newton iteration started from sampled W.
RadialField discrete_ground_state(RadialGridPtr grid, double tol = 1e-13, int max_iter = 30);

/// Interior max of |Delta Q + |Q|^{4/(N-2)} Q|.
double stationary_residual(const RadialField& Q);
double stationary_residual(const CartesianField& Q);
/// Same, restricted to r <= r_cut.
double stationary_residual(const RadialField& Q, double r_cut);

double energy(const RadialField& u0, const RadialField& u1);
double energy(const CartesianField& u0, const CartesianField& u1);

/// Components int u1 d_j u0.
Eigen::VectorXd momentum(const CartesianField& u0, const CartesianField& u1);

/// Uniqueness diagnostic: ||grad Q||^2 < 2 ||grad W||^2.
bool below_uniqueness_threshold(const RadialField& Q);
bool below_uniqueness_threshold(const CartesianField& Q);

/// (2N - 2(N-1) l^2) / (N sqrt(1 - l^2)).
double threshold_function(int dim, double speed);
/// Infimum of threshold_function over [0, 1) by golden-section search.
double threshold_infimum(int dim);

/// A radial profile given by value and derivative callbacks.
struct RadialProfile {
  int dim = 3;
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  static RadialProfile ground_state(int dim);
  /// Wraps a sampled field (its extension decides the far field).
  static RadialProfile from_field(const RadialField& f);
};

/// Q_l(t, x) = Q(x + (g - 1)(lhat . (x - t l)) lhat - t l), g = 1/sqrt(1 - |l|^2).
class BoostedProfile {
 public:
  BoostedProfile(RadialProfile q, Eigen::VectorXd velocity);

  int dim() const { return q_.dim; }
  const Eigen::VectorXd& velocity() const { return l_; }
  double lorentz_factor() const { return gamma_; }

  double value(double t, const double* x) const;
  /// d_t Q_l = -l . grad_x Q_l.
  double time_derivative(double t, const double* x) const;
  void gradient(double t, const double* x, double* grad) const;

 private:
  void boosted_point(double t, const double* x, double* y) const;

  RadialProfile q_;
  Eigen::VectorXd l_;
  Eigen::VectorXd lhat_;
  double gamma_;
};

/// (Q_l(t), d_t Q_l(t)) sampled on a Cartesian box (zero extension).
std::array<CartesianField, 2> boost_profile(const RadialProfile& Q, const Eigen::VectorXd& velocity,
                                            double t, CartesianGridPtr grid);

/// Quadrature over R^N for functions that are axially symmetric about a unit
/// vector: r = L xi/(1 - xi) with Gauss-Legendre in xi, Gauss-Legendre in the
/// polar angle. Nodes are given as (axial z, transverse rho).
class AxisymmetricQuadrature {
 public:
  AxisymmetricQuadrature(int dim, std::size_t radial_nodes = 400, std::size_t angular_nodes = 96,
                         double length_scale = 4.0);

  struct Node {
    double z, rho, weight;
  };
  const std::vector<Node>& nodes() const { return nodes_; }
  int dim() const { return dim_; }

  double integrate(const std::function<double(double z, double rho)>& f) const;

 private:
  int dim_;
  std::vector<Node> nodes_;
};

/// Conserved quantities of Q_l(0) computed by axisymmetric quadrature.
struct BoostIntegrals {
  double grad_sq = 0.0;      ///< ||grad Q_l(0)||^2
  double dt_sq = 0.0;        ///< ||d_t Q_l(0)||^2
  double potential = 0.0;    ///< int |Q_l(0)|^{2N/(N-2)}
  double energy = 0.0;
  double momentum = 0.0;     ///< component along l (the transverse ones vanish)
};
BoostIntegrals boost_integrals(const RadialProfile& Q, double speed,
                               const AxisymmetricQuadrature& quad);

struct BoostCheckReport {
  double speed = 0.0;
  double grad_q_sq = 0.0;             ///< ||grad Q||^2 (unboosted)
  double pohozaev_mismatch = 0.0;     ///< | ||d_1 Q||^2 - ||grad Q||^2/N | / (||grad Q||^2/N)
  double gradient_mismatch = 0.0;     ///< boosted gradient identity, relative
  double time_derivative_mismatch = 0.0;  ///< boosted d_t identity, relative (absolute when l = 0)
  double energy_mismatch = 0.0;       ///< E_l vs E/sqrt(1-l^2), relative
  double momentum_ratio = 0.0;        ///< -P/E along l
  double momentum_ratio_mismatch = 0.0;  ///< |(-P/E) - |l|| / |l| (absolute when l = 0)
};
BoostCheckReport boost_checks(const RadialProfile& Q, double speed,
                              const AxisymmetricQuadrature& quad);

}  // namespace critwave

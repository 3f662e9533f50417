#include "critwave/stationary.hpp"

#include <cmath>
#include <numbers>

#include "critwave/error.hpp"
#include "critwave/numerics.hpp"

namespace critwave {

double eval_W(int dim, double r) {
  require(dim >= 3 && dim <= 5, Errc::invalid_argument, "W is defined for N in {3,4,5}");
  const double n = dim;
  return std::pow(1.0 + r * r / (n * (n - 2.0)), -(n - 2.0) / 2.0);
}

double eval_W_derivative(int dim, double r) {
  require(dim >= 3 && dim <= 5, Errc::invalid_argument, "W is defined for N in {3,4,5}");
  const double n = dim;
  return -(r / n) * std::pow(1.0 + r * r / (n * (n - 2.0)), -n / 2.0);
}

double W_tail_constant(int dim) {
  const double n = dim;
  return std::pow(n * (n - 2.0), (n - 2.0) / 2.0);
}

GroundState GroundState::standard(int dim) {
  GroundState g;
  g.dim = dim;
  g.center = Eigen::VectorXd::Zero(dim);
  return g;
}

double GroundState::operator()(const double* x) const {
  require(lambda > 0.0, Errc::invalid_argument, "ground-state scale must be positive");
  double r2 = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double d = x[k] - (center.size() > 0 ? center[k] : 0.0);
    r2 += d * d;
  }
  return sign * std::pow(lambda, (dim - 2) / 2.0) * eval_W(dim, lambda * std::sqrt(r2));
}

double critical_nonlinearity(int dim, double u) {
  const double a = std::abs(u);
  switch (dim) {
    case 3:
      return u * a * a * a * a;
    case 4:
      return u * a * a;
    case 5:
      return u * std::cbrt(a * a * a * a);
    default:
      fail(Errc::invalid_argument, "nonlinearity defined for N in {3,4,5}");
  }
}

double critical_nonlinearity_derivative(int dim, double u) {
  const double a = std::abs(u);
  switch (dim) {
    case 3:
      return 5.0 * a * a * a * a;
    case 4:
      return 3.0 * a * a;
    case 5:
      return (7.0 / 3.0) * std::cbrt(a * a * a * a);
    default:
      fail(Errc::invalid_argument, "nonlinearity defined for N in {3,4,5}");
  }
}

RadialField sample_W(RadialGridPtr grid) {
  const int n = grid->dim();
  return RadialField::sample(
      std::move(grid), [n](double r) { return eval_W(n, r); }, Extension::power_law);
}

CartesianField sample_W(CartesianGridPtr grid) {
  const int n = grid->dim();
  return CartesianField::sample(
      std::move(grid),
      [n](const double* x) {
        double r2 = 0.0;
        for (int k = 0; k < n; ++k) r2 += x[k] * x[k];
        return eval_W(n, std::sqrt(r2));
      },
      Extension::zero);
}

RadialField discrete_ground_state(RadialGridPtr grid, double tol, int max_iter) {
  const auto& g = *grid;
  const int n = g.dim();
  const std::size_t m = g.size();
  const double h = g.spacing();
  const double ghost = eval_W(n, g.hull() + h);
  const auto vol = g.cell_volumes();
  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = eval_W(n, g.node(i));

  // Volume-weighted residual: K v + ghost flux + V f(v), K the symmetric stiffness.
  auto residual = [&](const std::vector<double>& u, std::vector<double>& res) {
    double inner = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double next = i + 1 < m ? u[i + 1] : ghost;
      const double outer = g.face_area(i) * (next - u[i]) / h;
      res[i] = outer - inner + vol[i] * critical_nonlinearity(n, u[i]);
      inner = outer;
    }
  };

  std::vector<double> res(m), dv(m);
  numerics::SymTridiag J;
  J.diag.resize(m);
  J.off.resize(m - 1);
  for (int it = 0; it < max_iter; ++it) {
    residual(v, res);
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) worst = std::max(worst, std::abs(res[i]) / vol[i]);
    if (worst < tol) break;
    for (std::size_t i = 0; i < m; ++i) {
      const double left = i > 0 ? g.face_area(i - 1) : 0.0;
      J.diag[i] = -(left + g.face_area(i)) / h + vol[i] * critical_nonlinearity_derivative(n, v[i]);
      if (i + 1 < m) J.off[i] = g.face_area(i) / h;
    }
    require(numerics::solve_shifted(J, 0.0, res, dv), Errc::solver,
            "singular Jacobian in the discrete ground-state solve");
    for (std::size_t i = 0; i < m; ++i) v[i] -= dv[i];
  }
  return RadialField(std::move(grid), std::move(v), Extension::power_law);
}

double stationary_residual(const RadialField& Q) {
  return stationary_residual(Q, std::numeric_limits<double>::infinity());
}

double stationary_residual(const RadialField& Q, double r_cut) {
  auto res = laplacian(Q);
  std::vector<double> v(res.values().begin(), res.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += critical_nonlinearity(Q.dim(), Q[i]);
  return interior_max_abs(RadialField(Q.grid(), std::move(v)), r_cut);
}

double stationary_residual(const CartesianField& Q) {
  auto lap = laplacian(Q);
  std::vector<double> v(lap.values().begin(), lap.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += critical_nonlinearity(Q.dim(), Q[i]);
  return interior_max_abs(CartesianField(Q.grid(), std::move(v)));
}

double energy(const RadialField& u0, const RadialField& u1) {
  const int n = u0.dim();
  const double l2 = u1.size() == 0 ? 0.0 : lp_integral(u1, 2.0);
  return 0.5 * hdot_norm_squared(u0) + 0.5 * l2 -
         (n - 2.0) / (2.0 * n) * lp_integral(u0, critical_exponent(n));
}

double energy(const CartesianField& u0, const CartesianField& u1) {
  const int n = u0.dim();
  const double l2 = u1.size() == 0 ? 0.0 : lp_integral(u1, 2.0);
  return 0.5 * hdot_norm_squared(u0) + 0.5 * l2 -
         (n - 2.0) / (2.0 * n) * lp_integral(u0, critical_exponent(n));
}

Eigen::VectorXd momentum(const CartesianField& u0, const CartesianField& u1) {
  const int n = u0.dim();
  Eigen::VectorXd p(n);
  for (int j = 0; j < n; ++j) p[j] = integrate_product(u1, partial_derivative(u0, j));
  return p;
}

bool below_uniqueness_threshold(const RadialField& Q) {
  const auto W = sample_W(Q.grid());
  return hdot_norm_squared(Q) < 2.0 * hdot_norm_squared(W);
}

bool below_uniqueness_threshold(const CartesianField& Q) {
  const auto W = sample_W(Q.grid());
  return hdot_norm_squared(Q) < 2.0 * hdot_norm_squared(W);
}

double threshold_function(int dim, double speed) {
  require(std::abs(speed) < 1.0, Errc::invalid_velocity, "speed must satisfy |l| < 1");
  const double n = dim;
  const double l2 = speed * speed;
  return (2.0 * n - 2.0 * (n - 1.0) * l2) / (n * std::sqrt(1.0 - l2));
}

double threshold_infimum(int dim) {
  const double arg = numerics::golden_min(
      [dim](double l) { return threshold_function(dim, l); }, 0.0, 1.0 - 1e-9, 1e-12);
  return threshold_function(dim, arg);
}

// ---- profiles and boosts ----------------------------------------------------

RadialProfile RadialProfile::ground_state(int dim) {
  return {dim, [dim](double r) { return eval_W(dim, r); },
          [dim](double r) { return eval_W_derivative(dim, r); }};
}

RadialProfile RadialProfile::from_field(const RadialField& f) {
  return {f.dim(), [f](double r) { return f(r); }, [f](double r) { return f.derivative(r); }};
}

BoostedProfile::BoostedProfile(RadialProfile q, Eigen::VectorXd velocity)
    : q_(std::move(q)), l_(std::move(velocity)) {
  require(l_.size() == q_.dim, Errc::invalid_argument, "velocity dimension mismatch");
  const double speed = l_.norm();
  require(speed < 1.0, Errc::invalid_velocity, "boost speed must satisfy |l| < 1");
  gamma_ = 1.0 / std::sqrt(1.0 - speed * speed);
  lhat_ = speed > 0.0 ? Eigen::VectorXd(l_ / speed) : Eigen::VectorXd::Zero(q_.dim);
}

void BoostedProfile::boosted_point(double t, const double* x, double* y) const {
  const int n = q_.dim;
  double axial = 0.0;
  for (int k = 0; k < n; ++k) axial += lhat_[k] * (x[k] - t * l_[k]);
  for (int k = 0; k < n; ++k) y[k] = x[k] - t * l_[k] + (gamma_ - 1.0) * axial * lhat_[k];
}

double BoostedProfile::value(double t, const double* x) const {
  double y[5];
  boosted_point(t, x, y);
  return q_.value(Eigen::Map<const Eigen::VectorXd>(y, q_.dim).norm());
}

void BoostedProfile::gradient(double t, const double* x, double* grad) const {
  const int n = q_.dim;
  double y[5];
  boosted_point(t, x, y);
  const double r = Eigen::Map<const Eigen::VectorXd>(y, n).norm();
  const double dq = r > 0.0 ? q_.derivative(r) / r : 0.0;
  // grad_x = J grad Q(y), J = I + (g - 1) lhat lhat^T.
  double axial = 0.0;
  for (int k = 0; k < n; ++k) axial += lhat_[k] * y[k];
  for (int k = 0; k < n; ++k) grad[k] = dq * (y[k] + (gamma_ - 1.0) * axial * lhat_[k]);
}

double BoostedProfile::time_derivative(double t, const double* x) const {
  double g[5];
  gradient(t, x, g);
  double acc = 0.0;
  for (int k = 0; k < q_.dim; ++k) acc -= l_[k] * g[k];
  return acc;
}

std::array<CartesianField, 2> boost_profile(const RadialProfile& Q, const Eigen::VectorXd& velocity,
                                            double t, CartesianGridPtr grid) {
  require(grid->dim() == Q.dim, Errc::invalid_argument, "dimension mismatch");
  const BoostedProfile bp(Q, velocity);
  std::vector<double> u(grid->size()), du(grid->size());
  double x[5];
  for (std::size_t i = 0; i < u.size(); ++i) {
    grid->point(i, x);
    u[i] = bp.value(t, x);
    du[i] = bp.time_derivative(t, x);
  }
  return {CartesianField(grid, std::move(u), Extension::zero),
          CartesianField(grid, std::move(du), Extension::zero)};
}

AxisymmetricQuadrature::AxisymmetricQuadrature(int dim, std::size_t radial_nodes,
                                               std::size_t angular_nodes, double length_scale)
    : dim_(dim) {
  require(dim >= 2, Errc::invalid_argument, "axisymmetric quadrature needs N >= 2");
  const auto xi = numerics::gauss_legendre(radial_nodes, 0.0, 1.0);
  const auto th = numerics::gauss_legendre(angular_nodes, 0.0, std::numbers::pi);
  const double transverse_area = sphere_area(dim - 1);
  nodes_.reserve(radial_nodes * angular_nodes);
  for (std::size_t i = 0; i < radial_nodes; ++i) {
    const double s = xi.nodes[i];
    const double r = length_scale * s / (1.0 - s);
    const double dr = length_scale / ((1.0 - s) * (1.0 - s)) * xi.weights[i];
    for (std::size_t j = 0; j < angular_nodes; ++j) {
      const double t = th.nodes[j];
      const double w = transverse_area * std::pow(r, dim - 1) * std::pow(std::sin(t), dim - 2) *
                       dr * th.weights[j];
      nodes_.push_back({r * std::cos(t), r * std::sin(t), w});
    }
  }
}

double AxisymmetricQuadrature::integrate(
    const std::function<double(double, double)>& f) const {
  double acc = 0.0;
  for (const auto& node : nodes_) acc += node.weight * f(node.z, node.rho);
  return acc;
}

BoostIntegrals boost_integrals(const RadialProfile& Q, double speed,
                               const AxisymmetricQuadrature& quad) {
  require(std::abs(speed) < 1.0, Errc::invalid_velocity, "boost speed must satisfy |l| < 1");
  require(quad.dim() == Q.dim, Errc::invalid_argument, "dimension mismatch");
  const int n = Q.dim;
  const double g = 1.0 / std::sqrt(1.0 - speed * speed);
  const double p = critical_exponent(n);
  BoostIntegrals out;
  for (const auto& node : quad.nodes()) {
    const double R = std::hypot(g * node.z, node.rho);
    const double q = Q.value(R);
    const double dq = R > 0.0 ? Q.derivative(R) / R : 0.0;
    const double dz = g * g * node.z * dq;
    const double drho = node.rho * dq;
    out.grad_sq += node.weight * (dz * dz + drho * drho);
    out.dt_sq += node.weight * speed * speed * dz * dz;
    out.potential += node.weight * std::pow(std::abs(q), p);
    out.momentum += node.weight * (-speed * dz) * dz;
  }
  out.energy = 0.5 * out.grad_sq + 0.5 * out.dt_sq - (n - 2.0) / (2.0 * n) * out.potential;
  return out;
}

BoostCheckReport boost_checks(const RadialProfile& Q, double speed,
                              const AxisymmetricQuadrature& quad) {
  const int n = Q.dim;
  const auto rest = boost_integrals(Q, 0.0, quad);
  const auto moving = boost_integrals(Q, speed, quad);
  double axial_sq = 0.0;
  for (const auto& node : quad.nodes()) {
    const double R = std::hypot(node.z, node.rho);
    const double d = R > 0.0 ? Q.derivative(R) * node.z / R : 0.0;
    axial_sq += node.weight * d * d;
  }
  const double G = rest.grad_sq;
  const double l2 = speed * speed;
  const double root = std::sqrt(1.0 - l2);
  BoostCheckReport rep;
  rep.speed = speed;
  rep.grad_q_sq = G;
  rep.pohozaev_mismatch = std::abs(axial_sq - G / n) / (G / n);
  const double grad_expected = (n - (n - 1.0) * l2) / (n * root) * G;
  rep.gradient_mismatch = std::abs(moving.grad_sq - grad_expected) / grad_expected;
  const double dt_expected = l2 / (n * root) * G;
  rep.time_derivative_mismatch = speed == 0.0 ? moving.dt_sq
                                              : std::abs(moving.dt_sq - dt_expected) / dt_expected;
  const double e_expected = rest.energy / root;
  rep.energy_mismatch = std::abs(moving.energy - e_expected) / std::abs(e_expected);
  require(moving.energy > 1e-12, Errc::undefined_ratio, "energy too small for -P/E");
  rep.momentum_ratio = -moving.momentum / moving.energy;
  rep.momentum_ratio_mismatch = speed == 0.0
                                    ? std::abs(rep.momentum_ratio)
                                    : std::abs(rep.momentum_ratio - std::abs(speed)) / std::abs(speed);
  return rep;
}

}  // namespace critwave

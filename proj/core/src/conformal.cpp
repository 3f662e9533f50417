#include "critwave/conformal.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "critwave/error.hpp"

namespace critwave {

namespace {

constexpr double kPoleTol = 1e-12;
constexpr double kDomainTol = 1e-12;
constexpr double kBranchTol = 1e-6;

void check_dim(int dim) {
  require(dim >= 2 && dim <= 5, Errc::invalid_argument, "conformal maps support 2 <= N <= 5");
}

void check_params(const GroupParams& A) {
  check_dim(A.dim);
  const auto n = static_cast<Eigen::Index>(A.dim);
  require(A.a.size() == n && A.b.size() == n &&
              A.c.size() == static_cast<Eigen::Index>(rotation_dimension(A.dim)),
          Errc::invalid_argument, "group parameter sizes do not match N");
  require(std::isfinite(A.s) && A.a.allFinite() && A.b.allFinite() && A.c.allFinite(),
          Errc::invalid_argument, "group parameters must be finite");
}

}  // namespace

std::size_t rotation_dimension(int dim) {
  return static_cast<std::size_t>(dim * (dim - 1) / 2);
}

std::size_t group_dimension(int dim) {
  return static_cast<std::size_t>(2 * dim + 1) + rotation_dimension(dim);
}

std::size_t zeta(int dim, int i, int j) {
  require(0 <= i && i < j && j < dim, Errc::invalid_argument, "zeta needs 0 <= i < j < N");
  std::size_t k = 0;
  for (int p = 0; p < i; ++p) k += static_cast<std::size_t>(dim - 1 - p);
  return k + static_cast<std::size_t>(j - i - 1);
}

std::pair<int, int> zeta_pair(int dim, std::size_t k) {
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      if (k-- == 0) return {i, j};
    }
  }
  fail(Errc::invalid_argument, "rotation coordinate index out of range");
}

GroupParams GroupParams::identity(int dim) {
  check_dim(dim);
  GroupParams A;
  A.dim = dim;
  A.a = Eigen::VectorXd::Zero(dim);
  A.b = Eigen::VectorXd::Zero(dim);
  A.c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rotation_dimension(dim)));
  return A;
}

GroupParams GroupParams::from_flat(int dim, std::span<const double> v) {
  require(v.size() == group_dimension(dim), Errc::invalid_argument,
          "flat parameter vector has wrong length");
  GroupParams A = identity(dim);
  std::size_t k = 0;
  A.s = v[k++];
  for (int i = 0; i < dim; ++i) A.a[i] = v[k++];
  for (int i = 0; i < dim; ++i) A.b[i] = v[k++];
  for (Eigen::Index i = 0; i < A.c.size(); ++i) A.c[i] = v[k++];
  return A;
}

Eigen::VectorXd GroupParams::flat() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(group_dimension(dim)));
  v << s, a, b, c;
  return v;
}

Eigen::MatrixXd skew_from_coords(int dim, const Eigen::VectorXd& c) {
  require(c.size() == static_cast<Eigen::Index>(rotation_dimension(dim)), Errc::invalid_argument,
          "rotation coordinate count does not match N");
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const auto [i, j] = zeta_pair(dim, static_cast<std::size_t>(k));
    S(i, j) = c[k];
    S(j, i) = -c[k];
  }
  return S;
}

Eigen::MatrixXd rotation_from_coords(int dim, const Eigen::VectorXd& c) {
  const Eigen::MatrixXd S = skew_from_coords(dim, c);
  return S.exp();
}

Eigen::VectorXd coords_from_rotation(const Eigen::MatrixXd& R) {
  const int dim = static_cast<int>(R.rows());
  Eigen::EigenSolver<Eigen::MatrixXd> es(R, false);
  double max_angle = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    max_angle = std::max(max_angle, std::abs(std::arg(es.eigenvalues()[k])));
  }
  require(max_angle < std::numbers::pi - kBranchTol, Errc::branch,
          "rotation angle too close to pi for the principal logarithm");
  const Eigen::MatrixXd L = R.log();
  const Eigen::MatrixXd S = 0.5 * (L - L.transpose());
  Eigen::VectorXd c(static_cast<Eigen::Index>(rotation_dimension(dim)));
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const auto [i, j] = zeta_pair(dim, static_cast<std::size_t>(k));
    c[k] = S(i, j);
  }
  return c;
}

MobiusFactorization factorize(const GroupParams& A) {
  check_params(A);
  return {A.b, rotation_from_coords(A.dim, A.c), std::exp(A.s), A.a};
}

GroupParams from_factorization(const MobiusFactorization& f) {
  const int dim = static_cast<int>(f.b.size());
  require(f.lambda > 0.0, Errc::out_of_domain, "dilation factor must be positive");
  GroupParams A = GroupParams::identity(dim);
  A.s = std::log(f.lambda);
  A.a = f.a;
  A.b = f.b;
  A.c = coords_from_rotation(f.rotation);
  return A;
}

SwapFormula swap_inversion_translation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double aa = a.squaredNorm();
  const double bb = b.squaredNorm();
  const double mu_inv = 1.0 + aa * bb - 2.0 * a.dot(b);
  require(mu_inv > kDomainTol, Errc::out_of_domain,
          "composition leaves the parametrised neighbourhood (mu^{-1} <= 0)");
  SwapFormula out;
  out.mu = 1.0 / mu_inv;
  out.alpha = out.mu * (a - aa * b);
  out.beta = out.mu * (b - bb * a);
  const auto n = a.size();
  out.M = Eigen::MatrixXd::Identity(n, n) + 2.0 * mu_inv * out.beta * out.alpha.transpose() -
          2.0 * a * b.transpose();
  return out;
}

std::optional<Eigen::VectorXd> apply_point(const GroupParams& A, const Eigen::VectorXd& x) {
  check_params(A);
  const double xx = x.squaredNorm();
  const double D = 1.0 - 2.0 * A.a.dot(x) + A.a.squaredNorm() * xx;
  if (std::abs(D) < 1e-14) return std::nullopt;
  const Eigen::MatrixXd P = rotation_from_coords(A.dim, A.c);
  return Eigen::VectorXd(A.b + std::exp(A.s) * P * (x - A.a * xx) / D);
}

double jacobian_det(const GroupParams& A, const Eigen::VectorXd& x) {
  check_params(A);
  const double D = 1.0 - 2.0 * A.a.dot(x) + A.a.squaredNorm() * x.squaredNorm();
  if (std::abs(D) < 1e-14) return std::numeric_limits<double>::infinity();
  return std::exp(A.dim * A.s) * std::pow(D, -A.dim);
}

GroupParams compose(const GroupParams& A1, const GroupParams& A2) {
  require(A1.dim == A2.dim, Errc::invalid_argument, "composing parameters of different N");
  const auto f1 = factorize(A1);
  const auto f2 = factorize(A2);
  const auto sw = swap_inversion_translation(f1.a, f2.b);
  MobiusFactorization f3;
  f3.b = f1.b + f1.lambda * f1.rotation * sw.beta;
  f3.rotation = f1.rotation * sw.M * f2.rotation;
  f3.lambda = f1.lambda * sw.mu * f2.lambda;
  f3.a = f2.lambda * f2.rotation.transpose() * sw.alpha + f2.a;
  return from_factorization(f3);
}

GroupParams inverse(const GroupParams& A) {
  // phi_A^{-1} = psi_{-a} o D_{1/lambda} o P^T o T_{-b} = psi_{-a} o T_{-P^T b/lambda} o P^T o D_{1/lambda}.
  const auto f = factorize(A);
  const Eigen::VectorXd shifted = -f.rotation.transpose() * f.b / f.lambda;
  const auto sw = swap_inversion_translation(-f.a, shifted);
  MobiusFactorization g;
  g.b = sw.beta;
  g.rotation = sw.M * f.rotation.transpose();
  g.lambda = sw.mu / f.lambda;
  g.a = f.rotation * sw.alpha / f.lambda;
  return from_factorization(g);
}

// ---- function transforms ---------------------------------------------------

ConformalTransform::ConformalTransform(const GroupParams& A, double q)
    : dim_(A.dim), q_(q) {
  check_params(A);
  lambda_ = std::exp(A.s);
  weight_scale_ = std::exp(q * A.s / 2.0);
  a_ = A.a;
  b_ = A.b;
  P_ = rotation_from_coords(A.dim, A.c);
}

bool ConformalTransform::map(const double* x, double* y, double& weight) const {
  const Eigen::Map<const Eigen::VectorXd> xv(x, dim_);
  const double xx = xv.squaredNorm();
  const double D = 1.0 - 2.0 * a_.dot(xv) + a_.squaredNorm() * xx;
  if (D < kPoleTol) return false;
  Eigen::Map<Eigen::VectorXd>(y, dim_) = b_ + lambda_ * P_ * (xv - a_ * xx) / D;
  weight = weight_scale_ * std::pow(D, -q_ / 2.0);
  return true;
}

double ConformalTransform::operator()(const RadialField& f, const double* x) const {
  double y[5];
  double w = 0.0;
  if (map(x, y, w)) return w * f(Eigen::Map<const Eigen::VectorXd>(y, dim_).norm());
  // Pole: finite limit only for the critical weight with a power-law tail.
  if (f.extension() != Extension::power_law || std::abs(q_ - (dim_ - 2.0)) > 1e-14) return 0.0;
  const Eigen::Map<const Eigen::VectorXd> xv(x, dim_);
  return f.tail_coefficient() * std::pow(lambda_, (2.0 - dim_) / 2.0) *
         std::pow(xv.norm(), 2.0 - dim_);
}

double ConformalTransform::operator()(const CartesianField& f, const double* x) const {
  double y[5];
  double w = 0.0;
  if (!map(x, y, w)) return 0.0;
  return w * f(y);
}

namespace {

bool is_dilation(const GroupParams& A) {
  return A.a.cwiseAbs().maxCoeff() <= 1e-14 && A.b.cwiseAbs().maxCoeff() <= 1e-14 &&
         (A.c.size() == 0 || A.c.cwiseAbs().maxCoeff() <= 1e-14);
}

}  // namespace

double transform_at(const GroupParams& A, double q, const RadialField& f, const double* x) {
  require(A.dim == f.dim(), Errc::invalid_argument, "dimension mismatch");
  return ConformalTransform(A, q)(f, x);
}

double transform_at(const GroupParams& A, double q, const CartesianField& f, const double* x) {
  require(A.dim == f.dim(), Errc::invalid_argument, "dimension mismatch");
  return ConformalTransform(A, q)(f, x);
}

CartesianField conformal_transform(const GroupParams& A, double q, const RadialField& f,
                                   CartesianGridPtr target) {
  require(A.dim == f.dim() && target->dim() == f.dim(), Errc::invalid_argument,
          "dimension mismatch");
  const ConformalTransform T(A, q);
  std::vector<double> out(target->size());
  double x[5];
  for (std::size_t i = 0; i < out.size(); ++i) {
    target->point(i, x);
    out[i] = T(f, x);
  }
  return CartesianField(std::move(target), std::move(out), Extension::zero);
}

CartesianField conformal_transform(const GroupParams& A, double q, const CartesianField& f) {
  require(A.dim == f.dim(), Errc::invalid_argument, "dimension mismatch");
  const ConformalTransform T(A, q);
  const auto& g = *f.grid();
  std::vector<double> out(g.size());
  double x[5];
  for (std::size_t i = 0; i < out.size(); ++i) {
    g.point(i, x);
    out[i] = T(f, x);
  }
  return CartesianField(f.grid(), std::move(out), f.extension());
}

RadialField conformal_transform(const GroupParams& A, double q, const RadialField& f) {
  require(A.dim == f.dim(), Errc::invalid_argument, "dimension mismatch");
  require(is_dilation(A), Errc::invalid_argument,
          "radial transform needs a pure dilation (a = b = c = 0)");
  const double lambda = std::exp(A.s);
  const double w = std::exp(q * A.s / 2.0);
  return RadialField::sample(
      f.grid(), [&](double r) { return w * f(lambda * r); }, f.extension());
}

CartesianField pushforward(const GroupParams& A, const RadialField& f, CartesianGridPtr target) {
  return conformal_transform(A, pushforward_exponent(A.dim), f, std::move(target));
}
CartesianField pushforward(const GroupParams& A, const CartesianField& f) {
  return conformal_transform(A, pushforward_exponent(A.dim), f);
}
RadialField pushforward(const GroupParams& A, const RadialField& f) {
  return conformal_transform(A, pushforward_exponent(A.dim), f);
}

CartesianField pullback_adjoint(const GroupParams& A, const RadialField& g,
                                CartesianGridPtr target) {
  return conformal_transform(A, pullback_exponent(A.dim), g, std::move(target));
}
CartesianField pullback_adjoint(const GroupParams& A, const CartesianField& g) {
  return conformal_transform(A, pullback_exponent(A.dim), g);
}
RadialField pullback_adjoint(const GroupParams& A, const RadialField& g) {
  return conformal_transform(A, pullback_exponent(A.dim), g);
}

RadialField kelvin(const RadialField& f) {
  const int n = f.dim();
  require(f.extension() == Extension::power_law || f.extension() == Extension::zero,
          Errc::extrapolation, "Kelvin transform needs a tail model");
  return RadialField::sample(
      f.grid(), [&](double r) { return std::pow(r, 2 - n) * f(1.0 / r); }, Extension::power_law);
}

// ---- parameter derivatives --------------------------------------------------

std::vector<CartesianField> parameter_derivatives(const RadialField& psi, double q,
                                                  CartesianGridPtr target) {
  const int n = psi.dim();
  require(target->dim() == n, Errc::invalid_argument, "dimension mismatch");
  const std::size_t count = group_dimension(n);
  std::vector<std::vector<double>> out(count, std::vector<double>(target->size(), 0.0));
  double x[5];
  for (std::size_t i = 0; i < target->size(); ++i) {
    target->point(i, x);
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += x[k] * x[k];
    const double r = std::sqrt(r2);
    const double p = psi(r);
    const double dp = psi.derivative(r);
    out[0][i] = 0.5 * q * p + r * dp;
    for (int j = 0; j < n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      out[1 + ju][i] = x[j] * (q * p + r * dp);
      out[1 + static_cast<std::size_t>(n) + ju][i] = r > 0.0 ? x[j] * dp / r : 0.0;
    }
  }
  std::vector<CartesianField> fields;
  fields.reserve(count);
  for (auto& v : out) fields.emplace_back(target, std::move(v), Extension::zero);
  return fields;
}

std::vector<CartesianField> parameter_derivatives(const CartesianField& psi, double q) {
  const int n = psi.dim();
  const auto& g = *psi.grid();
  std::vector<CartesianField> grad;
  for (int k = 0; k < n; ++k) grad.push_back(partial_derivative(psi, k));
  const std::size_t count = group_dimension(n);
  const auto nu = static_cast<std::size_t>(n);
  std::vector<std::vector<double>> out(count, std::vector<double>(g.size(), 0.0));
  double x[5];
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, x);
    double r2 = 0.0, xgrad = 0.0;
    for (int k = 0; k < n; ++k) {
      r2 += x[k] * x[k];
      xgrad += x[k] * grad[static_cast<std::size_t>(k)][i];
    }
    const double p = psi[i];
    out[0][i] = 0.5 * q * p + xgrad;
    for (int j = 0; j < n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      out[1 + ju][i] = q * x[j] * p - r2 * grad[ju][i] + 2.0 * x[j] * xgrad;
      out[1 + nu + ju][i] = grad[ju][i];
    }
    for (std::size_t k = 0; k < rotation_dimension(n); ++k) {
      const auto [a, b] = zeta_pair(n, k);
      out[1 + 2 * nu + k][i] = x[b] * grad[static_cast<std::size_t>(a)][i] -
                               x[a] * grad[static_cast<std::size_t>(b)][i];
    }
  }
  std::vector<CartesianField> fields;
  fields.reserve(count);
  for (auto& v : out) fields.emplace_back(psi.grid(), std::move(v), psi.extension());
  return fields;
}

RadialField dilation_derivative(const RadialField& psi, double q) {
  return RadialField::sample(
      psi.grid(), [&](double r) { return 0.5 * q * psi(r) + r * psi.derivative(r); },
      psi.extension());
}

}  // namespace critwave

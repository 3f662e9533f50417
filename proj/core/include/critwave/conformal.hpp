#pragma once

// The conformal family theta_A acting on functions of R^N.
//
// A point A = (s, a, b, c) parametrises the Moebius map
//   phi_A = T_b o P_c o D_{e^s} o psi_a,
//   phi_A(x) = b + e^s P_c (x - a|x|^2) / (1 - 2<a,x> + |a|^2|x|^2),
// where P_c = exp(skew(c)) and psi_a is the inverted translation.
// Functions transform with weight exponent q:
//   F_q(A, f)(x) = e^{q s/2} D(x)^{-q/2} f(phi_A(x)),  D = 1 - 2<a,x> + |a|^2|x|^2.
// q = N-2 is the energy-critical pushforward theta_A, q = N+2 the adjoint
// pullback (theta_A^{-1})^*. compose() acts on the point maps:
//   phi_{compose(A1,A2)} = phi_{A1} o phi_{A2},
// so theta_{compose(A1,A2)} = theta_{A2} o theta_{A1}.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "critwave/discretization.hpp"

namespace critwave {

/// Number of parameters N' = 2N + 1 + N(N-1)/2.
std::size_t group_dimension(int dim);
/// Number of rotation coordinates N(N-1)/2.
std::size_t rotation_dimension(int dim);
/// Lexicographic index of the pair (i, j), i < j, among rotation coordinates.
std::size_t zeta(int dim, int i, int j);
/// Inverse of zeta.
std::pair<int, int> zeta_pair(int dim, std::size_t k);

struct GroupParams {
  int dim = 3;
  double s = 0.0;
  Eigen::VectorXd a, b, c;

  static GroupParams identity(int dim);
  /// Flat layout [s, a..., b..., c...].
  static GroupParams from_flat(int dim, std::span<const double> v);
  Eigen::VectorXd flat() const;
  double norm() const { return flat().norm(); }
};

/// Ordered factors of phi_A = T_b o P o D_lambda o psi_a.
struct MobiusFactorization {
  Eigen::VectorXd b;
  Eigen::MatrixXd rotation;
  double lambda = 1.0;
  Eigen::VectorXd a;
};

MobiusFactorization factorize(const GroupParams& A);
/// Recovers parameters; rotation coordinates come from the principal logarithm.
GroupParams from_factorization(const MobiusFactorization& f);

Eigen::MatrixXd skew_from_coords(int dim, const Eigen::VectorXd& c);
Eigen::MatrixXd rotation_from_coords(int dim, const Eigen::VectorXd& c);
/// Principal logarithm; rotation angles within 1e-6 of pi raise Errc::branch.
Eigen::VectorXd coords_from_rotation(const Eigen::MatrixXd& rotation);

/// Image of x; std::nullopt is the point at infinity.
std::optional<Eigen::VectorXd> apply_point(const GroupParams& A, const Eigen::VectorXd& x);
/// |det phi_A'(x)| = e^{Ns} D(x)^{-N}; +infinity at the pole.
double jacobian_det(const GroupParams& A, const Eigen::VectorXd& x);

GroupParams compose(const GroupParams& A1, const GroupParams& A2);
GroupParams inverse(const GroupParams& A);

/// Pieces of psi_a o T_b = T_beta o M o D_mu o psi_alpha.
struct SwapFormula {
  double mu = 1.0;
  Eigen::VectorXd alpha, beta;
  Eigen::MatrixXd M;
};
SwapFormula swap_inversion_translation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Weight exponents.
inline double pushforward_exponent(int dim) { return dim - 2.0; }
inline double pullback_exponent(int dim) { return dim + 2.0; }

/// F_q(A, .) with the map prepared once, for repeated pointwise evaluation.
class ConformalTransform {
 public:
  ConformalTransform(const GroupParams& A, double q);

  int dim() const { return dim_; }
  double q() const { return q_; }
  /// phi_A(x) and the weight e^{qs/2} D^{-q/2}; false at the pole.
  bool map(const double* x, double* y, double& weight) const;
  double operator()(const RadialField& f, const double* x) const;
  double operator()(const CartesianField& f, const double* x) const;

 private:
  int dim_;
  double lambda_;
  double weight_scale_;
  double q_;
  Eigen::VectorXd a_, b_;
  Eigen::MatrixXd P_;
};

/// F_q(A, f)(x) for a radial source. At the pole the value is the limit for
/// q = N-2 with a power-law tail and 0 otherwise.
double transform_at(const GroupParams& A, double q, const RadialField& f, const double* x);
double transform_at(const GroupParams& A, double q, const CartesianField& f, const double* x);

/// theta_A(f) sampled on `target`.
CartesianField pushforward(const GroupParams& A, const RadialField& f, CartesianGridPtr target);
CartesianField pushforward(const GroupParams& A, const CartesianField& f);
/// Radial result; only dilations (a = b = c = 0) keep radial symmetry.
RadialField pushforward(const GroupParams& A, const RadialField& f);

/// (theta_A^{-1})^*(g) sampled on `target`.
CartesianField pullback_adjoint(const GroupParams& A, const RadialField& g,
                                CartesianGridPtr target);
CartesianField pullback_adjoint(const GroupParams& A, const CartesianField& g);
RadialField pullback_adjoint(const GroupParams& A, const RadialField& g);

/// Generic weight-q transform with the same sampling rules.
CartesianField conformal_transform(const GroupParams& A, double q, const RadialField& f,
                                   CartesianGridPtr target);
CartesianField conformal_transform(const GroupParams& A, double q, const CartesianField& f);
RadialField conformal_transform(const GroupParams& A, double q, const RadialField& f);

/// Kelvin transform r^{2-N} f(1/r); the result carries a refitted power-law tail.
RadialField kelvin(const RadialField& f);

/// Derivatives of A -> F_q(A, psi) at A = 0, in flat parameter order.
std::vector<CartesianField> parameter_derivatives(const RadialField& psi, double q,
                                                  CartesianGridPtr target);
std::vector<CartesianField> parameter_derivatives(const CartesianField& psi, double q);
/// Dilation derivative (q/2) psi + r psi' of a radial profile.
RadialField dilation_derivative(const RadialField& psi, double q);

}  // namespace critwave

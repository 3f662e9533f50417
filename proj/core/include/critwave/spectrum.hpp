#pragma once

// Linearised operator L_Q = -Delta - (N+2)/(N-2) |Q|^{4/(N-2)}: assembly,
// negative spectrum, null directions, exponential decay of eigenfunctions,
// dual family and coercivity.
//
// Radial sector: with K the conservative stiffness matrix (Dirichlet ghost)
// and V the cell volumes, L_Q is V^{-1} K - pot. It is symmetric in the V
// inner product; the assembled matrix is the similar tridiagonal
// V^{-1/2} K V^{-1/2} - pot.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "critwave/conformal.hpp"
#include "critwave/discretization.hpp"
#include "critwave/numerics.hpp"

namespace critwave {

class RadialOperator {
 public:
  /// Schroedinger form -Delta - potential.
  RadialOperator(RadialGridPtr grid, std::vector<double> potential);

  const RadialGridPtr& grid() const { return grid_; }
  std::span<const double> potential() const { return potential_; }
  /// Symmetrised tridiagonal matrix.
  const numerics::SymTridiag& matrix() const { return sym_; }
  /// L f at every node (Dirichlet ghost).
  RadialField apply(const RadialField& f) const;
  /// max |A_ij - A_ji| of the assembled matrix.
  double symmetry_defect() const { return 0.0; }
  /// Stiffness form sum face (f_{i+1} - f_i)^2 / h with zero ghost.
  double stiffness(const RadialField& f) const;

 private:
  RadialGridPtr grid_;
  std::vector<double> potential_;
  numerics::SymTridiag sym_;
};

class CartesianOperator {
 public:
  CartesianOperator(CartesianGridPtr grid, std::vector<double> potential);

  const CartesianGridPtr& grid() const { return grid_; }
  std::span<const double> potential() const { return potential_; }
  /// L f on interior nodes, 0 on the boundary layer.
  CartesianField apply(const CartesianField& f) const;
  /// Interior-node matrix (Dirichlet), for inspection.
  Eigen::SparseMatrix<double> assemble_matrix() const;
  double symmetry_defect() const;

 private:
  CartesianGridPtr grid_;
  std::vector<double> potential_;
};

/// (N+2)/(N-2) |Q_i|^{4/(N-2)}.
std::vector<double> linearized_potential(int dim, std::span<const double> q);

RadialOperator assemble(const RadialField& Q);
CartesianOperator assemble(const CartesianField& Q);

struct EigenPair {
  double omega = 0.0;  ///< eigenvalue is -omega^2
  RadialField Y;       ///< unit L^2 norm (cell-volume inner product), Y(r_0) > 0
  double residual = 0.0;  ///< ||L Y + omega^2 Y||_{L^2}
};

/// All eigenvalues below -tol_gap, each refined by shifted inverse iteration.
std::vector<EigenPair> negative_spectrum(const RadialOperator& op, double tol_gap = 1e-6);

/// Bound-state count of -Delta - depth * 1{r < radius} in N = 3 from the
/// transcendental condition (odd solutions of the 1-D well).
std::size_t square_well_bound_states(double depth, double radius);

/// (N-2)/2 Q + r Q'.
RadialField scaling_generator(const RadialField& Q);
/// Closed-form Lambda W.
double eval_LambdaW(int dim, double r);

struct KernelReport {
  double lambda_residual = 0.0;       ///< interior max |L_Q Lambda Q| (radial)
  double translation_residual = 0.0;  ///< interior max |L_Q d_1 Q| (Cartesian)
  double rotation_max = 0.0;          ///< max |rotation generator| on the box
  std::size_t kernel_dimension = 0;   ///< numerical rank of the generator family
};

/// Residuals of the null directions for W sampled in closed form on both grids.
KernelReport kernel_residuals_W(RadialGridPtr radial, CartesianGridPtr box);
/// Residuals of the null directions of a sampled field.
KernelReport kernel_residuals(const RadialField& Q, CartesianGridPtr box);

/// Far-field model C e^{-omega r} r^{-(N-1)/2}.
struct ExponentialTail {
  int dim = 3;
  double omega = 0.0;
  double log_c = 0.0;
  double log_value(double r) const;
};

struct MeshkovReport {
  double window_lo = 0.0, window_hi = 0.0;
  double slope = 0.0;    ///< of log|Y| + omega r + (N-1)/2 log r
  double c_upper = 0.0;  ///< max of |Y| e^{omega r} r^{(N-1)/2} on the window
  double c_lower = 0.0;  ///< min of the same
  ExponentialTail tail;
};

/// Fit on [lo, hi]; hi defaults to half the grid radius, lo to hi/2.
MeshkovReport meshkov_fit(const RadialField& Y, double omega, double lo = 0.0, double hi = 0.0);

/// G(R) = int_{|x| >= R} |grad Y|^2 + |Y|^2 on the grid.
double exterior_functional(const RadialField& Y, double R);

struct DecayRateReport {
  double slope = 0.0;  ///< d log G / dR, expected -2 omega
  double relative_error = 0.0;
};
DecayRateReport exterior_decay_rate(const RadialField& Y, double omega, double lo, double hi,
                                    std::size_t samples = 16);

struct TailNormReport {
  double log_tail = 0.0;      ///< log int_{|x|>=R} |Y|^{2(N+2)/(N-2)}
  double log_envelope = 0.0;  ///< log of e^{-2(N+2) omega R/(N-2)} R^{-q_N}
  double ratio = 0.0;         ///< exp(log_tail - log_envelope)
  bool zero = false;
};
/// Grid quadrature up to the model switch radius, exponential model beyond.
TailNormReport tail_critical_norm(const RadialField& Y, double omega, double R);

/// Smooth cutoff: 1 on [0, radius/2], 0 beyond radius.
double smooth_cutoff(double r, double radius);

/// f(x) = profile(|x|) when axis < 0, otherwise x_axis profile(|x|).
struct AxisFunction {
  RadialField profile;
  int axis = -1;

  double value(const double* x) const;
  /// Value and gradient.
  double value_gradient(const double* x, double* grad) const;
  CartesianField sample(CartesianGridPtr grid) const;
};

/// Compactly supported E_i dual to the kernel basis Z_k and orthogonal to Y_k.
struct DualFamily {
  std::vector<AxisFunction> E;
  std::vector<AxisFunction> Z;
  std::vector<RadialField> Y;
  double cutoff_radius = 0.0;
  bool cartesian = false;
};

/// Radial sector: a single E dual to Lambda Q, normalised with the radial quadrature.
DualFamily build_dual_family(const RadialField& Q, std::span<const EigenPair> eig,
                             double cutoff_radius);
/// Cartesian sector: E_0 for Lambda Q and E_j for d_j Q, normalised on `box`.
DualFamily build_dual_family(const RadialField& Q, std::span<const EigenPair> eig,
                             double cutoff_radius, CartesianGridPtr box);

struct DualityReport {
  double max_duality_error = 0.0;      ///< max |int E_j Z_k - delta_jk|
  double max_orthogonality_error = 0.0;  ///< max |int E_j Y_k|
};
DualityReport check_duality(const DualFamily& fam, const RadialGridPtr& grid);
DualityReport check_duality(const DualFamily& fam, const CartesianGridPtr& box);

/// min over f orthogonal (cell-volume pairing) to all constraints of
/// Phi_Q(f) / ||f||^2_{H^1}, Phi_Q(f) = 1/2 int |grad f|^2 - 1/2 int pot f^2.
/// Dense generalized eigenproblem; use a coarse grid.
double coercivity_min(const RadialField& Q, std::span<const RadialField> constraints);

struct LipschitzReport {
  double lhs = 0.0;  ///< ||theta_A(Q) - Q||_{H^1}
  double rhs = 0.0;  ///< sum_i |int (theta_A(Q) - Q) E_i|
  double ratio = 0.0;
  double per_parameter = 0.0;  ///< lhs / |A|
};
LipschitzReport lipschitz_estimate_check(const RadialField& Q, const DualFamily& fam,
                                         const GroupParams& A, CartesianGridPtr box);

}  // namespace critwave

#pragma once

// Modulation: the orthogonality fit A = Psi(f), mode amplitudes, the
// perturbed linear mode system with its energies E_+/E_-, exponential-mode
// fitting and the centre-selection rule.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "critwave/conformal.hpp"
#include "critwave/discretization.hpp"
#include "critwave/spectrum.hpp"

namespace critwave {

struct ModulationOptions {
  double tol = 1e-9;
  int max_iter = 50;
  /// Fits require ||f - Q||_{H^1} <= r_fit_fraction * ||Q||_{H^1}.
  double r_fit_fraction = 0.1;
};

struct ModulationFit {
  GroupParams A;
  std::vector<double> residuals;  ///< int (theta_A^{-1}(f) - Q) E_i
  int iterations = 0;
  double max_residual = 0.0;
};

/// Solves int f (theta_A^{-1})^*(E_i) = int Q E_i.
///
/// Cartesian sector: the m = N+1 conditions are solved on the slice
/// A = L B, L = J0^T (J0 J0^T)^{-1} with J0_ij = int Q D_j E_i, by damped
/// Newton in B. The Jacobian K(A) T(A)^{-1} L uses the analytic derivative
/// fields D_j E_i (weight N+2) transported by (theta_A^{-1})^*, and T(A), the
/// derivative of B -> compose(B, A) at B = 0.
class CartesianModulation {
 public:
  CartesianModulation(const RadialField& Q, const DualFamily& fam, CartesianGridPtr box,
                      ModulationOptions opts = {});

  const CartesianGridPtr& box() const { return box_; }
  /// Q sampled on the box.
  const CartesianField& q_box() const { return q_box_; }
  /// N' x m slice matrix.
  const Eigen::MatrixXd& slice() const { return L_; }
  const Eigen::VectorXd& targets() const { return targets_; }

  ModulationFit fit(const CartesianField& f) const;
  /// Residual vector at A.
  Eigen::VectorXd residual(const CartesianField& f, const GroupParams& A) const;
  /// m x N' matrix K_ij = int f (theta_A^{-1})^*(D_j E_i).
  Eigen::MatrixXd transported_derivatives(const CartesianField& f, const GroupParams& A) const;

 private:
  RadialField Q_;
  const DualFamily* fam_;
  CartesianGridPtr box_;
  ModulationOptions opts_;
  CartesianField q_box_;
  double q_norm_ = 0.0;
  Eigen::VectorXd targets_;
  Eigen::MatrixXd L_;
};

/// Radial sector: only the dilation s is fitted (m = 1).
class RadialModulation {
 public:
  RadialModulation(const RadialField& Q, const DualFamily& fam, ModulationOptions opts = {});

  ModulationFit fit(const RadialField& f, double s_init = 0.0) const;
  double residual(const RadialField& f, double s) const;

 private:
  RadialField Q_;
  RadialField E_, dE_;
  ModulationOptions opts_;
  double target_ = 0.0;
  double q_norm_ = 0.0;
};

/// d/de compose(e e_j, A) at e = 0, as an N' x N' matrix (central differences).
Eigen::MatrixXd left_translation_jacobian(const GroupParams& A, double step = 1e-6);

/// Derivative fields of a radial or dipole function, pointwise. `out` gets N' values.
void generator_values(const AxisFunction& f, double q, const double* x, double* out);

struct ModeAmplitudes {
  std::vector<double> alpha, beta;
  double delta = 0.0;           ///< sqrt(sum alpha_j^2)
  double h_norm = 0.0;          ///< ||theta_A^{-1}(u) - Q||_{H^1}
  double du_norm = 0.0;         ///< ||d_t u||_{L^2}
  double upper_ratio = 0.0;     ///< delta / ||h||
  double lower_ratio = 0.0;     ///< (||d_t u|| + ||h||) / delta
};

/// alpha_j = int h Y_j, beta_j = int d_t u (theta_A^{-1})^* Y_j. Radial A must be a dilation.
ModeAmplitudes mode_amplitudes(const RadialField& u, const RadialField& du, const GroupParams& A,
                               const RadialField& Q, std::span<const EigenPair> eig);
ModeAmplitudes mode_amplitudes(const CartesianField& u, const CartesianField& du,
                               const GroupParams& A, const RadialField& Q,
                               std::span<const EigenPair> eig);

// ---- mode system ------------------------------------------------------------

struct ModeSystemState {
  std::vector<double> freqs;
  double eps3 = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> t;
  std::vector<std::vector<double>> alpha, beta;  ///< [sample][j]
  std::vector<double> gamma, e_plus, e_minus;
  std::vector<double> e_plus_rate, e_minus_rate;  ///< dE_+/dt, dE_-/dt from the vector field
  bool finite_escape = false;
  double escape_time = 0.0;
  bool backward = false;
};

enum class ModeRunKind {
  forward,        ///< integrate forward from `init` at t = 0
  bounded_decay,  ///< integrate backward from `init` at T0, rescale so gamma(0) = 1
};

struct ModeSimOptions {
  double T0 = 0.0;           ///< 0 selects 40 / omega_1
  std::vector<double> init;  ///< [alpha_1..alpha_p, beta_1..beta_p]
  ModeRunKind kind = ModeRunKind::forward;
  double sample_dt = 0.0;    ///< 0: one sample per perturbation piece
  double rtol = 1e-10;
  double escape_level = 1e12;
};

/// alpha' = beta + e_alpha, beta' = omega^2 alpha + e_beta with
/// e = eps3 gamma rho_k d_k on pieces of length 0.1/omega_1 (d_k uniform on the
/// sphere of R^{2p}, rho_k uniform in [0,1]) drawn from `seed`.
ModeSystemState ode_simulate(std::span<const double> freqs, double eps3, std::uint64_t seed,
                             const ModeSimOptions& opts);

/// 8 sqrt(2) / (3 omega_1).
double integral_bound_constant(double omega1);

struct DecayReport {
  double ratio = 0.0;  ///< max of e^{w1 t/2} gamma on the last 10% / its value at T0/2
  bool passed = false;
  double integral = 0.0;  ///< int gamma
  double sup = 0.0;       ///< sup gamma
  bool integral_bound_holds = false;
};
/// Raises Errc::hypothesis_violated for unbounded or growing runs.
DecayReport verify_decay(const ModeSystemState& state);

struct ConeReport {
  bool entered = false;
  bool violated = false;
  double first_time = 0.0;
};
ConeReport check_cone_property(const ModeSystemState& state);

/// Margins are divided by gamma^2 at each sample; non-negative means the inequality holds.
struct InequalityReport {
  double plus_margin = 0.0;   ///< min of E_+' - (2 w1 E_+ - w1/2 sqrt(E_+) gamma)
  double minus_margin = 0.0;  ///< min of (-2 w1 E_- + w1/2 sqrt(E_-) gamma) - E_-'
};
InequalityReport check_differential_inequalities(const ModeSystemState& state);

// ---- exponential modes -----------------------------------------------------------

struct ExponentialFit {
  double S = 0.0;
  double fast_rate = 0.0;      ///< fitted kappa of the correction term
  double fast_amplitude = 0.0;
  double rms_residual = 0.0;
};

/// sigma(t) ~ S e^{-omega t} + R e^{-kappa t} on [t_lo, t_hi], kappa in [1.05, 4] omega.
ExponentialFit fit_exponential_modes(std::span<const double> t, std::span<const double> sigma,
                                     double omega, double t_lo, double t_hi);

/// y1 with int_{y1}^inf Phi + erfc(y1)/6 = 2/3; Phi sampled on a uniform grid.
double center_select(std::span<const double> y, std::span<const double> phi);
/// int_{y1}^inf Phi for the piecewise-linear density.
double right_mass(std::span<const double> y, std::span<const double> phi, double y1);

}  // namespace critwave

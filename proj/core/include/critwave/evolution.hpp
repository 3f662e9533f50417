#pragma once

// Radial evolution of the critical wave equation and of its linearisation,
// plus diagnostics for the exponential expansion and exterior energy.
//
// Space is the conservative finite-volume scheme of the radial grid with an
// outer ghost value held fixed; time is kick-drift-kick leapfrog. The scheme
// is the Hamiltonian flow of the discrete energy
//   E_h = 1/2 sum V v^2 + 1/2 sum face (u_{i+1} - u_i)^2 / h - sum V F(u),
// F(u) = |u|^{2N/(N-2)} (N-2)/(2N) (F = 0 for linear runs).

#include <optional>
#include <span>
#include <vector>

#include "critwave/discretization.hpp"
#include "critwave/modulation.hpp"
#include "critwave/spectrum.hpp"
#include "critwave/stationary.hpp"

namespace critwave {

struct EvolutionOptions {
  double T = 20.0;
  double dt = 0.0;          ///< 0 selects 0.5 h
  std::size_t stride = 1;   ///< snapshot every `stride` steps
  /// Outer ghost value; by default the initial field's extension at hull + h.
  std::optional<double> ghost;
  double blowup_level = 1e6;
};

/// (u, d_t u) at snapshot times.
struct Trajectory {
  RadialGridPtr grid;
  std::vector<double> t;
  std::vector<RadialField> u, du;
  std::vector<double> energy;
  double dt = 0.0;
  double cfl = 0.0;
  double ghost = 0.0;
  /// max |E(t) - E(0)| / max(|E(0)|, quadratic part of E(0)).
  double energy_drift = 0.0;
  bool blowup = false;
  double blowup_time = 0.0;   ///< first time the sup norm exceeded the blow-up level
};

/// d_t^2 u = Delta u + |u|^{4/(N-2)} u.
Trajectory evolve_nonlinear(const RadialField& u0, const RadialField& u1,
                            const EvolutionOptions& opts = {});
/// d_t^2 h = Delta h + (N+2)/(N-2) |S|^{4/(N-2)} h.
Trajectory evolve_linearized(const RadialField& S, const RadialField& h0, const RadialField& h1,
                             const EvolutionOptions& opts = {});

/// Discrete energy E_h of (u, du) with the given ghost; `nonlinear` selects F.
double discrete_energy(const RadialField& u, const RadialField& du, double ghost, bool nonlinear);
/// Quadratic energy 1/2 int du^2 + 1/2 int |grad h|^2 - 1/2 int pot h^2.
double linearized_energy(const RadialField& S, const RadialField& h, const RadialField& dh,
                         double ghost);

/// ||grad u||_{L^2} for a deviation field (no ghost face).
double deviation_gradient_norm(const RadialField& f);
/// sqrt(||grad f||^2 + ||g||^2).
double product_norm(const RadialField& f, const RadialField& g);

struct ExpansionReport {
  std::vector<double> t;
  std::vector<double> deviation;  ///< ||(u, du) - (S + eps e^{-wt} Y, -eps w e^{-wt} Y)||
  double max_deviation = 0.0;
  double fitted_rate = 0.0;       ///< -slope of log deviation (0 when flat or too short)
  bool tracking_lost = false;
  double exit_time = 0.0;
};

/// Deviation from the expansion S + eps e^{-omega t} Y up to `t_max`; the run
/// counts as lost once the deviation exceeds `lost_level`.
ExpansionReport track_expansion(const Trajectory& traj, const RadialField& S, const RadialField& Y,
                                double omega, double eps, double t_max,
                                double lost_level = 1e-1);

/// {|x| >= r0 + |t - t0|}.
struct ChannelWindow {
  double r0 = 1.0;
  double t0 = 1.0;
  double radius(double t) const;
};

struct ExteriorEnergySeries {
  std::vector<double> t;
  std::vector<double> norm;  ///< exterior H^1 x L^2 norm of eps = u - S - eps e^{-wt} Y
  double max_norm = 0.0;
};

ExteriorEnergySeries exterior_energy(const Trajectory& traj, const ChannelWindow& window,
                                     const RadialField& S, const RadialField& Y, double omega,
                                     double eps);

struct ChannelReport {
  bool vacuous = false;
  std::vector<double> t;
  std::vector<double> shell_norm;  ///< ||d_t (u - S)||_{L^2(shell)}
  std::vector<double> mode_norm;   ///< same for the pure mode eps e^{-wt} Y
  double envelope = 0.0;           ///< e^{-omega (t0 + r0)}
  double C1 = 0.0;                 ///< max envelope / shell_norm
  double contamination = 0.0;      ///< max ||d_t(u - S - mode)|| / ||d_t mode|| on the shells
};

/// Shells r0 + |t - t0| <= r <= r0 + |t - t0| + 1 for snapshots with t <= t0.
ChannelReport channel_lower_bound(const Trajectory& traj, const RadialField& S,
                                  const RadialField& Y, double omega, double eps,
                                  const ChannelWindow& window);

struct TailBoundsReport {
  double s_norm = 0.0;     ///< ||chi S||_{L^a_t L^b_x}, t >= 0
  double y_norm = 0.0;     ///< ||chi e^{-wt} Y||_{L^a_t L^b_x}
  double s_ratio = 0.0;    ///< s_norm r0^{N/2-1}
  double y_ratio = 0.0;    ///< y_norm e^{omega (t0 + r0)}
};

/// Mixed norms over the exterior cone, a = (N+2)/(N-2), b = 2(N+2)/(N-2), by
/// mapped Gauss-Legendre quadrature in t and r.
TailBoundsReport tail_bounds_check(const RadialProfile& S, const RadialProfile& Y, double omega,
                                   const ChannelWindow& window);

struct PipelineSample {
  double t = 0.0;
  GroupParams A;
  ModeAmplitudes amp;
  std::vector<double> dalpha_residual;  ///< |alpha_j' - beta_j| (central differences)
  std::vector<double> dbeta_residual;   ///< |beta_j' - omega_j^2 alpha_j|
};

struct PipelineReport {
  std::vector<PipelineSample> samples;
  bool truncated = false;
  double exit_time = 0.0;
  double max_alpha_ratio = 0.0;  ///< max |alpha' - beta| / delta^2
  double max_beta_ratio = 0.0;   ///< max |beta' - w^2 alpha| / (|A| delta + delta^2)
};

/// Per-snapshot radial modulation fit and mode amplitudes.
PipelineReport modulation_pipeline(const Trajectory& traj, const RadialField& Q,
                                   std::span<const EigenPair> eig, const DualFamily& fam,
                                   double t_max);

}  // namespace critwave

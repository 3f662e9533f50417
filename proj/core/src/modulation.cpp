#include "critwave/modulation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "critwave/error.hpp"
#include "critwave/numerics.hpp"

namespace critwave {

void generator_values(const AxisFunction& f, double q, const double* x, double* out) {
  const int n = f.profile.dim();
  double grad[5];
  const double v = f.value_gradient(x, grad);
  double r2 = 0.0, xg = 0.0;
  for (int k = 0; k < n; ++k) {
    r2 += x[k] * x[k];
    xg += x[k] * grad[k];
  }
  out[0] = 0.5 * q * v + xg;
  for (int j = 0; j < n; ++j) {
    out[1 + j] = q * x[j] * v - r2 * grad[j] + 2.0 * x[j] * xg;
    out[1 + n + j] = grad[j];
  }
  const std::size_t rot = rotation_dimension(n);
  for (std::size_t k = 0; k < rot; ++k) {
    const auto [a, b] = zeta_pair(n, k);
    out[1 + 2 * n + static_cast<int>(k)] = x[b] * grad[a] - x[a] * grad[b];
  }
}

Eigen::MatrixXd left_translation_jacobian(const GroupParams& A, double step) {
  const auto np = static_cast<Eigen::Index>(group_dimension(A.dim));
  Eigen::MatrixXd T(np, np);
  std::vector<double> e(static_cast<std::size_t>(np), 0.0);
  for (Eigen::Index j = 0; j < np; ++j) {
    e[static_cast<std::size_t>(j)] = step;
    const auto plus = compose(GroupParams::from_flat(A.dim, e), A).flat();
    e[static_cast<std::size_t>(j)] = -step;
    const auto minus = compose(GroupParams::from_flat(A.dim, e), A).flat();
    e[static_cast<std::size_t>(j)] = 0.0;
    T.col(j) = (plus - minus) / (2.0 * step);
  }
  return T;
}

// ---- Cartesian sector ---------------------------------------------------------

CartesianModulation::CartesianModulation(const RadialField& Q, const DualFamily& fam,
                                         CartesianGridPtr box, ModulationOptions opts)
    : Q_(Q.with_extension(Extension::power_law)), fam_(&fam), box_(std::move(box)), opts_(opts) {
  require(fam.cartesian, Errc::invalid_argument, "Cartesian modulation needs a Cartesian family");
  require(box_->dim() == Q.dim(), Errc::invalid_argument, "dimension mismatch");
  q_box_ = pushforward(GroupParams::identity(Q.dim()), Q_, box_);
  q_norm_ = hdot_norm(q_box_);
  const auto m = static_cast<Eigen::Index>(fam.E.size());
  targets_.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    targets_[i] = integrate_product(q_box_, fam.E[static_cast<std::size_t>(i)].sample(box_));
  }
  const Eigen::MatrixXd J0 = transported_derivatives(q_box_, GroupParams::identity(Q.dim()));
  const Eigen::MatrixXd gram = J0 * J0.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  require(lu.isInvertible(), Errc::ill_posed_constraints,
          "orthogonality conditions are degenerate at A = 0");
  L_ = J0.transpose() * lu.inverse();
}

Eigen::VectorXd CartesianModulation::residual(const CartesianField& f, const GroupParams& A) const {
  const int n = A.dim;
  const auto m = fam_->E.size();
  const ConformalTransform T(A, pullback_exponent(n));
  const double rc = fam_->cutoff_radius;
  const auto& g = *box_;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  double x[5], y[5];
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (f[k] == 0.0) continue;
    g.point(k, x);
    double w = 0.0;
    if (!T.map(x, y, w)) continue;
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) r2 += y[a] * y[a];
    if (r2 >= rc * rc) continue;
    for (std::size_t i = 0; i < m; ++i) {
      acc[static_cast<Eigen::Index>(i)] += f[k] * w * fam_->E[i].value(y);
    }
  }
  return acc * g.cell_volume() - targets_;
}

Eigen::MatrixXd CartesianModulation::transported_derivatives(const CartesianField& f,
                                                             const GroupParams& A) const {
  const int n = A.dim;
  const double q = pullback_exponent(n);
  const auto m = fam_->E.size();
  const auto np = group_dimension(n);
  const ConformalTransform T(A, q);
  const double rc = fam_->cutoff_radius;
  const auto& g = *box_;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                            static_cast<Eigen::Index>(np));
  std::vector<double> gen(np);
  double x[5], y[5];
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (f[k] == 0.0) continue;
    g.point(k, x);
    double w = 0.0;
    if (!T.map(x, y, w)) continue;
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) r2 += y[a] * y[a];
    if (r2 >= rc * rc) continue;
    for (std::size_t i = 0; i < m; ++i) {
      generator_values(fam_->E[i], q, y, gen.data());
      for (std::size_t j = 0; j < np; ++j) {
        K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += f[k] * w * gen[j];
      }
    }
  }
  return K * g.cell_volume();
}

ModulationFit CartesianModulation::fit(const CartesianField& f) const {
  const int n = Q_.dim();
  require(hdot_norm(f - q_box_) <= opts_.r_fit_fraction * q_norm_, Errc::out_of_domain,
          "field is outside the modulation neighbourhood of Q");
  const auto m = L_.cols();
  Eigen::VectorXd B = Eigen::VectorXd::Zero(m);
  auto params = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd a = L_ * b;
    return GroupParams::from_flat(n, std::span<const double>(a.data(), static_cast<std::size_t>(a.size())));
  };
  GroupParams A = params(B);
  Eigen::VectorXd r = residual(f, A);
  int it = 0;
  for (; it < opts_.max_iter && r.cwiseAbs().maxCoeff() > opts_.tol; ++it) {
    const Eigen::MatrixXd K = transported_derivatives(f, A);
    const Eigen::MatrixXd T = left_translation_jacobian(A);
    const Eigen::MatrixXd J = K * T.fullPivLu().solve(L_);
    const Eigen::VectorXd step = -J.fullPivLu().solve(r);
    double t = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half, t *= 0.5) {
      try {
        const Eigen::VectorXd Bn = B + t * step;
        const GroupParams An = params(Bn);
        const Eigen::VectorXd rn = residual(f, An);
        if (rn.norm() < r.norm()) {
          B = Bn;
          A = An;
          r = rn;
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (e.code() != Errc::out_of_domain && e.code() != Errc::branch) throw;
      }
    }
    require(accepted, Errc::out_of_domain, "modulation Newton iteration diverged");
  }
  require(r.cwiseAbs().maxCoeff() <= opts_.tol, Errc::out_of_domain,
          "modulation Newton iteration did not converge");
  ModulationFit out;
  out.A = A;
  out.residuals.assign(r.data(), r.data() + r.size());
  out.iterations = it;
  out.max_residual = r.cwiseAbs().maxCoeff();
  return out;
}

// ---- radial sector ---------------------------------------------------------------

RadialModulation::RadialModulation(const RadialField& Q, const DualFamily& fam,
                                   ModulationOptions opts)
    : Q_(Q.with_extension(Extension::power_law)), opts_(opts) {
  require(!fam.cartesian && fam.E.size() == 1, Errc::invalid_argument,
          "radial modulation needs a one-element radial family");
  const auto& grid = Q.grid();
  const auto& src = fam.E[0].profile;
  E_ = src.grid() == grid ? src.with_extension(Extension::zero)
                          : RadialField::sample(grid, [&](double r) { return src(r); },
                                                Extension::zero);
  dE_ = dilation_derivative(E_, pullback_exponent(Q.dim()));
  target_ = integrate_product(Q_, E_);
  q_norm_ = hdot_norm(Q_);
}

double RadialModulation::residual(const RadialField& f, double s) const {
  const int n = f.dim();
  const double lambda = std::exp(s);
  const double w = std::exp(0.5 * pullback_exponent(n) * s);
  const auto& g = *f.grid();
  const auto wt = g.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = lambda * g.node(i);
    if (r > E_.grid()->hull()) break;
    acc += wt[i] * f[i] * w * E_(r);
  }
  return acc - target_;
}

ModulationFit RadialModulation::fit(const RadialField& f, double s_init) const {
  require(f.grid()->size() == Q_.grid()->size() && f.grid()->r_max() == Q_.grid()->r_max(),
          Errc::invalid_grid, "field and Q must share the radial grid");
  RadialField diff = f.with_extension(Extension::none);
  diff -= Q_.with_extension(Extension::none);
  require(hdot_norm(diff) <= opts_.r_fit_fraction * q_norm_, Errc::out_of_domain,
          "field is outside the modulation neighbourhood of Q");
  const int n = f.dim();
  double s = s_init;
  double r = residual(f, s);
  int it = 0;
  for (; it < opts_.max_iter && std::abs(r) > opts_.tol; ++it) {
    const double lambda = std::exp(s);
    const double w = std::exp(0.5 * pullback_exponent(n) * s);
    const auto& g = *f.grid();
    const auto wt = g.weights();
    double J = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double rr = lambda * g.node(i);
      if (rr > dE_.grid()->hull()) break;
      J += wt[i] * f[i] * w * dE_(rr);
    }
    require(J != 0.0, Errc::out_of_domain, "degenerate radial modulation Jacobian");
    const double step = -r / J;
    double t = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half, t *= 0.5) {
      const double rn = residual(f, s + t * step);
      if (std::abs(rn) < std::abs(r)) {
        s += t * step;
        r = rn;
        accepted = true;
        break;
      }
    }
    require(accepted, Errc::out_of_domain, "radial modulation Newton iteration diverged");
  }
  require(std::abs(r) <= opts_.tol, Errc::out_of_domain,
          "radial modulation Newton iteration did not converge");
  ModulationFit out;
  out.A = GroupParams::identity(n);
  out.A.s = s;
  out.residuals = {r};
  out.iterations = it;
  out.max_residual = std::abs(r);
  return out;
}

// ---- mode amplitudes ----------------------------------------------------------------

namespace {

void finish_amplitudes(ModeAmplitudes& out) {
  double d2 = 0.0;
  for (double a : out.alpha) d2 += a * a;
  out.delta = std::sqrt(d2);
  out.upper_ratio = out.h_norm > 0.0 ? out.delta / out.h_norm : 0.0;
  out.lower_ratio = out.delta > 0.0 ? (out.du_norm + out.h_norm) / out.delta : 0.0;
}

}  // namespace

ModeAmplitudes mode_amplitudes(const RadialField& u, const RadialField& du, const GroupParams& A,
                               const RadialField& Q, std::span<const EigenPair> eig) {
  const int n = u.dim();
  require(A.a.isZero(0.0) && A.b.isZero(0.0) && (A.c.size() == 0 || A.c.isZero(0.0)),
          Errc::invalid_argument, "radial mode amplitudes need a pure dilation");
  const auto& grid = u.grid();
  const double lambda = std::exp(A.s);
  const double w = std::exp(0.5 * pullback_exponent(n) * A.s);
  const auto Qg = RadialField::sample(grid, [&](double r) { return Q(r); });
  ModeAmplitudes out;
  for (const auto& e : eig) {
    const auto Yt = RadialField::sample(grid, [&](double r) { return w * e.Y(lambda * r); });
    const auto Yg = RadialField::sample(grid, [&](double r) { return e.Y(r); });
    out.alpha.push_back(integrate_product(u, Yt) - integrate_product(Qg, Yg));
    out.beta.push_back(integrate_product(du, Yt));
  }
  const double inv_w = std::exp(-0.5 * pushforward_exponent(n) * A.s);
  const RadialField ut =
      u.extension() == Extension::none ? u.with_extension(Extension::power_law) : u;
  auto h = RadialField::sample(grid, [&](double r) { return inv_w * ut(r / lambda); });
  h -= Qg;
  out.h_norm = hdot_norm(h);
  out.du_norm = l2_norm(du.with_extension(Extension::none));
  finish_amplitudes(out);
  return out;
}

ModeAmplitudes mode_amplitudes(const CartesianField& u, const CartesianField& du,
                               const GroupParams& A, const RadialField& Q,
                               std::span<const EigenPair> eig) {
  const int n = u.dim();
  const auto& box = u.grid();
  const ConformalTransform T(A, pullback_exponent(n));
  const auto Qt = Q.with_extension(Extension::power_law);
  const auto Qbox = pushforward(GroupParams::identity(n), Qt, box);
  ModeAmplitudes out;
  for (const auto& e : eig) {
    const auto Yt = CartesianField::sample(box, [&](const double* x) { return T(e.Y, x); });
    const auto Yb = AxisFunction{e.Y, -1}.sample(box);
    out.alpha.push_back(integrate_product(u, Yt) - integrate_product(Qbox, Yb));
    out.beta.push_back(integrate_product(du, Yt));
  }
  const CartesianField u0 =
      u.extension() == Extension::zero
          ? u
          : CartesianField(box, std::vector<double>(u.values().begin(), u.values().end()),
                           Extension::zero);
  auto h = pushforward(inverse(A), u0);
  h -= Qbox;
  out.h_norm = hdot_norm(h);
  out.du_norm = l2_norm(du);
  finish_amplitudes(out);
  return out;
}

// ---- exponential fits and centre selection ----------------------------------------------

ExponentialFit fit_exponential_modes(std::span<const double> t, std::span<const double> sigma,
                                     double omega, double t_lo, double t_hi) {
  require(t.size() == sigma.size(), Errc::invalid_argument, "time and series sizes differ");
  require(omega > 0.0, Errc::invalid_argument, "rate must be positive");
  require(t_hi - t_lo >= 3.0 / omega, Errc::fit_window, "fit window shorter than 3/omega");
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_lo && t[i] <= t_hi) {
      ts.push_back(t[i] - t_lo);
      ys.push_back(sigma[i]);
    }
  }
  require(ts.size() >= 4, Errc::fit_window, "too few samples in the fit window");
  const auto k = static_cast<Eigen::Index>(ts.size());
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), k);

  auto solve = [&](double kappa, Eigen::Vector2d& c) {
    Eigen::MatrixXd M(k, 2);
    for (Eigen::Index i = 0; i < k; ++i) {
      M(i, 0) = std::exp(-omega * ts[static_cast<std::size_t>(i)]);
      M(i, 1) = std::exp(-kappa * ts[static_cast<std::size_t>(i)]);
    }
    c = M.colPivHouseholderQr().solve(y);
    return (M * c - y).squaredNorm();
  };
  Eigen::Vector2d c;
  const double kappa = numerics::golden_min(
      [&](double kap) { return solve(kap, c); }, 1.05 * omega, 4.0 * omega, 1e-10 * omega);
  const double sq = solve(kappa, c);
  ExponentialFit out;
  out.S = c[0] * std::exp(omega * t_lo);
  out.fast_rate = kappa;
  out.fast_amplitude = c[1] * std::exp(kappa * t_lo);
  out.rms_residual = std::sqrt(sq / static_cast<double>(k));
  return out;
}

double right_mass(std::span<const double> y, std::span<const double> phi, double y1) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    const double a = y[i], b = y[i + 1];
    if (b <= y1) continue;
    if (a >= y1) {
      acc += 0.5 * (phi[i] + phi[i + 1]) * (b - a);
    } else {
      const double s = (y1 - a) / (b - a);
      const double v = phi[i] + s * (phi[i + 1] - phi[i]);
      acc += 0.5 * (v + phi[i + 1]) * (b - y1);
    }
  }
  return acc;
}

double center_select(std::span<const double> y, std::span<const double> phi) {
  require(y.size() == phi.size() && y.size() >= 2, Errc::invalid_argument,
          "density needs at least two samples");
  const double dy = y[1] - y[0];
  require(dy > 0.0, Errc::invalid_argument, "marginal grid must increase");
  for (std::size_t i = 1; i < y.size(); ++i) {
    require(std::abs((y[i] - y[i - 1]) - dy) <= 1e-9 * dy, Errc::invalid_argument,
            "marginal grid must be uniform");
  }
  for (double v : phi) require(v >= 0.0, Errc::normalization, "density must be non-negative");
  const double total = right_mass(y, phi, y.front());
  require(std::abs(total - 1.0) <= 1e-6, Errc::normalization,
          "density is not normalised (mass " + std::to_string(total) + ")");
  auto F = [&](double s) { return right_mass(y, phi, s) + std::erfc(s) / 6.0 - 2.0 / 3.0; };
  return numerics::bisect(F, y.front() - 10.0, y.back() + 10.0, 1e-10);
}

}  // namespace critwave

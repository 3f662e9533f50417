#include "critwave/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "critwave/error.hpp"
#include "critwave/stationary.hpp"

namespace critwave {

std::vector<double> linearized_potential(int dim, std::span<const double> q) {
  std::vector<double> pot(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) pot[i] = critical_nonlinearity_derivative(dim, q[i]);
  return pot;
}

// ---- radial operator --------------------------------------------------------

RadialOperator::RadialOperator(RadialGridPtr grid, std::vector<double> potential)
    : grid_(std::move(grid)), potential_(std::move(potential)) {
  const auto& g = *grid_;
  const std::size_t m = g.size();
  require(potential_.size() == m, Errc::invalid_grid, "potential size does not match grid");
  const auto vol = g.cell_volumes();
  const double h = g.spacing();
  sym_.diag.resize(m);
  sym_.off.resize(m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    const double left = i > 0 ? g.face_area(i - 1) : 0.0;
    sym_.diag[i] = (left + g.face_area(i)) / (h * vol[i]) - potential_[i];
    if (i + 1 < m) sym_.off[i] = -g.face_area(i) / (h * std::sqrt(vol[i] * vol[i + 1]));
  }
}

RadialField RadialOperator::apply(const RadialField& f) const {
  const auto& g = *grid_;
  const std::size_t m = g.size();
  const auto vol = g.cell_volumes();
  const double h = g.spacing();
  std::vector<double> out(m);
  double inner = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double next = i + 1 < m ? f[i + 1] : 0.0;
    const double outer = g.face_area(i) * (next - f[i]) / h;
    out[i] = -(outer - inner) / vol[i] - potential_[i] * f[i];
    inner = outer;
  }
  return RadialField(grid_, std::move(out));
}

double RadialOperator::stiffness(const RadialField& f) const {
  const auto& g = *grid_;
  const std::size_t m = g.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = (i + 1 < m ? f[i + 1] : 0.0) - f[i];
    acc += g.face_area(i) * d * d;
  }
  return acc / g.spacing();
}

RadialOperator assemble(const RadialField& Q) {
  return RadialOperator(Q.grid(), linearized_potential(Q.dim(), Q.values()));
}

// ---- Cartesian operator -----------------------------------------------------

CartesianOperator::CartesianOperator(CartesianGridPtr grid, std::vector<double> potential)
    : grid_(std::move(grid)), potential_(std::move(potential)) {
  require(potential_.size() == grid_->size(), Errc::invalid_grid,
          "potential size does not match grid");
}

CartesianField CartesianOperator::apply(const CartesianField& f) const {
  auto lap = laplacian(f);
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!grid_->on_boundary(i)) out[i] = -lap[i] - potential_[i] * f[i];
  }
  return CartesianField(grid_, std::move(out), Extension::zero);
}

Eigen::SparseMatrix<double> CartesianOperator::assemble_matrix() const {
  const auto& g = *grid_;
  std::vector<long> interior_index(g.size(), -1);
  long count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.on_boundary(i)) interior_index[i] = count++;
  }
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(count) * static_cast<std::size_t>(2 * g.dim() + 1));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const long row = interior_index[i];
    if (row < 0) continue;
    trip.emplace_back(row, row, 2.0 * g.dim() * inv_h2 - potential_[i]);
    for (int a = 0; a < g.dim(); ++a) {
      for (const std::size_t j : {i + g.stride(a), i - g.stride(a)}) {
        if (interior_index[j] >= 0) trip.emplace_back(row, interior_index[j], -inv_h2);
      }
    }
  }
  Eigen::SparseMatrix<double> A(count, count);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

double CartesianOperator::symmetry_defect() const {
  const auto A = assemble_matrix();
  const Eigen::SparseMatrix<double> At = A.transpose();
  const Eigen::SparseMatrix<double> D = A - At;
  double worst = 0.0;
  for (int k = 0; k < D.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it) {
      worst = std::max(worst, std::abs(it.value()));
    }
  }
  return worst;
}

CartesianOperator assemble(const CartesianField& Q) {
  return CartesianOperator(Q.grid(), linearized_potential(Q.dim(), Q.values()));
}

// ---- negative spectrum -------------------------------------------------------

std::vector<EigenPair> negative_spectrum(const RadialOperator& op, double tol_gap) {
  const auto& mat = op.matrix();
  const std::size_t m = mat.size();
  const std::size_t count = numerics::count_below(mat, -tol_gap);
  const auto vol = op.grid()->cell_volumes();
  std::vector<EigenPair> out;
  std::vector<std::vector<double>> found;
  for (std::size_t k = 0; k < count; ++k) {
    const double lambda = numerics::kth_eigenvalue(mat, k);
    const double shift = lambda - 1e-10 * std::max(1.0, std::abs(lambda));
    std::vector<double> z(m, 1.0), next(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = 1.0 + 1e-3 * static_cast<double>(i % 7);
    double change = 1.0;
    for (int it = 0; it < 8 && change > 1e-13; ++it) {
      for (const auto& prev : found) {
        double dot = 0.0;
        for (std::size_t i = 0; i < m; ++i) dot += prev[i] * z[i];
        for (std::size_t i = 0; i < m; ++i) z[i] -= dot * prev[i];
      }
      require(numerics::solve_shifted(mat, shift, z, next), Errc::solver,
              "inverse iteration hit a singular shift");
      double nrm = 0.0;
      for (double v : next) nrm += v * v;
      nrm = std::sqrt(nrm);
      const double sign = next[0] < 0.0 ? -1.0 : 1.0;
      change = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double v = sign * next[i] / nrm;
        change = std::max(change, std::abs(v - z[i]));
        z[i] = v;
      }
    }
    found.push_back(z);
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) y[i] = z[i] / std::sqrt(vol[i]);
    EigenPair pair;
    pair.omega = std::sqrt(-lambda);
    pair.Y = RadialField(op.grid(), std::move(y), Extension::zero);
    auto res = op.apply(pair.Y);
    res += (-lambda) * pair.Y;
    pair.residual = std::sqrt(volume_product(res, res));
    require(pair.residual < 1e-6 * std::max(1.0, -lambda), Errc::solver,
            "eigenvector residual " + std::to_string(pair.residual) + " too large");
    out.push_back(std::move(pair));
  }
  return out;
}

std::size_t square_well_bound_states(double depth, double radius) {
  require(depth >= 0.0 && radius > 0.0, Errc::invalid_argument, "square well needs depth >= 0");
  return static_cast<std::size_t>(std::floor(radius * std::sqrt(depth) / std::numbers::pi + 0.5));
}

// ---- kernel ------------------------------------------------------------------

double eval_LambdaW(int dim, double r) {
  return 0.5 * (dim - 2.0) * eval_W(dim, r) + r * eval_W_derivative(dim, r);
}

RadialField scaling_generator(const RadialField& Q) {
  return dilation_derivative(Q, pushforward_exponent(Q.dim()));
}

namespace {

std::size_t generator_rank(const std::vector<CartesianField>& gens) {
  const auto k = static_cast<Eigen::Index>(gens.size());
  Eigen::MatrixXd G(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      G(i, j) = G(j, i) = integrate_product(gens[static_cast<std::size_t>(i)],
                                            gens[static_cast<std::size_t>(j)]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const double top = es.eigenvalues().maxCoeff();
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (es.eigenvalues()[i] > 1e-8 * top) ++rank;
  }
  return rank;
}

double max_abs(const CartesianField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

KernelReport kernel_report(const RadialField& Qr, const RadialField& LQ,
                           const CartesianField& Qbox, const CartesianField& dQbox,
                           const RadialField& Qprofile) {
  KernelReport rep;
  const auto op = assemble(Qr);
  rep.lambda_residual = interior_max_abs(op.apply(LQ));
  const auto cop = assemble(Qbox);
  rep.translation_residual = interior_max_abs(cop.apply(dQbox));
  const auto gens = parameter_derivatives(Qprofile, pushforward_exponent(Qr.dim()), Qbox.grid());
  const std::size_t first_rot = 1 + 2 * static_cast<std::size_t>(Qr.dim());
  for (std::size_t k = first_rot; k < gens.size(); ++k) {
    rep.rotation_max = std::max(rep.rotation_max, max_abs(gens[k]));
  }
  rep.kernel_dimension = generator_rank(gens);
  return rep;
}

}  // namespace

KernelReport kernel_residuals_W(RadialGridPtr radial, CartesianGridPtr box) {
  const int n = radial->dim();
  require(box->dim() == n, Errc::invalid_argument, "dimension mismatch");
  const auto W = sample_W(radial);
  const auto LW = RadialField::sample(radial, [n](double r) { return eval_LambdaW(n, r); });
  const auto Wbox = sample_W(box);
  const auto dW = CartesianField::sample(box, [n](const double* x) {
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += x[k] * x[k];
    const double r = std::sqrt(r2);
    return r > 0.0 ? eval_W_derivative(n, r) * x[0] / r : 0.0;
  });
  return kernel_report(W, LW, Wbox, dW, W);
}

KernelReport kernel_residuals(const RadialField& Q, CartesianGridPtr box) {
  const int n = Q.dim();
  require(box->dim() == n, Errc::invalid_argument, "dimension mismatch");
  const auto LQ = scaling_generator(Q);
  const auto Qbox = CartesianField::sample(box, [&](const double* x) {
    return Q(Eigen::Map<const Eigen::VectorXd>(x, n).norm());
  });
  const auto dQ = CartesianField::sample(box, [&](const double* x) {
    const double r = Eigen::Map<const Eigen::VectorXd>(x, n).norm();
    return r > 0.0 ? Q.derivative(r) * x[0] / r : 0.0;
  });
  return kernel_report(Q, LQ, Qbox, dQ, Q);
}

// ---- decay of eigenfunctions ------------------------------------------------

double ExponentialTail::log_value(double r) const {
  return log_c - omega * r - 0.5 * (dim - 1.0) * std::log(r);
}

MeshkovReport meshkov_fit(const RadialField& Y, double omega, double lo, double hi) {
  const auto& g = *Y.grid();
  const int n = g.dim();
  if (hi <= 0.0) hi = 0.5 * g.r_max();
  if (lo <= 0.0) lo = 0.5 * hi;
  require(lo < hi && hi <= g.hull(), Errc::fit_window, "invalid Meshkov fit window");
  std::vector<double> rs, gs;
  const double sign = Y(lo) < 0.0 ? -1.0 : 1.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.node(i);
    if (r < lo || r > hi) continue;
    const double y = sign * Y[i];
    require(y > 0.0 && std::isfinite(std::log(y)), Errc::fit_window,
            "far field of the eigenfunction is dominated by noise (sign change or underflow)");
    rs.push_back(r);
    gs.push_back(std::log(y) + omega * r + 0.5 * (n - 1.0) * std::log(r));
  }
  require(rs.size() >= 8, Errc::fit_window, "too few nodes in the Meshkov window");
  MeshkovReport rep;
  rep.window_lo = lo;
  rep.window_hi = hi;
  rep.slope = numerics::linear_fit(rs, gs)[1];
  const auto [mn, mx] = std::minmax_element(gs.begin(), gs.end());
  rep.c_lower = std::exp(*mn);
  rep.c_upper = std::exp(*mx);
  rep.tail = {n, omega, gs.back()};
  return rep;
}

double exterior_functional(const RadialField& Y, double R) {
  const auto& g = *Y.grid();
  const std::size_t m = g.size();
  const auto w = g.weights();
  const double h = g.spacing();
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (g.node(i) >= R) acc += w[i] * Y[i] * Y[i];
    if (i + 1 < m && (static_cast<double>(i) + 1.0) * h >= R) {
      const double d = Y[i + 1] - Y[i];
      acc += g.face_area(i) * d * d / h;
    }
  }
  return acc;
}

DecayRateReport exterior_decay_rate(const RadialField& Y, double omega, double lo, double hi,
                                    std::size_t samples) {
  require(samples >= 3 && lo < hi, Errc::fit_window, "invalid decay-rate window");
  std::vector<double> rs(samples), ls(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    rs[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
    const double G = exterior_functional(Y, rs[k]);
    require(G > 0.0, Errc::fit_window, "exterior functional vanished in the window");
    ls[k] = std::log(G);
  }
  DecayRateReport rep;
  rep.slope = numerics::linear_fit(rs, ls)[1];
  rep.relative_error = std::abs(rep.slope + 2.0 * omega) / (2.0 * omega);
  return rep;
}

TailNormReport tail_critical_norm(const RadialField& Y, double omega, double R) {
  require(R >= 1.0, Errc::invalid_argument, "tail norm needs R >= 1");
  const auto& g = *Y.grid();
  const int n = g.dim();
  const double p = 2.0 * (n + 2.0) / (n - 2.0);
  const double qn = n == 5 ? 32.0 / 9.0 : 4.0 * (n - 1.0) / (n - 2.0);
  TailNormReport rep;
  rep.log_envelope = -p * omega * R - qn * std::log(R);
  double ymax = 0.0;
  for (double v : Y.values()) ymax = std::max(ymax, std::abs(v));
  if (ymax == 0.0) {
    rep.zero = true;
    rep.log_tail = -std::numeric_limits<double>::infinity();
    return rep;
  }
  const auto fit = meshkov_fit(Y, omega);
  const double switch_r = fit.window_hi;
  std::vector<double> logs;
  const auto w = g.weights();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.node(i);
    if (r < R || r >= switch_r || Y[i] == 0.0) continue;
    logs.push_back(std::log(w[i]) + p * std::log(std::abs(Y[i])));
  }
  const double start = std::max(R, switch_r);
  const double span = 60.0 / (p * omega);
  const auto rule = numerics::gauss_legendre(96, start, start + span);
  const double area = sphere_area(n);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double r = rule.nodes[k];
    logs.push_back(std::log(rule.weights[k] * area) + (n - 1.0) * std::log(r) +
                   p * fit.tail.log_value(r));
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - top);
  rep.log_tail = top + std::log(acc);
  rep.ratio = std::exp(rep.log_tail - rep.log_envelope);
  return rep;
}

// ---- dual family -------------------------------------------------------------

double smooth_cutoff(double r, double radius) {
  const double t = (radius - r) / (0.5 * radius);
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double AxisFunction::value(const double* x) const {
  const int n = profile.dim();
  double r2 = 0.0;
  for (int k = 0; k < n; ++k) r2 += x[k] * x[k];
  const double p = profile(std::sqrt(r2));
  return axis < 0 ? p : x[axis] * p;
}

double AxisFunction::value_gradient(const double* x, double* grad) const {
  const int n = profile.dim();
  double r2 = 0.0;
  for (int k = 0; k < n; ++k) r2 += x[k] * x[k];
  const double r = std::sqrt(r2);
  const double p = profile(r);
  const double dp_r = r > 0.0 ? profile.derivative(r) / r : 0.0;
  if (axis < 0) {
    for (int k = 0; k < n; ++k) grad[k] = dp_r * x[k];
    return p;
  }
  for (int k = 0; k < n; ++k) grad[k] = x[axis] * dp_r * x[k];
  grad[axis] += p;
  return x[axis] * p;
}

CartesianField AxisFunction::sample(CartesianGridPtr grid) const {
  return CartesianField::sample(
      std::move(grid), [this](const double* x) { return value(x); }, Extension::zero);
}

namespace {

RadialField on_grid(const RadialGridPtr& grid, const RadialField& f) {
  if (f.grid() == grid) return f.with_extension(Extension::zero);
  return RadialField::sample(grid, [&](double r) { return f(r); }, Extension::zero);
}

// Radial parts shared by both sectors: cutoff times {Lambda Q, Y_1..Y_p}.
struct Ingredients {
  RadialField lambda_q;
  std::vector<RadialField> ys;
  std::vector<RadialField> cut_basis;
};

Ingredients ingredients(const RadialField& Q, std::span<const EigenPair> eig, double rc) {
  const auto& grid = Q.grid();
  require(rc > 0.0 && rc <= grid->hull(), Errc::invalid_argument,
          "cutoff radius must lie inside the grid");
  Ingredients in{scaling_generator(Q).with_extension(Extension::zero), {}, {}};
  for (const auto& e : eig) in.ys.push_back(on_grid(grid, e.Y));
  auto cut = [&](const RadialField& f) {
    return RadialField::sample(
        grid, [&](double r) { return smooth_cutoff(r, rc) * f(r); }, Extension::zero);
  };
  in.cut_basis.push_back(cut(in.lambda_q));
  for (const auto& y : in.ys) in.cut_basis.push_back(cut(y));
  return in;
}

// Coefficients c with sum_b c_b int B_b T_a = delta_{a0}.
Eigen::VectorXd solve_combination(const Eigen::MatrixXd& gram) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(gram.rows());
  rhs[0] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  require(lu.isInvertible(), Errc::ill_posed_constraints, "dual-family system is singular");
  return lu.solve(rhs);
}

RadialField combine(const std::vector<RadialField>& basis, const Eigen::VectorXd& c) {
  RadialField out = double(c[0]) * basis[0];
  for (std::size_t b = 1; b < basis.size(); ++b) {
    out += double(c[static_cast<Eigen::Index>(b)]) * basis[b];
  }
  return out;
}

}  // namespace

DualFamily build_dual_family(const RadialField& Q, std::span<const EigenPair> eig,
                             double cutoff_radius) {
  const auto in = ingredients(Q, eig, cutoff_radius);
  const auto k = static_cast<Eigen::Index>(in.cut_basis.size());
  std::vector<const RadialField*> targets{&in.lambda_q};
  for (const auto& y : in.ys) targets.push_back(&y);
  Eigen::MatrixXd gram(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      gram(a, b) = integrate_product(in.cut_basis[static_cast<std::size_t>(b)],
                                     *targets[static_cast<std::size_t>(a)]);
    }
  }
  DualFamily fam;
  fam.cutoff_radius = cutoff_radius;
  fam.E.push_back({combine(in.cut_basis, solve_combination(gram)), -1});
  fam.Z.push_back({in.lambda_q, -1});
  fam.Y = in.ys;
  return fam;
}

DualFamily build_dual_family(const RadialField& Q, std::span<const EigenPair> eig,
                             double cutoff_radius, CartesianGridPtr box) {
  const int n = Q.dim();
  require(box->dim() == n, Errc::invalid_argument, "dimension mismatch");
  const auto in = ingredients(Q, eig, cutoff_radius);
  const auto k = static_cast<Eigen::Index>(in.cut_basis.size());
  std::vector<CartesianField> basis_box, target_box;
  for (const auto& b : in.cut_basis) basis_box.push_back(AxisFunction{b, -1}.sample(box));
  target_box.push_back(AxisFunction{in.lambda_q, -1}.sample(box));
  for (const auto& y : in.ys) target_box.push_back(AxisFunction{y, -1}.sample(box));
  Eigen::MatrixXd gram(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      gram(a, b) = integrate_product(basis_box[static_cast<std::size_t>(b)],
                                     target_box[static_cast<std::size_t>(a)]);
    }
  }
  DualFamily fam;
  fam.cartesian = true;
  fam.cutoff_radius = cutoff_radius;
  fam.E.push_back({combine(in.cut_basis, solve_combination(gram)), -1});
  fam.Z.push_back({in.lambda_q, -1});
  fam.Y = in.ys;

  // d_j Q = x_j Q'(r)/r; its dual is a cutoff dipole with the same profile.
  const auto& grid = Q.grid();
  const auto slope = RadialField::sample(
      grid, [&](double r) { return Q.derivative(r) / r; }, Extension::zero);
  const auto cut_slope = RadialField::sample(
      grid, [&](double r) { return smooth_cutoff(r, cutoff_radius) * slope(r); },
      Extension::zero);
  for (int j = 0; j < n; ++j) {
    const AxisFunction z{slope, j};
    const AxisFunction e{cut_slope, j};
    const double norm = integrate_product(e.sample(box), z.sample(box));
    require(std::abs(norm) > 0.0, Errc::ill_posed_constraints, "translation dual vanished");
    fam.E.push_back({(1.0 / norm) * cut_slope, j});
    fam.Z.push_back(z);
  }
  return fam;
}

DualityReport check_duality(const DualFamily& fam, const RadialGridPtr& grid) {
  require(!fam.cartesian, Errc::invalid_argument, "radial check needs a radial family");
  DualityReport rep;
  for (std::size_t j = 0; j < fam.E.size(); ++j) {
    const auto e = on_grid(grid, fam.E[j].profile);
    for (std::size_t k = 0; k < fam.Z.size(); ++k) {
      const double v = integrate_product(e, on_grid(grid, fam.Z[k].profile));
      rep.max_duality_error = std::max(rep.max_duality_error, std::abs(v - (j == k ? 1.0 : 0.0)));
    }
    for (const auto& y : fam.Y) {
      rep.max_orthogonality_error =
          std::max(rep.max_orthogonality_error, std::abs(integrate_product(e, on_grid(grid, y))));
    }
  }
  return rep;
}

DualityReport check_duality(const DualFamily& fam, const CartesianGridPtr& box) {
  DualityReport rep;
  std::vector<CartesianField> zs, ys;
  for (const auto& z : fam.Z) zs.push_back(z.sample(box));
  for (const auto& y : fam.Y) ys.push_back(AxisFunction{y, -1}.sample(box));
  for (std::size_t j = 0; j < fam.E.size(); ++j) {
    const auto e = fam.E[j].sample(box);
    for (std::size_t k = 0; k < zs.size(); ++k) {
      const double v = integrate_product(e, zs[k]);
      rep.max_duality_error = std::max(rep.max_duality_error, std::abs(v - (j == k ? 1.0 : 0.0)));
    }
    for (const auto& y : ys) {
      rep.max_orthogonality_error =
          std::max(rep.max_orthogonality_error, std::abs(integrate_product(e, y)));
    }
  }
  return rep;
}

// ---- coercivity ----------------------------------------------------------------

double coercivity_min(const RadialField& Q, std::span<const RadialField> constraints) {
  const auto& grid = Q.grid();
  const auto& g = *grid;
  const auto m = static_cast<Eigen::Index>(g.size());
  const auto vol = g.cell_volumes();
  const double h = g.spacing();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const double left = i > 0 ? g.face_area(iu - 1) : 0.0;
    K(i, i) = (left + g.face_area(iu)) / h;
    if (i + 1 < m) K(i, i + 1) = K(i + 1, i) = -g.face_area(iu) / h;
  }
  const auto pot = linearized_potential(Q.dim(), Q.values());
  Eigen::VectorXd P(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    P[i] = vol[iu] * pot[iu];
  }

  Eigen::MatrixXd basis;
  const auto k = static_cast<Eigen::Index>(constraints.size());
  if (k == 0) {
    basis = Eigen::MatrixXd::Identity(m, m);
  } else {
    Eigen::MatrixXd C(m, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto c = on_grid(grid, constraints[static_cast<std::size_t>(j)]);
      for (Eigen::Index i = 0; i < m; ++i) {
        C(i, j) = vol[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)];
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
    const auto& sv = svd.singularValues();
    require(sv.minCoeff() > 1e-10 * sv.maxCoeff(), Errc::ill_posed_constraints,
            "constraint functions are linearly dependent");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(C);
    const Eigen::MatrixXd Qfull = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
    basis = Qfull.rightCols(m - k);
  }
  const Eigen::MatrixXd A = basis.transpose() * P.asDiagonal() * basis;
  const Eigen::MatrixXd B = basis.transpose() * K * basis;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, Errc::solver, "generalized eigensolver failed");
  return 0.5 - 0.5 * es.eigenvalues().maxCoeff();
}

// ---- Lipschitz estimate -----------------------------------------------------------

LipschitzReport lipschitz_estimate_check(const RadialField& Q, const DualFamily& fam,
                                         const GroupParams& A, CartesianGridPtr box) {
  const auto Qt = Q.with_extension(Extension::power_law);
  auto diff = pushforward(A, Qt, box);
  diff -= pushforward(GroupParams::identity(A.dim), Qt, box);
  LipschitzReport rep;
  rep.lhs = hdot_norm(diff);
  for (const auto& e : fam.E) rep.rhs += std::abs(integrate_product(diff, e.sample(box)));
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  const double a = A.norm();
  rep.per_parameter = a > 0.0 ? rep.lhs / a : 0.0;
  return rep;
}

}  // namespace critwave

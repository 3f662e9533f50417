#include "critwave/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "critwave/error.hpp"
#include "critwave/numerics.hpp"

namespace critwave {

double sphere_area(int dim) {
  const double n = dim;
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

double critical_exponent(int dim) {
  require(dim >= 3, Errc::invalid_argument, "critical exponent needs N >= 3");
  return 2.0 * dim / (dim - 2.0);
}

// ---- RadialGrid -------------------------------------------------------------

RadialGrid::RadialGrid(int dim, std::size_t cells, double r_max) : dim_(dim), r_max_(r_max) {
  require(dim >= 3 && dim <= 5, Errc::invalid_grid, "radial grid supports N in {3,4,5}");
  require(cells >= 3, Errc::invalid_grid, "radial grid needs at least 3 nodes");
  require(std::isfinite(r_max) && r_max > 0.0, Errc::invalid_grid, "R_max must be positive");
  h_ = r_max / static_cast<double>(cells);
  const double area = sphere_area(dim);
  nodes_.resize(cells);
  weights_.resize(cells);
  volumes_.resize(cells);
  faces_.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double r = (static_cast<double>(i) + 0.5) * h_;
    const double lo = static_cast<double>(i) * h_;
    const double hi = lo + h_;
    nodes_[i] = r;
    weights_[i] = area * std::pow(r, dim - 1) * h_;
    volumes_[i] = area * (std::pow(hi, dim) - std::pow(lo, dim)) / dim;
    faces_[i] = area * std::pow(hi, dim - 1);
  }
}

RadialGridPtr make_radial_grid(int dim, std::size_t cells, double r_max) {
  return std::make_shared<const RadialGrid>(dim, cells, r_max);
}

// ---- RadialField ------------------------------------------------------------

double fit_tail_coefficient(const RadialGrid& grid, std::span<const double> values) {
  const std::size_t m = grid.size();
  const std::size_t count = std::max<std::size_t>(2, m / 10);
  double num = 0.0, den = 0.0;
  for (std::size_t i = m - count; i < m; ++i) {
    const double g = std::pow(grid.node(i), 2 - grid.dim());
    num += values[i] * g;
    den += g * g;
  }
  return num / den;
}

RadialField::RadialField(RadialGridPtr grid, std::vector<double> values, Extension ext)
    : grid_(std::move(grid)), values_(std::move(values)), ext_(ext) {
  require(grid_ != nullptr, Errc::invalid_grid, "field without grid");
  require(values_.size() == grid_->size(), Errc::invalid_grid, "field size does not match grid");
  if (ext_ == Extension::power_law) tail_c_ = fit_tail_coefficient(*grid_, values_);
}

RadialField RadialField::with_extension(Extension ext) const {
  return RadialField(grid_, values_, ext);
}

namespace {

// Value at index k, with even reflection across r = 0 (k < 0).
double reflected(std::span<const double> v, long k) {
  if (k < 0) k = -k - 1;
  return v[static_cast<std::size_t>(k)];
}

double tail_value(const RadialField& f, double r) {
  switch (f.extension()) {
    case Extension::power_law:
      return f.tail_coefficient() * std::pow(r, 2 - f.dim());
    case Extension::zero:
      return 0.0;
    case Extension::none:
      break;
  }
  fail(Errc::extrapolation, "radial query r=" + std::to_string(r) + " outside grid hull");
}

double tail_derivative(const RadialField& f, double r) {
  switch (f.extension()) {
    case Extension::power_law:
      return (2 - f.dim()) * f.tail_coefficient() * std::pow(r, 1 - f.dim());
    case Extension::zero:
      return 0.0;
    case Extension::none:
      break;
  }
  fail(Errc::extrapolation, "radial query r=" + std::to_string(r) + " outside grid hull");
}

// Stencil start index and local coordinate for a query inside [0, hull].
struct Stencil {
  long base;
  double t;
};

Stencil radial_stencil(const RadialGrid& g, double r) {
  const long m = static_cast<long>(g.size());
  double s = r / g.spacing() - 0.5;
  long k = static_cast<long>(std::floor(s));
  k = std::min(k, m - 2);
  double t = s - static_cast<double>(k);
  // Keep the right end of the stencil inside the data.
  if (k + 2 > m - 1) {
    const long shift = k + 2 - (m - 1);
    k -= shift;
    t += static_cast<double>(shift);
  }
  return {k - 1, t};
}

double ghost_value(const RadialField& f) {
  if (f.extension() == Extension::power_law) {
    const auto& g = *f.grid();
    return f.tail_coefficient() * std::pow(g.hull() + g.spacing(), 2 - g.dim());
  }
  return 0.0;
}

}  // namespace

double RadialField::operator()(double r) const {
  r = std::abs(r);
  const auto& g = *grid_;
  if (r > g.hull()) return tail_value(*this, r);
  const double s = r / g.spacing() - 0.5;
  const double nearest = std::round(s);
  if (std::abs(s - nearest) < 1e-12 && nearest >= 0.0) {
    return values_[static_cast<std::size_t>(nearest)];
  }
  const auto [base, t] = radial_stencil(g, r);
  const auto w = numerics::cubic_weights(t);
  double acc = 0.0;
  for (int j = 0; j < 4; ++j) acc += w[j] * reflected(values_, base + j);
  return acc;
}

double RadialField::derivative(double r) const {
  const double sign = r < 0.0 ? -1.0 : 1.0;
  r = std::abs(r);
  const auto& g = *grid_;
  if (r > g.hull()) return sign * tail_derivative(*this, r);
  const auto [base, t] = radial_stencil(g, r);
  const auto w = numerics::cubic_weight_derivs(t);
  double acc = 0.0;
  for (int j = 0; j < 4; ++j) acc += w[j] * reflected(values_, base + j);
  return sign * acc / g.spacing();
}

namespace {

void check_same_grid(const RadialGrid& a, const RadialGrid& b) {
  require(&a == &b || (a.dim() == b.dim() && a.size() == b.size() && a.r_max() == b.r_max()),
          Errc::invalid_grid, "fields live on different radial grids");
}

void check_same_grid(const CartesianGrid& a, const CartesianGrid& b) {
  require(&a == &b || (a.dim() == b.dim() && a.per_axis() == b.per_axis() &&
                       a.half_width() == b.half_width()),
          Errc::invalid_grid, "fields live on different Cartesian grids");
}

}  // namespace

RadialField& RadialField::operator+=(const RadialField& o) {
  check_same_grid(*grid_, *o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  if (ext_ == Extension::power_law) tail_c_ = fit_tail_coefficient(*grid_, values_);
  return *this;
}

RadialField& RadialField::operator-=(const RadialField& o) {
  check_same_grid(*grid_, *o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  if (ext_ == Extension::power_law) tail_c_ = fit_tail_coefficient(*grid_, values_);
  return *this;
}

RadialField& RadialField::operator*=(double s) {
  for (double& v : values_) v *= s;
  tail_c_ *= s;
  return *this;
}

RadialField operator+(RadialField a, const RadialField& b) { return a += b; }
RadialField operator-(RadialField a, const RadialField& b) { return a -= b; }
RadialField operator*(double s, RadialField a) { return a *= s; }

// ---- CartesianGrid ----------------------------------------------------------

CartesianGrid::CartesianGrid(int dim, double half_width, double spacing)
    : dim_(dim), L_(half_width) {
  require(dim >= 1 && dim <= 5, Errc::invalid_grid, "Cartesian grid supports 1 <= N <= 5");
  require(half_width > 0.0 && spacing > 0.0, Errc::invalid_grid,
          "box half-width and spacing must be positive");
  n_ = static_cast<std::size_t>(std::lround(2.0 * half_width / spacing)) + 1;
  require(n_ >= 3, Errc::invalid_grid, "Cartesian grid needs at least 3 nodes per axis");
  h_ = 2.0 * half_width / static_cast<double>(n_ - 1);
  strides_.assign(static_cast<std::size_t>(dim), 1);
  for (int a = dim - 2; a >= 0; --a) {
    strides_[static_cast<std::size_t>(a)] = strides_[static_cast<std::size_t>(a) + 1] * n_;
  }
  total_ = strides_[0] * n_;
}

void CartesianGrid::multi_index(std::size_t flat, std::size_t* idx) const {
  for (int a = 0; a < dim_; ++a) {
    const std::size_t s = strides_[static_cast<std::size_t>(a)];
    idx[a] = flat / s;
    flat %= s;
  }
}

void CartesianGrid::point(std::size_t flat, double* x) const {
  for (int a = 0; a < dim_; ++a) {
    const std::size_t s = strides_[static_cast<std::size_t>(a)];
    x[a] = coord(flat / s);
    flat %= s;
  }
}

bool CartesianGrid::on_boundary(std::size_t flat) const {
  for (int a = 0; a < dim_; ++a) {
    const std::size_t s = strides_[static_cast<std::size_t>(a)];
    const std::size_t k = flat / s;
    if (k == 0 || k == n_ - 1) return true;
    flat %= s;
  }
  return false;
}

double CartesianGrid::cell_volume() const { return std::pow(h_, dim_); }

CartesianGridPtr make_cartesian_grid(int dim, double half_width, double spacing) {
  return std::make_shared<const CartesianGrid>(dim, half_width, spacing);
}

// ---- CartesianField ---------------------------------------------------------

CartesianField::CartesianField(CartesianGridPtr grid, std::vector<double> values, Extension ext)
    : grid_(std::move(grid)), values_(std::move(values)), ext_(ext) {
  require(grid_ != nullptr, Errc::invalid_grid, "field without grid");
  require(values_.size() == grid_->size(), Errc::invalid_grid, "field size does not match grid");
  require(ext_ != Extension::power_law, Errc::invalid_argument,
          "Cartesian fields support only zero or no extension");
}

CartesianField CartesianField::sample(CartesianGridPtr grid,
                                      const std::function<double(const double*)>& f,
                                      Extension ext) {
  std::vector<double> v(grid->size());
  double x[5];
  for (std::size_t i = 0; i < v.size(); ++i) {
    grid->point(i, x);
    v[i] = f(x);
  }
  return CartesianField(std::move(grid), std::move(v), ext);
}

double CartesianField::operator()(const double* x) const {
  const auto& g = *grid_;
  const int n = g.dim();
  const long m = static_cast<long>(g.per_axis());
  long base[5];
  std::array<double, 4> w[5];
  for (int a = 0; a < n; ++a) {
    const double s = (x[a] + g.half_width()) / g.spacing();
    if (s < -1e-12 || s > static_cast<double>(m - 1) + 1e-12) {
      if (ext_ == Extension::zero) return 0.0;
      fail(Errc::extrapolation, "Cartesian query outside the box");
    }
    long k = std::clamp(static_cast<long>(std::floor(s)), 1L, m - 3);
    w[a] = numerics::cubic_weights(s - static_cast<double>(k));
    base[a] = k - 1;
  }
  // Sum over the 4^n stencil.
  double acc = 0.0;
  const int count = 1 << (2 * n);
  for (int c = 0; c < count; ++c) {
    double wt = 1.0;
    std::size_t flat = 0;
    int rem = c;
    for (int a = 0; a < n; ++a) {
      const int j = rem & 3;
      rem >>= 2;
      wt *= w[a][static_cast<std::size_t>(j)];
      flat += static_cast<std::size_t>(base[a] + j) * g.stride(a);
    }
    if (wt != 0.0) acc += wt * values_[flat];
  }
  return acc;
}

CartesianField& CartesianField::operator+=(const CartesianField& o) {
  check_same_grid(*grid_, *o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

CartesianField& CartesianField::operator-=(const CartesianField& o) {
  check_same_grid(*grid_, *o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

CartesianField& CartesianField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

CartesianField operator+(CartesianField a, const CartesianField& b) { return a += b; }
CartesianField operator-(CartesianField a, const CartesianField& b) { return a -= b; }
CartesianField operator*(double s, CartesianField a) { return a *= s; }

// ---- norms ------------------------------------------------------------------

double hdot_norm_squared(const RadialField& f) {
  const auto& g = *f.grid();
  const std::size_t m = g.size();
  const auto v = f.values();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double d = v[i + 1] - v[i];
    acc += g.face_area(i) * d * d;
  }
  if (f.extension() != Extension::none) {
    const double d = ghost_value(f) - v[m - 1];
    acc += g.face_area(m - 1) * d * d;
  }
  acc /= g.spacing();
  if (f.extension() == Extension::power_law) {
    const double c = f.tail_coefficient();
    const int n = g.dim();
    acc += sphere_area(n) * c * c * (n - 2) * std::pow(g.hull() + g.spacing(), 2 - n);
  }
  return acc;
}

double hdot_norm_squared(const CartesianField& f) {
  const auto& g = *f.grid();
  const auto v = f.values();
  const std::size_t m = g.per_axis();
  double acc = 0.0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(g.dim()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    g.multi_index(i, idx.data());
    for (int a = 0; a < g.dim(); ++a) {
      if (idx[static_cast<std::size_t>(a)] + 1 < m) {
        const double d = v[i + g.stride(a)] - v[i];
        acc += d * d;
      }
    }
  }
  return acc * std::pow(g.spacing(), g.dim() - 2);
}

double hdot_norm(const RadialField& f) { return std::sqrt(hdot_norm_squared(f)); }
double hdot_norm(const CartesianField& f) { return std::sqrt(hdot_norm_squared(f)); }

double lp_integral(const RadialField& f, double p) {
  const auto& g = *f.grid();
  const auto v = f.values();
  const auto w = g.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += w[i] * std::pow(std::abs(v[i]), p);
  if (f.extension() == Extension::power_law && f.tail_coefficient() != 0.0) {
    const int n = g.dim();
    const double decay = (n - 2) * p - n;
    if (decay <= 0.0) return std::numeric_limits<double>::infinity();
    acc += sphere_area(n) * std::pow(std::abs(f.tail_coefficient()), p) *
           std::pow(g.r_max(), -decay) / decay;
  }
  return acc;
}

double lp_integral(const CartesianField& f, double p) {
  double acc = 0.0;
  for (double x : f.values()) acc += std::pow(std::abs(x), p);
  return acc * f.grid()->cell_volume();
}

double critical_norm(const RadialField& f) {
  const double p = critical_exponent(f.dim());
  return std::pow(lp_integral(f, p), 1.0 / p);
}

double critical_norm(const CartesianField& f) {
  const double p = critical_exponent(f.dim());
  return std::pow(lp_integral(f, p), 1.0 / p);
}

double l2_norm(const RadialField& f) { return std::sqrt(lp_integral(f, 2.0)); }
double l2_norm(const CartesianField& f) { return std::sqrt(lp_integral(f, 2.0)); }

double integrate_product(const RadialField& f, const RadialField& g) {
  check_same_grid(*f.grid(), *g.grid());
  const auto w = f.grid()->weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * f[i] * g[i];
  return acc;
}

double integrate_product(const CartesianField& f, const CartesianField& g) {
  check_same_grid(*f.grid(), *g.grid());
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * g[i];
  return acc * f.grid()->cell_volume();
}

double integrate(const RadialField& f) {
  const auto w = f.grid()->weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * f[i];
  return acc;
}

double integrate(const CartesianField& f) {
  double acc = 0.0;
  for (double x : f.values()) acc += x;
  return acc * f.grid()->cell_volume();
}

double volume_product(const RadialField& f, const RadialField& g) {
  check_same_grid(*f.grid(), *g.grid());
  const auto vol = f.grid()->cell_volumes();
  double acc = 0.0;
  for (std::size_t i = 0; i < vol.size(); ++i) acc += vol[i] * f[i] * g[i];
  return acc;
}

// ---- operators --------------------------------------------------------------

RadialField laplacian(const RadialField& f) {
  const auto& g = *f.grid();
  const std::size_t m = g.size();
  const auto v = f.values();
  const auto vol = g.cell_volumes();
  const double h = g.spacing();
  std::vector<double> out(m);
  double inner_flux = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double next = i + 1 < m ? v[i + 1] : ghost_value(f);
    const double outer_flux = g.face_area(i) * (next - v[i]) / h;
    out[i] = (outer_flux - inner_flux) / vol[i];
    inner_flux = outer_flux;
  }
  return RadialField(f.grid(), std::move(out), Extension::none);
}

CartesianField laplacian(const CartesianField& f) {
  const auto& g = *f.grid();
  const auto v = f.values();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (g.on_boundary(i)) continue;
    double acc = -2.0 * g.dim() * v[i];
    for (int a = 0; a < g.dim(); ++a) acc += v[i + g.stride(a)] + v[i - g.stride(a)];
    out[i] = acc * inv_h2;
  }
  return CartesianField(f.grid(), std::move(out), Extension::none);
}

RadialField radial_derivative(const RadialField& f) {
  const auto& g = *f.grid();
  const std::size_t m = g.size();
  const auto v = f.values();
  const double h = g.spacing();
  std::vector<double> out(m);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double prev = i == 0 ? v[0] : v[i - 1];
    out[i] = (v[i + 1] - prev) / (2.0 * h);
  }
  if (f.extension() == Extension::none) {
    out[m - 1] = (3.0 * v[m - 1] - 4.0 * v[m - 2] + v[m - 3]) / (2.0 * h);
  } else {
    out[m - 1] = (ghost_value(f) - v[m - 2]) / (2.0 * h);
  }
  return RadialField(f.grid(), std::move(out), Extension::none);
}

CartesianField partial_derivative(const CartesianField& f, int axis) {
  const auto& g = *f.grid();
  require(axis >= 0 && axis < g.dim(), Errc::invalid_argument, "axis out of range");
  const auto v = f.values();
  const std::size_t s = g.stride(axis);
  const std::size_t m = g.per_axis();
  const double h = g.spacing();
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t k = (i / s) % m;
    if (k == 0) {
      out[i] = (-3.0 * v[i] + 4.0 * v[i + s] - v[i + 2 * s]) / (2.0 * h);
    } else if (k == m - 1) {
      out[i] = (3.0 * v[i] - 4.0 * v[i - s] + v[i - 2 * s]) / (2.0 * h);
    } else {
      out[i] = (v[i + s] - v[i - s]) / (2.0 * h);
    }
  }
  return CartesianField(f.grid(), std::move(out), f.extension());
}

double interior_max_abs(const RadialField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

double interior_max_abs(const RadialField& f, double r_cut) {
  double m = 0.0;
  const auto& g = *f.grid();
  for (std::size_t i = 0; i + 1 < f.size() && g.node(i) <= r_cut; ++i) {
    m = std::max(m, std::abs(f[i]));
  }
  return m;
}

double interior_max_abs(const CartesianField& f) {
  double m = 0.0;
  const auto& g = *f.grid();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!g.on_boundary(i)) m = std::max(m, std::abs(f[i]));
  }
  return m;
}

double interpolate(const RadialField& f, double r) { return f(r); }
double interpolate(const CartesianField& f, const double* x) { return f(x); }

}  // namespace critwave

namespace critwave {

SphericalQuadrature::SphericalQuadrature(int dim, std::size_t radial_nodes,
                                         std::size_t polar_nodes, std::size_t azimuth_nodes,
                                         double length_scale)
    : dim_(dim) {
  require(dim >= 2 && dim <= 5, Errc::invalid_argument, "spherical quadrature supports 2 <= N <= 5");
  require(radial_nodes > 0 && polar_nodes > 0 && azimuth_nodes > 0 && length_scale > 0.0,
          Errc::invalid_argument, "spherical quadrature needs positive node counts");
  const auto xi = numerics::gauss_legendre(radial_nodes, 0.0, 1.0);
  const auto th = numerics::gauss_legendre(polar_nodes, 0.0, std::numbers::pi);
  const int polar_count = dim - 2;

  // Directions: x = (cos t1, sin t1 cos t2, ..., sin t1 ... sin t_{N-2} (cos p, sin p)).
  std::vector<double> dirs, dir_w;
  std::vector<std::size_t> idx(static_cast<std::size_t>(polar_count), 0);
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(azimuth_nodes);
  while (true) {
    for (std::size_t a = 0; a < azimuth_nodes; ++a) {
      const double phi = dphi * static_cast<double>(a);
      double w = dphi;
      double sin_prod = 1.0;
      std::vector<double> d(static_cast<std::size_t>(dim));
      for (int k = 0; k < polar_count; ++k) {
        const std::size_t j = idx[static_cast<std::size_t>(k)];
        const double t = th.nodes[j];
        d[static_cast<std::size_t>(k)] = sin_prod * std::cos(t);
        w *= th.weights[j] * std::pow(std::sin(t), dim - 2 - k);
        sin_prod *= std::sin(t);
      }
      d[static_cast<std::size_t>(dim - 2)] = sin_prod * std::cos(phi);
      d[static_cast<std::size_t>(dim - 1)] = sin_prod * std::sin(phi);
      dirs.insert(dirs.end(), d.begin(), d.end());
      dir_w.push_back(w);
    }
    int k = 0;
    while (k < polar_count && ++idx[static_cast<std::size_t>(k)] == polar_nodes) {
      idx[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == polar_count) break;
  }

  const std::size_t ndir = dir_w.size();
  points_.reserve(radial_nodes * ndir * static_cast<std::size_t>(dim));
  weights_.reserve(radial_nodes * ndir);
  for (std::size_t i = 0; i < radial_nodes; ++i) {
    const double s = xi.nodes[i];
    const double r = length_scale * s / (1.0 - s);
    const double dr = length_scale / ((1.0 - s) * (1.0 - s)) * xi.weights[i];
    const double radial_w = std::pow(r, dim - 1) * dr;
    for (std::size_t d = 0; d < ndir; ++d) {
      for (int k = 0; k < dim; ++k) {
        points_.push_back(r * dirs[d * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)]);
      }
      weights_.push_back(radial_w * dir_w[d]);
    }
  }
}

double SphericalQuadrature::integrate(const std::function<double(const double*)>& f) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) acc += weights_[k] * f(point(k));
  return acc;
}

}  // namespace critwave

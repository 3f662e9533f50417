#pragma once

// Grids, sampled fields, quadrature and finite-difference operators.
//
// Radial grids are cell centred: r_i = (i + 1/2) h, i = 0..M-1, R_max = M h.
// Two weight sets are carried:
//   weights()       midpoint quadrature |S^{N-1}| r_i^{N-1} h (used for integrals)
//   cell_volumes()  exact shell volumes |S^{N-1}| (r_{i+1/2}^N - r_{i-1/2}^N)/N,
//                   the mass matrix of the conservative Laplacian.
// The conservative Laplacian is exact on r^2 and second order pointwise,
// including the first cell, and is symmetric in the cell-volume inner product.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace critwave {

/// Area of the unit sphere S^{dim-1}.
double sphere_area(int dim);

/// Critical Sobolev exponent 2N/(N-2).
double critical_exponent(int dim);

class RadialGrid {
 public:
  RadialGrid(int dim, std::size_t cells, double r_max);

  int dim() const { return dim_; }
  std::size_t size() const { return nodes_.size(); }
  double spacing() const { return h_; }
  double r_max() const { return r_max_; }
  double node(std::size_t i) const { return nodes_[i]; }
  /// Last node; interpolation hull is [0, hull()].
  double hull() const { return nodes_.back(); }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> cell_volumes() const { return volumes_; }
  /// |S^{N-1}| r_{i+1/2}^{N-1}: area of the outer face of cell i.
  double face_area(std::size_t i) const { return faces_[i]; }

 private:
  int dim_;
  double h_;
  double r_max_;
  std::vector<double> nodes_, weights_, volumes_, faces_;
};

using RadialGridPtr = std::shared_ptr<const RadialGrid>;

RadialGridPtr make_radial_grid(int dim, std::size_t cells, double r_max);

/// How a field is continued outside the sampled hull.
enum class Extension {
  none,       ///< out-of-hull queries are errors
  zero,       ///< compactly supported data
  power_law,  ///< c r^{2-N}, c fitted on the last 10% of nodes
};

class RadialField {
 public:
  RadialField() = default;
  RadialField(RadialGridPtr grid, std::vector<double> values, Extension ext = Extension::none);

  template <class F>
  static RadialField sample(RadialGridPtr grid, F&& f, Extension ext = Extension::none) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
    return RadialField(std::move(grid), std::move(v), ext);
  }

  const RadialGridPtr& grid() const { return grid_; }
  int dim() const { return grid_->dim(); }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  Extension extension() const { return ext_; }
  /// Coefficient c of the c r^{2-N} tail (0 unless ext == power_law).
  double tail_coefficient() const { return tail_c_; }

  RadialField with_extension(Extension ext) const;

  /// Cubic interpolation; uses the extension outside the hull.
  double operator()(double r) const;
  /// Derivative of the cubic interpolant (or of the tail model).
  double derivative(double r) const;

  RadialField& operator+=(const RadialField& o);
  RadialField& operator-=(const RadialField& o);
  RadialField& operator*=(double s);

 private:
  RadialGridPtr grid_;
  std::vector<double> values_;
  Extension ext_ = Extension::none;
  double tail_c_ = 0.0;
};

RadialField operator+(RadialField a, const RadialField& b);
RadialField operator-(RadialField a, const RadialField& b);
RadialField operator*(double s, RadialField a);

/// Least-squares coefficient of c r^{2-N} over the last 10% of nodes.
double fit_tail_coefficient(const RadialGrid& grid, std::span<const double> values);

class CartesianGrid {
 public:
  CartesianGrid(int dim, double half_width, double spacing);

  int dim() const { return dim_; }
  std::size_t per_axis() const { return n_; }
  std::size_t size() const { return total_; }
  double spacing() const { return h_; }
  double half_width() const { return L_; }
  double coord(std::size_t k) const { return -L_ + h_ * static_cast<double>(k); }
  /// Axis strides for the row-major flat index (axis 0 slowest).
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
  void point(std::size_t flat, double* x) const;
  void multi_index(std::size_t flat, std::size_t* idx) const;
  bool on_boundary(std::size_t flat) const;
  double cell_volume() const;

 private:
  int dim_;
  double L_;
  double h_;
  std::size_t n_;
  std::size_t total_;
  std::vector<std::size_t> strides_;
};

using CartesianGridPtr = std::shared_ptr<const CartesianGrid>;

CartesianGridPtr make_cartesian_grid(int dim, double half_width, double spacing);

class CartesianField {
 public:
  CartesianField() = default;
  CartesianField(CartesianGridPtr grid, std::vector<double> values,
                 Extension ext = Extension::none);

  /// f receives a pointer to the dim() coordinates.
  static CartesianField sample(CartesianGridPtr grid, const std::function<double(const double*)>& f,
                               Extension ext = Extension::none);

  const CartesianGridPtr& grid() const { return grid_; }
  int dim() const { return grid_->dim(); }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  Extension extension() const { return ext_; }

  /// Tensor-product cubic interpolation; outside the box only Extension::zero is allowed.
  double operator()(const double* x) const;

  CartesianField& operator+=(const CartesianField& o);
  CartesianField& operator-=(const CartesianField& o);
  CartesianField& operator*=(double s);

 private:
  CartesianGridPtr grid_;
  std::vector<double> values_;
  Extension ext_ = Extension::none;
};

CartesianField operator+(CartesianField a, const CartesianField& b);
CartesianField operator-(CartesianField a, const CartesianField& b);
CartesianField operator*(double s, CartesianField a);

/// Product quadrature over all of R^N: r = L xi/(1 - xi) with Gauss-Legendre in
/// xi, Gauss-Legendre in the polar angles and the trapezoid rule in the azimuth.
class SphericalQuadrature {
 public:
  SphericalQuadrature(int dim, std::size_t radial_nodes, std::size_t polar_nodes,
                      std::size_t azimuth_nodes, double length_scale);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  const double* point(std::size_t k) const { return &points_[k * static_cast<std::size_t>(dim_)]; }
  double weight(std::size_t k) const { return weights_[k]; }

  double integrate(const std::function<double(const double*)>& f) const;

 private:
  int dim_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

// ---- norms and integrals --------------------------------------------------

/// sqrt(int |grad f|^2), midpoint differences; power-law tails add their exterior part.
double hdot_norm(const RadialField& f);
double hdot_norm(const CartesianField& f);
double hdot_norm_squared(const RadialField& f);
double hdot_norm_squared(const CartesianField& f);

/// (int |f|^{2N/(N-2)})^{(N-2)/(2N)}.
double critical_norm(const RadialField& f);
double critical_norm(const CartesianField& f);

/// int |f|^p with the midpoint weights (plus power-law exterior when applicable).
double lp_integral(const RadialField& f, double p);
double lp_integral(const CartesianField& f, double p);

double l2_norm(const RadialField& f);
double l2_norm(const CartesianField& f);

/// int f g with the midpoint weights.
double integrate_product(const RadialField& f, const RadialField& g);
double integrate_product(const CartesianField& f, const CartesianField& g);
/// int f with the midpoint weights.
double integrate(const RadialField& f);
double integrate(const CartesianField& f);

/// int f g with the cell volumes (the inner product the radial operators are symmetric in).
double volume_product(const RadialField& f, const RadialField& g);

// ---- differential operators ----------------------------------------------

/// Conservative radial Laplacian. Right ghost value comes from the extension
/// (power-law tail, or 0); the last node is a boundary row.
RadialField laplacian(const RadialField& f);
/// Second-order 2N+1 point Laplacian; boundary layer set to 0.
CartesianField laplacian(const CartesianField& f);

/// Radial derivative at the nodes (central, even reflection at r = 0).
RadialField radial_derivative(const RadialField& f);
/// Central-difference partial derivative along `axis` (one-sided on the boundary).
CartesianField partial_derivative(const CartesianField& f, int axis);

/// max |f_i| over the interior (excludes the last radial node / the box boundary layer).
double interior_max_abs(const RadialField& f);
double interior_max_abs(const CartesianField& f);
/// Same, restricted to r <= r_cut.
double interior_max_abs(const RadialField& f, double r_cut);

/// Stand-alone interpolation entry point (same as f(r)).
double interpolate(const RadialField& f, double r);
double interpolate(const CartesianField& f, const double* x);

}  // namespace critwave

#pragma once

#include "vortexlab/geometry.hpp"

#include <Eigen/Core>

#include <complex>
#include <iosfwd>
#include <string>

namespace vortexlab {

/// Uniform node-centred grid: node (i, j) sits at (x0 + i hx, y0 + j hy).
struct GridGeometry {
  int nx = 0, ny = 0;
  double hx = 0.0, hy = 0.0;
  double x0 = 0.0, y0 = 0.0;

  static GridGeometry over(const Domain& rectangle, int nx, int ny);

  double x(int i) const { return x0 + i * hx; }
  double y(int j) const { return y0 + j * hy; }
  Point node(int i, int j) const { return {x(i), y(j)}; }
  double xmax() const { return x0 + (nx - 1) * hx; }
  double ymax() const { return y0 + (ny - 1) * hy; }
  double spacing() const { return std::max(hx, hy); }
  Domain domain() const { return Domain::rectangle(x0, xmax(), y0, ymax()); }

  /// Trapezoidal quadrature weights (half weight on edges, quarter at corners).
  Eigen::ArrayXXd weights() const;

  bool operator==(const GridGeometry&) const = default;
};

/// Samples of a Scalar-valued field on a grid, stored (nx, ny) column-major so
/// memory order matches row-major rows of constant y.
template <typename Scalar>
struct GridField {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  GridGeometry geometry;
  Array values;
  double time = 0.0;

  GridField() = default;
  explicit GridField(const GridGeometry& g) : geometry(g), values(Array::Zero(g.nx, g.ny)) {}
  GridField(const GridGeometry& g, Array v) : geometry(g), values(std::move(v)) {}

  template <typename Fn>
  static GridField sample(const GridGeometry& g, Fn&& fn) {
    GridField f(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) f.values(i, j) = fn(g.node(i, j));
    return f;
  }
};

using ScalarField = GridField<double>;
using ComplexField = GridField<std::complex<double>>;

/// Throws GeometryMismatch unless the geometries are identical.
void require_same_geometry(const GridGeometry& a, const GridGeometry& b);

/// Weighted integral sum_ij w_ij f_ij with trapezoidal weights.
double integrate(const ScalarField& f);

/// Bilinear interpolation; points outside the grid are clamped to it.
double interpolate(const ScalarField& f, const Point& p);

// "VLGRID1" + u32 nx, ny + f64 hx, hy, x0, y0 + row-major f64 samples (little endian).
void write_scalar_grid(std::ostream& out, const ScalarField& f);
ScalarField read_scalar_grid(std::istream& in);
void write_scalar_grid(const std::string& path, const ScalarField& f);
ScalarField read_scalar_grid(const std::string& path);

// "VLCPLX1" + same header + interleaved (re, im) f64 samples.
void write_complex_field(std::ostream& out, const ComplexField& f);
ComplexField read_complex_field(std::istream& in);
void write_complex_field(const std::string& path, const ComplexField& f);
ComplexField read_complex_field(const std::string& path);

/// CSV "x,y,value".
void write_scalar_csv(std::ostream& out, const ScalarField& f);
/// CSV "x,y,modulus,phase".
void write_complex_csv(std::ostream& out, const ComplexField& f);

/// Centered x-difference; the normal difference vanishes on the boundary
/// (ghost reflection), matching homogeneous Neumann data.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> centered_dx(const Eigen::ArrayBase<Derived>& u,
                                                                                   double hx) {
  const Eigen::Index nx = u.rows();
  Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> d(u.rows(), u.cols());
  d.row(0).setZero();
  d.row(nx - 1).setZero();
  d.middleRows(1, nx - 2) = (u.bottomRows(nx - 2) - u.topRows(nx - 2)) / (2.0 * hx);
  return d;
}

template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> centered_dy(const Eigen::ArrayBase<Derived>& u,
                                                                                   double hy) {
  const Eigen::Index ny = u.cols();
  Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> d(u.rows(), u.cols());
  d.col(0).setZero();
  d.col(ny - 1).setZero();
  d.middleCols(1, ny - 2) = (u.rightCols(ny - 2) - u.leftCols(ny - 2)) / (2.0 * hy);
  return d;
}

}  // namespace vortexlab

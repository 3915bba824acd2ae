#pragma once

#include "vortexlab/grid.hpp"

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <memory>

namespace vortexlab {

/// Discrete div(a grad .) with homogeneous Neumann closure by ghost-node
/// reflection. Edge coefficients are arithmetic means of the node values.
/// Self-adjoint in the trapezoid-weighted inner product.
class NeumannOperator {
 public:
  NeumannOperator(const GridGeometry& geometry, const Eigen::ArrayXXd& node_coefficient);
  /// Constant coefficient: a * Laplacian.
  NeumannOperator(const GridGeometry& geometry, double coefficient);

  const GridGeometry& geometry() const { return geometry_; }

  template <typename Scalar>
  void apply(const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& u,
             Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& out) const;

  template <typename Scalar>
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> operator()(
      const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& u) const {
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(u.rows(), u.cols());
    apply(u, out);
    return out;
  }

  /// 1/2 sum over edges of a_e |u_b - u_a|^2 / h^2 times the edge's quadrature weight.
  template <typename Scalar>
  double dirichlet_energy(const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& u) const;

  /// Quadrature-weighted mean of the node coefficient.
  double mean_coefficient() const { return mean_; }

 private:
  GridGeometry geometry_;
  Eigen::ArrayXXd ax_;  // (nx-1, ny)
  Eigen::ArrayXXd ay_;  // (nx, ny-1)
  double mean_ = 0.0;
};

/// Exact solver for (sigma - kappa * Lap_h) x = b with constant sigma, kappa
/// using the DCT-I eigenbasis of the ghost-node Neumann Laplacian.
class NeumannHelmholtz {
 public:
  explicit NeumannHelmholtz(const GridGeometry& geometry);
  ~NeumannHelmholtz();
  NeumannHelmholtz(const NeumannHelmholtz&) = delete;
  NeumannHelmholtz& operator=(const NeumannHelmholtz&) = delete;

  /// Eigenvalues of -Lap_h, indexed like a grid field.
  const Eigen::ArrayXXd& symbol() const { return symbol_; }

  Eigen::ArrayXXd solve(const Eigen::ArrayXXd& b, double sigma, double kappa) const;
  Eigen::ArrayXXcd solve(const Eigen::ArrayXXcd& b, std::complex<double> sigma, double kappa) const;

  /// Spectral multiplier (a + b lambda) / (c + d lambda), including the transform normalisation.
  Eigen::ArrayXXcd ratio_multiplier(std::complex<double> a, double b, std::complex<double> c, double d) const;
  /// Transforms x, multiplies by m, transforms back.
  Eigen::ArrayXXcd apply_multiplier(const Eigen::ArrayXXcd& x, const Eigen::ArrayXXcd& m) const;

 private:
  struct Plan;
  void transform(Eigen::ArrayXXd& data) const;
  void transform(Eigen::ArrayXXcd& data) const;

  GridGeometry geometry_;
  Eigen::ArrayXXd symbol_;
  std::unique_ptr<Plan> real_plan_, complex_plan_;
};

struct KrylovResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients. With a sesquilinear `dot` this is
/// standard PCG for operators self-adjoint in that inner product; with a
/// bilinear `dot` it is COCG for complex-symmetric operators.
template <typename Vec, typename ApplyA, typename ApplyP, typename Dot, typename Norm>
KrylovResult conjugate_gradient(ApplyA&& apply_a, ApplyP&& apply_p, Dot&& dot, Norm&& norm, const Vec& b, Vec& x,
                                double tol, int max_iterations) {
  KrylovResult res;
  const double bnorm = norm(b);
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  Vec r = b - apply_a(x);
  res.relative_residual = norm(r) / bnorm;
  if (res.relative_residual <= tol) {
    res.converged = true;
    return res;
  }
  Vec z = apply_p(r);
  Vec p = z;
  auto rz = dot(r, z);
  for (int it = 1; it <= max_iterations; ++it) {
    const Vec ap = apply_a(p);
    const auto pap = dot(p, ap);
    if (std::abs(pap) == 0.0) break;
    const auto alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    res.iterations = it;
    res.relative_residual = norm(r) / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    z = apply_p(r);
    const auto rz_next = dot(r, z);
    const auto beta = rz_next / rz;
    rz = rz_next;
    p = z + beta * p;
  }
  return res;
}

// ---------------------------------------------------------------------------

template <typename Scalar>
void NeumannOperator::apply(const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& u,
                            Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& out) const {
  const int nx = geometry_.nx, ny = geometry_.ny;
  const double ihx2 = 1.0 / (geometry_.hx * geometry_.hx), ihy2 = 1.0 / (geometry_.hy * geometry_.hy);
  out.resize(nx, ny);
  for (int j = 0; j < ny; ++j) {
    const double sy = (j == 0 || j == ny - 1) ? 2.0 : 1.0;
    for (int i = 0; i < nx; ++i) {
      const double sx = (i == 0 || i == nx - 1) ? 2.0 : 1.0;
      Scalar fx = Scalar(0), fy = Scalar(0);
      const Scalar c = u(i, j);
      if (i + 1 < nx) fx += ax_(i, j) * (u(i + 1, j) - c);
      if (i > 0) fx -= ax_(i - 1, j) * (c - u(i - 1, j));
      if (j + 1 < ny) fy += ay_(i, j) * (u(i, j + 1) - c);
      if (j > 0) fy -= ay_(i, j - 1) * (c - u(i, j - 1));
      out(i, j) = sx * ihx2 * fx + sy * ihy2 * fy;
    }
  }
}

template <typename Scalar>
double NeumannOperator::dirichlet_energy(const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& u) const {
  const int nx = geometry_.nx, ny = geometry_.ny;
  const double hx = geometry_.hx, hy = geometry_.hy;
  double ex = 0.0, ey = 0.0;
  for (int j = 0; j < ny; ++j) {
    const double cy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
    for (int i = 0; i + 1 < nx; ++i) ex += cy * ax_(i, j) * std::norm(u(i + 1, j) - u(i, j));
  }
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double cx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
      ey += cx * ay_(i, j) * std::norm(u(i, j + 1) - u(i, j));
    }
  }
  return 0.5 * (ex * hy / hx + ey * hx / hy);
}

/// Trapezoid-weighted inner products on grid arrays.
template <typename Scalar>
struct WeightedProducts {
  const Eigen::ArrayXXd& w;

  /// sum w conj(a) b
  Scalar hermitian(const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
                   const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& b) const {
    if constexpr (std::is_floating_point_v<Scalar>) {
      return (w * a * b).sum();
    } else {
      return (w * a.conjugate() * b).sum();
    }
  }
  /// sum w a b
  Scalar bilinear(const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
                  const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& b) const {
    return (w * a * b).sum();
  }
  double norm(const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a) const {
    return std::sqrt((w * a.abs2()).sum());
  }
};

}  // namespace vortexlab

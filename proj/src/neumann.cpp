#include "vortexlab/neumann.hpp"

#include "vortexlab/error.hpp"

#include <fftw3.h>

#include <numbers>

namespace vortexlab {

NeumannOperator::NeumannOperator(const GridGeometry& g, const Eigen::ArrayXXd& a) : geometry_(g) {
  if (a.rows() != g.nx || a.cols() != g.ny) throw Error(ErrorCode::GeometryMismatch, "coefficient shape");
  ax_ = 0.5 * (a.topRows(g.nx - 1) + a.bottomRows(g.nx - 1));
  ay_ = 0.5 * (a.leftCols(g.ny - 1) + a.rightCols(g.ny - 1));
  mean_ = (g.weights() * a).sum() / g.weights().sum();
}

NeumannOperator::NeumannOperator(const GridGeometry& g, double a)
    : NeumannOperator(g, Eigen::ArrayXXd::Constant(g.nx, g.ny, a)) {}

// 2-D DCT-I on `planes` consecutive nx*ny planes. FFTW_ESTIMATE keeps the
// plan, and so the rounding, identical from run to run.
struct NeumannHelmholtz::Plan {
  fftw_plan plan = nullptr;
  double* buffer = nullptr;
  std::size_t plane = 0;

  Plan(int nx, int ny, int planes) : plane(static_cast<std::size_t>(nx) * ny) {
    buffer = static_cast<double*>(fftw_malloc(sizeof(double) * plane * planes));
    const fftw_r2r_kind kinds[2] = {FFTW_REDFT00, FFTW_REDFT00};
    // Column-major (nx, ny) storage is row-major [ny][nx].
    const fftw_iodim dims[2] = {{ny, nx, nx}, {nx, 1, 1}};
    const int stride = static_cast<int>(plane);
    const fftw_iodim batch{planes, stride, stride};
    plan = fftw_plan_guru_r2r(2, dims, 1, &batch, buffer, buffer, kinds, FFTW_ESTIMATE);
  }
  ~Plan() {
    if (plan) fftw_destroy_plan(plan);
    if (buffer) fftw_free(buffer);
  }
};

NeumannHelmholtz::NeumannHelmholtz(const GridGeometry& g) : geometry_(g) {
  if (g.nx < 2 || g.ny < 2) throw Error(ErrorCode::BadParams, "DCT solver needs at least 2x2 nodes");
  real_plan_ = std::make_unique<Plan>(g.nx, g.ny, 1);
  complex_plan_ = std::make_unique<Plan>(g.nx, g.ny, 2);
  if (!real_plan_->plan || !complex_plan_->plan) throw Error(ErrorCode::SolverFailure, "FFTW planning failed");

  symbol_.resize(g.nx, g.ny);
  const double pi = std::numbers::pi;
  for (int j = 0; j < g.ny; ++j) {
    const double sy = std::sin(pi * j / (2.0 * (g.ny - 1)));
    for (int i = 0; i < g.nx; ++i) {
      const double sx = std::sin(pi * i / (2.0 * (g.nx - 1)));
      symbol_(i, j) = 4.0 * sx * sx / (g.hx * g.hx) + 4.0 * sy * sy / (g.hy * g.hy);
    }
  }
}

NeumannHelmholtz::~NeumannHelmholtz() = default;

void NeumannHelmholtz::transform(Eigen::ArrayXXd& data) const {
  const Plan& p = *real_plan_;
  std::copy(data.data(), data.data() + p.plane, p.buffer);
  fftw_execute(p.plan);
  std::copy(p.buffer, p.buffer + p.plane, data.data());
}

void NeumannHelmholtz::transform(Eigen::ArrayXXcd& data) const {
  const Plan& p = *complex_plan_;
  double* re = p.buffer;
  double* im = p.buffer + p.plane;
  for (std::size_t k = 0; k < p.plane; ++k) {
    re[k] = data(k).real();
    im[k] = data(k).imag();
  }
  fftw_execute(p.plan);
  for (std::size_t k = 0; k < p.plane; ++k) data(k) = {re[k], im[k]};
}

Eigen::ArrayXXd NeumannHelmholtz::solve(const Eigen::ArrayXXd& b, double sigma, double kappa) const {
  Eigen::ArrayXXd x = b;
  transform(x);
  const double norm = 1.0 / (4.0 * (geometry_.nx - 1) * (geometry_.ny - 1));
  x *= norm / (sigma + kappa * symbol_);
  transform(x);
  return x;
}

Eigen::ArrayXXcd NeumannHelmholtz::solve(const Eigen::ArrayXXcd& b, std::complex<double> sigma,
                                         double kappa) const {
  return apply_multiplier(b, ratio_multiplier(1.0, 0.0, sigma, kappa));
}

Eigen::ArrayXXcd NeumannHelmholtz::ratio_multiplier(std::complex<double> a, double b, std::complex<double> c,
                                                    double d) const {
  const double norm = 1.0 / (4.0 * (geometry_.nx - 1) * (geometry_.ny - 1));
  Eigen::ArrayXXcd m(geometry_.nx, geometry_.ny);
  for (Eigen::Index k = 0; k < m.size(); ++k) m(k) = norm * (a + b * symbol_(k)) / (c + d * symbol_(k));
  return m;
}

Eigen::ArrayXXcd NeumannHelmholtz::apply_multiplier(const Eigen::ArrayXXcd& x, const Eigen::ArrayXXcd& m) const {
  if (x.rows() != geometry_.nx || x.cols() != geometry_.ny) throw Error(ErrorCode::GeometryMismatch, "field shape");
  Eigen::ArrayXXcd y = x;
  transform(y);
  y *= m;
  transform(y);
  return y;
}

}  // namespace vortexlab

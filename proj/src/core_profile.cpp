#include "vortexlab/error.hpp"
#include "vortexlab/gp_solver.hpp"

#include <cmath>
#include <numbers>

namespace vortexlab {

namespace {

double tail(double r) {
  const double r2 = r * r;
  return 1.0 - 0.5 / r2 - 9.0 / (8.0 * r2 * r2);
}

// Thomas algorithm; a: sub, b: diag, c: super. Overwrites d with the solution.
void tridiagonal_solve(const Eigen::VectorXd& a, Eigen::VectorXd b, const Eigen::VectorXd& c, Eigen::VectorXd& d) {
  const Eigen::Index n = b.size();
  for (Eigen::Index i = 1; i < n; ++i) {
    const double m = a(i) / b(i - 1);
    b(i) -= m * c(i - 1);
    d(i) -= m * d(i - 1);
  }
  d(n - 1) /= b(n - 1);
  for (Eigen::Index i = n - 2; i >= 0; --i) d(i) = (d(i) - c(i) * d(i + 1)) / b(i);
}

}  // namespace

double CoreProfile::value(double r) const {
  r = std::abs(r);
  if (r >= r_max) return tail(r);
  const double s = r / h;
  const Eigen::Index i = static_cast<Eigen::Index>(s);
  const double t = s - static_cast<double>(i);
  return (1.0 - t) * f(i) + t * f(i + 1);
}

CoreProfile radial_core_profile(double r_max, int n_samples) {
  if (!(r_max >= 20.0) || n_samples < 2000) {
    throw Error(ErrorCode::BadParams, "core profile needs r_max >= 20 and at least 2000 samples");
  }
  CoreProfile p;
  p.r_max = r_max;
  const int n = n_samples;
  p.h = r_max / n;
  const double h = p.h;
  p.f.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double r = i * h;
    p.f(i) = r / std::sqrt(2.0 + r * r);
  }
  p.f(0) = 0.0;
  p.f(n) = tail(r_max);

  const int m = n - 1;  // unknowns f_1 .. f_{n-1}
  Eigen::VectorXd lo(m), di(m), up(m), rhs(m);
  const double ih2 = 1.0 / (h * h);
  bool converged = false;
  for (int it = 1; it <= 50; ++it) {
    for (int k = 0; k < m; ++k) {
      const int i = k + 1;
      const double r = i * h;
      const double fi = p.f(i);
      const double cm = ih2 - 0.5 / (r * h), cp = ih2 + 0.5 / (r * h);
      rhs(k) = -(cp * p.f(i + 1) + cm * p.f(i - 1) - 2.0 * ih2 * fi - fi / (r * r) + (1.0 - fi * fi) * fi);
      lo(k) = cm;
      up(k) = cp;
      di(k) = -2.0 * ih2 - 1.0 / (r * r) + 1.0 - 3.0 * fi * fi;
    }
    tridiagonal_solve(lo, di, up, rhs);
    p.f.segment(1, m) += rhs;
    p.newton_iterations = it;
    if (rhs.cwiseAbs().maxCoeff() < 1e-10) {
      converged = true;
      break;
    }
  }
  if (!converged || !p.f.allFinite()) throw Error(ErrorCode::NoConvergence, "core profile Newton iteration failed");
  for (int i = 1; i <= n; ++i) {
    if (!(p.f(i) > p.f(i - 1))) throw Error(ErrorCode::NoConvergence, "core profile is not increasing");
  }

  // Tail-corrected energies J(R) = I(R) - pi/(4R^2) carry an O(R^-4) error; extrapolate.
  const double R = r_max;
  const double j_full = core_energy(p, R) - std::numbers::pi / (4.0 * R * R);
  const double j_half = core_energy(p, 0.5 * R) - std::numbers::pi / (R * R);
  p.gamma0 = (16.0 * j_full - j_half) / 15.0;
  return p;
}

double core_energy(const CoreProfile& p, double R) {
  if (!(R > 0.0) || R > p.r_max * (1.0 + 1e-12)) throw Error(ErrorCode::BadParams, "radius outside the profile");
  const int cells = static_cast<int>(std::lround(R / p.h));
  double s = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double r = (i + 0.5) * p.h;
    const double fm = 0.5 * (p.f(i) + p.f(i + 1));
    const double fp = (p.f(i + 1) - p.f(i)) / p.h;
    const double g = 1.0 - fm * fm;
    s += (0.5 * (fp * fp + fm * fm / (r * r)) + 0.25 * g * g) * r;
  }
  return 2.0 * std::numbers::pi * s * p.h - std::numbers::pi * std::log(cells * p.h);
}

}  // namespace vortexlab

#include "vortexlab/thomas_fermi.hpp"

#include "vortexlab/error.hpp"
#include "vortexlab/neumann.hpp"

#include <cmath>
#include <limits>

namespace vortexlab {

GridProfile GridProfile::uniform(const GridGeometry& geometry, double eps) {
  GridProfile p;
  p.geometry = geometry;
  p.eta = Eigen::ArrayXXd::Ones(geometry.nx, geometry.ny);
  p.eps = eps;
  return p;
}

double GridProfile::log_eps() const { return std::abs(std::log(eps)); }

namespace {

Eigen::ArrayXXd background_density(const ScalarField& rho, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::BadParams, "eps must lie in (0, 1)");
  if (!rho.values.allFinite()) throw Error(ErrorCode::NonFiniteInput, "rho is not finite");
  const double L = std::abs(std::log(eps));
  Eigen::ArrayXXd p2 = 1.0 + rho.values / L;
  if ((p2 <= 0.0).any()) throw Error(ErrorCode::BadParams, "p^2 = 1 + rho/|log eps| must be positive");
  return p2;
}

double energy_of(const NeumannOperator& lap, const Eigen::ArrayXXd& weights, const Eigen::ArrayXXd& p2,
                 double eps, const Eigen::ArrayXXd& eta) {
  return lap.dirichlet_energy(eta) + (weights * (p2 - eta.square()).square()).sum() / (4.0 * eps * eps);
}

void finish(GridProfile& out, const ScalarField& rho) {
  const double rmax = rho.values.abs().maxCoeff();
  const double qmax = out.q_field().values.abs().maxCoeff();
  out.max_principle_ok = qmax <= 1.1 * rmax + 1e-12;
}

}  // namespace

Eigen::ArrayXXd thomas_fermi_residual(const ScalarField& rho, double eps, const Eigen::ArrayXXd& eta) {
  const Eigen::ArrayXXd p2 = background_density(rho, eps);
  const NeumannOperator lap(rho.geometry, 1.0);
  return lap(eta) + eta * (p2 - eta.square()) / (eps * eps);
}

double thomas_fermi_energy(const ScalarField& rho, double eps, const Eigen::ArrayXXd& eta) {
  const Eigen::ArrayXXd p2 = background_density(rho, eps);
  const NeumannOperator lap(rho.geometry, 1.0);
  return energy_of(lap, rho.geometry.weights(), p2, eps, eta);
}

GridProfile minimize_thomas_fermi_energy(const ScalarField& rho, double eps, const ThomasFermiOptions& opt) {
  const GridGeometry& g = rho.geometry;
  const Eigen::ArrayXXd p2 = background_density(rho, eps);
  const NeumannOperator lap(g, 1.0);
  const NeumannHelmholtz helmholtz(g);
  const Eigen::ArrayXXd w = g.weights();
  const double ie2 = 1.0 / (eps * eps);
  const double scale = ie2;

  GridProfile out;
  out.geometry = g;
  out.eps = eps;
  out.used_fallback = true;
  Eigen::ArrayXXd eta = opt.initial_guess ? *opt.initial_guess : p2.sqrt().eval();
  if ((eta <= 0.0).any()) throw Error(ErrorCode::NonPositiveDensity, "initial guess must be positive");
  double energy = energy_of(lap, w, p2, eps, eta);
  // Preconditioner: (2 max p^2 / eps^2 - Lap_h) bounds the energy Hessian near the minimiser.
  const double sigma = 2.0 * p2.maxCoeff() * ie2;
  const int max_iterations = std::max(opt.max_sweeps, 20) * 40;
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::ArrayXXd r = lap(eta) + eta * (p2 - eta.square()) * ie2;
    out.residual = r.abs().maxCoeff();
    out.iterations = it;
    if (out.residual <= opt.residual_tol * scale) {
      out.eta = eta;
      finish(out, rho);
      return out;
    }
    const Eigen::ArrayXXd dir = helmholtz.solve(r, sigma, 1.0);
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h < 40; ++h, step *= 0.5) {
      Eigen::ArrayXXd trial = eta + step * dir;
      if ((trial <= 0.0).any()) continue;
      const double e = energy_of(lap, w, p2, eps, trial);
      if (e <= energy) {
        eta = std::move(trial);
        energy = e;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  throw Error(ErrorCode::NoConvergence, "energy descent for the background profile stalled");
}

GridProfile solve_thomas_fermi(const ScalarField& rho, double eps, const ThomasFermiOptions& opt) {
  const GridGeometry& g = rho.geometry;
  const Eigen::ArrayXXd p2 = background_density(rho, eps);
  const NeumannOperator lap(g, 1.0);
  const NeumannHelmholtz helmholtz(g);
  const Eigen::ArrayXXd w = g.weights();
  const double ie2 = 1.0 / (eps * eps);
  const WeightedProducts<double> products{w};

  GridProfile out;
  out.geometry = g;
  out.eps = eps;

  Eigen::ArrayXXd eta = opt.initial_guess ? *opt.initial_guess : p2.sqrt().eval();
  if (eta.rows() != g.nx || eta.cols() != g.ny) throw Error(ErrorCode::GeometryMismatch, "initial guess shape");
  if ((eta <= 0.0).any()) throw Error(ErrorCode::NonPositiveDensity, "initial guess must be positive");

  auto fallback = [&](const char* why) {
    if (!opt.allow_fallback) throw Error(ErrorCode::NoConvergence, why);
    ThomasFermiOptions fb = opt;
    fb.initial_guess = p2.sqrt().eval();
    return minimize_thomas_fermi_energy(rho, eps, fb);
  };

  double damping = opt.initial_damping;
  double energy = energy_of(lap, w, p2, eps, eta);
  double last_step = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep <= opt.max_sweeps; ++sweep) {
    int halvings = 0;
    const Eigen::ArrayXXd r = lap(eta) + eta * (p2 - eta.square()) * ie2;
    out.residual = r.abs().maxCoeff();
    out.iterations = sweep;
    if (!std::isfinite(out.residual)) return fallback("residual is not finite");
    if (out.residual <= opt.residual_tol * ie2 && last_step <= opt.step_tol) {
      out.eta = eta;
      finish(out, rho);
      return out;
    }
    if (sweep == opt.max_sweeps) break;

    // Linearised perturbation operator: eps^-2 (3 eta^2 - p^2) - Lap_h.
    const Eigen::ArrayXXd c = (3.0 * eta.square() - p2) * ie2;
    if ((c <= 0.0).any()) return fallback("linearised operator lost positivity");
    const double sigma = (w * c).sum() / w.sum();
    Eigen::ArrayXXd delta = helmholtz.solve(r, sigma, 1.0);
    const auto result = conjugate_gradient(
        [&](const Eigen::ArrayXXd& v) -> Eigen::ArrayXXd { return c * v - lap(v); },
        [&](const Eigen::ArrayXXd& v) -> Eigen::ArrayXXd { return helmholtz.solve(v, sigma, 1.0); },
        [&](const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b) { return products.hermitian(a, b); },
        [&](const Eigen::ArrayXXd& a) { return products.norm(a); }, r, delta, 1e-12, 400);
    if (!result.converged && result.relative_residual > 1e-6) return fallback("linear sweep did not converge");

    // Damped update: halve on loss of positivity or energy increase.
    for (;;) {
      Eigen::ArrayXXd trial = eta + damping * delta;
      const bool positive = (trial > 0.0).all();
      const double e = positive ? energy_of(lap, w, p2, eps, trial) : std::numeric_limits<double>::infinity();
      if (positive && e <= energy + 1e-12 * std::max(1.0, std::abs(energy))) {
        last_step = (damping * delta).abs().maxCoeff();
        eta = std::move(trial);
        energy = e;
        break;
      }
      if (++halvings > opt.max_halvings) {
        if (!positive && !opt.allow_fallback) {
          throw Error(ErrorCode::NonPositiveDensity, "profile iterate lost positivity");
        }
        return fallback("damping exhausted");
      }
      damping *= 0.5;
    }
    damping = std::min(1.0, 2.0 * damping);
  }
  return fallback("maximum number of sweeps reached");
}

namespace {

double h1_seminorm(const GridGeometry& g, const Eigen::ArrayXXd& f) {
  const NeumannOperator lap(g, 1.0);
  return std::sqrt(2.0 * lap.dirichlet_energy(f));
}

}  // namespace

std::vector<TfConvergenceRow> tf_convergence_report(const std::vector<double>& eps_list, const ScalarField& rho0,
                                                    const ThomasFermiOptions& options) {
  if (eps_list.size() < 3) throw Error(ErrorCode::BadParams, "eps list needs at least three entries");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0 && eps_list[k] < 1.0)) throw Error(ErrorCode::BadParams, "eps must lie in (0, 1)");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1])) throw Error(ErrorCode::BadParams, "eps list must decrease");
  }
  if (rho0.geometry.spacing() > eps_list.back() / 4.0 * (1.0 + 1e-12)) {
    throw Error(ErrorCode::ResolutionTooCoarse, "grid spacing must be at most eps/4 for the smallest eps");
  }
  std::vector<TfConvergenceRow> rows;
  const double exact_tol = 1e-12 * std::max(1.0, rho0.values.abs().maxCoeff());
  for (double eps : eps_list) {
    const GridProfile profile = solve_thomas_fermi(rho0, eps, options);
    const Eigen::ArrayXXd err = profile.q_field().values - rho0.values;
    TfConvergenceRow row;
    row.eps = eps;
    row.sup_error = err.abs().maxCoeff();
    row.h1_error = h1_seminorm(rho0.geometry, err);
    row.exact = row.sup_error <= exact_tol;
    row.iterations = profile.iterations;
    row.sup_order = row.h1_order = std::numeric_limits<double>::quiet_NaN();
    if (!rows.empty() && !row.exact && !rows.back().exact) {
      const double ratio = std::log(rows.back().eps / eps);
      row.sup_order = std::log(rows.back().sup_error / row.sup_error) / ratio;
      row.h1_order = std::log(rows.back().h1_error / row.h1_error) / ratio;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<TfConvergenceRow> tf_convergence_report(const std::vector<double>& eps_list,
                                                    const AnalyticPotential& rho0, const GridGeometry& grid,
                                                    const ThomasFermiOptions& options) {
  return tf_convergence_report(
      eps_list, ScalarField::sample(grid, [&](const Point& x) { return rho0.value(x); }), options);
}

}  // namespace vortexlab

#include "vortexlab/gp_solver.hpp"

#include "vortexlab/error.hpp"
#include "vortexlab/renormalized_energy.hpp"
#include "vortexlab/tracking.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace vortexlab {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::BadParams, "eps must lie in (0, 1)");
}

void require_finite(const ComplexField& f) {
  if (!f.values.allFinite()) throw Error(ErrorCode::NonFiniteInput, "field is not finite");
}

bool is_uniform(const Eigen::ArrayXXd& a) { return (a == a(0, 0)).all(); }

void check_blowup(const Eigen::ArrayXXcd& w, double threshold) {
  if (!w.allFinite() || w.abs().maxCoeff() > threshold) {
    throw Error(ErrorCode::BlowupDetected, "|w| exceeded the blow-up threshold");
  }
}

}  // namespace

ComplexField build_initial_data(const VortexConfig& config, double eps, const CoreProfile& profile,
                                const GridGeometry& g) {
  require_eps(eps);
  const double h = g.spacing();
  if (h > 0.25 * eps * (1.0 + 1e-12)) {
    throw Error(ErrorCode::ResolutionTooCoarse, "grid spacing must not exceed eps/4");
  }
  for (std::size_t j = 0; j < config.size(); ++j)
    for (std::size_t k = j + 1; k < config.size(); ++k)
      if ((config.position(j) - config.position(k)).norm() < 16.0 * h) {
        throw Error(ErrorCode::ResolutionTooCoarse, "vortices closer than 16 grid spacings");
      }
  return ComplexField::sample(g, [&](const Point& x) {
    cd w(1.0, 0.0);
    for (std::size_t k = 0; k < config.size(); ++k) {
      const Eigen::Vector2d d = x - config.position(k);
      const double r = d.norm();
      if (r == 0.0) return cd(0.0, 0.0);
      cd unit(d.x() / r, d.y() / r);
      if (config.degree(k) < 0) unit = std::conj(unit);
      w *= profile.value(r / eps) * unit;
    }
    return w;
  });
}

ComplexField build_initial_data(const VortexConfig& config, double eps, const CoreProfile& profile,
                                const GridProfile& eta) {
  return build_initial_data(config, eps, profile, eta.geometry);
}

// ---------------------------------------------------------------------------

double SchrodingerStepper::stability_limit(const GridProfile& eta, double eps) {
  require_eps(eps);
  const GridGeometry& g = eta.geometry;
  const double lambda_max = 4.0 / (g.hx * g.hx) + 4.0 / (g.hy * g.hy);
  return eps * std::sqrt(2.0 / (lambda_max * eta.eta.square().maxCoeff()));
}

SchrodingerStepper::SchrodingerStepper(const GridProfile& eta, double eps, double dt, const StepperOptions& options)
    : geometry_(eta.geometry),
      eta2_(eta.eta.square()),
      eps_(eps),
      dt_(dt),
      options_(options),
      uniform_(is_uniform(eta.eta)),
      op_(eta.geometry, eta.eta.square().eval()),
      helmholtz_(std::make_unique<NeumannHelmholtz>(eta.geometry)),
      weights_(eta.geometry.weights()),
      mean_eta2_(op_.mean_coefficient()) {
  require_eps(eps);
  if (!(dt > 0.0)) throw Error(ErrorCode::BadParams, "dt must be positive");
  if (dt > options.safety * eps * eps * (1.0 + 1e-12)) {
    throw Error(ErrorCode::BadParams, "dt exceeds safety * eps^2");
  }
  if (dt > stability_limit(eta, eps) * (1.0 + 1e-12)) {
    throw Error(ErrorCode::BadParams, "dt exceeds the splitting stability limit eps sqrt(2 / (lambda_max eta^2))");
  }
  if (options.orientation != 1 && options.orientation != -1) {
    throw Error(ErrorCode::BadParams, "orientation must be +1 or -1");
  }
  if (uniform_) {
    const cd s(0.0, options.orientation / dt);
    propagator_ = helmholtz_->ratio_multiplier(s, -0.5, s, 0.5);
  }
}

SchrodingerStepper::~SchrodingerStepper() = default;

void SchrodingerStepper::nonlinear_half_step(Eigen::ArrayXXcd& w) const {
  // o i w_t = eta^2/eps^2 (1 - |w|^2) w keeps |w| and rotates the phase.
  const double tau = 0.5 * dt_ * options_.orientation / (eps_ * eps_);
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const double theta = -eta2_(k) * (1.0 - std::norm(w(k))) * tau;
    w(k) *= cd(std::cos(theta), std::sin(theta));
  }
}

Eigen::ArrayXXcd SchrodingerStepper::solve_shifted(const Eigen::ArrayXXcd& b, cd shift, double scale,
                                                   const Eigen::ArrayXXcd& guess) const {
  // (shift eta^2 - scale L) x = b
  const WeightedProducts<cd> products{weights_};
  auto apply_a = [&](const Eigen::ArrayXXcd& x) -> Eigen::ArrayXXcd {
    return shift * eta2_.cast<cd>() * x - scale * op_(x);
  };
  auto apply_p = [&](const Eigen::ArrayXXcd& r) -> Eigen::ArrayXXcd {
    return helmholtz_->solve(r, shift * mean_eta2_, scale * mean_eta2_);
  };
  auto dot = [&](const Eigen::ArrayXXcd& a, const Eigen::ArrayXXcd& c) { return products.bilinear(a, c); };
  auto norm = [&](const Eigen::ArrayXXcd& a) { return products.norm(a); };
  Eigen::ArrayXXcd x = guess;
  const KrylovResult res = conjugate_gradient(apply_a, apply_p, dot, norm, b, x, options_.linear_tol,
                                              options_.max_iterations);
  last_iterations_ = res.iterations;
  if (!res.converged && !(res.relative_residual <= 100.0 * options_.linear_tol)) {
    throw Error(ErrorCode::LinearSolveFailure,
                "Crank-Nicolson solve stalled at relative residual " + std::to_string(res.relative_residual));
  }
  return x;
}

void SchrodingerStepper::linear_step(Eigen::ArrayXXcd& w) const {
  // (o i eta^2/dt - L/2) w+ = (o i eta^2/dt + L/2) w
  const cd s(0.0, options_.orientation / dt_);
  if (uniform_) {
    // Diagonal in the cosine basis: w+ = (s - lambda/2) / (s + lambda/2) w.
    w = helmholtz_->apply_multiplier(w, propagator_);
    last_iterations_ = 0;
    return;
  }
  const Eigen::ArrayXXcd rhs = s * eta2_.cast<cd>() * w + 0.5 * op_(w);
  w = solve_shifted(rhs, s, 0.5, w);
}

void SchrodingerStepper::crank_nicolson_step(Eigen::ArrayXXcd& w) const {
  // With v = (w+ + w)/2 and S = (|w+|^2 + |w|^2)/2:
  //   (2 o i eta^2/dt - L) v = 2 o i eta^2/dt w + eta^4/eps^2 (1 - S) v.
  const cd s2(0.0, 2.0 * options_.orientation / dt_);
  const Eigen::ArrayXXd eta4 = eta2_.square() / (eps_ * eps_);
  const Eigen::ArrayXXcd base = s2 * eta2_.cast<cd>() * w;
  const Eigen::ArrayXXd w2 = w.abs2();

  Eigen::ArrayXXcd predicted = w;
  nonlinear_half_step(predicted);
  linear_step(predicted);
  nonlinear_half_step(predicted);
  Eigen::ArrayXXcd v = 0.5 * (predicted + w);

  for (int it = 1; it <= options_.max_fixed_point_iterations; ++it) {
    const Eigen::ArrayXXd S = 0.5 * ((2.0 * v - w).abs2() + w2);
    const Eigen::ArrayXXcd rhs = base + (eta4 * (1.0 - S)).cast<cd>() * v;
    Eigen::ArrayXXcd next = uniform_ ? helmholtz_->solve(rhs, s2 * eta2_(0, 0), eta2_(0, 0))
                                     : solve_shifted(rhs, s2, 1.0, v);
    const double change = (next - v).abs().maxCoeff();
    v = std::move(next);
    if (change <= options_.fixed_point_tol * std::max(1.0, v.abs().maxCoeff())) {
      last_fixed_point_iterations_ = it;
      w = 2.0 * v - w;
      return;
    }
  }
  throw Error(ErrorCode::SolverFailure, "Crank-Nicolson fixed point did not converge");
}

ComplexField SchrodingerStepper::step(const ComplexField& field) const {
  require_same_geometry(field.geometry, geometry_);
  require_finite(field);
  Eigen::ArrayXXcd w = field.values;
  if (options_.scheme == SchrodingerScheme::CrankNicolson) {
    crank_nicolson_step(w);
  } else {
    nonlinear_half_step(w);
    linear_step(w);
    nonlinear_half_step(w);
  }
  check_blowup(w, options_.blowup_threshold);
  ComplexField out(geometry_, std::move(w));
  out.time = field.time + dt_;
  return out;
}

// ---------------------------------------------------------------------------

double GradientFlowStepper::stability_limit(const GridProfile& eta, double eps) {
  require_eps(eps);
  return eps * eps / (std::abs(std::log(eps)) * eta.eta.square().maxCoeff());
}

GradientFlowStepper::GradientFlowStepper(const GridProfile& eta, double eps, double dt,
                                         const StepperOptions& options)
    : geometry_(eta.geometry),
      eta2_(eta.eta.square()),
      eps_(eps),
      dt_(dt),
      log_eps_(std::abs(std::log(eps))),
      options_(options),
      uniform_(is_uniform(eta.eta)),
      op_(eta.geometry, eta.eta.square().eval()),
      helmholtz_(std::make_unique<NeumannHelmholtz>(eta.geometry)),
      weights_(eta.geometry.weights()),
      mean_eta2_(op_.mean_coefficient()) {
  if (!(dt > 0.0)) throw Error(ErrorCode::BadParams, "dt must be positive");
  if (dt > stability_limit(eta, eps) * (1.0 + 1e-12)) {
    throw Error(ErrorCode::BadParams, "dt exceeds eps^2 / (|log eps| max eta^2)");
  }
}

GradientFlowStepper::~GradientFlowStepper() = default;

ComplexField GradientFlowStepper::step(const ComplexField& field) const {
  require_same_geometry(field.geometry, geometry_);
  require_finite(field);
  const Eigen::ArrayXXcd& w = field.values;
  const double s = 1.0 / (log_eps_ * dt_);
  // (s eta^2 - L) w+ = s eta^2 w + eta^4/eps^2 (1 - |w|^2) w
  const Eigen::ArrayXXcd rhs =
      (s * eta2_ + eta2_.square() * (1.0 - w.abs2()) / (eps_ * eps_)).cast<cd>() * w;
  Eigen::ArrayXXcd x;
  if (uniform_) {
    const double c = eta2_(0, 0);
    x = helmholtz_->solve(rhs, cd(s * c, 0.0), c);
  } else {
    const WeightedProducts<cd> products{weights_};
    auto apply_a = [&](const Eigen::ArrayXXcd& v) -> Eigen::ArrayXXcd {
      return (s * eta2_).cast<cd>() * v - op_(v);
    };
    auto apply_p = [&](const Eigen::ArrayXXcd& r) -> Eigen::ArrayXXcd {
      return helmholtz_->solve(r, cd(s * mean_eta2_, 0.0), mean_eta2_);
    };
    auto dot = [&](const Eigen::ArrayXXcd& a, const Eigen::ArrayXXcd& b) { return products.hermitian(a, b); };
    auto norm = [&](const Eigen::ArrayXXcd& a) { return products.norm(a); };
    x = w;
    const KrylovResult res = conjugate_gradient(apply_a, apply_p, dot, norm, rhs.eval(), x, options_.linear_tol,
                                                options_.max_iterations);
    if (!res.converged && !(res.relative_residual <= 100.0 * options_.linear_tol)) {
      throw Error(ErrorCode::LinearSolveFailure,
                  "implicit gradient-flow solve stalled at relative residual " +
                      std::to_string(res.relative_residual));
    }
  }
  check_blowup(x, options_.blowup_threshold);
  ComplexField out(geometry_, std::move(x));
  out.time = field.time + dt_;
  return out;
}

ComplexField step_schrodinger(const ComplexField& field, const GridProfile& eta, double eps, double dt) {
  return SchrodingerStepper(eta, eps, dt).step(field);
}

ComplexField step_gradient_flow(const ComplexField& field, const GridProfile& eta, double eps, double dt) {
  return GradientFlowStepper(eta, eps, dt).step(field);
}

// ---------------------------------------------------------------------------

double discrete_mass(const ComplexField& field, const GridProfile& eta) {
  require_same_geometry(field.geometry, eta.geometry);
  return (field.geometry.weights() * eta.eta.square() * (field.values.abs2() - 1.0)).sum();
}

namespace {

struct EnergyParts {
  double kinetic = 0.0, potential = 0.0;
};

EnergyParts weighted_energy_parts(const ComplexField& field, const Eigen::ArrayXXd& eta, double eps) {
  require_eps(eps);
  const GridGeometry& g = field.geometry;
  if (eta.rows() != g.nx || eta.cols() != g.ny) throw Error(ErrorCode::GeometryMismatch, "eta shape");
  const Eigen::ArrayXXd eta2 = eta.square();
  const NeumannOperator op(g, eta2);
  EnergyParts e;
  e.kinetic = op.dirichlet_energy(field.values);
  e.potential = (g.weights() * eta2.square() * (1.0 - field.values.abs2()).square()).sum() / (4.0 * eps * eps);
  return e;
}

}  // namespace

double weighted_energy(const ComplexField& field, const Eigen::ArrayXXd& eta, double eps) {
  const EnergyParts e = weighted_energy_parts(field, eta, eps);
  return e.kinetic + e.potential;
}

double ginzburg_landau_energy(const ComplexField& u, const Eigen::ArrayXXd& p_squared, double eps) {
  require_eps(eps);
  const GridGeometry& g = u.geometry;
  if (p_squared.rows() != g.nx || p_squared.cols() != g.ny) {
    throw Error(ErrorCode::GeometryMismatch, "p^2 shape");
  }
  const NeumannOperator op(g, 1.0);
  return op.dirichlet_energy(u.values) +
         (g.weights() * (p_squared - u.values.abs2()).square()).sum() / (4.0 * eps * eps);
}

double lassoued_mironescu_defect(const ComplexField& w, const Eigen::ArrayXXd& eta,
                                 const Eigen::ArrayXXd& p_squared, double eps) {
  const ComplexField u(w.geometry, (w.values * eta.cast<cd>()).eval());
  const ComplexField eta_c(w.geometry, eta.cast<cd>().eval());
  return ginzburg_landau_energy(u, p_squared, eps) - ginzburg_landau_energy(eta_c, p_squared, eps) -
         weighted_energy(w, eta, eps);
}

EnergyReport energy_report(const ComplexField& field, const GridProfile& eta, double eps,
                           const std::optional<VortexConfig>& reference, double gamma0,
                           std::optional<double> previous_total) {
  require_same_geometry(field.geometry, eta.geometry);
  const EnergyParts parts = weighted_energy_parts(field, eta.eta, eps);
  EnergyReport r;
  r.kinetic = parts.kinetic;
  r.potential = parts.potential;
  r.total = parts.kinetic + parts.potential;
  r.mass = discrete_mass(field, eta);
  r.energy_delta = previous_total ? r.total - *previous_total : 0.0;
  r.excess = std::numeric_limits<double>::quiet_NaN();
  r.predicted = std::numeric_limits<double>::quiet_NaN();
  if (reference) {
    const ScalarField q = eta.q_field();
    const double L = std::abs(std::log(eps));
    double h = reference->empty() ? 0.0 : renormalized_energy(*reference, Domain::plane());
    for (const Point& p : reference->positions()) h += kPi * L + kPi * interpolate(q, p) + gamma0;
    r.predicted = h;
    r.excess = r.total - h;
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {


// Right-hand side of the Jacobian flux identity at one time level.
std::pair<double, double> flux_terms(const ComplexField& f, const Eigen::ArrayXXd& eta2, const ScalarField& phi,
                                     double eps, const Eigen::ArrayXXd& weights) {
  const GridGeometry& g = f.geometry;
  const double hx = g.hx, hy = g.hy;
  const Eigen::ArrayXXcd wx = centered_dx(f.values, hx), wy = centered_dy(f.values, hy);
  const Eigen::ArrayXXd t11 = wx.abs2(), t22 = wy.abs2();
  const Eigen::ArrayXXd t12 = (wx * wy.conjugate()).real();

  const Eigen::ArrayXXd px = centered_dx(phi.values, hx), py = centered_dy(phi.values, hy);
  const Eigen::ArrayXXd pxx = centered_dx(px, hx), pyy = centered_dy(py, hy), pxy = centered_dy(px, hy);

  const double interaction = (weights * (pxy * (t22 - t11) + t12 * (pxx - pyy))).sum();

  const Eigen::ArrayXXd ex = centered_dx(eta2, hx), ey = centered_dy(eta2, hy);
  const Eigen::ArrayXXd g4 = (1.0 - f.values.abs2()).square() / (4.0 * eps * eps);
  const Eigen::ArrayXXd v1 = (ex * t11 + ey * t12) / eta2 + ex * g4;
  const Eigen::ArrayXXd v2 = (ex * t12 + ey * t22) / eta2 + ey * g4;
  const double background = -(weights * (px * v2 - py * v1)).sum();
  return {interaction, background};
}

}  // namespace

std::vector<FluxResidual> jacobian_flux_residual(const std::vector<ComplexField>& fields, const GridProfile& eta,
                                                 const ScalarField& phi, double eps, int orientation) {
  require_eps(eps);
  if (orientation != 1 && orientation != -1) throw Error(ErrorCode::BadParams, "orientation must be +1 or -1");
  if (fields.size() < 2) throw Error(ErrorCode::BadParams, "need at least two fields");
  for (const ComplexField& f : fields) require_same_geometry(f.geometry, eta.geometry);
  require_same_geometry(phi.geometry, eta.geometry);
  const Eigen::ArrayXXd weights = eta.geometry.weights();
  const Eigen::ArrayXXd eta2 = eta.eta.square();

  std::vector<double> phij(fields.size());
  std::vector<std::pair<double, double>> rhs(fields.size());
  for (std::size_t n = 0; n < fields.size(); ++n) {
    phij[n] = (weights * phi.values * jacobian(fields[n]).values).sum();
    rhs[n] = flux_terms(fields[n], eta2, phi, eps, weights);
  }
  std::vector<FluxResidual> out;
  for (std::size_t n = 0; n + 1 < fields.size(); ++n) {
    const double dt = fields[n + 1].time - fields[n].time;
    if (!(dt > 0.0)) throw Error(ErrorCode::BadParams, "field times must increase");
    FluxResidual r;
    r.time_derivative = (phij[n + 1] - phij[n]) / dt;
    r.interaction_term = 0.5 * orientation * (rhs[n].first + rhs[n + 1].first);
    r.background_term = 0.5 * orientation * (rhs[n].second + rhs[n + 1].second);
    r.residual = r.time_derivative - r.interaction_term - r.background_term;
    out.push_back(r);
  }
  return out;
}

}  // namespace vortexlab

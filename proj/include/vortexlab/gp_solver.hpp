#pragma once

#include "vortexlab/geometry.hpp"
#include "vortexlab/grid.hpp"
#include "vortexlab/neumann.hpp"
#include "vortexlab/thomas_fermi.hpp"

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <vector>

namespace vortexlab {

/// Degree-one vortex core f(r) on [0, r_max], with the core energy constant.
struct CoreProfile {
  double r_max = 0.0;
  double h = 0.0;
  Eigen::VectorXd f;  // f(i h), i = 0..n
  double gamma0 = 0.0;
  int newton_iterations = 0;

  /// Linear interpolation inside, asymptotic tail 1 - 1/(2r^2) - 9/(8r^4) beyond r_max.
  double value(double r) const;
};

/// Solves f'' + f'/r - f/r^2 + (1 - f^2) f = 0, f(0) = 0, by Newton relaxation
/// with the far-field tail imposed at r_max.
CoreProfile radial_core_profile(double r_max = 40.0, int n_samples = 40000);

/// 2 pi int_0^R [ (f'^2 + f^2/r^2)/2 + (1 - f^2)^2/4 ] r dr - pi log R, midpoint rule.
double core_energy(const CoreProfile& profile, double R);

/// Product ansatz prod_j f(|x - alpha_j| / eps) ((z - alpha_j)/|z - alpha_j|)^{d_j}.
ComplexField build_initial_data(const VortexConfig& config, double eps, const CoreProfile& profile,
                                const GridGeometry& geometry);
ComplexField build_initial_data(const VortexConfig& config, double eps, const CoreProfile& profile,
                                const GridProfile& eta);

enum class SchrodingerScheme {
  /// Phase rotation / Crank-Nicolson / phase rotation. One linear solve per step.
  StrangSplit,
  /// Crank-Nicolson with the cubic term averaged over both time levels. Conserves
  /// mass and the discrete energy up to the fixed-point tolerance; a few linear
  /// solves per step.
  CrankNicolson,
};

struct StepperOptions {
  SchrodingerScheme scheme = SchrodingerScheme::StrangSplit;
  double linear_tol = 1e-13;
  /// Fixed-point sweeps of the Crank-Nicolson scheme stop at this sup-norm update.
  double fixed_point_tol = 1e-14;
  int max_fixed_point_iterations = 100;
  int max_iterations = 400;
  /// Schrodinger steps need dt <= safety * eps^2.
  double safety = 0.5;
  double blowup_threshold = 10.0;
  /// -1: i eta^2 w_t = -[div(eta^2 grad w) + eta^4/eps^2 (1 - |w|^2) w], the time direction in
  /// which vortices move as vortex_velocity predicts.
  /// +1: the same right-hand side without the minus sign (time reversed).
  int orientation = -1;
};

/// Strang splitting for the weighted Gross-Pitaevskii equation: exact
/// pointwise phase rotation for the cubic term around a Crank-Nicolson step for
/// div(eta^2 grad .). Both substeps conserve sum eta^2 |w|^2. Linearised about
/// |w| = 1 the composition is stable iff dt <= eps sqrt(2 / (lambda_max max eta^2))
/// with lambda_max the largest eigenvalue of -Lap_h; that bound is enforced.
class SchrodingerStepper {
 public:
  SchrodingerStepper(const GridProfile& eta, double eps, double dt, const StepperOptions& options = {});
  ~SchrodingerStepper();

  ComplexField step(const ComplexField& field) const;
  double dt() const { return dt_; }
  int last_iterations() const { return last_iterations_; }
  int last_fixed_point_iterations() const { return last_fixed_point_iterations_; }

  static double stability_limit(const GridProfile& eta, double eps);

 private:
  void nonlinear_half_step(Eigen::ArrayXXcd& w) const;
  void linear_step(Eigen::ArrayXXcd& w) const;
  Eigen::ArrayXXcd solve_shifted(const Eigen::ArrayXXcd& b, std::complex<double> shift, double scale,
                                 const Eigen::ArrayXXcd& guess) const;
  void crank_nicolson_step(Eigen::ArrayXXcd& w) const;

  GridGeometry geometry_;
  Eigen::ArrayXXd eta2_;
  double eps_, dt_;
  StepperOptions options_;
  bool uniform_;
  NeumannOperator op_;
  std::unique_ptr<NeumannHelmholtz> helmholtz_;
  Eigen::ArrayXXd weights_;
  double mean_eta2_;
  Eigen::ArrayXXcd propagator_;
  mutable int last_iterations_ = 0;
  mutable int last_fixed_point_iterations_ = 0;
};

/// Linearly implicit Euler for |log eps|^-1 eta^2 w_t = div(eta^2 grad w) + eta^4/eps^2 (1 - |w|^2) w.
/// Energy-decreasing for dt <= eps^2 / (|log eps| max eta^2).
class GradientFlowStepper {
 public:
  GradientFlowStepper(const GridProfile& eta, double eps, double dt, const StepperOptions& options = {});
  ~GradientFlowStepper();

  ComplexField step(const ComplexField& field) const;
  double dt() const { return dt_; }
  /// Largest dt for which the step is unconditionally energy-decreasing on |w| <= 1.
  static double stability_limit(const GridProfile& eta, double eps);

 private:
  GridGeometry geometry_;
  Eigen::ArrayXXd eta2_;
  double eps_, dt_, log_eps_;
  StepperOptions options_;
  bool uniform_;
  NeumannOperator op_;
  std::unique_ptr<NeumannHelmholtz> helmholtz_;
  Eigen::ArrayXXd weights_;
  double mean_eta2_;
};

ComplexField step_schrodinger(const ComplexField& field, const GridProfile& eta, double eps, double dt);
ComplexField step_gradient_flow(const ComplexField& field, const GridProfile& eta, double eps, double dt);

/// sum omega eta^2 (|w|^2 - 1)
double discrete_mass(const ComplexField& field, const GridProfile& eta);

/// E^eta_eps(w): edge-difference kinetic part with edge-mean eta^2, trapezoid potential part.
double weighted_energy(const ComplexField& field, const Eigen::ArrayXXd& eta, double eps);
/// E_eps(u) = int |grad u|^2/2 + (p^2 - |u|^2)^2 / (4 eps^2), same quadrature.
double ginzburg_landau_energy(const ComplexField& u, const Eigen::ArrayXXd& p_squared, double eps);
/// E_eps(w eta) - E_eps(eta) - E^eta_eps(w).
double lassoued_mironescu_defect(const ComplexField& w, const Eigen::ArrayXXd& eta,
                                 const Eigen::ArrayXXd& p_squared, double eps);

struct EnergyReport {
  double total = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  /// total - H_eps(reference); NaN without a reference.
  double excess = 0.0;
  double predicted = 0.0;
  double mass = 0.0;
  /// total - previous total; 0 without a previous value.
  double energy_delta = 0.0;
};

/// Q0 in the prediction is the profile's own Q_eps interpolated at the vortices;
/// the interaction part uses the plane renormalized energy.
EnergyReport energy_report(const ComplexField& field, const GridProfile& eta, double eps,
                           const std::optional<VortexConfig>& reference = std::nullopt, double gamma0 = 0.0,
                           std::optional<double> previous_total = std::nullopt);

struct FluxResidual {
  double time_derivative = 0.0;
  double interaction_term = 0.0;
  double background_term = 0.0;
  double residual = 0.0;
};

/// Per-interval residual of
///   int phi d_t J = int J_lj d_j d_k phi (d_k w, d_l w)
///                   - int J_lj d_j phi [ d_k eta^2/eta^2 (d_l w, d_k w) + d_l eta^2 (1 - |w|^2)^2 / (4 eps^2) ]
/// with a forward difference in time and trapezoid averaging of the right side.
/// For orientation -1 (see StepperOptions) the right side enters with the opposite sign.
std::vector<FluxResidual> jacobian_flux_residual(const std::vector<ComplexField>& fields, const GridProfile& eta,
                                                 const ScalarField& phi, double eps, int orientation = -1);

}  // namespace vortexlab

#pragma once

#include "vortexlab/grid.hpp"
#include "vortexlab/potential.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace vortexlab {

/// Vortex-free background: eta_eps on a grid together with the derived
/// Q_eps = |log eps| (eta^2 - 1).
struct GridProfile {
  GridGeometry geometry;
  Eigen::ArrayXXd eta;
  double eps = 0.0;

  // Solver diagnostics.
  int iterations = 0;
  double residual = 0.0;
  bool used_fallback = false;
  /// |Q| <= 1.1 max|rho| held (maximum-principle heuristic).
  bool max_principle_ok = true;

  /// Uniform eta = 1.
  static GridProfile uniform(const GridGeometry& geometry, double eps);

  double log_eps() const;
  Eigen::ArrayXXd eta_squared() const { return eta.square(); }
  ScalarField eta_field() const { return {geometry, eta}; }
  ScalarField q_field() const { return {geometry, log_eps() * (eta.square() - 1.0)}; }
  /// Q-tilde of the eta = 1 + Q~/|log eps| ansatz.
  ScalarField q_tilde_field() const { return {geometry, log_eps() * (eta - 1.0)}; }
};

struct ThomasFermiOptions {
  /// Stop when ||Lap_h eta + eps^-2 eta (p^2 - eta^2)||_inf <= residual_tol * eps^-2 ...
  double residual_tol = 1e-8;
  /// ... and the last update is below step_tol in sup norm.
  double step_tol = 1e-13;
  int max_sweeps = 500;
  double initial_damping = 0.5;
  int max_halvings = 10;
  std::optional<Eigen::ArrayXXd> initial_guess;
  bool allow_fallback = true;
};

/// Residual of the discrete profile equation, Lap_h eta + eps^-2 eta (p^2 - eta^2).
Eigen::ArrayXXd thomas_fermi_residual(const ScalarField& rho_eps, double eps, const Eigen::ArrayXXd& eta);

/// Discrete 1/2|grad eta|^2 + (p^2 - eta^2)^2 / (4 eps^2) energy.
double thomas_fermi_energy(const ScalarField& rho_eps, double eps, const Eigen::ArrayXXd& eta);

/// Solves Lap eta + eps^-2 eta (p^2 - eta^2) = 0 with Neumann data, where
/// p^2 = 1 + rho_eps / |log eps|. Damped Newton sweeps on the Q~ perturbation
/// equation, each inverting a Helmholtz-like Neumann operator; falls back to
/// preconditioned descent on the energy if the sweeps fail.
GridProfile solve_thomas_fermi(const ScalarField& rho_eps, double eps, const ThomasFermiOptions& options = {});

/// Preconditioned steepest descent on thomas_fermi_energy (the fallback path).
GridProfile minimize_thomas_fermi_energy(const ScalarField& rho_eps, double eps,
                                         const ThomasFermiOptions& options = {});

struct TfConvergenceRow {
  double eps = 0.0;
  double sup_error = 0.0;
  double h1_error = 0.0;
  /// Empirical order against the previous row; NaN on the first row or when exact.
  double sup_order = 0.0;
  double h1_order = 0.0;
  bool exact = false;
  int iterations = 0;
};

/// ||Q_eps - rho0|| over a decreasing eps list on a fixed grid.
std::vector<TfConvergenceRow> tf_convergence_report(const std::vector<double>& eps_list, const ScalarField& rho0,
                                                    const ThomasFermiOptions& options = {});
std::vector<TfConvergenceRow> tf_convergence_report(const std::vector<double>& eps_list,
                                                    const AnalyticPotential& rho0, const GridGeometry& grid,
                                                    const ThomasFermiOptions& options = {});

}  // namespace vortexlab

#pragma once

#include "vortexlab/config.hpp"
#include "vortexlab/gp_solver.hpp"
#include "vortexlab/ode.hpp"
#include "vortexlab/thomas_fermi.hpp"
#include "vortexlab/tracking.hpp"

#include <string>
#include <vector>

namespace vortexlab {

/// Grid over `box` with spacing at most eps / points_per_eps.
GridGeometry pde_grid(const Domain& box, double eps, double points_per_eps);

/// Background for a PDE run: eta = 1 for a zero potential, else the discrete
/// Thomas-Fermi profile of the sampled rho0.
GridProfile pde_background(const ExperimentSpec& spec, const GridGeometry& grid, double eps);

/// The ODE run of a spec with `samples` equally spaced outputs (plus t = 0).
Trajectory run_ode(const ExperimentSpec& spec, int samples);

struct PdeRun {
  double eps = 0.0;
  GridGeometry grid;
  double dt = 0.0;
  long steps = 0;
  std::vector<DetectionResult> detections;
  TrajectoryComparison comparison;
  double mass_initial = 0.0, mass_final = 0.0;
  double energy_initial = 0.0, energy_final = 0.0;
  double seconds = 0.0;
  ComplexField final_field;
};

/// Evolves the well-prepared field for one eps up to the horizon, detecting
/// vortices at spec.pde_samples equally spaced times and comparing with `ode`.
PdeRun run_pde(const ExperimentSpec& spec, double eps, const Trajectory& ode, const CoreProfile& core);

/// ODE trajectory (and PDE runs for each eps) with CSV/binary/JSON outputs in
/// spec.output_dir when it is set. Returns the JSON summary.
std::string run_experiment(const ExperimentSpec& spec, bool quiet = true);

struct ValidationRow {
  double eps = 0.0;
  int nx = 0, ny = 0;
  double dt = 0.0;
  double max_distance = 0.0;
  int mismatches = 0;
  double seconds = 0.0;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  bool pass = false;
  bool strictly_decreasing = false;
  std::string message;
};

/// PDE-vs-ODE flat-norm table over the spec's eps list. PASS unless some
/// adjacent pair grows by more than 10%.
ValidationReport validate_theorem(const ExperimentSpec& spec, bool quiet = true);

std::vector<TfConvergenceRow> tf_study(const ExperimentSpec& spec);

struct FigureResult {
  std::string name;
  Trajectory trajectory;
  double h0_drift = 0.0;
  /// Largest distance of any vortex path sample from that path's chord.
  double curvature = 0.0;
  /// V3 only: max |x1 + x2| + |y1 - y2| over samples.
  double mirror_error = 0.0;
  bool finite = true;
};

/// The four dipole presets of the figure plus the zero-potential control (last).
std::vector<ExperimentSpec> figure_presets();
std::vector<FigureResult> run_figures(const std::string& output_dir = "", bool quiet = true);

double path_curvature(const Trajectory& trajectory);

}  // namespace vortexlab

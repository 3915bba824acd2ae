#pragma once

#include "vortexlab/geometry.hpp"
#include "vortexlab/ode.hpp"
#include "vortexlab/potential.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace vortexlab {

/// Experiment description read from a sectioned key = value file:
///
///   [experiment]  name, dynamics (schrodinger | gradient_flow | mixed), horizon, output
///   [domain]      kind (plane | disk | rectangle), radius, xmin, xmax, ymin, ymax
///   [potential]   kind (builtin name) plus its parameters, or file = rho0 grid
///   [vortices]    vortex = x y d (repeatable), or file = path
///   [ode]         rtol, atol, samples
///   [pde]         eps = list, box = xmin xmax ymin ymax, points_per_eps, dt_factor,
///                 samples, merge_radius
///   [tf]          eps = list, nodes, box
///
/// '#' starts a comment; relative paths resolve against the file's directory.
struct ExperimentSpec {
  std::string name = "experiment";
  DynamicsKind dynamics = DynamicsKind::Schrodinger;
  Domain domain = Domain::plane();
  double horizon = 1.0;
  std::string output_dir;

  std::string potential_kind = "zero";
  std::map<std::string, double> potential_params;
  std::string potential_file;

  VortexConfig vortices;

  double rtol = 1e-9;
  double atol = 1e-11;
  int ode_samples = 200;

  std::vector<double> eps_list;
  Domain pde_box = Domain::rectangle(-3.2, 3.2, -3.2, 3.2);
  double points_per_eps = 4.0;
  double dt_factor = 0.9;  // fraction of the stepper's stable time step
  int pde_samples = 10;
  double merge_radius = 0.0;

  std::vector<double> tf_eps_list;
  int tf_nodes = 513;
  Domain tf_box = Domain::rectangle(-1.6, 1.6, -1.6, 1.6);

  AnalyticPotential potential() const;
};

ExperimentSpec parse_experiment_spec(std::istream& in, const std::string& base_dir = ".");
ExperimentSpec load_experiment_spec(const std::string& path);

/// Parses "0.1, 0.05 0.025" (comma and/or whitespace separated).
std::vector<double> parse_number_list(const std::string& text);

}  // namespace vortexlab

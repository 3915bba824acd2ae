#pragma once

#include "vortexlab/geometry.hpp"
#include "vortexlab/potential.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vortexlab {

enum class DynamicsKind { Schrodinger, GradientFlow, Mixed };

DynamicsKind parse_dynamics_kind(const std::string& name);
std::string to_string(DynamicsKind kind);

std::vector<Eigen::Vector2d> vortex_velocity(const VortexConfig& config, const Domain& domain,
                                             const AnalyticPotential& q0, DynamicsKind kind);

/// Velocities from a prescribed gradient of H0 (one entry per vortex).
std::vector<Eigen::Vector2d> velocity_from_gradient(const std::vector<Eigen::Vector2d>& grad,
                                                    const std::vector<int>& degrees, DynamicsKind kind);

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-11;
  double initial_step = 0.0;  ///< 0: automatic
  double min_step = 1e-14;
  std::size_t max_steps = 10'000'000;
  double collision_fraction = 1e-4;  ///< stop when r_alpha < fraction * r_alpha(0)
  double event_tol = 1e-6;
  /// Record every `sample_stride`-th accepted step (0 or 1: every step).
  std::size_t sample_stride = 1;
  /// Explicit output times; overrides the stride when non-empty.
  std::vector<double> sample_times;
};

struct Trajectory {
  enum class Termination { ReachedT, Collision, SolverFailure };

  std::vector<double> times;
  std::vector<VortexConfig> states;
  std::vector<double> h0;
  std::vector<double> r_alpha;
  Termination termination = Termination::ReachedT;
  double collision_time = 0.0;

  std::size_t size() const { return times.size(); }
  /// Linear interpolation between samples (clamped at the ends).
  VortexConfig state_at(double t) const;
};

Trajectory integrate(const VortexConfig& config0, const Domain& domain, const AnalyticPotential& q0,
                     DynamicsKind kind, double horizon, const OdeOptions& options = {});

double hamiltonian_drift(const Trajectory& trajectory);

struct DissipationVerdict {
  bool monotone = true;
  double worst_increase = 0.0;
  std::size_t worst_index = 0;
};

DissipationVerdict dissipation_check(const Trajectory& trajectory, double slack = 1e-12);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_trajectory_csv(const std::string& path, const Trajectory& trajectory);

}  // namespace vortexlab

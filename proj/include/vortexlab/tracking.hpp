#pragma once

#include "vortexlab/geometry.hpp"
#include "vortexlab/grid.hpp"
#include "vortexlab/ode.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

namespace vortexlab {

struct VectorField {
  GridGeometry geometry;
  Eigen::ArrayXXd x, y;
};

/// j(w) = (i w, grad w) = Im(conj(w) grad w), centered differences.
VectorField supercurrent(const ComplexField& field);
/// J(w) = curl j(w) / 2, centered differences of the centered current.
ScalarField jacobian(const ComplexField& field);

/// Winding number of arg w around each plaquette, shape (nx-1, ny-1); plaquette
/// (i, j) has lower-left node (i, j).
Eigen::ArrayXXi plaquette_winding(const ComplexField& field);
/// Winding number of arg w along the outer boundary loop.
int boundary_winding(const ComplexField& field);

struct DetectedVortex {
  Point center;
  int degree = 0;
  int cluster_size = 0;
  /// |int_window J - pi d| / pi over the refinement window.
  double residual = 0.0;
  /// Split off a multiply-quantized cluster.
  bool flagged = false;
};

struct DetectionResult {
  double time = 0.0;
  std::vector<DetectedVortex> vortices;
  /// Pairs of opposite windings closer than the merge radius, dropped.
  int annihilated = 0;
  double residual = 0.0;

  /// pi-weighted atoms at the refined centers.
  AtomicMeasure measure() const;
  VortexConfig config() const;
  int total_degree() const;
};

/// Plaquette windings clustered within merge_radius (default 4h), each cluster
/// refined by the Jacobian first moment on a 5x5 node window.
DetectionResult detect_vortices(const ComplexField& field, double merge_radius = 0.0);

/// CSV "t,x,y,weight,cluster_size,residual".
void write_detection_csv(std::ostream& out, const std::vector<DetectionResult>& detections);
void write_detection_csv(const std::string& path, const std::vector<DetectionResult>& detections);

struct EquipartitionResidual {
  double xx = 0.0, xy = 0.0, yy = 0.0;
  double max() const;
};

/// On each vortex ball B_r (r = half the distance to the nearest other vortex or
/// the boundary), compares m_kl = int (d_k w, d_l w)/|log eps| with pi delta_kl,
/// tested against affine functions: r |m_kl - pi delta_kl| + |first moment|.
EquipartitionResidual equipartition_residual(const ComplexField& field, const DetectionResult& detection,
                                             double eps);

struct ComparisonSample {
  double t = 0.0;
  double distance = 0.0;
  std::size_t detected = 0;
  std::size_t expected = 0;
  bool count_mismatch = false;
};

struct TrajectoryComparison {
  std::vector<ComparisonSample> samples;
  double max_distance = 0.0;
  int mismatches = 0;
};

/// Flat-norm distance between each detection and the pi-weighted ODE state at
/// the same time, on `domain` (boundary sinks when bounded).
TrajectoryComparison trajectory_compare(const std::vector<DetectionResult>& detections, const Trajectory& ode,
                                        const Domain& domain);
TrajectoryComparison trajectory_compare(const std::vector<ComplexField>& fields, const Trajectory& ode,
                                        const Domain& domain, double merge_radius = 0.0);

}  // namespace vortexlab

#pragma once

#include "vortexlab/geometry.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace vortexlab {

/// Minimum-cost perfect assignment on a square cost matrix; returns the
/// column assigned to each row.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

/// Largest q with every |weight| an integer multiple of q (relative tolerance `tol`).
double weight_quantum(const std::vector<double>& weights, double tol = 1e-12);

/// Dual-Lipschitz (W^{-1,1}) distance between two atomic measures.
///
/// Positive mass of a - b is transported to negative mass at Euclidean cost;
/// on bounded domains any quantum may also leave through the nearest
/// boundary point. Atoms are split into unit quanta of size weight_quantum().
double flat_norm_distance(const AtomicMeasure& a, const AtomicMeasure& b, const Domain& domain);

struct Pairing {
  struct Match {
    std::size_t reference;
    std::size_t atom;
    double distance;
  };
  std::vector<Match> matches;
  std::vector<std::size_t> unmatched_atoms;
  std::vector<std::size_t> unmatched_reference;
};

/// Greedy nearest-neighbour assignment of detected atoms to reference
/// vortices with the same sign. Atoms farther than half the smallest
/// reference separation (4 r_alpha on the plane) stay unmatched.
Pairing pair_configurations(const VortexConfig& reference, const AtomicMeasure& detected);

}  // namespace vortexlab

#pragma once

#include "vortexlab/geometry.hpp"
#include "vortexlab/potential.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace vortexlab {

/// Decomposition of the vortex interaction Hamiltonian.
struct EnergyBreakdown {
  double W = 0.0;           ///< renormalized energy
  double background = 0.0;  ///< pi * sum_j Q0(alpha_j)
  double H0 = 0.0;          ///< W + background
  double H_eps = 0.0;       ///< H0 + n (pi |log eps| + gamma0)
  double gamma0 = 0.0;
  double eps = 0.0;
};

std::string to_json(const EnergyBreakdown& e);

/// Green's function with Delta G = 2 pi d delta_alpha and G = 0 on the disk
/// boundary; on the plane, d log|x - alpha|.
double greens_function(const Domain& domain, const Point& x, const Point& alpha, int degree);
/// Regular part F(x, alpha) = G(x, alpha, d) - d log|x - alpha|.
double greens_regular_part(const Domain& domain, const Point& x, const Point& alpha, int degree);

/// W(alpha, d): Coulomb interaction plus, on a disk, the image (boundary) terms.
double renormalized_energy(const VortexConfig& config, const Domain& domain);
Eigen::Vector2d grad_renormalized_energy(const VortexConfig& config, const Domain& domain, std::size_t k);
std::vector<Eigen::Vector2d> grad_renormalized_energy(const VortexConfig& config, const Domain& domain);

EnergyBreakdown interaction_hamiltonian(const VortexConfig& config, const Domain& domain,
                                        const AnalyticPotential& q0, double eps = 0.5, double gamma0 = 0.0);
double hamiltonian_h0(const VortexConfig& config, const Domain& domain, const AnalyticPotential& q0);
Eigen::Vector2d grad_h0(const VortexConfig& config, const Domain& domain, const AnalyticPotential& q0,
                        std::size_t k);
std::vector<Eigen::Vector2d> grad_h0(const VortexConfig& config, const Domain& domain, const AnalyticPotential& q0);

/// Supercurrent j(w*) = grad(phase) of the canonical harmonic map at x.
Eigen::Vector2d canonical_phase_current(const VortexConfig& config, const Domain& domain, const Point& x);
/// Same, leaving out the singular self-term of vortex `skip`.
Eigen::Vector2d canonical_phase_current(const VortexConfig& config, const Domain& domain, const Point& x,
                                        std::size_t skip);

/// Phase of w* on the plane, sum_j d_j arg(x - alpha_j) (multivalued; principal branches summed).
double canonical_phase(const VortexConfig& config, const Point& x);

}  // namespace vortexlab

#include "vortexlab/renormalized_energy.hpp"

#include "vortexlab/error.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>

namespace vortexlab {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

void require_supported(const Domain& domain) {
  if (domain.kind() == Domain::Kind::Rectangle) {
    throw Error(ErrorCode::UnsupportedDomain, "renormalized energy is available on the plane and the disk");
  }
}

void require_nondegenerate(const VortexConfig& config, const Domain& domain) {
  require_supported(domain);
  if (domain.bounded()) config.require_inside(domain);
  if (!config.empty() && !(separation_radius(config, domain) > 0.0)) {
    throw Error(ErrorCode::CoincidentVortices, "vortices coincide");
  }
}

// |a|^2 |x|^2 - 2 R^2 x.a + R^4 = (|a| |x - a*|)^2 with a* the inversion of a in the circle.
double image_distance2(double R, const Point& x, const Point& a) {
  return a.squaredNorm() * x.squaredNorm() - 2.0 * R * R * x.dot(a) + R * R * R * R;
}

// Gradient in x of 1/2 log(image_distance2(x, a)).
Eigen::Vector2d image_log_gradient(double R, const Point& x, const Point& a) {
  return (a.squaredNorm() * x - R * R * a) / image_distance2(R, x, a);
}

}  // namespace

std::string to_json(const EnergyBreakdown& e) {
  nlohmann::json j;
  j["W"] = e.W;
  j["background"] = e.background;
  j["H0"] = e.H0;
  j["H_eps"] = e.H_eps;
  j["gamma0"] = e.gamma0;
  j["eps"] = e.eps;
  return j.dump();
}

double greens_regular_part(const Domain& domain, const Point& x, const Point& alpha, int degree) {
  require_supported(domain);
  if (domain.kind() == Domain::Kind::Plane) return 0.0;
  const double R = domain.radius();
  return -degree * 0.5 * std::log(image_distance2(R, x, alpha) / (R * R));
}

double greens_function(const Domain& domain, const Point& x, const Point& alpha, int degree) {
  return degree * std::log((x - alpha).norm()) + greens_regular_part(domain, x, alpha, degree);
}

double renormalized_energy(const VortexConfig& config, const Domain& domain) {
  require_nondegenerate(config, domain);
  const std::size_t n = config.size();
  double w = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k)
      w -= 2.0 * kPi * config.degree(j) * config.degree(k) *
           std::log((config.position(j) - config.position(k)).norm());
  if (domain.kind() == Domain::Kind::Disk) {
    // -pi sum_{j,k} d_j F(alpha_j, alpha_k)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        w -= kPi * config.degree(j) *
             greens_regular_part(domain, config.position(j), config.position(k), config.degree(k));
  }
  return w;
}

std::vector<Eigen::Vector2d> grad_renormalized_energy(const VortexConfig& config, const Domain& domain) {
  require_nondegenerate(config, domain);
  const std::size_t n = config.size();
  std::vector<Eigen::Vector2d> grad(n, Eigen::Vector2d::Zero());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      const Eigen::Vector2d d = config.position(k) - config.position(j);
      grad[k] -= 2.0 * kPi * config.degree(k) * config.degree(j) * d / d.squaredNorm();
    }
    if (domain.kind() == Domain::Kind::Disk) {
      const double R = domain.radius();
      for (std::size_t j = 0; j < n; ++j) {
        grad[k] += 2.0 * kPi * config.degree(k) * config.degree(j) *
                   image_log_gradient(R, config.position(k), config.position(j));
      }
    }
  }
  return grad;
}

Eigen::Vector2d grad_renormalized_energy(const VortexConfig& config, const Domain& domain, std::size_t k) {
  if (k >= config.size()) throw Error(ErrorCode::BadParams, "vortex index out of range");
  return grad_renormalized_energy(config, domain)[k];
}

EnergyBreakdown interaction_hamiltonian(const VortexConfig& config, const Domain& domain,
                                        const AnalyticPotential& q0, double eps, double gamma0) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::BadParams, "eps must lie in (0, 1)");
  EnergyBreakdown e;
  e.W = renormalized_energy(config, domain);
  for (const Point& p : config.positions()) e.background += kPi * q0.value(p);
  e.H0 = e.W + e.background;
  e.gamma0 = gamma0;
  e.eps = eps;
  e.H_eps = e.H0 + static_cast<double>(config.size()) * (kPi * std::abs(std::log(eps)) + gamma0);
  return e;
}

double hamiltonian_h0(const VortexConfig& config, const Domain& domain, const AnalyticPotential& q0) {
  double h = renormalized_energy(config, domain);
  for (const Point& p : config.positions()) h += kPi * q0.value(p);
  return h;
}

std::vector<Eigen::Vector2d> grad_h0(const VortexConfig& config, const Domain& domain,
                                     const AnalyticPotential& q0) {
  auto grad = grad_renormalized_energy(config, domain);
  for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += kPi * q0.gradient(config.position(k));
  return grad;
}

Eigen::Vector2d grad_h0(const VortexConfig& config, const Domain& domain, const AnalyticPotential& q0,
                        std::size_t k) {
  return grad_renormalized_energy(config, domain, k) + kPi * q0.gradient(config.position(k));
}

namespace {

Eigen::Vector2d current_impl(const VortexConfig& config, const Domain& domain, const Point& x, std::size_t skip) {
  require_supported(domain);
  Eigen::Vector2d j = Eigen::Vector2d::Zero();
  for (std::size_t k = 0; k < config.size(); ++k) {
    const Eigen::Vector2d d = x - config.position(k);
    Eigen::Vector2d grad_g = Eigen::Vector2d::Zero();
    if (k != skip) {
      const double r2 = d.squaredNorm();
      if (r2 <= 1e-28 * std::max(1.0, x.squaredNorm())) {
        throw Error(ErrorCode::EvaluationAtVortex, "current is singular at a vortex");
      }
      grad_g = d / r2;
    }
    if (domain.kind() == Domain::Kind::Disk) {
      grad_g -= image_log_gradient(domain.radius(), x, config.position(k));
    }
    j += config.degree(k) * perp(grad_g);
  }
  return j;
}

}  // namespace

Eigen::Vector2d canonical_phase_current(const VortexConfig& config, const Domain& domain, const Point& x) {
  return current_impl(config, domain, x, config.size());
}

Eigen::Vector2d canonical_phase_current(const VortexConfig& config, const Domain& domain, const Point& x,
                                        std::size_t skip) {
  return current_impl(config, domain, x, skip);
}

double canonical_phase(const VortexConfig& config, const Point& x) {
  double theta = 0.0;
  for (std::size_t k = 0; k < config.size(); ++k) {
    const Eigen::Vector2d d = x - config.position(k);
    theta += config.degree(k) * std::atan2(d.y(), d.x());
  }
  return theta;
}

}  // namespace vortexlab

#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace vortexlab {

using Point = Eigen::Vector2d;

/// Bounded or unbounded planar domain.
class Domain {
 public:
  enum class Kind { Plane, Disk, Rectangle };

  static Domain plane();
  static Domain disk(double radius);
  static Domain rectangle(double xmin, double xmax, double ymin, double ymax);

  Kind kind() const { return kind_; }
  bool bounded() const { return kind_ != Kind::Plane; }
  double radius() const { return radius_; }
  double xmin() const { return xmin_; }
  double xmax() const { return xmax_; }
  double ymin() const { return ymin_; }
  double ymax() const { return ymax_; }

  /// Distance to the boundary; +inf on the plane, negative outside.
  double boundary_distance(const Point& p) const;
  bool contains(const Point& p) const { return boundary_distance(p) > 0.0; }

 private:
  Domain() = default;
  Kind kind_ = Kind::Plane;
  double radius_ = 0.0;
  double xmin_ = 0.0, xmax_ = 0.0, ymin_ = 0.0, ymax_ = 0.0;
};

/// Positions and unit degrees of point vortices.
class VortexConfig {
 public:
  VortexConfig() = default;
  VortexConfig(std::vector<Point> positions, std::vector<int> degrees);

  std::size_t size() const { return positions_.size(); }
  bool empty() const { return positions_.empty(); }

  const std::vector<Point>& positions() const { return positions_; }
  const std::vector<int>& degrees() const { return degrees_; }
  const Point& position(std::size_t k) const { return positions_[k]; }
  int degree(std::size_t k) const { return degrees_[k]; }

  /// Same degrees, new positions (size must match).
  VortexConfig with_positions(std::vector<Point> positions) const;
  /// Every degree negated.
  VortexConfig conjugated() const;

  /// Packs positions as (x0, y0, x1, y1, ...).
  Eigen::VectorXd flatten() const;
  VortexConfig with_flat(const Eigen::VectorXd& flat) const;

  /// Throws BadParams if any position is outside `domain`.
  void require_inside(const Domain& domain) const;

 private:
  std::vector<Point> positions_;
  std::vector<int> degrees_;
};

struct Atom {
  Point point;
  double weight;
};

/// Signed sum of weighted Dirac masses.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

  /// pi * sum_j d_j delta_{alpha_j}
  static AtomicMeasure from_config(const VortexConfig& config, double scale);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double total_weight() const;

  /// Merges coincident atoms (within `tol`) and drops zero weights.
  AtomicMeasure canonical(double tol = 1e-12) const;

  AtomicMeasure operator-(const AtomicMeasure& other) const;

 private:
  std::vector<Atom> atoms_;
};

/// One eighth of the smallest vortex-vortex or vortex-boundary distance.
double separation_radius(const VortexConfig& config, const Domain& domain);

VortexConfig read_vortex_config(std::istream& in);
VortexConfig read_vortex_config(const std::string& path);
void write_vortex_config(std::ostream& out, const VortexConfig& config);

}  // namespace vortexlab

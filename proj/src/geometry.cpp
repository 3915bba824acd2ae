#include "vortexlab/geometry.hpp"

#include "vortexlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace vortexlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::WeightMismatch: return "WeightMismatch";
    case ErrorCode::CoincidentVortices: return "CoincidentVortices";
    case ErrorCode::UnsupportedDomain: return "UnsupportedDomain";
    case ErrorCode::EvaluationAtVortex: return "EvaluationAtVortex";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorCode::BlowupDetected: return "BlowupDetected";
    case ErrorCode::GeometryMismatch: return "GeometryMismatch";
    case ErrorCode::UnresolvedCore: return "UnresolvedCore";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Domain Domain::plane() { return Domain{}; }

Domain Domain::disk(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::BadParams, "disk radius must be positive");
  }
  Domain d;
  d.kind_ = Kind::Disk;
  d.radius_ = radius;
  return d;
}

Domain Domain::rectangle(double xmin, double xmax, double ymin, double ymax) {
  if (!(xmin < xmax) || !(ymin < ymax)) {
    throw Error(ErrorCode::BadParams, "rectangle requires xmin < xmax and ymin < ymax");
  }
  Domain d;
  d.kind_ = Kind::Rectangle;
  d.xmin_ = xmin;
  d.xmax_ = xmax;
  d.ymin_ = ymin;
  d.ymax_ = ymax;
  return d;
}

double Domain::boundary_distance(const Point& p) const {
  switch (kind_) {
    case Kind::Plane:
      return std::numeric_limits<double>::infinity();
    case Kind::Disk:
      return radius_ - p.norm();
    case Kind::Rectangle:
      return std::min({p.x() - xmin_, xmax_ - p.x(), p.y() - ymin_, ymax_ - p.y()});
  }
  return 0.0;
}

VortexConfig::VortexConfig(std::vector<Point> positions, std::vector<int> degrees)
    : positions_(std::move(positions)), degrees_(std::move(degrees)) {
  if (positions_.size() != degrees_.size()) {
    throw Error(ErrorCode::BadParams, "positions and degrees differ in length");
  }
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    if (degrees_[k] != 1 && degrees_[k] != -1) {
      throw Error(ErrorCode::BadParams, "vortex degrees must be +1 or -1");
    }
    if (!positions_[k].allFinite()) {
      throw Error(ErrorCode::NonFiniteInput, "vortex position is not finite");
    }
  }
}

VortexConfig VortexConfig::with_positions(std::vector<Point> positions) const {
  return VortexConfig(std::move(positions), degrees_);
}

VortexConfig VortexConfig::conjugated() const {
  std::vector<int> flipped(degrees_);
  for (int& d : flipped) d = -d;
  return VortexConfig(positions_, std::move(flipped));
}

Eigen::VectorXd VortexConfig::flatten() const {
  Eigen::VectorXd flat(2 * positions_.size());
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    flat.segment<2>(2 * k) = positions_[k];
  }
  return flat;
}

VortexConfig VortexConfig::with_flat(const Eigen::VectorXd& flat) const {
  std::vector<Point> pts(positions_.size());
  for (std::size_t k = 0; k < pts.size(); ++k) pts[k] = flat.segment<2>(2 * k);
  return VortexConfig(std::move(pts), degrees_);
}

void VortexConfig::require_inside(const Domain& domain) const {
  for (const Point& p : positions_) {
    if (!domain.contains(p)) {
      throw Error(ErrorCode::BadParams, "vortex lies outside the domain");
    }
  }
}

AtomicMeasure AtomicMeasure::from_config(const VortexConfig& config, double scale) {
  std::vector<Atom> atoms;
  atoms.reserve(config.size());
  for (std::size_t k = 0; k < config.size(); ++k) {
    atoms.push_back({config.position(k), scale * config.degree(k)});
  }
  return AtomicMeasure(std::move(atoms));
}

double AtomicMeasure::total_weight() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight;
  return s;
}

AtomicMeasure AtomicMeasure::canonical(double tol) const {
  std::vector<Atom> merged;
  for (const Atom& a : atoms_) {
    if (!a.point.allFinite() || !std::isfinite(a.weight)) {
      throw Error(ErrorCode::NonFiniteInput, "atom has non-finite data");
    }
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const Atom& m) { return (m.point - a.point).norm() <= tol; });
    if (it == merged.end()) {
      merged.push_back(a);
    } else {
      it->weight += a.weight;
    }
  }
  double scale = 0.0;
  for (const Atom& a : atoms_) scale = std::max(scale, std::abs(a.weight));
  std::erase_if(merged, [&](const Atom& a) { return std::abs(a.weight) <= tol * std::max(1.0, scale); });
  return AtomicMeasure(std::move(merged));
}

AtomicMeasure AtomicMeasure::operator-(const AtomicMeasure& other) const {
  std::vector<Atom> atoms = atoms_;
  for (const Atom& a : other.atoms_) atoms.push_back({a.point, -a.weight});
  return AtomicMeasure(std::move(atoms));
}

double separation_radius(const VortexConfig& config, const Domain& domain) {
  if (config.empty()) {
    throw Error(ErrorCode::BadParams, "separation radius needs at least one vortex");
  }
  double m = std::numeric_limits<double>::infinity();
  const auto& pts = config.positions();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) m = std::min(m, (pts[i] - pts[j]).norm());
    if (domain.bounded()) m = std::min(m, std::max(0.0, domain.boundary_distance(pts[i])));
  }
  return m / 8.0;
}

VortexConfig read_vortex_config(std::istream& in) {
  std::vector<Point> pts;
  std::vector<int> degs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x, y;
    int d;
    if (!(ls >> x)) continue;
    if (!(ls >> y >> d)) {
      throw Error(ErrorCode::ParseError, "vortex line " + std::to_string(lineno) + " needs 'x y d'");
    }
    std::string extra;
    if (ls >> extra) {
      throw Error(ErrorCode::ParseError, "trailing tokens on vortex line " + std::to_string(lineno));
    }
    pts.emplace_back(x, y);
    degs.push_back(d);
  }
  return VortexConfig(std::move(pts), std::move(degs));
}

VortexConfig read_vortex_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path);
  return read_vortex_config(in);
}

void write_vortex_config(std::ostream& out, const VortexConfig& config) {
  out << "# x y d\n" << std::setprecision(17);
  for (std::size_t k = 0; k < config.size(); ++k) {
    out << config.position(k).x() << ' ' << config.position(k).y() << ' ' << config.degree(k) << '\n';
  }
}

}  // namespace vortexlab

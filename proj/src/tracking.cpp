#include "vortexlab/tracking.hpp"

#include "vortexlab/error.hpp"
#include "vortexlab/flat_norm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>

namespace vortexlab {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Difference of node phases, so a zero node still gets one consistent phase.
double phase_step(const cd& a, const cd& b) { return std::remainder(std::arg(b) - std::arg(a), 2.0 * kPi); }

}  // namespace

VectorField supercurrent(const ComplexField& field) {
  const GridGeometry& g = field.geometry;
  const Eigen::ArrayXXcd& w = field.values;
  VectorField j{g, {}, {}};
  j.x = (w.conjugate() * centered_dx(w, g.hx)).imag();
  j.y = (w.conjugate() * centered_dy(w, g.hy)).imag();
  return j;
}

ScalarField jacobian(const ComplexField& field) {
  const VectorField j = supercurrent(field);
  const GridGeometry& g = field.geometry;
  return {g, 0.5 * (centered_dx(j.y, g.hx) - centered_dy(j.x, g.hy))};
}

namespace {

// Phase increments along +x and +y edges. Each edge is evaluated once, so the
// plaquette windings telescope to the boundary winding even where an
// increment lands on the branch cut.
struct EdgeSteps {
  Eigen::ArrayXXd x, y;
};

EdgeSteps edge_steps(const Eigen::ArrayXXcd& w) {
  const Eigen::Index nx = w.rows(), ny = w.cols();
  EdgeSteps e{Eigen::ArrayXXd(nx - 1, ny), Eigen::ArrayXXd(nx, ny - 1)};
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i + 1 < nx; ++i) e.x(i, j) = phase_step(w(i, j), w(i + 1, j));
  for (Eigen::Index j = 0; j + 1 < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) e.y(i, j) = phase_step(w(i, j), w(i, j + 1));
  return e;
}

}  // namespace

Eigen::ArrayXXi plaquette_winding(const ComplexField& field) {
  const GridGeometry& g = field.geometry;
  const EdgeSteps e = edge_steps(field.values);
  Eigen::ArrayXXi n(g.nx - 1, g.ny - 1);
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double s = e.x(i, j) + e.y(i + 1, j) - e.x(i, j + 1) - e.y(i, j);
      n(i, j) = static_cast<int>(std::lround(s / (2.0 * kPi)));
    }
  }
  return n;
}

int boundary_winding(const ComplexField& field) {
  const GridGeometry& g = field.geometry;
  const EdgeSteps e = edge_steps(field.values);
  const double s = e.x.col(0).sum() + e.y.row(g.nx - 1).sum() - e.x.col(g.ny - 1).sum() - e.y.row(0).sum();
  return static_cast<int>(std::lround(s / (2.0 * kPi)));
}

AtomicMeasure DetectionResult::measure() const {
  std::vector<Atom> atoms;
  atoms.reserve(vortices.size());
  for (const DetectedVortex& v : vortices) atoms.push_back({v.center, kPi * v.degree});
  return AtomicMeasure(std::move(atoms));
}

VortexConfig DetectionResult::config() const {
  std::vector<Point> p;
  std::vector<int> d;
  for (const DetectedVortex& v : vortices) {
    p.push_back(v.center);
    d.push_back(v.degree);
  }
  return VortexConfig(std::move(p), std::move(d));
}

int DetectionResult::total_degree() const {
  int s = 0;
  for (const DetectedVortex& v : vortices) s += v.degree;
  return s;
}

namespace {

struct Plaquette {
  int i, j, n;
  Point center;
};

// Zero of the least-squares affine fit w ~ c0 + c1 dx + c2 dy on the 4x4 nodes
// around the plaquette containing `c`, re-centred while the zero leaves it.
std::optional<Point> refine_center(const ComplexField& field, Point c) {
  const GridGeometry& g = field.geometry;
  for (int it = 0; it < 4; ++it) {
    const int pi = std::clamp(static_cast<int>(std::floor((c.x() - g.x0) / g.hx)), 0, g.nx - 2);
    const int pj = std::clamp(static_cast<int>(std::floor((c.y() - g.y0) / g.hy)), 0, g.ny - 2);
    const int i0 = std::max(0, pi - 1), i1 = std::min(g.nx - 1, pi + 2);
    const int j0 = std::max(0, pj - 1), j1 = std::min(g.ny - 1, pj + 2);
    const Point mid(g.x(pi) + 0.5 * g.hx, g.y(pj) + 0.5 * g.hy);
    const int rows = (i1 - i0 + 1) * (j1 - j0 + 1);
    Eigen::MatrixXcd A(rows, 3);
    Eigen::VectorXcd b(rows);
    int r = 0;
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i, ++r) {
        A(r, 0) = 1.0;
        A(r, 1) = (g.x(i) - mid.x()) / g.hx;
        A(r, 2) = (g.y(j) - mid.y()) / g.hy;
        b(r) = field.values(i, j);
      }
    const Eigen::Vector3cd coef = A.colPivHouseholderQr().solve(b);
    Eigen::Matrix2d M;
    M << coef(1).real(), coef(2).real(), coef(1).imag(), coef(2).imag();
    if (std::abs(M.determinant()) < 1e-14 * M.squaredNorm()) return std::nullopt;
    const Eigen::Vector2d d = M.partialPivLu().solve(Eigen::Vector2d(-coef(0).real(), -coef(0).imag()));
    if (!d.allFinite()) return std::nullopt;
    const Point next(mid.x() + d.x() * g.hx, mid.y() + d.y() * g.hy);
    if (std::abs(d.x()) <= 0.5 && std::abs(d.y()) <= 0.5) return next;
    c = next;
  }
  return std::nullopt;
}

// Weighted Jacobian integral over the disk of radius r about c.
double jacobian_mass(const ScalarField& jac, const Eigen::ArrayXXd& weights, const Point& c, double r) {
  const GridGeometry& g = jac.geometry;
  const int i0 = std::max(0, static_cast<int>(std::floor((c.x() - r - g.x0) / g.hx)));
  const int i1 = std::min(g.nx - 1, static_cast<int>(std::ceil((c.x() + r - g.x0) / g.hx)));
  const int j0 = std::max(0, static_cast<int>(std::floor((c.y() - r - g.y0) / g.hy)));
  const int j1 = std::min(g.ny - 1, static_cast<int>(std::ceil((c.y() + r - g.y0) / g.hy)));
  double m = 0.0;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i)
      if ((g.node(i, j) - c).norm() < r) m += jac.values(i, j) * weights(i, j);
  return m;
}

}  // namespace

DetectionResult detect_vortices(const ComplexField& field, double merge_radius) {
  const GridGeometry& g = field.geometry;
  if (!field.values.allFinite()) throw Error(ErrorCode::NonFiniteInput, "field is not finite");
  if (g.nx < 5 || g.ny < 5) throw Error(ErrorCode::BadParams, "detection needs at least 5x5 nodes");
  if (merge_radius <= 0.0) merge_radius = 4.0 * g.spacing();

  const Eigen::ArrayXXi wind = plaquette_winding(field);
  std::vector<Plaquette> hits;
  for (int j = 0; j < wind.cols(); ++j)
    for (int i = 0; i < wind.rows(); ++i) {
      if (wind(i, j) == 0) continue;
      const Eigen::ArrayXXcd& w = field.values;
      if (std::abs(w(i, j)) > 0.5 && std::abs(w(i + 1, j)) > 0.5 && std::abs(w(i, j + 1)) > 0.5 &&
          std::abs(w(i + 1, j + 1)) > 0.5) {
        throw Error(ErrorCode::UnresolvedCore, "winding plaquette without an amplitude dip");
      }
      hits.push_back({i, j, wind(i, j), Point(g.x(i) + 0.5 * g.hx, g.y(j) + 0.5 * g.hy)});
    }

  // Single-linkage clusters within merge_radius.
  std::vector<std::size_t> parent(hits.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a = 0; a < hits.size(); ++a)
    for (std::size_t b = a + 1; b < hits.size(); ++b)
      if ((hits[a].center - hits[b].center).norm() <= merge_radius) parent[find(a)] = find(b);

  std::vector<std::vector<std::size_t>> clusters;
  std::vector<long> slot(hits.size(), -1);
  for (std::size_t a = 0; a < hits.size(); ++a) {
    const std::size_t r = find(a);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(slot[r])].push_back(a);
  }

  DetectionResult result;
  result.time = field.time;
  for (const auto& cluster : clusters) {
    int net = 0;
    for (std::size_t a : cluster) net += hits[a].n;
    if (net == 0) {
      ++result.annihilated;
      continue;
    }
    const int sign = net > 0 ? 1 : -1;
    std::vector<Point> seeds;
    if (std::abs(net) == 1) {
      Point c = Point::Zero();
      int count = 0;
      for (std::size_t a : cluster)
        if (hits[a].n * sign > 0) {
          c += hits[a].center;
          ++count;
        }
      seeds.push_back(c / count);
    } else {
      for (std::size_t a : cluster)
        for (int k = 0; k < hits[a].n * sign && static_cast<int>(seeds.size()) < std::abs(net); ++k)
          seeds.push_back(hits[a].center);
      while (static_cast<int>(seeds.size()) < std::abs(net)) seeds.push_back(seeds.back());
    }
    for (const Point& seed : seeds) {
      DetectedVortex v;
      v.degree = sign;
      v.cluster_size = static_cast<int>(cluster.size());
      v.flagged = std::abs(net) > 1;
      const std::optional<Point> r = v.flagged ? std::nullopt : refine_center(field, seed);
      v.center = (r && (*r - seed).norm() <= 2.0 * g.spacing()) ? *r : seed;
      result.vortices.push_back(v);
    }
  }

  // Residual |int_B J - pi d| / pi on balls reaching halfway to the nearest
  // other vortex or to the boundary.
  if (!result.vortices.empty()) {
    const ScalarField jac = jacobian(field);
    const Eigen::ArrayXXd weights = g.weights();
    const Domain box = g.domain();
    for (std::size_t a = 0; a < result.vortices.size(); ++a) {
      DetectedVortex& v = result.vortices[a];
      double r = box.boundary_distance(v.center);
      for (std::size_t b = 0; b < result.vortices.size(); ++b)
        if (b != a) r = std::min(r, 0.5 * (result.vortices[b].center - v.center).norm());
      v.residual = std::abs(jacobian_mass(jac, weights, v.center, r) - kPi * v.degree) / kPi;
      result.residual += v.residual;
    }
  }
  return result;
}

void write_detection_csv(std::ostream& out, const std::vector<DetectionResult>& detections) {
  out << "t,x,y,weight,cluster_size,residual\n" << std::setprecision(17);
  for (const DetectionResult& d : detections)
    for (const DetectedVortex& v : d.vortices)
      out << d.time << ',' << v.center.x() << ',' << v.center.y() << ',' << kPi * v.degree << ','
          << v.cluster_size << ',' << v.residual << '\n';
}

void write_detection_csv(const std::string& path, const std::vector<DetectionResult>& detections) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  write_detection_csv(out, detections);
}

double EquipartitionResidual::max() const { return std::max({xx, xy, yy}); }

EquipartitionResidual equipartition_residual(const ComplexField& field, const DetectionResult& detection,
                                             double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::BadParams, "eps must lie in (0, 1)");
  EquipartitionResidual out;
  if (detection.vortices.empty()) return out;
  const GridGeometry& g = field.geometry;
  const Domain box = g.domain();
  const double L = std::abs(std::log(eps));
  const Eigen::ArrayXXcd wx = centered_dx(field.values, g.hx), wy = centered_dy(field.values, g.hy);
  const Eigen::ArrayXXd t11 = wx.abs2(), t22 = wy.abs2(), t12 = (wx * wy.conjugate()).real();
  const Eigen::ArrayXXd weights = g.weights();

  for (std::size_t a = 0; a < detection.vortices.size(); ++a) {
    const Point xi = detection.vortices[a].center;
    double r = box.boundary_distance(xi);
    for (std::size_t b = 0; b < detection.vortices.size(); ++b)
      if (b != a) r = std::min(r, 0.5 * (detection.vortices[b].center - xi).norm());
    if (!(r > 0.0)) continue;
    double m11 = 0, m12 = 0, m22 = 0;
    Eigen::Vector2d f11 = Eigen::Vector2d::Zero(), f12 = f11, f22 = f11;
    const int i0 = std::max(0, static_cast<int>(std::floor((xi.x() - r - g.x0) / g.hx)));
    const int i1 = std::min(g.nx - 1, static_cast<int>(std::ceil((xi.x() + r - g.x0) / g.hx)));
    const int j0 = std::max(0, static_cast<int>(std::floor((xi.y() - r - g.y0) / g.hy)));
    const int j1 = std::min(g.ny - 1, static_cast<int>(std::ceil((xi.y() + r - g.y0) / g.hy)));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        const Eigen::Vector2d d = g.node(i, j) - xi;
        if (d.norm() >= r) continue;
        const double wgt = weights(i, j) / L;
        m11 += wgt * t11(i, j);
        m12 += wgt * t12(i, j);
        m22 += wgt * t22(i, j);
        f11 += wgt * t11(i, j) * d;
        f12 += wgt * t12(i, j) * d;
        f22 += wgt * t22(i, j) * d;
      }
    out.xx += r * std::abs(m11 - kPi) + f11.norm();
    out.xy += r * std::abs(m12) + f12.norm();
    out.yy += r * std::abs(m22 - kPi) + f22.norm();
  }
  return out;
}

TrajectoryComparison trajectory_compare(const std::vector<DetectionResult>& detections, const Trajectory& ode,
                                        const Domain& domain) {
  TrajectoryComparison out;
  for (const DetectionResult& d : detections) {
    ComparisonSample s;
    s.t = d.time;
    const VortexConfig ref = ode.state_at(d.time);
    s.detected = d.vortices.size();
    s.expected = ref.size();
    s.count_mismatch = s.detected != s.expected;
    if (s.count_mismatch) ++out.mismatches;
    s.distance = flat_norm_distance(d.measure(), AtomicMeasure::from_config(ref, kPi), domain);
    out.max_distance = std::max(out.max_distance, s.distance);
    out.samples.push_back(s);
  }
  return out;
}

TrajectoryComparison trajectory_compare(const std::vector<ComplexField>& fields, const Trajectory& ode,
                                        const Domain& domain, double merge_radius) {
  std::vector<DetectionResult> detections;
  detections.reserve(fields.size());
  for (const ComplexField& f : fields) detections.push_back(detect_vortices(f, merge_radius));
  return trajectory_compare(detections, ode, domain);
}

}  // namespace vortexlab

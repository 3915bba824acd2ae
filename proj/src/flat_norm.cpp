#include "vortexlab/flat_norm.hpp"

#include "vortexlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vortexlab {

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  // Shortest augmenting path Hungarian method with row/column potentials.
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw Error(ErrorCode::BadParams, "assignment needs a square matrix");
  if (n == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

double weight_quantum(const std::vector<double>& weights, double tol) {
  double scale = 0.0;
  for (double w : weights) scale = std::max(scale, std::abs(w));
  if (scale == 0.0) return 0.0;
  const double eps = tol * scale;
  double g = 0.0;
  for (double w : weights) {
    double a = std::abs(w);
    if (a <= eps) continue;
    if (g == 0.0) {
      g = a;
      continue;
    }
    double x = std::max(a, g), y = std::min(a, g);
    while (y > eps) {
      double r = std::fmod(x, y);
      if (r > y - eps) r = 0.0;
      x = y;
      y = r;
    }
    g = x;
  }
  return g;
}

namespace {

struct Quanta {
  std::vector<Point> positive;
  std::vector<Point> negative;
  double quantum = 0.0;
};

constexpr std::size_t kMaxQuanta = 4096;

Quanta split_into_quanta(const AtomicMeasure& signed_measure) {
  Quanta q;
  std::vector<double> weights;
  for (const Atom& a : signed_measure.atoms()) weights.push_back(a.weight);
  q.quantum = weight_quantum(weights);
  if (q.quantum == 0.0) return q;
  for (const Atom& a : signed_measure.atoms()) {
    const double ratio = std::abs(a.weight) / q.quantum;
    const double count = std::round(ratio);
    if (std::abs(ratio - count) > 1e-9 * std::max(1.0, ratio)) {
      throw Error(ErrorCode::BadParams, "atom weights are not commensurate");
    }
    if (q.positive.size() + q.negative.size() + count > kMaxQuanta) {
      throw Error(ErrorCode::BadParams, "too many weight quanta for exact matching");
    }
    auto& side = a.weight > 0.0 ? q.positive : q.negative;
    for (int c = 0; c < static_cast<int>(count); ++c) side.push_back(a.point);
  }
  return q;
}

}  // namespace

double flat_norm_distance(const AtomicMeasure& a, const AtomicMeasure& b, const Domain& domain) {
  const AtomicMeasure diff = (a.canonical() - b.canonical()).canonical();
  const Quanta q = split_into_quanta(diff);
  const std::size_t np = q.positive.size(), nn = q.negative.size();
  if (np + nn == 0) return 0.0;

  if (!domain.bounded()) {
    if (np != nn) throw Error(ErrorCode::WeightMismatch, "total weights differ on the full plane");
    Eigen::MatrixXd cost(np, nn);
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t j = 0; j < nn; ++j) cost(i, j) = (q.positive[i] - q.negative[j]).norm();
    const auto assign = solve_assignment(cost);
    double total = 0.0;
    for (std::size_t i = 0; i < np; ++i) total += cost(i, assign[i]);
    return total * q.quantum;
  }

  // Rows: positive quanta, then boundary sources feeding negative quanta.
  // Columns: negative quanta, then boundary sinks absorbing positive quanta.
  const std::size_t n = np + nn;
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(n, n);
  auto bd = [&](const Point& p) { return std::max(0.0, domain.boundary_distance(p)); };
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < nn; ++j) cost(i, j) = (q.positive[i] - q.negative[j]).norm();
    cost.row(i).tail(np).setConstant(bd(q.positive[i]));
  }
  for (std::size_t j = 0; j < nn; ++j) cost.col(j).tail(nn).setConstant(bd(q.negative[j]));
  const auto assign = solve_assignment(cost);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += cost(i, assign[i]);
  return total * q.quantum;
}

Pairing pair_configurations(const VortexConfig& reference, const AtomicMeasure& detected) {
  Pairing out;
  double cutoff = std::numeric_limits<double>::infinity();
  if (!reference.empty()) cutoff = 4.0 * separation_radius(reference, Domain::plane());

  struct Candidate {
    double dist;
    std::size_t ref, atom;
  };
  std::vector<Candidate> candidates;
  const auto& atoms = detected.atoms();
  for (std::size_t r = 0; r < reference.size(); ++r) {
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      if (atoms[a].weight * reference.degree(r) <= 0.0) continue;
      const double d = (atoms[a].point - reference.position(r)).norm();
      if (d <= cutoff) candidates.push_back({d, r, a});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& x, const Candidate& y) { return x.dist < y.dist; });
  std::vector<char> ref_used(reference.size(), 0), atom_used(atoms.size(), 0);
  for (const Candidate& c : candidates) {
    if (ref_used[c.ref] || atom_used[c.atom]) continue;
    ref_used[c.ref] = atom_used[c.atom] = 1;
    out.matches.push_back({c.ref, c.atom, c.dist});
  }
  std::sort(out.matches.begin(), out.matches.end(),
            [](const Pairing::Match& x, const Pairing::Match& y) { return x.reference < y.reference; });
  for (std::size_t a = 0; a < atoms.size(); ++a)
    if (!atom_used[a]) out.unmatched_atoms.push_back(a);
  for (std::size_t r = 0; r < reference.size(); ++r)
    if (!ref_used[r]) out.unmatched_reference.push_back(r);
  return out;
}

}  // namespace vortexlab

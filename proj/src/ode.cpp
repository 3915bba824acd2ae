#include "vortexlab/ode.hpp"

#include "vortexlab/error.hpp"
#include "vortexlab/renormalized_energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace vortexlab {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

}  // namespace

DynamicsKind parse_dynamics_kind(const std::string& name) {
  if (name == "schrodinger") return DynamicsKind::Schrodinger;
  if (name == "gradient_flow") return DynamicsKind::GradientFlow;
  if (name == "mixed") return DynamicsKind::Mixed;
  throw Error(ErrorCode::BadParams, "unknown dynamics kind '" + name + "'");
}

std::string to_string(DynamicsKind kind) {
  switch (kind) {
    case DynamicsKind::Schrodinger: return "schrodinger";
    case DynamicsKind::GradientFlow: return "gradient_flow";
    case DynamicsKind::Mixed: return "mixed";
  }
  return "unknown";
}

std::vector<Eigen::Vector2d> velocity_from_gradient(const std::vector<Eigen::Vector2d>& grad,
                                                    const std::vector<int>& degrees, DynamicsKind kind) {
  if (grad.size() != degrees.size()) throw Error(ErrorCode::BadParams, "gradient/degree size mismatch");
  std::vector<Eigen::Vector2d> v(grad.size());
  for (std::size_t k = 0; k < grad.size(); ++k) {
    const Eigen::Vector2d& g = grad[k];
    const double d = degrees[k];
    switch (kind) {
      case DynamicsKind::Schrodinger: v[k] = Eigen::Vector2d(g.y(), -g.x()) / (kPi * d); break;
      case DynamicsKind::GradientFlow: v[k] = -g / kPi; break;
      case DynamicsKind::Mixed: v[k] = -(g + d * perp(g)) / (2.0 * kPi); break;
    }
  }
  return v;
}

std::vector<Eigen::Vector2d> vortex_velocity(const VortexConfig& config, const Domain& domain,
                                             const AnalyticPotential& q0, DynamicsKind kind) {
  return velocity_from_gradient(grad_h0(config, domain, q0), config.degrees(), kind);
}

VortexConfig Trajectory::state_at(double t) const {
  if (times.empty()) throw Error(ErrorCode::BadParams, "empty trajectory");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin());
  const double s = (t - times[i - 1]) / (times[i] - times[i - 1]);
  const Eigen::VectorXd a = states[i - 1].flatten();
  const Eigen::VectorXd b = states[i].flatten();
  return states[i].with_flat((1.0 - s) * a + s * b);
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct DenseStep {
  double t0, h;
  std::array<Eigen::VectorXd, 5> rc;
  Eigen::VectorXd operator()(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return rc[0] + th * (rc[1] + th1 * (rc[2] + th * (rc[3] + th1 * rc[4])));
  }
};

class Stepper {
 public:
  Stepper(const VortexConfig& shape, const Domain& domain, const AnalyticPotential& q0, DynamicsKind kind)
      : shape_(shape), domain_(domain), q0_(q0), kind_(kind) {}

  Eigen::VectorXd rhs(const Eigen::VectorXd& y) const {
    const VortexConfig c = shape_.with_flat(y);
    const auto v = vortex_velocity(c, domain_, q0_, kind_);
    Eigen::VectorXd out(y.size());
    for (std::size_t k = 0; k < v.size(); ++k) out.segment<2>(2 * static_cast<Eigen::Index>(k)) = v[k];
    return out;
  }

  double r_alpha(const Eigen::VectorXd& y) const {
    const VortexConfig c = shape_.with_flat(y);
    if (domain_.bounded()) {
      for (const Point& p : c.positions())
        if (!domain_.contains(p)) return 0.0;
    }
    return separation_radius(c, domain_);
  }

  double h0(const Eigen::VectorXd& y) const { return hamiltonian_h0(shape_.with_flat(y), domain_, q0_); }

  const VortexConfig& shape() const { return shape_; }

 private:
  const VortexConfig& shape_;
  const Domain& domain_;
  const AnalyticPotential& q0_;
  DynamicsKind kind_;
};

}  // namespace

Trajectory integrate(const VortexConfig& config0, const Domain& domain, const AnalyticPotential& q0,
                     DynamicsKind kind, double horizon, const OdeOptions& options) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error(ErrorCode::BadParams, "horizon must be positive");
  if (config0.empty()) throw Error(ErrorCode::BadParams, "no vortices");
  if (!(options.rtol > 0.0) || !(options.atol > 0.0)) throw Error(ErrorCode::BadParams, "tolerances must be positive");
  if (domain.bounded()) config0.require_inside(domain);
  const double r0 = separation_radius(config0, domain);
  if (!(r0 > 0.0)) throw Error(ErrorCode::CoincidentVortices, "vortices coincide");

  Stepper stepper(config0, domain, q0, kind);
  const double r_stop = std::isfinite(r0) ? options.collision_fraction * r0 : 0.0;

  std::vector<double> sample_times = options.sample_times;
  std::sort(sample_times.begin(), sample_times.end());
  sample_times.erase(std::remove_if(sample_times.begin(), sample_times.end(),
                                    [&](double s) { return !(s > 0.0 && s <= horizon); }),
                     sample_times.end());
  sample_times.erase(std::unique(sample_times.begin(), sample_times.end()), sample_times.end());
  const bool explicit_times = !options.sample_times.empty();
  const std::size_t stride = std::max<std::size_t>(1, options.sample_stride);

  Trajectory traj;
  auto record = [&](double t, const Eigen::VectorXd& y) {
    if (!traj.times.empty() && !(t > traj.times.back())) return;
    traj.times.push_back(t);
    traj.states.push_back(config0.with_flat(y));
    traj.h0.push_back(stepper.h0(y));
    traj.r_alpha.push_back(stepper.r_alpha(y));
  };

  Eigen::VectorXd y = config0.flatten();
  double t = 0.0;
  record(t, y);
  Eigen::VectorXd k1 = stepper.rhs(y);

  const double vmax = k1.cwiseAbs().maxCoeff();
  double h = options.initial_step;
  if (!(h > 0.0)) {
    const double scale = std::isfinite(r0) ? r0 : 1.0;
    h = vmax > 0.0 ? 0.01 * scale / vmax : horizon;
  }
  h = std::min(h, horizon);

  std::size_t next_sample = 0;
  std::size_t accepted = 0;
  const double uround = 1e-16;

  for (std::size_t steps = 0;; ++steps) {
    if (steps >= options.max_steps) {
      traj.termination = Trajectory::Termination::SolverFailure;
      return traj;
    }
    if (t + 1.01 * h >= horizon) h = horizon - t;
    if (h < options.min_step * std::max(1.0, std::abs(t))) {
      throw Error(ErrorCode::SolverFailure, "step size underflow at t = " + std::to_string(t));
    }

    Eigen::VectorXd k2, k3, k4, k5, k6, k7, ynew;
    bool ok = true;
    try {
      k2 = stepper.rhs(y + h * a21 * k1);
      k3 = stepper.rhs(y + h * (a31 * k1 + a32 * k2));
      k4 = stepper.rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = stepper.rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = stepper.rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      k7 = stepper.rhs(ynew);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CoincidentVortices && e.code() != ErrorCode::BadParams) throw;
      ok = false;
    }
    double err = 0.0;
    if (ok) {
      const Eigen::VectorXd errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const Eigen::ArrayXd sc = options.atol + options.rtol * y.cwiseAbs().cwiseMax(ynew.cwiseAbs()).array();
      err = std::sqrt((errv.array() / sc).square().mean());
      ok = std::isfinite(err) && ynew.allFinite();
    }
    if (!ok) {
      h *= 0.25;
      continue;
    }
    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    DenseStep dense{t, h, {}};
    dense.rc[0] = y;
    dense.rc[1] = ynew - y;
    dense.rc[2] = h * k1 - dense.rc[1];
    dense.rc[3] = dense.rc[1] - h * k7 - dense.rc[2];
    dense.rc[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

    const double tnew = (h == horizon - t) ? horizon : t + h;
    ++accepted;

    const double rnew = stepper.r_alpha(ynew);
    if (rnew < r_stop) {
      double lo = t, hi = tnew;
      while (hi - lo > options.event_tol) {
        const double mid = 0.5 * (lo + hi);
        if (stepper.r_alpha(dense(mid)) < r_stop) hi = mid; else lo = mid;
      }
      if (explicit_times) {
        while (next_sample < sample_times.size() && sample_times[next_sample] < hi) {
          record(sample_times[next_sample], dense(sample_times[next_sample]));
          ++next_sample;
        }
      }
      record(hi, dense(hi));
      traj.termination = Trajectory::Termination::Collision;
      traj.collision_time = hi;
      return traj;
    }

    if (explicit_times) {
      while (next_sample < sample_times.size() && sample_times[next_sample] <= tnew) {
        const double ts = sample_times[next_sample];
        record(ts, ts == tnew ? ynew : dense(ts));
        ++next_sample;
      }
    } else if (accepted % stride == 0 || tnew == horizon) {
      record(tnew, ynew);
    }

    t = tnew;
    y = ynew;
    k1 = k7;
    if (t >= horizon) break;
    const double fac = err > uround ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 10.0) : 10.0;
    h *= fac;
  }
  traj.termination = Trajectory::Termination::ReachedT;
  return traj;
}

double hamiltonian_drift(const Trajectory& trajectory) {
  if (trajectory.size() < 2) throw Error(ErrorCode::BadParams, "trajectory needs at least two samples");
  double drift = 0.0;
  for (double h : trajectory.h0) drift = std::max(drift, std::abs(h - trajectory.h0.front()));
  return drift;
}

DissipationVerdict dissipation_check(const Trajectory& trajectory, double slack) {
  if (trajectory.size() < 2) throw Error(ErrorCode::BadParams, "trajectory needs at least two samples");
  DissipationVerdict v;
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const double inc = trajectory.h0[i] - trajectory.h0[i - 1];
    if (inc > v.worst_increase) {
      v.worst_increase = inc;
      v.worst_index = i;
    }
    if (inc > slack * std::max(1.0, std::abs(trajectory.h0[i - 1]))) v.monotone = false;
  }
  return v;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t";
  const std::size_t n = trajectory.states.empty() ? 0 : trajectory.states.front().size();
  for (std::size_t k = 1; k <= n; ++k) out << ",x" << k << ",y" << k << ",d" << k;
  out << ",H0,r_alpha\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    out << trajectory.times[i];
    const VortexConfig& c = trajectory.states[i];
    for (std::size_t k = 0; k < c.size(); ++k)
      out << ',' << c.position(k).x() << ',' << c.position(k).y() << ',' << c.degree(k);
    out << ',' << trajectory.h0[i] << ',' << trajectory.r_alpha[i] << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  write_trajectory_csv(out, trajectory);
}

}  // namespace vortexlab

// One PASS/FAIL line per acceptance criterion; --criterion N runs a single one.

#include "vortexlab/config.hpp"
#include "vortexlab/error.hpp"
#include "vortexlab/flat_norm.hpp"
#include "vortexlab/gp_solver.hpp"
#include "vortexlab/harness.hpp"
#include "vortexlab/ode.hpp"
#include "vortexlab/renormalized_energy.hpp"
#include "vortexlab/thomas_fermi.hpp"
#include "vortexlab/tracking.hpp"

#include "../support/box_ode.hpp"
#include "../support/oracles.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace vortexlab;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

GridGeometry square(double half, int n) { return GridGeometry::over(Domain::rectangle(-half, half, -half, half), n, n); }

const CoreProfile& core() {
  static const CoreProfile profile = radial_core_profile();
  return profile;
}

Verdict free_dipole() {
  const double l = 0.5;
  const VortexConfig c({{0, l / 2}, {0, -l / 2}}, {1, -1});
  const Trajectory t = integrate(c, Domain::plane(), AnalyticPotential(), DynamicsKind::Schrodinger, 1.0);
  double err = 0.0;
  for (std::size_t k = 0; k < 2; ++k)
    err = std::max(err, (t.states.back().position(k) - c.position(k) - Point(2.0 / l, 0.0)).norm());
  return {t.termination == Trajectory::Termination::ReachedT && err <= 1e-8, "endpoint error " + fmt("%.2e", err)};
}

Verdict hamiltonian_conservation() {
  std::mt19937 rng(31);
  std::vector<Point> p = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  for (auto& x : p) x += 0.3 * oracle::random_point(rng, -1, 1);
  const VortexConfig c(p, {1, -1, 1, 1});
  const AnalyticPotential q = builtin_potential("gaussian");
  const Trajectory s = integrate(c, Domain::plane(), q, DynamicsKind::Schrodinger, 10.0);
  const double drift = hamiltonian_drift(s) / std::abs(s.h0.front());
  const Trajectory g = integrate(c, Domain::plane(), q, DynamicsKind::GradientFlow, 0.5);
  bool monotone = true;
  for (std::size_t i = 1; i < g.h0.size(); ++i) monotone = monotone && g.h0[i] <= g.h0[i - 1] + 1e-12;
  return {drift <= 1e-7 && monotone,
          "relative H0 drift " + fmt("%.2e", drift) + ", gradient flow " + (monotone ? "monotone" : "NOT monotone")};
}

Verdict level_sets() {
  double worst = 0.0;
  for (const char* kind : {"gaussian", "step", "double_gaussian", "lattice", "bump"}) {
    const AnalyticPotential q = builtin_potential(kind);
    const Point a0(0.4, 0.7);
    const Trajectory t = integrate(VortexConfig({a0}, {1}), Domain::plane(), q, DynamicsKind::Schrodinger, 5.0);
    for (const VortexConfig& s : t.states) worst = std::max(worst, std::abs(q.value(s.position(0)) - q.value(a0)));
  }
  return {worst <= 1e-8, "max |Q0(a(t)) - Q0(a(0))| " + fmt("%.2e", worst)};
}

AtomicMeasure random_measure(std::mt19937& rng, int max_per_sign, const Domain& box) {
  std::uniform_int_distribution<int> count(0, max_per_sign);
  std::vector<Atom> atoms;
  for (int sign : {1, -1}) {
    const int n = count(rng);
    for (int k = 0; k < n; ++k) atoms.push_back({oracle::random_point(rng, box.xmin(), box.xmax()), sign * pi});
  }
  return AtomicMeasure(std::move(atoms)).canonical();
}

Verdict flat_norm() {
  std::mt19937 rng(5);
  std::normal_distribution<double> jitter(0.0, 1.0);
  double matched = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point> p = {{-1, 0}, {1, 0.3}, {0.2, 1.4}, {-0.7, -1.2}};
    const VortexConfig alpha(p, {1, -1, 1, -1});
    const double r = separation_radius(alpha, Domain::plane());
    double sum = 0.0;
    for (auto& x : p) {
      Point d(jitter(rng), jitter(rng));
      d *= 0.1 * r * std::abs(jitter(rng)) / (3.0 * d.norm());
      x += d;
      sum += d.norm();
    }
    const double fn = flat_norm_distance(AtomicMeasure::from_config(alpha, 1.0),
                                         AtomicMeasure::from_config(VortexConfig(p, alpha.degrees()), 1.0),
                                         Domain::plane());
    matched = std::max(matched, std::abs(fn - sum));
  }
  // Measures with up to four unit atoms of each sign, against zero and in pairs.
  const Domain box = Domain::rectangle(-1, 1, -1, 1);
  const AtomicMeasure zero;
  double brute = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const AtomicMeasure a = random_measure(rng, trial % 2 ? 4 : 2, box);
    const AtomicMeasure b = trial % 2 ? zero : random_measure(rng, 2, box);
    const double fast = flat_norm_distance(a, b, box), slow = oracle::brute_force_flat_norm(a, b, box, pi);
    brute = std::max(brute, std::abs(fast - slow) / std::max(1.0, slow));
  }
  return {matched <= 1e-9 && brute <= 1e-10,
          "matched displacement error " + fmt("%.2e", matched) + ", brute force relative gap " + fmt("%.2e", brute)};
}

Verdict thomas_fermi() {
  const GridGeometry g = square(1.6, 513);
  const ScalarField constant(g, Eigen::ArrayXXd::Constant(g.nx, g.ny, 0.7));
  const double exact = (solve_thomas_fermi(constant, 0.05).q_field().values - 0.7).abs().maxCoeff();

  const AnalyticPotential bump = builtin_potential("gaussian", {{"width", 0.5}});
  const auto rows = tf_convergence_report({0.1, 0.05, 0.025}, bump, g);
  const double order = std::min(rows[1].sup_order, rows[2].sup_order);

  const ScalarField rho = ScalarField::sample(g, [&](const Point& x) { return bump.value(x); });
  ThomasFermiOptions opt;
  opt.initial_guess = Eigen::ArrayXXd::Constant(g.nx, g.ny, 1.3);
  const double unique =
      (solve_thomas_fermi(rho, 0.05).eta - solve_thomas_fermi(rho, 0.05, opt).eta).abs().maxCoeff();
  std::ostringstream d;
  d << "constant error " << fmt("%.1e", exact) << ", sup errors";
  for (const auto& r : rows) d << ' ' << fmt("%.3e", r.sup_error);
  d << ", orders " << fmt("%.2f", rows[1].sup_order) << ' ' << fmt("%.2f", rows[2].sup_order)
    << ", two guesses differ by " << fmt("%.1e", unique);
  return {exact <= 1e-12 && order >= 1.7 && unique <= 1e-10, d.str()};
}

Verdict pde_conservation() {
  const double eps = 0.05;
  const GridGeometry g = square(1.6, 257);
  const ScalarField rho = ScalarField::sample(g, [](const Point& x) { return 0.5 * std::exp(-x.squaredNorm()); });
  const GridProfile eta = solve_thomas_fermi(rho, eps);
  const VortexConfig dipole({{-0.4, 0.4}, {-0.4, -0.4}}, {1, -1});

  ComplexField w = build_initial_data(dipole, eps, core(), eta);
  const SchrodingerStepper gp(eta, eps, 0.9 * SchrodingerStepper::stability_limit(eta, eps));
  const double m0 = discrete_mass(w, eta);
  double mass = 0.0;
  for (int k = 0; k < 1000; ++k) {
    w = gp.step(w);
    mass = std::max(mass, std::abs(discrete_mass(w, eta) - m0) / std::abs(m0));
  }

  ComplexField v = build_initial_data(dipole, eps, core(), eta);
  const GradientFlowStepper gf(eta, eps, GradientFlowStepper::stability_limit(eta, eps));
  double e = weighted_energy(v, eta.eta, eps);
  bool monotone = true;
  for (int k = 0; k < 200; ++k) {
    v = gf.step(v);
    const double next = weighted_energy(v, eta.eta, eps);
    monotone = monotone && next <= e;
    e = next;
  }

  const ComplexField one = build_initial_data(VortexConfig(), eps, core(), eta);
  ComplexField a = one, b = one;
  for (int k = 0; k < 20; ++k) {
    a = gp.step(a);
    b = gf.step(b);
  }
  const double still = std::max((a.values - 1.0).abs().maxCoeff(), (b.values - 1.0).abs().maxCoeff());
  return {mass <= 1e-8 && monotone && still <= 1e-12,
          "relative mass residual " + fmt("%.2e", mass) + ", gradient flow energy " +
              (monotone ? "monotone" : "NOT monotone") + ", w = 1 moves by " + fmt("%.1e", still)};
}

Verdict splitting_defect() {
  const double eps = 0.2;
  auto rho = [](const Point& x) { return 0.8 * std::exp(-x.squaredNorm() / 0.3); };
  auto field = [](const Point& x) {
    return std::polar(1.0 - 0.3 * std::exp(-4.0 * x.squaredNorm()), std::sin(x.x()) + 0.5 * x.y());
  };
  std::vector<double> defect;
  for (int n : {33, 65, 129}) {
    const GridGeometry g = square(1.0, n);
    const ScalarField r = ScalarField::sample(g, rho);
    const GridProfile eta = solve_thomas_fermi(r, eps);
    const Eigen::ArrayXXd p2 = 1.0 + r.values / eta.log_eps();
    defect.push_back(std::abs(lassoued_mironescu_defect(ComplexField::sample(g, field), eta.eta, p2, eps)));
  }
  const double o1 = std::log2(defect[0] / defect[1]), o2 = std::log2(defect[1] / defect[2]);
  return {std::min(o1, o2) >= 1.7, "defects " + fmt("%.3e", defect[0]) + ' ' + fmt("%.3e", defect[1]) + ' ' +
                                       fmt("%.3e", defect[2]) + ", orders " + fmt("%.2f", o1) + ' ' + fmt("%.2f", o2)};
}

Verdict energy_expansion() {
  std::vector<double> gap;
  const VortexConfig one({{0.1, -0.05}}, {1});
  for (double eps : {0.1, 0.05, 0.025}) {
    const GridGeometry g = square(1.0, static_cast<int>(std::ceil(2.0 / (eps / 4))) + 1);
    const ScalarField rho = ScalarField::sample(g, [](const Point& x) { return 0.5 * std::exp(-x.squaredNorm()); });
    const GridProfile eta = solve_thomas_fermi(rho, eps);
    const ComplexField w = build_initial_data(one, eps, core(), eta);
    gap.push_back(std::abs(energy_report(w, eta, eps, one, core().gamma0).excess));
  }
  return {gap[1] < gap[0] && gap[2] < gap[1],
          "|E - H_eps| " + fmt("%.4f", gap[0]) + ' ' + fmt("%.4f", gap[1]) + ' ' + fmt("%.4f", gap[2])};
}

Verdict dipole_convergence(const std::string& preset) {
  ExperimentSpec spec = load_experiment_spec(preset);
  const Trajectory plane = run_ode(spec, spec.ode_samples);
  const Domain& box = spec.pde_box;
  const oracle::BoxVortexOde walls(box.xmin(), box.xmax(), box.ymin(), box.ymax());
  const auto states = walls.trajectory(spec.vortices.positions(), spec.vortices.degrees(), spec.horizon,
                                       spec.pde_samples);

  std::ostringstream d;
  d << "eps/grid/box-ODE distance/plane-ODE distance:";
  std::vector<double> column;
  int mismatches = 0;
  for (double eps : spec.eps_list) {
    const PdeRun run = run_pde(spec, eps, plane, core());
    double worst = 0.0;
    for (const DetectionResult& det : run.detections) {
      const long i = std::lround(det.time / spec.horizon * spec.pde_samples);
      const AtomicMeasure ref =
          AtomicMeasure::from_config(VortexConfig(states.at(static_cast<std::size_t>(i)), spec.vortices.degrees()), pi);
      worst = std::max(worst, flat_norm_distance(det.measure(), ref, box));
      mismatches += det.vortices.size() != spec.vortices.size() ? 1 : 0;
    }
    column.push_back(worst);
    d << ' ' << eps << '/' << run.grid.nx << '/' << fmt("%.4f", worst) << '/'
      << fmt("%.4f", run.comparison.max_distance);
    std::fflush(stdout);
  }
  bool decreasing = column.size() >= 2 && mismatches == 0;
  for (std::size_t i = 1; i < column.size(); ++i) decreasing = decreasing && column[i] < column[i - 1];
  return {decreasing, d.str()};
}

Verdict figures() {
  const std::vector<FigureResult> runs = run_figures();
  bool ok = runs.size() == 5;
  // Nonzero means well above the control's integration noise floor.
  const double floor = 100.0 * runs.back().curvature;
  std::ostringstream d;
  for (const FigureResult& f : runs) {
    const bool control = f.name == "control-dipole";
    const bool reached = f.trajectory.termination == Trajectory::Termination::ReachedT;
    ok = ok && f.finite && reached && (control ? f.curvature <= 1e-8 : f.curvature > floor);
    if (f.name == "v3-dipole") ok = ok && f.mirror_error <= 1e-6;
    d << f.name << " curvature " << fmt("%.2e", f.curvature);
    if (f.name == "v3-dipole") d << " mirror " << fmt("%.1e", f.mirror_error);
    d << "; ";
  }
  return {ok, d.str()};
}

Verdict detection() {
  const double eps = 0.1;
  const GridGeometry g = square(1.0, 81);
  const double h = g.spacing();
  bool ok = true;
  double worst_center = 0.0;
  const std::vector<VortexConfig> cases = {
      VortexConfig({{0.3, -0.2}}, {1}), VortexConfig({{-0.2, 0.35}}, {-1}),
      VortexConfig({{-0.35, 0.1}, {0.4, -0.15}}, {1, -1}), VortexConfig({{0.0, 0.0}, {0.5, 0.5}}, {1, 1})};
  for (const VortexConfig& c : cases) {
    const DetectionResult det = detect_vortices(build_initial_data(c, eps, core(), g));
    ok = ok && det.vortices.size() == c.size();
    for (std::size_t k = 0; k < c.size(); ++k) {
      double best = 1e300;
      for (const DetectedVortex& v : det.vortices)
        if (v.degree == c.degree(k)) best = std::min(best, (v.center - c.position(k)).norm());
      worst_center = std::max(worst_center, best);
    }
  }
  ok = ok && worst_center <= h;

  std::mt19937 rng(77);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> freq(-4.0, 4.0);
  const GridGeometry r = square(1.0, 49);
  int agree = 0;
  bool integral = true;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<std::complex<double>, Point>> modes;
    for (int m = 0; m < 6; ++m) modes.push_back({{n01(rng), n01(rng)}, {freq(rng), freq(rng)}});
    const ComplexField w = ComplexField::sample(r, [&](const Point& x) {
      std::complex<double> s(0.0, 0.0);
      for (const auto& [a, k] : modes) s += a * std::polar(1.0, k.dot(x));
      return s;
    });
    const Eigen::ArrayXXi wind = plaquette_winding(w);
    integral = integral && wind.abs().maxCoeff() <= 1;
    agree += wind.sum() == boundary_winding(w) ? 1 : 0;
  }
  ok = ok && integral && agree == 100;
  return {ok, "worst center error " + fmt("%.4f", worst_center) + " (h = " + fmt("%.4f", h) + "), " +
                  std::to_string(agree) + "/100 random fields match the boundary winding"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  std::string preset = VORTEXLAB_PRESET_DIR "/dipole_validation.cfg";
  app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  app.add_option("--preset", preset, "dipole spec for criterion 9");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"free dipole law", free_dipole},
      {"Hamiltonian conservation", hamiltonian_conservation},
      {"level-set motion", level_sets},
      {"flat norm", flat_norm},
      {"Thomas-Fermi background", thomas_fermi},
      {"PDE conservation", pde_conservation},
      {"splitting defect", splitting_defect},
      {"energy expansion", energy_expansion},
      {"dipole PDE vs ODE", [&] { return dipole_convergence(preset); }},
      {"figure presets", figures},
      {"vortex detection", detection},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu (%s): %s  %s  [%.1f s]\n", i + 1, criteria[i].first, v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}

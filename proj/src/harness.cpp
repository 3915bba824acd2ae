#include "vortexlab/harness.hpp"

#include "vortexlab/error.hpp"
#include "vortexlab/renormalized_energy.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>

namespace vortexlab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void log_line(bool quiet, const std::string& s) {
  if (!quiet) std::cerr << s << std::endl;
}

std::string termination_name(Trajectory::Termination t) {
  switch (t) {
    case Trajectory::Termination::ReachedT: return "reached_T";
    case Trajectory::Termination::Collision: return "collision";
    case Trajectory::Termination::SolverFailure: return "solver_failure";
  }
  return "unknown";
}

std::string eps_tag(double eps) {
  std::ostringstream s;
  s << eps;
  return s.str();
}

}  // namespace

GridGeometry pde_grid(const Domain& box, double eps, double points_per_eps) {
  if (box.kind() != Domain::Kind::Rectangle) throw Error(ErrorCode::BadParams, "PDE box must be a rectangle");
  const double h = eps / points_per_eps;
  const int nx = static_cast<int>(std::ceil((box.xmax() - box.xmin()) / h - 1e-9)) + 1;
  const int ny = static_cast<int>(std::ceil((box.ymax() - box.ymin()) / h - 1e-9)) + 1;
  return GridGeometry::over(box, nx, ny);
}

GridProfile pde_background(const ExperimentSpec& spec, const GridGeometry& grid, double eps) {
  ScalarField rho;
  if (!spec.potential_file.empty()) {
    const ScalarField file = read_scalar_grid(spec.potential_file);
    rho = ScalarField::sample(grid, [&](const Point& p) { return interpolate(file, p); });
  } else {
    if (spec.potential_kind == "zero") return GridProfile::uniform(grid, eps);
    const AnalyticPotential q0 = spec.potential();
    rho = ScalarField::sample(grid, [&](const Point& p) { return q0.value(p); });
  }
  return solve_thomas_fermi(rho, eps);
}

Trajectory run_ode(const ExperimentSpec& spec, int samples) {
  OdeOptions opt;
  opt.rtol = spec.rtol;
  opt.atol = spec.atol;
  for (int k = 1; k <= samples; ++k) opt.sample_times.push_back(spec.horizon * k / samples);
  return integrate(spec.vortices, spec.domain, spec.potential(), spec.dynamics, spec.horizon, opt);
}

PdeRun run_pde(const ExperimentSpec& spec, double eps, const Trajectory& ode, const CoreProfile& core) {
  const auto t0 = Clock::now();
  if (spec.dynamics == DynamicsKind::Mixed) {
    throw Error(ErrorCode::BadParams, "the mixed dynamics has no field-level solver");
  }
  PdeRun run;
  run.eps = eps;
  run.grid = pde_grid(spec.pde_box, eps, spec.points_per_eps);
  const GridProfile eta = pde_background(spec, run.grid, eps);
  ComplexField w = build_initial_data(spec.vortices, eps, core, eta);

  const double interval = spec.horizon / spec.pde_samples;
  StepperOptions opt;
  const double dt_target = spec.dynamics == DynamicsKind::Schrodinger
                               ? spec.dt_factor * std::min(opt.safety * eps * eps,
                                                           SchrodingerStepper::stability_limit(eta, eps))
                               : spec.dt_factor * GradientFlowStepper::stability_limit(eta, eps);
  const long per_sample = static_cast<long>(std::ceil(interval / dt_target - 1e-9));
  run.dt = interval / per_sample;

  std::unique_ptr<SchrodingerStepper> gp;
  std::unique_ptr<GradientFlowStepper> gf;
  if (spec.dynamics == DynamicsKind::Schrodinger) gp = std::make_unique<SchrodingerStepper>(eta, eps, run.dt, opt);
  else gf = std::make_unique<GradientFlowStepper>(eta, eps, run.dt, opt);

  run.mass_initial = discrete_mass(w, eta);
  run.energy_initial = weighted_energy(w, eta.eta, eps);
  run.detections.push_back(detect_vortices(w, spec.merge_radius));
  for (int s = 1; s <= spec.pde_samples; ++s) {
    for (long k = 0; k < per_sample; ++k) {
      w = gp ? gp->step(w) : gf->step(w);
      ++run.steps;
    }
    w.time = interval * s;
    run.detections.push_back(detect_vortices(w, spec.merge_radius));
  }
  run.mass_final = discrete_mass(w, eta);
  run.energy_final = weighted_energy(w, eta.eta, eps);
  run.comparison = trajectory_compare(run.detections, ode, run.grid.domain());
  run.final_field = std::move(w);
  run.seconds = seconds_since(t0);
  return run;
}

std::string run_experiment(const ExperimentSpec& spec, bool quiet) {
  const auto t0 = Clock::now();
  nlohmann::json summary;
  summary["name"] = spec.name;
  summary["dynamics"] = to_string(spec.dynamics);
  summary["horizon"] = spec.horizon;

  const Trajectory ode = run_ode(spec, std::max(spec.ode_samples, spec.pde_samples));
  summary["ode"]["termination"] = termination_name(ode.termination);
  if (ode.termination == Trajectory::Termination::Collision) summary["ode"]["collision_time"] = ode.collision_time;
  summary["ode"]["H0_initial"] = ode.h0.front();
  summary["ode"]["H0_drift"] = hamiltonian_drift(ode);
  if (spec.dynamics != DynamicsKind::Schrodinger) summary["ode"]["H0_monotone"] = dissipation_check(ode).monotone;
  log_line(quiet, "ode: " + termination_name(ode.termination));

  namespace fs = std::filesystem;
  const bool write = !spec.output_dir.empty();
  if (write) {
    fs::create_directories(spec.output_dir);
    write_trajectory_csv((fs::path(spec.output_dir) / "trajectory.csv").string(), ode);
  }

  if (!spec.eps_list.empty()) {
    const CoreProfile core = radial_core_profile();
    for (double eps : spec.eps_list) {
      const PdeRun run = run_pde(spec, eps, ode, core);
      nlohmann::json r;
      r["eps"] = eps;
      r["nx"] = run.grid.nx;
      r["ny"] = run.grid.ny;
      r["dt"] = run.dt;
      r["steps"] = run.steps;
      r["flat_norm_max"] = run.comparison.max_distance;
      r["count_mismatches"] = run.comparison.mismatches;
      r["mass_drift"] = std::abs(run.mass_final - run.mass_initial);
      r["energy_initial"] = run.energy_initial;
      r["energy_final"] = run.energy_final;
      r["wall_seconds"] = run.seconds;
      summary["pde"].push_back(r);
      log_line(quiet, "pde eps=" + eps_tag(eps) + " flat-norm max " + std::to_string(run.comparison.max_distance));
      if (write) {
        const fs::path dir(spec.output_dir);
        write_detection_csv((dir / ("detections_eps" + eps_tag(eps) + ".csv")).string(), run.detections);
        write_complex_field((dir / ("field_eps" + eps_tag(eps) + ".vlcplx")).string(), run.final_field);
      }
    }
  }
  summary["wall_seconds"] = seconds_since(t0);
  const std::string text = summary.dump(2);
  if (write) {
    std::ofstream out(fs::path(spec.output_dir) / "summary.json");
    out << text << '\n';
  }
  return text;
}

ValidationReport validate_theorem(const ExperimentSpec& spec, bool quiet) {
  if (spec.eps_list.size() < 3) throw Error(ErrorCode::BadParams, "validation needs at least three eps values");
  for (std::size_t i = 1; i < spec.eps_list.size(); ++i)
    if (!(spec.eps_list[i] < spec.eps_list[i - 1])) throw Error(ErrorCode::BadParams, "eps list must decrease");
  const Trajectory ode = run_ode(spec, spec.pde_samples);
  if (ode.termination != Trajectory::Termination::ReachedT) {
    throw Error(ErrorCode::BadParams, "horizon is not below the ODE collision time");
  }
  const CoreProfile core = radial_core_profile();
  ValidationReport report;
  for (double eps : spec.eps_list) {
    const PdeRun run = run_pde(spec, eps, ode, core);
    ValidationRow row;
    row.eps = eps;
    row.nx = run.grid.nx;
    row.ny = run.grid.ny;
    row.dt = run.dt;
    row.max_distance = run.comparison.max_distance;
    row.mismatches = run.comparison.mismatches;
    row.seconds = run.seconds;
    report.rows.push_back(row);
    log_line(quiet, "eps " + eps_tag(eps) + ": max flat-norm distance " + std::to_string(row.max_distance));
  }
  report.pass = true;
  report.strictly_decreasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const double prev = report.rows[i - 1].max_distance, cur = report.rows[i].max_distance;
    if (!(cur < prev)) report.strictly_decreasing = false;
    if (cur > 1.1 * prev) {
      report.pass = false;
      report.message = "distance grows from eps=" + eps_tag(report.rows[i - 1].eps) + " to eps=" +
                       eps_tag(report.rows[i].eps);
    }
  }
  for (const ValidationRow& r : report.rows)
    if (r.mismatches > 0) {
      report.pass = false;
      report.message = "vortex count mismatch at eps=" + eps_tag(r.eps);
    }
  if (report.pass) report.message = report.strictly_decreasing ? "decreasing" : "decreasing within 10% slack";
  return report;
}

std::vector<TfConvergenceRow> tf_study(const ExperimentSpec& spec) {
  const std::vector<double>& eps = spec.tf_eps_list.empty() ? spec.eps_list : spec.tf_eps_list;
  if (!spec.potential_file.empty()) return tf_convergence_report(eps, read_scalar_grid(spec.potential_file));
  const GridGeometry grid = GridGeometry::over(spec.tf_box, spec.tf_nodes, spec.tf_nodes);
  return tf_convergence_report(eps, spec.potential(), grid);
}

double path_curvature(const Trajectory& t) {
  if (t.size() < 2) return 0.0;
  double worst = 0.0;
  const std::size_t n = t.states.front().size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = t.states.front().position(k), b = t.states.back().position(k);
    const Eigen::Vector2d chord = b - a;
    const double len = chord.norm();
    for (const VortexConfig& c : t.states) {
      const Eigen::Vector2d d = c.position(k) - a;
      const double dev = len > 0.0 ? std::abs(chord.x() * d.y() - chord.y() * d.x()) / len : d.norm();
      worst = std::max(worst, dev);
    }
  }
  return worst;
}

std::vector<ExperimentSpec> figure_presets() {
  auto make = [](const std::string& name, const std::string& kind, Point a1, Point a2) {
    ExperimentSpec s;
    s.name = name;
    s.potential_kind = kind;
    s.horizon = 0.1;
    s.ode_samples = 400;
    s.vortices = VortexConfig({a1, a2}, {1, -1});
    return s;
  };
  return {
      make("v1-dipole", "gaussian", {-5.0, 2.0}, {-4.99, 1.99}),
      make("v2-dipole", "step", {-5.0, -2.0}, {-4.99, -1.99}),
      make("v3-dipole", "double_gaussian", {-0.01, 1.0}, {0.01, 1.0}),
      make("v4-dipole", "lattice", {-5.0, -1.99}, {-4.99, -2.0}),
      make("control-dipole", "zero", {-5.0, 2.0}, {-4.99, 1.99}),
  };
}

std::vector<FigureResult> run_figures(const std::string& output_dir, bool quiet) {
  std::vector<FigureResult> out;
  for (const ExperimentSpec& spec : figure_presets()) {
    FigureResult f;
    f.name = spec.name;
    f.trajectory = run_ode(spec, spec.ode_samples);
    f.h0_drift = hamiltonian_drift(f.trajectory);
    f.curvature = path_curvature(f.trajectory);
    for (const VortexConfig& c : f.trajectory.states) {
      for (const Point& p : c.positions()) f.finite = f.finite && p.allFinite();
      if (spec.name == "v3-dipole") {
        const double e = std::abs(c.position(0).x() + c.position(1).x()) +
                         std::abs(c.position(0).y() - c.position(1).y());
        f.mirror_error = std::max(f.mirror_error, e);
      }
    }
    if (!output_dir.empty()) {
      std::filesystem::create_directories(output_dir);
      write_trajectory_csv((std::filesystem::path(output_dir) / (spec.name + ".csv")).string(), f.trajectory);
    }
    log_line(quiet, spec.name + ": curvature " + std::to_string(f.curvature));
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace vortexlab

// vortexlab command line: run / validate / tf-study / detect / figures.

#include "vortexlab/config.hpp"
#include "vortexlab/error.hpp"
#include "vortexlab/harness.hpp"
#include "vortexlab/tracking.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

using namespace vortexlab;

namespace {

struct Common {
  std::string spec_path;
  std::string out_dir;
  std::string eps_list;
  double resolution = 0.0;
  bool quiet = false;
};

ExperimentSpec load(const Common& c) {
  ExperimentSpec spec = load_experiment_spec(c.spec_path);
  if (!c.out_dir.empty()) spec.output_dir = c.out_dir;
  if (!c.eps_list.empty()) {
    spec.eps_list = parse_number_list(c.eps_list);
    spec.tf_eps_list = spec.eps_list;
  }
  return spec;
}

void add_common(CLI::App* sub, Common& c, bool need_spec = true) {
  auto* opt = sub->add_option("--spec", c.spec_path, "experiment spec file");
  if (need_spec) opt->required()->check(CLI::ExistingFile);
  sub->add_option("--out", c.out_dir, "output directory");
  sub->add_option("--eps", c.eps_list, "comma separated eps list (overrides the spec)");
  sub->add_option("--resolution", c.resolution, "grid points per eps (run/validate) or nodes per side (tf-study)");
  sub->add_flag("--quiet", c.quiet, "suppress progress output");
}

int cmd_run(const Common& c) {
  ExperimentSpec spec = load(c);
  if (c.resolution > 0.0) spec.points_per_eps = c.resolution;
  std::cout << run_experiment(spec, c.quiet) << '\n';
  return 0;
}

int cmd_validate(const Common& c) {
  ExperimentSpec spec = load(c);
  if (c.resolution > 0.0) spec.points_per_eps = c.resolution;
  const ValidationReport r = validate_theorem(spec, c.quiet);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!spec.output_dir.empty()) {
    std::filesystem::create_directories(spec.output_dir);
    file.open(std::filesystem::path(spec.output_dir) / "validation.csv");
    out = &file;
  }
  *out << "eps,nx,ny,dt,max_flat_norm,count_mismatches,wall_seconds\n" << std::setprecision(10);
  for (const ValidationRow& row : r.rows)
    *out << row.eps << ',' << row.nx << ',' << row.ny << ',' << row.dt << ',' << row.max_distance << ','
         << row.mismatches << ',' << row.seconds << '\n';
  std::cout << (r.pass ? "PASS" : "FAIL") << ": " << r.message << '\n';
  return r.pass ? 0 : 2;
}

int cmd_tf(const Common& c) {
  ExperimentSpec spec = load(c);
  if (c.resolution > 0.0) spec.tf_nodes = static_cast<int>(c.resolution);
  const auto rows = tf_study(spec);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!spec.output_dir.empty()) {
    std::filesystem::create_directories(spec.output_dir);
    file.open(std::filesystem::path(spec.output_dir) / "tf_convergence.csv");
    out = &file;
  }
  *out << "eps,sup_error,h1_error,sup_order,h1_order,exact,iterations\n" << std::setprecision(10);
  for (const auto& r : rows)
    *out << r.eps << ',' << r.sup_error << ',' << r.h1_error << ',' << r.sup_order << ',' << r.h1_order << ','
         << (r.exact ? 1 : 0) << ',' << r.iterations << '\n';
  return 0;
}

int cmd_detect(const Common& c, const std::string& input, double merge_radius) {
  const ComplexField field = read_complex_field(input);
  const DetectionResult d = detect_vortices(field, merge_radius);
  if (c.out_dir.empty()) {
    write_detection_csv(std::cout, {d});
  } else {
    std::filesystem::create_directories(c.out_dir);
    write_detection_csv((std::filesystem::path(c.out_dir) / "detections.csv").string(), {d});
  }
  return 0;
}

int cmd_figures(const Common& c) {
  const auto results = run_figures(c.out_dir, c.quiet);
  const FigureResult& control = results.back();
  bool ok = control.curvature <= 1e-8;
  std::cout << "name,termination_ok,H0_drift,curvature,mirror_error\n" << std::setprecision(6);
  for (const FigureResult& f : results) {
    const bool reached = f.trajectory.termination == Trajectory::Termination::ReachedT && f.finite;
    ok = ok && reached;
    if (&f != &control) ok = ok && f.curvature > control.curvature;
    std::cout << f.name << ',' << reached << ',' << f.h0_drift << ',' << f.curvature << ',' << f.mirror_error << '\n';
  }
  ok = ok && results[2].mirror_error <= 1e-6;
  std::cout << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vortexlab: point-vortex and weighted Gross-Pitaevskii experiments"};
  app.require_subcommand(1);
  Common common;
  std::string input;
  double merge_radius = 0.0;

  auto* run = app.add_subcommand("run", "ODE trajectory and PDE runs for a spec");
  add_common(run, common);
  auto* validate = app.add_subcommand("validate", "PDE-vs-ODE convergence table over the eps list");
  add_common(validate, common);
  auto* tf = app.add_subcommand("tf-study", "Thomas-Fermi convergence table");
  add_common(tf, common);
  auto* detect = app.add_subcommand("detect", "detect vortices in a VLCPLX1 field file");
  add_common(detect, common, false);
  detect->add_option("--input", input, "complex field file")->required();
  detect->add_option("--merge-radius", merge_radius, "cluster radius (default 4h)");
  auto* figures = app.add_subcommand("figures", "the four figure dipole presets plus control (ODE only)");
  add_common(figures, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(common);
    if (*validate) return cmd_validate(common);
    if (*tf) return cmd_tf(common);
    if (*detect) return cmd_detect(common, input, merge_radius);
    if (*figures) return cmd_figures(common);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

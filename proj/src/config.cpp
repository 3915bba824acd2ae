#include "vortexlab/config.hpp"

#include "vortexlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

namespace vortexlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "'" + key + "': not a number: " + text);
  }
  if (trim(text.substr(used)) != "") throw Error(ErrorCode::ParseError, "'" + key + "': trailing text: " + text);
  if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, "'" + key + "': not finite");
  return v;
}

int to_int(const std::string& text, const std::string& key) {
  const double v = to_number(text, key);
  if (v != std::floor(v)) throw Error(ErrorCode::ParseError, "'" + key + "': expected an integer");
  return static_cast<int>(v);
}

Domain parse_box(const std::string& text, const std::string& key) {
  const auto v = parse_number_list(text);
  if (v.size() != 4) throw Error(ErrorCode::ParseError, "'" + key + "': expected xmin xmax ymin ymax");
  return Domain::rectangle(v[0], v[1], v[2], v[3]);
}

std::string resolve(const std::string& base, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (std::filesystem::path(base) / p).string();
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_number(tok, "list"));
  return out;
}

AnalyticPotential ExperimentSpec::potential() const { return builtin_potential(potential_kind, potential_params); }

ExperimentSpec parse_experiment_spec(std::istream& in, const std::string& base_dir) {
  ExperimentSpec spec;
  std::string section;
  std::string line;
  int lineno = 0;
  std::vector<Point> positions;
  std::vector<int> degrees;
  std::string vortex_file;
  std::map<std::string, double> domain_values;
  std::string domain_kind = "plane";

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorCode::ParseError, where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qkey = section + "." + key;

    if (section == "experiment") {
      if (key == "name") spec.name = value;
      else if (key == "dynamics") spec.dynamics = parse_dynamics_kind(value);
      else if (key == "horizon") spec.horizon = to_number(value, qkey);
      else if (key == "output") spec.output_dir = resolve(base_dir, value);
      else throw Error(ErrorCode::ParseError, where + ": unknown key " + qkey);
    } else if (section == "domain") {
      if (key == "kind") domain_kind = value;
      else if (key == "radius" || key == "xmin" || key == "xmax" || key == "ymin" || key == "ymax")
        domain_values[key] = to_number(value, qkey);
      else throw Error(ErrorCode::ParseError, where + ": unknown key " + qkey);
    } else if (section == "potential") {
      if (key == "kind") spec.potential_kind = value;
      else if (key == "file") spec.potential_file = resolve(base_dir, value);
      else spec.potential_params[key] = to_number(value, qkey);
    } else if (section == "vortices") {
      if (key == "vortex") {
        const auto v = parse_number_list(value);
        if (v.size() != 3) throw Error(ErrorCode::ParseError, where + ": vortex = x y d");
        positions.emplace_back(v[0], v[1]);
        if (v[2] != std::round(v[2])) throw Error(ErrorCode::ParseError, where + ": degree must be an integer");
        degrees.push_back(static_cast<int>(v[2]));
      } else if (key == "file") {
        vortex_file = resolve(base_dir, value);
      } else {
        throw Error(ErrorCode::ParseError, where + ": unknown key " + qkey);
      }
    } else if (section == "ode") {
      if (key == "rtol") spec.rtol = to_number(value, qkey);
      else if (key == "atol") spec.atol = to_number(value, qkey);
      else if (key == "samples") spec.ode_samples = to_int(value, qkey);
      else throw Error(ErrorCode::ParseError, where + ": unknown key " + qkey);
    } else if (section == "pde") {
      if (key == "eps") spec.eps_list = parse_number_list(value);
      else if (key == "box") spec.pde_box = parse_box(value, qkey);
      else if (key == "points_per_eps") spec.points_per_eps = to_number(value, qkey);
      else if (key == "dt_factor") spec.dt_factor = to_number(value, qkey);
      else if (key == "samples") spec.pde_samples = to_int(value, qkey);
      else if (key == "merge_radius") spec.merge_radius = to_number(value, qkey);
      else throw Error(ErrorCode::ParseError, where + ": unknown key " + qkey);
    } else if (section == "tf") {
      if (key == "eps") spec.tf_eps_list = parse_number_list(value);
      else if (key == "nodes") spec.tf_nodes = to_int(value, qkey);
      else if (key == "box") spec.tf_box = parse_box(value, qkey);
      else throw Error(ErrorCode::ParseError, where + ": unknown key " + qkey);
    } else {
      throw Error(ErrorCode::ParseError, where + ": key outside a known section: " + qkey);
    }
  }

  auto need = [&](const char* k) {
    const auto it = domain_values.find(k);
    if (it == domain_values.end()) throw Error(ErrorCode::ParseError, std::string("domain needs ") + k);
    return it->second;
  };
  if (domain_kind == "plane") spec.domain = Domain::plane();
  else if (domain_kind == "disk") spec.domain = Domain::disk(need("radius"));
  else if (domain_kind == "rectangle")
    spec.domain = Domain::rectangle(need("xmin"), need("xmax"), need("ymin"), need("ymax"));
  else throw Error(ErrorCode::ParseError, "unknown domain kind " + domain_kind);

  if (!vortex_file.empty()) {
    if (!positions.empty()) throw Error(ErrorCode::ParseError, "give vortices inline or by file, not both");
    spec.vortices = read_vortex_config(vortex_file);
  } else {
    spec.vortices = VortexConfig(std::move(positions), std::move(degrees));
  }
  if (!spec.potential_file.empty() && !std::filesystem::exists(spec.potential_file)) {
    throw Error(ErrorCode::FileNotFound, "potential file not found: " + spec.potential_file);
  }
  if (!(spec.horizon > 0.0)) throw Error(ErrorCode::BadParams, "horizon must be positive");
  if (spec.points_per_eps < 4.0) throw Error(ErrorCode::BadParams, "points_per_eps must be at least 4");
  if (!(spec.dt_factor > 0.0 && spec.dt_factor <= 1.0)) {
    throw Error(ErrorCode::BadParams, "dt_factor must lie in (0, 1]");
  }
  if (spec.pde_samples < 1 || spec.ode_samples < 1) throw Error(ErrorCode::BadParams, "samples must be positive");
  if (spec.potential_file.empty()) (void)spec.potential();  // validates kind and parameters
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "spec not found: " + path);
  return parse_experiment_spec(in, std::filesystem::path(path).parent_path().string());
}

}  // namespace vortexlab

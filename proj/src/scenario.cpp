// Copyright 2026 The mintime Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "mintime/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "mintime/io.hpp"

namespace mintime {

using nlohmann::json;

namespace {

constexpr const char* AFFINE_2D = R"json({
  "id": "affine-2d",
  "description": "nonlinear oscillator f(x) + g(x) u with scalar control, small disc target",
  "dynamics": {"form": "affine_control", "drift": ["x2", "-x1+0.2*x1^2"], "gain": [["0"], ["1+0.1*x1^2"]],
               "U": {"type": "polytope", "vertices": [[-1], [1]]},
               "constants": {"lipschitz": 2.2, "growth": 1.5}},
  "target": {"type": "ball", "center": [0, 0], "radius": 0.05},
  "grid": {"lower": [-2, -2], "upper": [2, 2], "nodes": [241, 241]},
  "seed": 17,
  "verify": {
    "config": {"constancy_tol": 1e-3, "slack": 4},
    "checks": {
      "propagation": {"arcs": 10, "candidates": 360, "horizon": 1.0, "dt": 0.001},
      "dual_bounds": {},
      "regularity": {"box": {"lower": [-1.6, -1.6], "upper": [1.6, 1.6]}, "t_grid": [0.25, 0.5, 0.75, 1.0],
                     "sublevel_phi": false, "epigraph_c": false, "tau_min": 1.0}
    }
  }
})json";

constexpr const char* QUADRATIC_RADIUS = R"json({
  "id": "quadratic-radius",
  "description": "isotropic speed 1 + min(|x|^2, 1), disc target of radius 0.25",
  "dynamics": {"form": "isotropic", "dim": 2, "radius": "1+min(x1^2+x2^2,1)",
               "constants": {"lipschitz": 2, "growth": 2}},
  "target": {"type": "ball", "center": [0, 0], "radius": 0.25},
  "grid": {"lower": [-2, -2], "upper": [2, 2], "nodes": [201, 201]},
  "seed": 19,
  "verify": {
    "config": {"tol_h": 0.1, "c_max": 5, "epi_sigma_max": 4},
    "points": {"count": 20, "t_range": [0.3, 0.8], "margin": 0.1},
    "checks": {
      "pointwise": {},
      "class_l": {"box": {"lower": [-0.7, -0.7], "upper": [0.7, 0.7]}, "pairs": 50, "lambda_grid": 5, "max": 1.1}
    }
  }
})json";

// Built-in scenario documents, in listing order.
const std::map<std::string, const char*>& builtin_sources() {
  static const std::map<std::string, const char*> sources = {
      {"eikonal", R"json({
  "id": "eikonal",
  "description": "unit-speed isotropic motion to a disc of radius 0.25",
  "dynamics": {"form": "isotropic", "dim": 2, "radius": "1", "constants": {"lipschitz": 0, "growth": 1}},
  "target": {"type": "ball", "center": [0, 0], "radius": 0.25},
  "grid": {"lower": [-2, -2], "upper": [2, 2], "nodes": [201, 201]},
  "reference": "sqrt(x1^2+x2^2)-0.25",
  "reference_window": 1.5,
  "seed": 11,
  "verify": {
    "config": {"constancy_tol": 1e-12},
    "points": {"count": 20, "t_range": [0.5, 1.5], "margin": 0.1},
    "checks": {
      "pointwise": {"extra": [[0.24, 0], [-0.24, 0], [0, 0.24], [0, -0.24]]},
      "epigraph": {},
      "dimension": {},
      "propagation": {"arcs": 10, "candidates": 72, "horizon": 1.25, "dt": 0.001},
      "dual_bounds": {},
      "regularity": {"box": {"lower": [-1.6, -1.6], "upper": [1.6, 1.6]}, "t_grid": [0.5, 1.0],
                     "t_min": 0.3, "t_max": 1.3, "r_min": 0.2, "tau_min": 1.0}
    }
  }
})json"},
      {"square", R"json({
  "id": "square",
  "description": "box velocities [-1,1]^2, max-norm distance to the origin",
  "dynamics": {"form": "linear_drift", "A": [[0, 0], [0, 0]],
               "U": {"type": "box", "lower": [-1, -1], "upper": [1, 1]},
               "constants": {"lipschitz": 0, "growth": 1.4142135623730951}},
  "target": {"type": "ball", "center": [0, 0], "radius": 0.02},
  "grid": {"lower": [-2, -2], "upper": [2, 2], "nodes": [201, 201]},
  "reference": "max(abs(x1),abs(x2))",
  "reference_window": 1.5,
  "seed": 3,
  "verify": {
    "field": "reference",
    "points": {"count": 0},
    "checks": {
      "pointwise": {"extra": [[0.6, 0.6], [-0.8, 0.8], [-1.0, -1.0], [1.2, -1.2], [1.4, 1.4]]},
      "epigraph": {"extra": [[0.6, 0.6], [-0.8, 0.8], [-1.0, -1.0], [1.2, -1.2], [1.4, 1.4]],
                   "segments": [[[1, 0], [0, 1]], [[-1, 0], [0, 1]], [[-1, 0], [0, -1]], [[1, 0], [0, -1]],
                                [[1, 0], [0, 1]]],
                   "segment_points": 11},
      "dimension": {"extra": [[0.6, 0.6], [-0.8, 0.8], [-1.0, -1.0], [1.2, -1.2], [1.4, 1.4]]}
    }
  }
})json"},
      {"double-integrator", R"json({
  "id": "double-integrator",
  "description": "x1' = x2, x2' = u with |u| <= 1, small disc target",
  "dynamics": {"form": "affine_control", "drift": ["x2", "0"], "gain": [["0"], ["1"]],
               "U": {"type": "polytope", "vertices": [[-1], [1]]},
               "constants": {"lipschitz": 1, "growth": 1}},
  "target": {"type": "ball", "center": [0, 0], "radius": 0.05},
  "grid": {"lower": [-2, -2], "upper": [2, 2], "nodes": [161, 161]},
  "seed": 5,
  "verify": {
    "config": {"constancy_tol": 1e-3, "slack": 4},
    "checks": {
      "propagation": {"arcs": 10, "candidates": 360, "horizon": 1.2, "dt": 0.001},
      "dual_bounds": {},
      "regularity": {"box": {"lower": [-1.6, -1.6], "upper": [1.6, 1.6]}, "t_grid": [0.5, 1.0, 1.5, 2.0],
                     "t_min": 0.2, "t_max": 1.5, "r_min": 0.2, "sublevel_phi": false,
                     "c_tol": 1.0, "tau_min": 2.0}
    }
  }
})json"},
      {"linear-rotation", R"json({
  "id": "linear-rotation",
  "description": "x' = A x + u, A a quarter-turn rotation, |u| <= 1",
  "dynamics": {"form": "linear_drift", "A": [[0, -1], [1, 0]],
               "U": {"type": "ball", "center": [0, 0], "radius": 1},
               "constants": {"lipschitz": 1, "growth": 1}},
  "target": {"type": "ball", "center": [0, 0], "radius": 0.3},
  "grid": {"lower": [-2, -2], "upper": [2, 2], "nodes": [201, 201]},
  "seed": 7,
  "verify": {
    "config": {"constancy_tol": 1e-6},
    "checks": {
      "propagation": {"arcs": 10, "candidates": 72, "horizon": 1.0, "dt": 0.001},
      "dual_bounds": {},
      "regularity": {"box": {"lower": [-1.6, -1.6], "upper": [1.6, 1.6]},
                     "t_grid": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
                     "sublevel_phi": false, "epigraph_c": false, "tau_min": 1.0},
      "class_l": {"box": {"lower": [-1.5, -1.5], "upper": [1.5, 1.5]}, "pairs": 50, "lambda_grid": 5,
                  "max": 1e-9}
    }
  }
})json"},
      {"affine-2d", AFFINE_2D},
      {"non-petrov", R"json({
  "id": "non-petrov",
  "description": "double integrator steered to the half-plane x1 <= 0",
  "dynamics": {"form": "affine_control", "drift": ["x2", "0"], "gain": [["0"], ["1"]],
               "U": {"type": "polytope", "vertices": [[-1], [1]]},
               "constants": {"lipschitz": 1, "growth": 1}},
  "target": {"type": "box", "lower": [-3, -3], "upper": [0, 3]},
  "grid": {"lower": [-2, -2], "upper": [2, 2], "nodes": [201, 201]},
  "seed": 13,
  "verify": {
    "points": {"count": 0},
    "checks": {"pointwise": {"extra": [[0, 0]]}}
  }
})json"},
      {"quadratic-radius", QUADRATIC_RADIUS},
  };
  return sources;
}

const std::vector<std::string> kCheckNames = {"pointwise",   "epigraph", "dimension", "propagation",
                                              "dual_bounds", "regularity", "class_l"};

template <typename T>
T value_or(const json& obj, const char* key, T fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field \"") + key + "\": " + e.what());
  }
}

const json& section(const json& obj, const char* key) {
  static const json empty = json::object();
  if (!obj.is_object() || !obj.contains(key)) return empty;
  return obj.at(key);
}

const json& checks_of(const Scenario& s) { return section(section(s.doc, "verify"), "checks"); }

bool has_check(const Scenario& s, const std::string& name) { return checks_of(s).contains(name); }

std::vector<Vec> vec_list(const json& j) {
  std::vector<Vec> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw ConfigError("expected a list of points");
  for (const auto& v : j) out.push_back(vec_from_json(v));
  return out;
}

void require_dim(const std::vector<Vec>& pts, int n, const char* what) {
  for (const auto& p : pts) {
    if (p.size() != n) throw ConfigError(std::string(what) + " has points of the wrong dimension");
  }
}

Box grid_box(const GridSpec& g) { return Box{g.lower, g.upper}; }

void append(std::vector<VerificationReport>& out, std::vector<VerificationReport> more) {
  for (auto& r : more) out.push_back(std::move(r));
}

VerificationReport single_report(const std::string& check, const std::string& scenario, const std::string& subject,
                                 double worst, double tol, json detail = json::object()) {
  VerificationReport r;
  r.check = check;
  r.scenario = scenario;
  r.subject = subject;
  r.tested = 1;
  r.samples = 1;
  r.worst = worst;
  r.tolerance = tol;
  r.detail = std::move(detail);
  r.judge();
  return r;
}

// Probe vectors for the epigraph check: `segment_points` samples of each
// listed segment [a, b], aligned with the explicit extra points.
std::vector<std::vector<Vec>> epigraph_probes(const json& sec, std::size_t sampled, std::size_t total) {
  std::vector<std::vector<Vec>> probes(total);
  if (!sec.contains("segments")) return probes;
  const int k = value_or<int>(sec, "segment_points", 11);
  if (k < 2) throw ConfigError("segment_points must be >= 2");
  const json& segs = sec.at("segments");
  if (!segs.is_array() || sampled + segs.size() > total) {
    throw ConfigError("epigraph segments must align with the extra points");
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!segs[i].is_array() || segs[i].size() != 2) throw ConfigError("a segment is a pair of vectors");
    const Vec a = vec_from_json(segs[i][0]);
    const Vec b = vec_from_json(segs[i][1]);
    for (int s = 0; s < k; ++s) {
      const double lam = static_cast<double>(s) / (k - 1);
      probes[sampled + i].push_back((1.0 - lam) * a + lam * b);
    }
  }
  return probes;
}

}  // namespace

const std::vector<std::string>& builtin_ids() {
  static const std::vector<std::string> ids = {"eikonal",    "square",     "double-integrator", "linear-rotation",
                                               "affine-2d",  "non-petrov", "quadratic-radius"};
  return ids;
}

json builtin_document(const std::string& id) {
  const auto& src = builtin_sources();
  auto it = src.find(id);
  if (it == src.end()) throw ConfigError("unknown scenario \"" + id + "\"");
  return json::parse(it->second);
}

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
  for (const char* key : {"id", "dynamics", "target", "grid", "seed"}) {
    if (!doc.contains(key)) throw ConfigError(std::string("scenario is missing \"") + key + "\"");
  }
  const std::string id = value_or<std::string>(doc, "id", "");
  if (id.empty()) throw ConfigError("scenario id must be a nonempty string");
  const json& seed = doc.at("seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    throw ConfigError("seed must be a nonnegative integer");
  }

  Multifunction f = Multifunction::from_json(doc.at("dynamics"));
  TargetSet target = target_from_json(doc.at("target"));
  GridSpec grid = grid_from_json(doc.at("grid"));
  if (f.dim() != grid.dim() || target.bodies.front().dim() != grid.dim()) {
    throw ConfigError("dynamics, target and grid differ in dimension");
  }

  const json& sv = section(doc, "solver");
  SolverParams solver;
  solver.tau = value_or<double>(sv, "tau", solver.tau);
  solver.vel_samples = value_or<int>(sv, "vel_samples", solver.vel_samples);
  solver.max_sweeps = value_or<int>(sv, "max_sweeps", solver.max_sweeps);
  solver.tol = value_or<double>(sv, "tol", solver.tol);
  const double cfl = cfl_bound(f, grid);
  if (solver.tau < 0.0 || solver.tau > cfl) {
    throw ConfigError("solver.tau " + format_number(solver.tau) + " violates the CFL bound " + format_number(cfl));
  }

  std::optional<Expr> reference;
  if (doc.contains("reference")) reference = Expr::parse(value_or<std::string>(doc, "reference", ""));

  const json& verify = section(doc, "verify");
  for (auto it = section(verify, "checks").begin(); it != section(verify, "checks").end(); ++it) {
    if (std::find(kCheckNames.begin(), kCheckNames.end(), it.key()) == kCheckNames.end()) {
      throw ConfigError("unknown check \"" + it.key() + "\"");
    }
  }
  const std::string field = value_or<std::string>(verify, "field", "solved");
  if (field != "solved" && field != "reference") throw ConfigError("verify.field must be solved or reference");
  if (field == "reference" && !reference) throw ConfigError("verify.field = reference needs a reference expression");

  Scenario s{id,       value_or<std::string>(doc, "description", ""), doc, std::move(f), std::move(target),
             std::move(grid), solver, std::move(reference), doc.at("seed").get<std::uint64_t>()};
  scenario_config(s);  // validates verify.config
  return s;
}

std::vector<ScenarioEntry> list_scenarios(const std::string& registry_dir) {
  std::vector<ScenarioEntry> out;
  for (const auto& id : builtin_ids()) {
    out.push_back({id, value_or<std::string>(builtin_document(id), "description", ""), "built-in"});
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  if (registry_dir.empty() || !fs::is_directory(registry_dir, ec)) return out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(registry_dir, ec)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    json doc = read_json_file(p.string());
    ScenarioEntry entry{value_or<std::string>(doc, "id", p.stem().string()),
                        value_or<std::string>(doc, "description", ""), p.string()};
    auto same = std::find_if(out.begin(), out.end(), [&](const ScenarioEntry& x) { return x.id == entry.id; });
    if (same != out.end()) {
      *same = entry;
    } else {
      out.push_back(entry);
    }
  }
  return out;
}

json resolve_document(const std::string& name, const std::string& registry_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_regular_file(name, ec)) return read_json_file(name);
  for (const auto& e : list_scenarios(registry_dir)) {
    if (e.id != name) continue;
    return e.source == "built-in" ? builtin_document(name) : read_json_file(e.source);
  }
  throw ConfigError("unknown scenario \"" + name + "\"");
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
  std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  static const std::set<std::string> shorthand = {
      "tol_h",      "eta",        "sigma_max", "epi_sigma_max", "c_max",         "slack",      "angle_tol",
      "dim_tol",    "directions", "epi_directions", "magnitudes", "refine", "constancy_tol", "arc_samples"};
  if (key.find('.') == std::string::npos && shorthand.count(key)) key = "verify.config." + key;

  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("empty path segment in override " + assignment);
    json* next = nullptr;
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (const std::exception&) {
        throw ConfigError("override path indexes an array with \"" + part + "\"");
      }
      if (idx >= node->size()) throw ConfigError("override index " + part + " out of range");
      next = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ConfigError("override path runs through a scalar at \"" + part + "\"");
      next = &(*node)[part];
    }
    if (dot == std::string::npos) {
      *next = value;
      return;
    }
    node = next;
    start = dot + 1;
  }
}

Scenario load_scenario(const std::string& name, const std::string& registry_dir,
                       const std::vector<std::string>& overrides) {
  json doc = resolve_document(name, registry_dir);
  for (const auto& o : overrides) apply_override(doc, o);
  return scenario_from_json(doc);
}

VerifyConfig scenario_config(const Scenario& s) {
  const json& c = section(section(s.doc, "verify"), "config");
  if (!c.is_object()) throw ConfigError("verify.config must be an object");
  static const std::set<std::string> known = {
      "tol_h",      "eta",        "sigma_max",      "epi_sigma_max", "c_max",  "slack",         "angle_tol",
      "dim_tol",    "directions", "epi_directions", "magnitudes",    "refine", "constancy_tol", "arc_samples"};
  for (auto it = c.begin(); it != c.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError("unknown verify.config key \"" + it.key() + "\"");
  }
  VerifyConfig cfg;
  cfg.tol_h = value_or<double>(c, "tol_h", 0.05 * s.grid.min_spacing() / 0.02);
  cfg.eta = value_or<double>(c, "eta", 0.0);
  cfg.sigma_max = value_or<double>(c, "sigma_max", 0.0);
  cfg.epi_sigma_max = value_or<double>(c, "epi_sigma_max", 0.0);
  cfg.c_max = value_or<double>(c, "c_max", 0.0);
  cfg.slack = value_or<double>(c, "slack", cfg.slack);
  cfg.angle_tol = value_or<double>(c, "angle_tol", 0.0);
  cfg.dim_tol = value_or<double>(c, "dim_tol", cfg.dim_tol);
  cfg.directions = value_or<int>(c, "directions", cfg.directions);
  cfg.epi_directions = value_or<int>(c, "epi_directions", cfg.epi_directions);
  cfg.magnitudes = value_or<int>(c, "magnitudes", cfg.magnitudes);
  cfg.refine = value_or<int>(c, "refine", cfg.refine);
  cfg.constancy_tol = value_or<double>(c, "constancy_tol", cfg.constancy_tol);
  cfg.arc_samples = value_or<int>(c, "arc_samples", cfg.arc_samples);
  if (cfg.directions < 8 || cfg.epi_directions < 8 || cfg.magnitudes < 1 || cfg.arc_samples < 1) {
    throw ConfigError("verify.config sample counts are too small");
  }
  return resolve_config(cfg, s.grid);
}

ValueField verification_field(const Scenario& s, const ValueField& solved) {
  if (value_or<std::string>(section(s.doc, "verify"), "field", "solved") == "reference") {
    return sample_field(*s.reference, s.grid);
  }
  return solved;
}

std::vector<Synthesis> select_arcs(const Scenario& s, const ValueField& field) {
  const json& sec = section(checks_of(s), "propagation");
  const int want = value_or<int>(sec, "arcs", 10);
  const int candidates = value_or<int>(sec, "candidates", 72);
  const double horizon = value_or<double>(sec, "horizon", 1.0);
  const double dt = value_or<double>(sec, "dt", 1e-3);
  const double cert_tol = value_or<double>(sec, "cert_tol", 0.0);
  if (want < 1 || candidates < 1 || !(horizon > 0.0) || !(dt > 0.0)) {
    throw ConfigError("propagation needs positive arcs, candidates, horizon and dt");
  }
  std::vector<Synthesis> certified;
  for (auto& syn : synthesize_family(s.dynamics, s.target, candidates, horizon, dt, &field, cert_tol)) {
    if (syn.certified) certified.push_back(std::move(syn));
  }
  if (static_cast<int>(certified.size()) <= want) return certified;
  std::vector<Synthesis> out;
  for (int i = 0; i < want; ++i) out.push_back(certified[static_cast<std::size_t>(i) * certified.size() / want]);
  return out;
}

std::vector<Vec> check_points(const Scenario& s, const ValueField& field, const std::string& check, int* excluded) {
  const json& pts = section(section(s.doc, "verify"), "points");
  const json& sec = section(checks_of(s), check.c_str());
  std::vector<Vec> out;
  int rejected = 0;
  const int count = value_or<int>(pts, "count", 0);
  if (count > 0 && value_or<bool>(sec, "sampled", true)) {
    const auto range = value_or<std::vector<double>>(pts, "t_range", {0.5, 1.5});
    if (range.size() != 2 || !(range[0] <= range[1])) throw ConfigError("points.t_range must be [lo, hi]");
    const Box box = pts.contains("box") ? box_from_json(pts.at("box")) : grid_box(s.grid);
    out = sample_points(field, box, range[0], range[1], count, value_or<double>(pts, "margin", 0.1), s.seed,
                        &rejected);
    if (static_cast<int>(out.size()) < count) {
      throw InsufficientSamplingError("found " + std::to_string(out.size()) + " of " + std::to_string(count) +
                                      " sample points");
    }
  }
  auto extra = vec_list(sec.contains("extra") ? sec.at("extra") : json());
  require_dim(extra, s.grid.dim(), "extra");
  out.insert(out.end(), extra.begin(), extra.end());
  if (excluded) *excluded = rejected;
  return out;
}

bool VerifyRun::pass() const {
  return std::all_of(reports.begin(), reports.end(), [](const VerificationReport& r) { return r.pass; });
}

VerifyRun run_verification(const Scenario& s, const ValueField& solved, int threads) {
  VerifyRun run;
  run.cfg = scenario_config(s);
  run.cfg.threads = std::max(1, threads);
  const VerifyConfig& cfg = run.cfg;
  const ValueField field = verification_field(s, solved);
  const json& checks = checks_of(s);

  json requested = json::array();
  for (const auto& name : kCheckNames) {
    if (checks.contains(name)) requested.push_back(name);
  }
  run.header = {{"kind", "config"},
                {"scenario", s.id},
                {"seed", s.seed},
                {"field", value_or<std::string>(section(s.doc, "verify"), "field", "solved")},
                {"grid", grid_to_json(s.grid)},
                {"residual", solved.residual},
                {"sweeps", solved.sweeps},
                {"config", config_to_json(cfg)},
                {"checks", requested}};

  auto& out = run.reports;
  json excluded = json::object();
  if (has_check(s, "pointwise")) {
    int ex = 0;
    auto pts = check_points(s, field, "pointwise", &ex);
    excluded["pointwise"] = ex;
    append(out, verify_pointwise(field, s.dynamics, s.target, pts, cfg, s.id));
  }
  if (has_check(s, "epigraph")) {
    int ex = 0;
    auto pts = check_points(s, field, "epigraph", &ex);
    excluded["epigraph"] = ex;
    const json& sec = section(checks, "epigraph");
    const std::size_t extras = sec.contains("extra") ? sec.at("extra").size() : 0;
    auto probes = epigraph_probes(sec, pts.size() - extras, pts.size());
    append(out, verify_epi_correspondence(field, s.dynamics, pts, probes, cfg, s.id));
  }
  if (has_check(s, "dimension")) {
    int ex = 0;
    auto pts = check_points(s, field, "dimension", &ex);
    excluded["dimension"] = ex;
    append(out, verify_dimension(field, s.dynamics, pts, cfg, s.id));
  }
  std::vector<Synthesis> arcs;
  if (has_check(s, "propagation") || has_check(s, "dual_bounds")) arcs = select_arcs(s, field);
  if (has_check(s, "propagation")) {
    const int want = value_or<int>(section(checks, "propagation"), "arcs", 10);
    const int found = static_cast<int>(arcs.size());
    out.push_back(single_report("propagation/coverage", s.id, "family", std::max(0, want - found), 0.0,
                                {{"requested", want}, {"certified", found}}));
    append(out, verify_propagation(field, s.dynamics, arcs, cfg, s.id));
  }
  if (has_check(s, "dual_bounds")) {
    const double k0 = value_or<double>(section(checks, "dual_bounds"), "k0", s.dynamics.constants.lipschitz);
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      const DualBoundReport d = check_dual_bounds(arcs[i].arc, k0);
      auto r = single_report("dual-bounds", s.id, "arc:" + std::to_string(i), d.worst_relative, d.tolerance,
                             {{"k0", k0},
                              {"worst_lower", d.worst_lower},
                              {"worst_upper", d.worst_upper},
                              {"worst_increment", d.worst_increment}});
      r.samples = static_cast<int>(arcs[i].arc.size());
      out.push_back(std::move(r));
    }
  }
  if (has_check(s, "regularity")) {
    const json& sec = section(checks, "regularity");
    RegularityRegion rg;
    rg.box = sec.contains("box") ? box_from_json(sec.at("box")) : grid_box(s.grid);
    rg.t_grid = value_or<std::vector<double>>(sec, "t_grid", {});
    rg.t_min = value_or<double>(sec, "t_min", rg.t_min);
    rg.t_max = sec.contains("t_max") ? value_or<double>(sec, "t_max", kInf) : kInf;
    rg.bases = value_or<int>(sec, "bases", rg.bases);
    rg.r_min = value_or<double>(sec, "r_min", rg.r_min);
    rg.sublevel_phi = value_or<bool>(sec, "sublevel_phi", true);
    rg.epigraph_c = value_or<bool>(sec, "epigraph_c", true);
    rg.convexity = value_or<bool>(sec, "convexity", true);
    const double dx = s.grid.min_spacing();
    const double grid_tol = rg.r_min > 0.0 ? 2.0 * dx / (rg.r_min * rg.r_min) : 2.0 * dx;
    rg.phi_tol = value_or<double>(sec, "phi_tol", grid_tol);
    rg.c_tol = value_or<double>(sec, "c_tol", grid_tol);
    rg.tau_min = value_or<double>(sec, "tau_min", rg.tau_min);
    rg.seed = s.seed;
    append(out, verify_regularity(field, s.dynamics, rg, cfg, s.id));
  }
  if (has_check(s, "class_l")) {
    const json& sec = section(checks, "class_l");
    const Box box = sec.contains("box") ? box_from_json(sec.at("box")) : grid_box(s.grid);
    const int pairs = value_or<int>(sec, "pairs", 50);
    const int lambda_grid = value_or<int>(sec, "lambda_grid", 5);
    const double c = certify_class_L(s.dynamics, box, pairs, lambda_grid, s.seed);
    out.push_back(single_report("class-l", s.id, "region", c, value_or<double>(sec, "max", 1e-9),
                                {{"pairs", pairs}, {"lambda_grid", lambda_grid}}));
  }
  run.header["points_excluded"] = excluded;
  return run;
}

json cone_dump(const Scenario& s, const ValueField& solved) {
  const VerifyConfig cfg = scenario_config(s);
  const ValueField field = verification_field(s, solved);
  json cones = json::array();
  if (!has_check(s, "pointwise")) return cones;
  for (const Vec& x : check_points(s, field, "pointwise")) {
    if (!(eval_T(field, x) < kInf)) continue;
    cones.push_back(cone_to_json(sublevel_normals(field, x, cfg.eta, cfg.directions, cfg.sigma_max, cfg.refine),
                                 cfg.dim_tol));
  }
  return cones;
}

}  // namespace mintime

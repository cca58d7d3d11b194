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


#ifndef MINTIME_SCENARIO_HPP_
#define MINTIME_SCENARIO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mintime/dynamics.hpp"
#include "mintime/hamflow.hpp"
#include "mintime/hjbsolve.hpp"
#include "mintime/nonsmooth.hpp"
#include "mintime/theorems.hpp"

namespace mintime {

/// A parsed scenario document. `doc` keeps the resolved JSON (after
/// overrides) so artifacts can quote it.
struct Scenario {
  std::string id;
  std::string description;
  nlohmann::json doc;
  Multifunction dynamics;
  TargetSet target;
  GridSpec grid;
  SolverParams solver;
  std::optional<Expr> reference;  // closed-form T, when known
  std::uint64_t seed = 1;
};

/// Validates and parses. Throws ConfigError for missing fields, bad
/// expressions, unknown check names, a step above the CFL bound, or a
/// missing seed.
Scenario scenario_from_json(const nlohmann::json& doc);

struct ScenarioEntry {
  std::string id;
  std::string description;
  std::string source;  // "built-in" or the file path
};

const std::vector<std::string>& builtin_ids();
nlohmann::json builtin_document(const std::string& id);

/// Built-ins followed by the *.json files of `registry_dir` (sorted by file
/// name). A file whose id matches a built-in replaces it in place. A missing
/// or empty directory lists the built-ins only.
std::vector<ScenarioEntry> list_scenarios(const std::string& registry_dir);

/// An existing file path, else a registry file id, else a built-in id.
nlohmann::json resolve_document(const std::string& name, const std::string& registry_dir);

/// Applies "a.b.c=value". The value is read as JSON when it parses, as a
/// string otherwise. A bare verification key such as "tol_h" is shorthand
/// for "verify.config.tol_h".
void apply_override(nlohmann::json& doc, const std::string& assignment);

Scenario load_scenario(const std::string& name, const std::string& registry_dir,
                       const std::vector<std::string>& overrides);

/// Verification settings of a scenario resolved against its grid. Unset
/// tol_h scales with the grid as 0.05 dx / 0.02.
VerifyConfig scenario_config(const Scenario& s);

/// Solved field, or the closed-form reference when verify.field says so.
ValueField verification_field(const Scenario& s, const ValueField& solved);

/// Certified arcs for propagation: the synthesis family filtered to
/// certified arcs, then `arcs` of them evenly spaced in family order.
std::vector<Synthesis> select_arcs(const Scenario& s, const ValueField& field);

/// Points for the point-based checks: seeded samples plus the explicit
/// extras of `check` ("pointwise", "epigraph" or "dimension").
std::vector<Vec> check_points(const Scenario& s, const ValueField& field, const std::string& check,
                              int* excluded = nullptr);

struct VerifyRun {
  VerifyConfig cfg;
  nlohmann::json header;
  std::vector<VerificationReport> reports;

  bool pass() const;
};

/// Runs every check listed under verify.checks, in a fixed order.
VerifyRun run_verification(const Scenario& s, const ValueField& solved, int threads = 1);

/// Sublevel cones at the pointwise check points, for inspection.
nlohmann::json cone_dump(const Scenario& s, const ValueField& solved);

}  // namespace mintime

#endif  // MINTIME_SCENARIO_HPP_

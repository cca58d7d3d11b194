// Copyright 2026 The mintime Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MINTIME_THEOREMS_HPP_
#define MINTIME_THEOREMS_HPP_

#include <string>
#include <vector>

#include "json.hpp"
#include "mintime/dynamics.hpp"
#include "mintime/hamflow.hpp"
#include "mintime/hjbsolve.hpp"
#include "mintime/nonsmooth.hpp"
#include "mintime/types.hpp"

namespace mintime {

/// Resolved verification settings. Every field is explicit; `resolve_config`
/// fills grid-dependent values once so reports can quote them verbatim.
struct VerifyConfig {
  double tol_h = 0.05;      // Hamiltonian tolerance
  double eta = 0.0;         // local radius
  double sigma_max = 0.0;   // proximal acceptance cap
  double epi_sigma_max = 0.0;  // epigraph acceptance cap
  double c_max = 0.0;       // subgradient acceptance cap
  double slack = 2.0;       // membership tests accept up to slack * cap
  double angle_tol = 0.0;   // cone comparison tolerance (radians)
  double dim_tol = 0.3;     // relative singular value cut for cone dimension
  int directions = 360;     // n-dimensional direction grid
  int epi_directions = 2562;
  int magnitudes = 40;
  int refine = kDefaultRefine;
  double constancy_tol = 1e-6;
  int arc_samples = 5;      // interior times per arc
  int threads = 1;
};

/// Fills the zero entries of `cfg` from the grid, with h = dx / refine:
/// eta = 3 dx, sigma_max = default_sigma_max(dx), epi_sigma_max = c_max =
/// tol_h / (2 h), angle_tol = 2 asin(sigma_max h) + grid angle.
/// Epigraph pairs accepted at sigma tilt by up to 2 sigma h, so the epigraph
/// cap keeps |h(x, zeta) - alpha| within tol_h.
VerifyConfig resolve_config(VerifyConfig cfg, const GridSpec& grid);

nlohmann::json config_to_json(const VerifyConfig& cfg);

struct VerificationReport {
  std::string check;
  std::string scenario;
  std::string subject;  // "point:3", "arc:0", "t:0.5", "region"
  int requested = 1;
  int tested = 0;
  int excluded = 0;
  int samples = 0;      // individual inclusions evaluated
  bool pass = true;
  double worst = 0.0;
  double tolerance = 0.0;
  nlohmann::json detail = nlohmann::json::object();

  /// Sets pass from worst <= tolerance.
  void judge() { pass = worst <= tolerance; }
};

nlohmann::json to_json(const VerificationReport& r);

/// The point-based checks take points as given (sample_points applies the
/// jump filter); points with T = +inf are reported as excluded.
///
/// Per point: level-set subgradient inclusions, sublevel normal sign,
/// horizontal subgradients, and the normal cone decomposition. Points on the
/// target (T = 0) get the target-normal versions instead.
std::vector<VerificationReport> verify_pointwise(const ValueField& field, const Multifunction& f,
                                                 const TargetSet& target, const std::vector<Vec>& points,
                                                 const VerifyConfig& cfg, const std::string& scenario);

/// Correspondence between sublevel normals and epigraph normals, both ways,
/// plus triviality equivalence. `probes[i]` (optional) adds extra candidate
/// sublevel normals at point i, e.g. a sampled subdifferential segment.
std::vector<VerificationReport> verify_epi_correspondence(const ValueField& field, const Multifunction& f,
                                                          const std::vector<Vec>& points,
                                                          const std::vector<std::vector<Vec>>& probes,
                                                          const VerifyConfig& cfg, const std::string& scenario);

/// Dimension of the sublevel normal cone equals that of the epigraph cone.
std::vector<VerificationReport> verify_dimension(const ValueField& field, const Multifunction& f,
                                                 const std::vector<Vec>& points, const VerifyConfig& cfg,
                                                 const std::string& scenario);

/// Normal-cone propagation along certified optimal arcs. Arcs that are not
/// certified are rejected (reported as excluded).
std::vector<VerificationReport> verify_propagation(const ValueField& field, const Multifunction& f,
                                                   const std::vector<Synthesis>& arcs, const VerifyConfig& cfg,
                                                   const std::string& scenario);

struct RegularityRegion {
  Box box;
  std::vector<double> t_grid;
  double t_min = 0.0;  // epigraph test window
  double t_max = kInf;
  int bases = 40;      // base points per test
  double r_min = 0.0;
  bool sublevel_phi = true;
  bool epigraph_c = true;
  bool convexity = true;
  double phi_tol = 0.0;
  double c_tol = 0.0;
  double tau_min = 0.0;  // convexity must hold on [0, tau_min]
  std::uint64_t seed = 1;
};

/// Sampled phi-convexity of sublevel sets, the epigraph constant C, and
/// sublevel convexity over the t-grid.
std::vector<VerificationReport> verify_regularity(const ValueField& field, const Multifunction& f,
                                                  const RegularityRegion& region, const VerifyConfig& cfg,
                                                  const std::string& scenario);

/// Points of the level set {T = t} on grid edges (linear crossing), in grid
/// order.
std::vector<Vec> level_crossings(const ValueField& field, double t);

/// Seeded uniform points in `box` with T in [t_lo, t_hi], off the jump filter
/// and at least `margin` inside the grid. `excluded` counts draws rejected by
/// the jump filter only.
std::vector<Vec> sample_points(const ValueField& field, const Box& box, double t_lo, double t_hi, int count,
                               double margin, std::uint64_t seed, int* excluded = nullptr);

}  // namespace mintime

#endif  // MINTIME_THEOREMS_HPP_

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


#ifndef MINTIME_NONSMOOTH_HPP_
#define MINTIME_NONSMOOTH_HPP_

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "mintime/dynamics.hpp"
#include "mintime/hjbsolve.hpp"
#include "mintime/types.hpp"

namespace mintime {

/// Sampled proximal normal cone of a point cloud at `base`. `sigma[k]` is the
/// smallest sigma >= 0 for which generators[k] passes
/// <u, y - x> <= sigma |y - x|^2 over the cloud points in B(x, eta).
struct ProximalCone {
  Vec base;
  std::vector<Vec> generators;
  std::vector<double> sigma;
  double eta = 0.0;

  bool empty() const { return generators.empty(); }
};

struct EpiPair {
  Vec zeta;
  double alpha = 0.0;
  double sigma = 0.0;
};

/// Unit pairs (zeta, alpha) normal to epi(T) at (x, T(x)).
struct EpiNormalSample {
  Vec base;
  double value = 0.0;
  std::vector<EpiPair> pairs;
  double eta = 0.0;

  bool empty() const { return pairs.empty(); }
};

/// Local clouds are interpolated samples of T on rings around the base point:
/// radii dx/refine, 2 dx/refine, ... below eta, each ring carrying the same
/// direction fan (360 angles in the plane, 642-node icosphere in space), so
/// every direction through x is sampled down to the innermost radius.
inline constexpr int kDefaultRefine = 4;

/// Default cap on accepted sigma for a grid of spacing dx.
inline double default_sigma_max(double dx) { return 0.5 / (2.0 * dx); }

/// Smallest sigma >= 0 with <u, y - x> <= sigma |y - x|^2 for all y in
/// `points` (points equal to x are ignored).
double proximal_sigma(const std::vector<Vec>& points, const Vec& x, const Vec& u);

/// Cloud points in the open ball B(x, eta), x itself excluded.
std::vector<Vec> local_points(const std::vector<Vec>& cloud, const Vec& x, double eta);

/// Throws InsufficientSamplingError when fewer than 8 cloud points lie in
/// B(x, eta).
ProximalCone proximal_normals(const std::vector<Vec>& cloud, const Vec& x, double eta, int directions,
                              double sigma_max);

/// Ring samples in B(x, eta) with T <= T(x), plus x itself.
std::vector<Vec> sublevel_cloud(const ValueField& field, const Vec& x, double eta, int refine = kDefaultRefine);

/// Proximal normals to R(T(x)) at x.
ProximalCone sublevel_normals(const ValueField& field, const Vec& x, double eta, int directions,
                              double sigma_max, int refine = kDefaultRefine);

/// Smallest sigma for the unit direction u against the sublevel cloud at x.
double sublevel_sigma(const ValueField& field, const Vec& x, double eta, const Vec& u, int refine = kDefaultRefine);

/// Angle between u and the closed convex cone generated by `family`
/// (pi when the family is empty and u != 0).
double angle_to_cone(const Vec& u, const std::vector<Vec>& family);

/// Epigraph offsets (y - x, beta - T(x)) with y on the local rings and beta
/// stepping by the ring spacing from T(y) up to T(y) + eta.
std::vector<Vec> epigraph_cloud(const ValueField& field, const Vec& x, double eta, int refine = kDefaultRefine);

/// Smallest sigma for the unit pair (zeta, alpha) against the epigraph cloud.
double epi_sigma(const ValueField& field, const Vec& x, double eta, const Vec& zeta, double alpha,
                 int refine = kDefaultRefine);

/// Proximal test in (n+1)-space. Horizontal pairs (u, 0) are always tried on
/// the n-dimensional direction grid in addition to the (n+1)-grid. Grid
/// directions within 4 sigma_max are refined on a local lattice with a
/// quarter of the grid spacing.
EpiNormalSample epi_normals(const ValueField& field, const Vec& x, double eta, int directions,
                            double sigma_max, int refine = kDefaultRefine);

/// Smallest c >= 0 with T(y) - T(x) - <zeta, y - x> >= -c |y - x|^2 over grid
/// nodes y in B(x, eta) with finite T.
double subgradient_defect(const ValueField& field, const Vec& x, double eta, const Vec& zeta,
                          int refine = kDefaultRefine);

/// Proximal subgradients. Candidates: a direction x magnitude grid up to
/// twice the local slope bound, plus zeta/|alpha| for the epigraph pairs of
/// `epi` with alpha < 0.
std::vector<Vec> prox_subdiff(const ValueField& field, const Vec& x, double eta, double c_max,
                              const EpiNormalSample* epi = nullptr, int directions = 360, int magnitudes = 40,
                              int refine = kDefaultRefine);

/// Unit vectors u with (u, 0) an epigraph proximal normal.
std::vector<Vec> horiz_subdiff(const ValueField& field, const Vec& x, double eta, double sigma_max,
                               int directions = 360, int refine = kDefaultRefine);

/// Rank of the generator matrix, singular values below rel_tol times the
/// largest dropped.
int cone_dimension(const std::vector<Vec>& generators, double rel_tol = 1e-6);
inline int cone_dimension(const ProximalCone& cone, double rel_tol = 1e-6) {
  return cone_dimension(cone.generators, rel_tol);
}
int cone_dimension(const EpiNormalSample& sample, double rel_tol = 1e-6);

/// Sufficient test that the generators lie strictly on one side of a
/// hyperplane. Rank and the positive-combination dimension can only disagree
/// for cones failing it (half-space-like cones), which reports flag.
bool cone_is_pointed(const std::vector<Vec>& generators);

/// max over (cone base x, generator v, cloud point y with |y - x| >= r_min)
/// of <v, y - x> / (|v| |y - x|^2), clamped at 0.
double phi_convexity_constant(const std::vector<Vec>& cloud, const std::vector<ProximalCone>& cones,
                              double r_min = 0.0);

struct EpiPhiOptions {
  double eta = 0.0;        // 0 selects 3 dx
  double sigma_max = 0.0;  // 0 selects default_sigma_max(dx)
  int directions = 2562;
  double r_min = 0.0;
  int refine = kDefaultRefine;
  double t_min = 0.0;  // only nodes with t_min <= T <= t_max take part
  double t_max = kInf;
  bool principal_only = false;  // keep only the smallest-sigma pair per base
  std::uint64_t seed = 1;
};

struct EpiPhiResult {
  double constant = 0.0;
  int tested = 0;
  int excluded = 0;
};

/// Sampled constant C of the epigraph phi-convexity inequality: base nodes
/// drawn from `region`, compared against every eligible node of the region.
/// Jump-suspect bases are excluded and counted.
EpiPhiResult epi_phi_convexity(const ValueField& field, const Box& region, int samples,
                               const EpiPhiOptions& opts = {});

/// Points whose interpolation stencil (or its one-ring) touches +inf or a
/// neighbour value ratio above 10 are excluded from subdifferential claims.
bool jump_suspect(const ValueField& field, const Vec& x);

nlohmann::json cone_to_json(const ProximalCone& cone, double rel_tol = 1e-6);

}  // namespace mintime

#endif  // MINTIME_NONSMOOTH_HPP_

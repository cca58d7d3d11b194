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

#ifndef MINTIME_HJBSOLVE_HPP_
#define MINTIME_HJBSOLVE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mintime/convexset.hpp"
#include "mintime/dynamics.hpp"
#include "mintime/expr.hpp"
#include "mintime/types.hpp"

namespace mintime {

/// Uniform node lattice on a box. `nodes[i]` counts grid nodes along axis i,
/// so the spacing is (upper - lower) / (nodes - 1).
struct GridSpec {
  Vec lower;
  Vec upper;
  std::vector<int> nodes;

  static GridSpec square(int n, double lo, double hi, int count);

  int dim() const { return static_cast<int>(nodes.size()); }
  double spacing(int axis) const { return (upper[axis] - lower[axis]) / (nodes[axis] - 1); }
  double min_spacing() const;
  std::size_t size() const;
  Vec node(std::size_t flat) const;
  std::vector<int> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::vector<int>& idx) const;
  bool inside(const Vec& x) const;
  /// Largest |x| over the box.
  double max_radius() const;
  void validate() const;
};

/// Closed target: a finite union of convex bodies.
struct TargetSet {
  std::vector<ConvexBody> bodies;
  double tolerance = 1e-9;

  explicit TargetSet(ConvexBody body, double tol = 1e-9) : bodies{std::move(body)}, tolerance(tol) {}
  explicit TargetSet(std::vector<ConvexBody> bs, double tol = 1e-9) : bodies(std::move(bs)), tolerance(tol) {}

  double distance(const Vec& x) const;
  bool contains(const Vec& x) const { return distance(x) <= tolerance; }
  /// Support point of the union (the body attaining the largest value).
  SupportResult support(const Vec& p) const;
};

struct SolverParams {
  double tau = 0.0;  // 0 selects the largest admissible step
  int vel_samples = 64;
  int max_sweeps = 5000;
  double tol = 1e-9;
};

/// Minimum time function on a grid, +inf where unreachable.
struct ValueField {
  GridSpec grid;
  std::vector<double> values;
  std::vector<char> target_mask;
  double residual = 0.0;
  int sweeps = 0;
  double tau = 0.0;
  // Closed-form reference fields evaluate this between nodes instead of
  // interpolating.
  std::optional<Expr> exact;

  double at(std::size_t flat) const { return values[flat]; }
  bool is_target(std::size_t flat) const { return target_mask[flat] != 0; }
};

/// Largest admissible semi-Lagrangian step: min spacing / (gamma (1 + max|x|)).
double cfl_bound(const Multifunction& f, const GridSpec& grid);

/// Fixed point of T(x) = min_v { tau + I[T](x + tau v) }, T = 0 on the target,
/// by alternating-direction Gauss-Seidel sweeps from T = +inf. Feet that leave
/// the box give +inf. Throws ConfigError for a step above the CFL bound and
/// SolverBudgetError when max_sweeps is exhausted.
ValueField solve_min_time(const Multifunction& f, const TargetSet& target, const GridSpec& grid,
                          const SolverParams& params = {});

/// Reference field T = max(0, expr): node values, target mask where
/// expr <= 0, and exact evaluation between nodes.
ValueField sample_field(const Expr& expr, const GridSpec& grid);

/// Multilinear interpolation (exact for reference fields); a +inf corner with positive weight gives +inf.
/// Throws DomainError outside the grid box.
double eval_T(const ValueField& field, const Vec& x);

struct CloudPoint {
  Vec x;
  double value = 0.0;
  bool boundary = false;
};

/// Grid nodes with T <= t; boundary when an axis neighbor is missing, above t
/// or +inf.
std::vector<CloudPoint> sublevel_points(const ValueField& field, double t);

/// Endpoints at time t of Euler-integrated extremal selections of -F issued
/// from target boundary samples.
std::vector<Vec> attainable_points(const Multifunction& f, const TargetSet& target, double t, int trajectories,
                                   double dt);

/// Robust Lipschitz estimate of T on {T <= t}: 95th percentile of finite
/// difference gradient norms over finite nodes.
double lipschitz_estimate(const ValueField& field, double t);

/// Midpoint test on pairs of boundary nodes of {T <= t}: each midpoint must
/// satisfy T <= t + 2 Lip dx. Reports the worst excess over t + slack.
RegularityCheck check_sublevel_convexity(const ValueField& field, double t, int pairs = 4000,
                                         std::uint64_t seed = 7);

}  // namespace mintime

#endif  // MINTIME_HJBSOLVE_HPP_

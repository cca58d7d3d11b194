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

#ifndef MINTIME_CONVEXSET_HPP_
#define MINTIME_CONVEXSET_HPP_

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mintime/types.hpp"

namespace mintime {

struct SupportResult {
  double value = 0.0;
  Vec point;
};

class ConvexBody;

struct Ball {
  Vec center;
  double radius = 0.0;
};

struct Polytope {
  std::vector<Vec> vertices;
};

// {c + y : y^T shape^+ y <= 1, y in range(shape)}; shape is the squared
// semi-axis matrix, so shape = r^2 I reproduces a ball of radius r.
struct Ellipsoid {
  Vec center;
  Mat shape;
};

struct Translate {
  std::shared_ptr<const ConvexBody> body;
  Vec offset;
};

struct ScaledSum {
  std::vector<std::pair<double, std::shared_ptr<const ConvexBody>>> terms;
};

/// A nonempty compact convex set known through its support function.
///
/// Values are immutable; copies share structure. Minkowski combinations are
/// built with `scaled_sum` and never expanded into vertices.
class ConvexBody {
 public:
  using Variant = std::variant<Ball, Polytope, Ellipsoid, Translate, ScaledSum>;

  static ConvexBody ball(Vec center, double radius);
  static ConvexBody point(Vec p) { return polytope({std::move(p)}); }
  static ConvexBody polytope(std::vector<Vec> vertices);
  static ConvexBody box(const Vec& lower, const Vec& upper);
  static ConvexBody ellipsoid(Vec center, Mat shape);
  static ConvexBody translate(const ConvexBody& body, Vec offset);
  static ConvexBody scaled_sum(const std::vector<std::pair<double, ConvexBody>>& terms);

  int dim() const { return dim_; }
  const Variant& shape() const { return shape_; }

  /// Maximizer of <., p>. Polytope ties go to the lowest vertex index; for
  /// p = 0 the value is 0 and the point is `representative()`.
  SupportResult support(const Vec& p) const;
  double support_value(const Vec& p) const { return support(p).value; }

  /// Ball or ellipsoid center, first vertex, or the combination thereof.
  Vec representative() const;

  nlohmann::json to_json() const;
  static ConvexBody from_json(const nlohmann::json& j);

 private:
  ConvexBody(Variant shape, int dim) : shape_(std::move(shape)), dim_(dim) {}

  Variant shape_;
  int dim_;
};

inline SupportResult support(const ConvexBody& body, const Vec& p) { return body.support(p); }

/// Image M·B of a body under a linear map (m-dim body, n×m matrix).
ConvexBody linear_image(const Mat& m, const ConvexBody& body);

/// max over sampled unit directions of |w(p,A) - w(p,B)|. Uses the nested
/// direction sequence so the result never decreases as `directions` grows.
double support_deviation(const ConvexBody& a, const ConvexBody& b, int directions);

/// max over sampled unit directions of |sigma_A(p) - sigma_B(p)|.
double hausdorff(const ConvexBody& a, const ConvexBody& b, int directions);

/// Euclidean projection. Closed form for balls, otherwise a support-driven
/// minimum-norm-point iteration (exact in finitely many steps on polytopes).
Vec project(const ConvexBody& body, const Vec& x);

inline double distance(const ConvexBody& body, const Vec& x) { return (project(body, x) - x).norm(); }

inline bool contains(const ConvexBody& body, const Vec& x, double tol = 1e-9) {
  return distance(body, x) <= tol;
}

struct RegularityCheck {
  bool pass = true;
  double worst_violation = 0.0;
};

/// Samples chords of the body and tests that each chord point carries a ball
/// of radius a·λ(1-λ)|x1-x0|^2 inside the body, by support dominance over a
/// fixed direction grid. Throws ConfigError for a <= 0 or pair_samples < 1.
RegularityCheck check_a_regular(const ConvexBody& body, double a, int pair_samples);

}  // namespace mintime

#endif  // MINTIME_CONVEXSET_HPP_

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

#include "mintime/convexset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mintime/sampling.hpp"

namespace mintime {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw ConfigError(std::string(what) + " must be finite");
}

// Minimum-norm point of conv(points), |points| <= 4, by enumerating faces.
// Returns the point and the indices of the face that carries it.
std::pair<Vec, std::vector<int>> min_norm_in_hull(const std::vector<Vec>& points) {
  const int m = static_cast<int>(points.size());
  Vec best;
  std::vector<int> best_face;
  double best_norm = kInf;
  for (int mask = 1; mask < (1 << m); ++mask) {
    std::vector<int> face;
    for (int i = 0; i < m; ++i) {
      if (mask & (1 << i)) face.push_back(i);
    }
    const Vec& s0 = points[face[0]];
    const int k = static_cast<int>(face.size()) - 1;
    Vec candidate = s0;
    Eigen::VectorXd weights = Eigen::VectorXd::Ones(1);
    if (k > 0) {
      Mat d(s0.size(), k);
      for (int j = 0; j < k; ++j) d.col(j) = points[face[j + 1]] - s0;
      Mat g = d.transpose() * d;
      Eigen::FullPivLU<Mat> lu(g);
      if (lu.rank() < k) continue;
      Vec lambda = lu.solve(-d.transpose() * s0);
      weights.resize(k + 1);
      weights[0] = 1.0 - lambda.sum();
      weights.tail(k) = lambda;
      if (weights.minCoeff() < -1e-12) continue;
      candidate = s0 + d * lambda;
    }
    double nrm = candidate.squaredNorm();
    if (nrm < best_norm - 1e-30 || (nrm <= best_norm && face.size() < best_face.size())) {
      best_norm = nrm;
      best = candidate;
      best_face = face;
    }
  }
  return {best, best_face};
}

}  // namespace

ConvexBody ConvexBody::ball(Vec center, double radius) {
  require_dimension(center.size());
  require_finite(center, "ball center");
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw ConfigError("ball radius must be finite and nonnegative");
  }
  int n = static_cast<int>(center.size());
  return ConvexBody(Ball{std::move(center), radius}, n);
}

ConvexBody ConvexBody::polytope(std::vector<Vec> vertices) {
  if (vertices.empty()) throw ConfigError("polytope needs at least one vertex");
  const auto n = vertices.front().size();
  require_dimension(n);
  for (const auto& v : vertices) {
    if (v.size() != n) throw ConfigError("polytope vertices differ in dimension");
    require_finite(v, "polytope vertex");
  }
  return ConvexBody(Polytope{std::move(vertices)}, static_cast<int>(n));
}

ConvexBody ConvexBody::box(const Vec& lower, const Vec& upper) {
  const int n = static_cast<int>(lower.size());
  require_dimension(n);
  if (upper.size() != n) throw ConfigError("box bounds differ in dimension");
  std::vector<Vec> vertices;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = (mask & (1 << i)) ? upper[i] : lower[i];
    vertices.push_back(v);
  }
  return polytope(std::move(vertices));
}

ConvexBody ConvexBody::ellipsoid(Vec center, Mat shape) {
  require_dimension(center.size());
  require_finite(center, "ellipsoid center");
  const auto n = center.size();
  if (shape.rows() != n || shape.cols() != n) throw ConfigError("ellipsoid shape must be n×n");
  if (!shape.allFinite()) throw ConfigError("ellipsoid shape must be finite");
  if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + shape.cwiseAbs().maxCoeff())) {
    throw ConfigError("ellipsoid shape must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(shape);
  if (eig.eigenvalues().minCoeff() < -1e-12 * (1.0 + eig.eigenvalues().cwiseAbs().maxCoeff())) {
    throw ConfigError("ellipsoid shape must be positive semidefinite");
  }
  return ConvexBody(Ellipsoid{std::move(center), std::move(shape)}, static_cast<int>(n));
}

ConvexBody ConvexBody::translate(const ConvexBody& body, Vec offset) {
  if (offset.size() != body.dim()) throw ConfigError("translation offset has wrong dimension");
  require_finite(offset, "translation offset");
  return ConvexBody(Translate{std::make_shared<const ConvexBody>(body), std::move(offset)}, body.dim());
}

ConvexBody ConvexBody::scaled_sum(const std::vector<std::pair<double, ConvexBody>>& terms) {
  if (terms.empty()) throw ConfigError("scaled sum needs at least one term");
  const int n = terms.front().second.dim();
  ScaledSum sum;
  for (const auto& [coef, body] : terms) {
    if (!(coef >= 0.0) || !std::isfinite(coef)) throw ConfigError("scaled sum coefficients must be >= 0");
    if (body.dim() != n) throw ConfigError("scaled sum terms differ in dimension");
    sum.terms.emplace_back(coef, std::make_shared<const ConvexBody>(body));
  }
  return ConvexBody(std::move(sum), n);
}

SupportResult ConvexBody::support(const Vec& p) const {
  if (p.size() != dim_) throw ConfigError("support direction has wrong dimension");
  return std::visit(
      Overloaded{
          [&](const Ball& b) {
            const double np = p.norm();
            if (np == 0.0) return SupportResult{0.0, b.center};
            return SupportResult{b.center.dot(p) + b.radius * np, b.center + (b.radius / np) * p};
          },
          [&](const Polytope& poly) {
            if (p.isZero(0.0)) return SupportResult{0.0, poly.vertices.front()};
            std::size_t best = 0;
            double best_value = poly.vertices[0].dot(p);
            for (std::size_t i = 1; i < poly.vertices.size(); ++i) {
              double v = poly.vertices[i].dot(p);
              if (v > best_value) {
                best_value = v;
                best = i;
              }
            }
            return SupportResult{best_value, poly.vertices[best]};
          },
          [&](const Ellipsoid& e) {
            if (p.isZero(0.0)) return SupportResult{0.0, e.center};
            Vec qp = e.shape * p;
            double spread = std::sqrt(std::max(0.0, p.dot(qp)));
            if (spread == 0.0) return SupportResult{e.center.dot(p), e.center};
            return SupportResult{e.center.dot(p) + spread, e.center + qp / spread};
          },
          [&](const Translate& t) {
            SupportResult inner = t.body->support(p);
            if (p.isZero(0.0)) return SupportResult{0.0, inner.point + t.offset};
            return SupportResult{inner.value + t.offset.dot(p), inner.point + t.offset};
          },
          [&](const ScaledSum& s) {
            SupportResult out{0.0, Vec::Zero(dim_)};
            for (const auto& [coef, body] : s.terms) {
              SupportResult part = body->support(p);
              out.value += coef * part.value;
              out.point += coef * part.point;
            }
            return out;
          }},
      shape_);
}

Vec ConvexBody::representative() const { return support(Vec::Zero(dim_)).point; }

ConvexBody linear_image(const Mat& m, const ConvexBody& body) {
  if (m.cols() != body.dim()) throw ConfigError("linear image: matrix columns must match body dimension");
  return std::visit(
      Overloaded{
          [&](const Ball& b) {
            return ConvexBody::ellipsoid(m * b.center, b.radius * b.radius * m * m.transpose());
          },
          [&](const Polytope& poly) {
            std::vector<Vec> verts;
            verts.reserve(poly.vertices.size());
            for (const auto& v : poly.vertices) verts.push_back(m * v);
            return ConvexBody::polytope(std::move(verts));
          },
          [&](const Ellipsoid& e) {
            Mat shape = m * e.shape * m.transpose();
            shape = 0.5 * (shape + shape.transpose());
            return ConvexBody::ellipsoid(m * e.center, shape);
          },
          [&](const Translate& t) { return ConvexBody::translate(linear_image(m, *t.body), m * t.offset); },
          [&](const ScaledSum& s) {
            std::vector<std::pair<double, ConvexBody>> terms;
            for (const auto& [coef, b] : s.terms) terms.emplace_back(coef, linear_image(m, *b));
            return ConvexBody::scaled_sum(terms);
          }},
      body.shape());
}

double support_deviation(const ConvexBody& a, const ConvexBody& b, int directions) {
  if (directions < 8) throw ConfigError("support_deviation needs at least 8 directions");
  if (a.dim() != b.dim()) throw ConfigError("bodies differ in dimension");
  double worst = 0.0;
  for (const auto& u : nested_directions(a.dim(), directions)) {
    worst = std::max(worst, (a.support(u).point - b.support(u).point).norm());
  }
  return worst;
}

double hausdorff(const ConvexBody& a, const ConvexBody& b, int directions) {
  if (directions < 8) throw ConfigError("hausdorff needs at least 8 directions");
  if (a.dim() != b.dim()) throw ConfigError("bodies differ in dimension");
  double worst = 0.0;
  for (const auto& u : nested_directions(a.dim(), directions)) {
    worst = std::max(worst, std::abs(a.support_value(u) - b.support_value(u)));
  }
  return worst;
}

Vec project(const ConvexBody& body, const Vec& x) {
  if (x.size() != body.dim()) throw ConfigError("projection point has wrong dimension");
  if (const auto* b = std::get_if<Ball>(&body.shape())) {
    Vec d = x - b->center;
    double r = d.norm();
    if (r <= b->radius) return x;
    return b->center + (b->radius / r) * d;
  }
  if (const auto* t = std::get_if<Translate>(&body.shape())) {
    return project(*t->body, x - t->offset) + t->offset;
  }
  if (const auto* poly = std::get_if<Polytope>(&body.shape()); poly && poly->vertices.size() == 1) {
    return poly->vertices.front();
  }

  // Minimum-norm point of body - x, driven by support queries.
  const double scale = 1.0 + x.norm() + (body.representative() - x).norm();
  std::vector<Vec> simplex{body.representative() - x};
  Vec v = simplex.front();
  for (int iter = 0; iter < 1000; ++iter) {
    if (v.norm() <= 1e-14 * scale) return x;
    Vec w = body.support(-v).point - x;
    // Frank-Wolfe gap: |v|^2 - <v,w> bounds |v|^2 - dist^2 from above.
    if (v.squaredNorm() - v.dot(w) <= 1e-15 * scale * scale) break;
    bool repeated = false;
    for (const auto& s : simplex) repeated = repeated || (s - w).norm() <= 1e-15 * scale;
    if (repeated) break;
    simplex.push_back(w);
    auto [next, face] = min_norm_in_hull(simplex);
    std::vector<Vec> kept;
    for (int i : face) kept.push_back(simplex[i]);
    simplex = std::move(kept);
    if (next.squaredNorm() >= v.squaredNorm()) break;
    v = next;
    if (static_cast<int>(simplex.size()) == body.dim() + 1) return x;
  }
  return x + v;
}

RegularityCheck check_a_regular(const ConvexBody& body, double a, int pair_samples) {
  if (!(a > 0.0)) throw ConfigError("a-regularity constant must be positive");
  if (pair_samples < 1) throw ConfigError("pair_samples must be >= 1");
  const int n = body.dim();

  // Extreme points of the body, deduplicated, in a fixed order.
  std::vector<Vec> points;
  for (const auto& u : nested_directions(n, n == 1 ? 2 : 64)) {
    Vec w = body.support(u).point;
    bool seen = false;
    for (const auto& q : points) seen = seen || (q - w).norm() <= 1e-12;
    if (!seen) points.push_back(w);
  }

  const auto grid = n == 1 ? uniform_directions(1, 2) : uniform_directions(n, n == 2 ? 360 : 642);
  std::vector<double> sigma;
  sigma.reserve(grid.size());
  for (const auto& u : grid) sigma.push_back(body.support_value(u));

  RegularityCheck out;
  std::vector<std::pair<int, int>> pairs;
  const int m = static_cast<int>(points.size());
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  }
  if (pairs.empty()) return out;  // a single extreme point: singleton body

  for (int s = 0; s < pair_samples; ++s) {
    const auto [i, j] = pairs[s % pairs.size()];
    const Vec& x0 = points[i];
    const Vec& x1 = points[j];
    const double d2 = (x1 - x0).squaredNorm();
    for (int k = 1; k <= 9; ++k) {
      const double lambda = k / 10.0;
      const Vec mid = lambda * x1 + (1.0 - lambda) * x0;
      const double radius = a * lambda * (1.0 - lambda) * d2;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const double excess = mid.dot(grid[g]) + radius - sigma[g];
        out.worst_violation = std::max(out.worst_violation, excess);
      }
    }
  }
  out.pass = out.worst_violation <= 1e-9;
  return out;
}

}  // namespace mintime

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


#include <cmath>

#include "doctest.h"
#include "mintime/nonsmooth.hpp"
#include "mintime/sampling.hpp"

using namespace mintime;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

constexpr double kDx = 0.02;
const double kEta = 3 * kDx;
const double kSigma = default_sigma_max(kDx);

const ValueField& distance_field() {
  static const ValueField f = sample_field(Expr::parse("sqrt(x1^2+x2^2)-0.25"), GridSpec::square(2, -2, 2, 201));
  return f;
}

const ValueField& max_norm_field() {
  static const ValueField f = sample_field(Expr::parse("max(abs(x1),abs(x2))"), GridSpec::square(2, -2, 2, 201));
  return f;
}

// Lattice points of [-r, r]^2 with spacing h and y2 <= 0.
std::vector<Vec> lower_half_plane(double r, double h) {
  std::vector<Vec> pts;
  const int m = static_cast<int>(std::lround(r / h));
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= 0; ++j) pts.push_back(v2(i * h, j * h));
  return pts;
}

double angle(const Vec& a, const Vec& b) { return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0)); }

std::size_t principal(const ProximalCone& c) {
  return static_cast<std::size_t>(std::min_element(c.sigma.begin(), c.sigma.end()) - c.sigma.begin());
}

}  // namespace

TEST_SUITE("nonsmooth") {
  TEST_CASE("proximal sigma") {
    const std::vector<Vec> pts = {v2(1, 0), v2(0, 1), v2(0, 0)};
    CHECK(proximal_sigma(pts, v2(0, 0), v2(1, 0)) == doctest::Approx(1.0));
    CHECK(proximal_sigma(pts, v2(0, 0), v2(-1, 0)) == 0.0);
    CHECK(local_points(pts, v2(0, 0), 1.5).size() == 2);
  }

  TEST_CASE("half-plane cloud has the outward normal") {
    const auto cloud = lower_half_plane(0.2, 0.005);
    const auto cone = proximal_normals(cloud, v2(0, 0), 0.1, 360, kSigma);
    REQUIRE_FALSE(cone.empty());
    const std::size_t k = principal(cone);
    CHECK(angle(cone.generators[k], v2(0, 1)) <= 2 * M_PI / 360 + 1e-12);
    CHECK(cone.sigma[k] <= 1e-12);
    // Tilted generators are admitted only through the sigma allowance.
    for (std::size_t i = 0; i < cone.generators.size(); ++i) {
      CHECK(cone.sigma[i] <= kSigma);
      CHECK(angle(cone.generators[i], v2(0, 1)) <= std::asin(std::min(1.0, kSigma * 0.005)) + 2 * M_PI / 360);
    }
    CHECK(cone_dimension(cone, 0.3) == 1);
  }

  TEST_CASE("interior points have empty cones") {
    const auto cloud = lower_half_plane(0.2, 0.005);
    CHECK(proximal_normals(cloud, v2(0, -0.1), 0.05, 360, kSigma).empty());
    CHECK(cone_dimension(proximal_normals(cloud, v2(0, -0.1), 0.05, 360, kSigma)) == 0);
    CHECK_THROWS_AS(proximal_normals({v2(0, 0), v2(1, 1)}, v2(0, 0), 0.1, 360, kSigma), InsufficientSamplingError);
  }

  TEST_CASE("generators are scale invariant") {
    const auto cloud = lower_half_plane(0.2, 0.005);
    const auto cone = proximal_normals(cloud, v2(0, 0), 0.1, 360, kSigma);
    for (std::size_t i = 0; i < cone.generators.size(); ++i) {
      for (double s : {0.1, 3.0, 1e3}) {
        const Vec u = s * cone.generators[i];
        CHECK(proximal_sigma(local_points(cloud, v2(0, 0), 0.1), v2(0, 0), u.normalized()) ==
              doctest::Approx(cone.sigma[i]));
      }
    }
  }

  TEST_CASE("max-norm sublevel corner gives a quarter-plane cone") {
    const ValueField& f = max_norm_field();
    const auto cone = sublevel_normals(f, v2(0.8, 0.8), kEta, 360, kSigma);
    REQUIRE_FALSE(cone.empty());
    for (const Vec& g : cone.generators) {
      CHECK(g[0] >= -std::sin(0.15));
      CHECK(g[1] >= -std::sin(0.15));
    }
    CHECK(angle_to_cone(v2(1, 0), cone.generators) <= 0.15);
    CHECK(angle_to_cone(v2(0, 1), cone.generators) <= 0.15);
    CHECK(angle_to_cone(v2(1, 1), cone.generators) <= 0.02);
    CHECK(cone_dimension(cone, 0.3) == 2);
    CHECK(cone_is_pointed(cone.generators));
  }

  TEST_CASE("smooth sublevel point gives one ray") {
    const auto cone = sublevel_normals(distance_field(), v2(0.9, 0.3), kEta, 360, kSigma);
    REQUIRE_FALSE(cone.empty());
    CHECK(angle(cone.generators[principal(cone)], v2(0.9, 0.3)) <= 0.02);
    CHECK(cone_dimension(cone, 0.3) == 1);
  }

  TEST_CASE("angle to cone") {
    CHECK(angle_to_cone(v2(1, 0), {}) == doctest::Approx(M_PI));
    CHECK(angle_to_cone(v2(1, 1), {v2(1, 0), v2(0, 1)}) <= 1e-9);
    CHECK(angle_to_cone(v2(1, 0), {v2(0, 1)}) == doctest::Approx(M_PI / 2).epsilon(1e-6));
    CHECK(angle_to_cone(v2(-1, -1), {v2(1, 0), v2(0, 1)}) >= M_PI / 2);
  }

  TEST_CASE("epigraph normals at a smooth point") {
    for (const Vec& x : {v2(1, 0), v2(0.6, -0.8)}) {
      const auto epi = epi_normals(distance_field(), x, kEta, 2562, 4.0);
      REQUIRE_FALSE(epi.empty());
      Vec target(3);
      target << x.normalized(), -1.0;
      target.normalize();
      double best = M_PI;
      for (const auto& p : epi.pairs) {
        Vec z(3);
        z << p.zeta, p.alpha;
        best = std::min(best, angle(z, target));
        CHECK(p.alpha < 0.0);
      }
      CHECK(best <= 0.05);
      CHECK(cone_dimension(epi, 0.3) == 1);
    }
  }

  TEST_CASE("epigraph normals on a max-norm face") {
    const auto epi = epi_normals(max_norm_field(), v2(1, 0.3), kEta, 2562, 4.0);
    REQUIRE_FALSE(epi.empty());
    Vec target(3);
    target << 1.0, 0.0, -1.0;
    double best = M_PI;
    for (const auto& p : epi.pairs) {
      Vec z(3);
      z << p.zeta, p.alpha;
      best = std::min(best, angle(z, target));
    }
    CHECK(best <= 0.05);
  }

  TEST_CASE("proximal subgradients") {
    const double c_max = 0.05 / (2 * kDx / kDefaultRefine);
    const auto smooth = prox_subdiff(distance_field(), v2(1, 0), kEta, c_max);
    REQUIRE_FALSE(smooth.empty());
    for (const Vec& z : smooth) CHECK((z - v2(1, 0)).norm() <= 0.1);

    // Corner of the max-norm: the subdifferential is the segment [(1,0),(0,1)].
    const auto corner = prox_subdiff(max_norm_field(), v2(0.8, 0.8), kEta, c_max);
    REQUIRE_FALSE(corner.empty());
    double lo = 1.0, hi = 0.0;
    for (const Vec& z : corner) {
      CHECK(std::abs(z.sum() - 1.0) <= 0.1);
      lo = std::min(lo, z[0]);
      hi = std::max(hi, z[0]);
    }
    CHECK(lo <= 0.1);
    CHECK(hi >= 0.9);
    for (int k = 0; k <= 10; ++k) {
      const Vec z = v2(k / 10.0, 1.0 - k / 10.0);
      CHECK(subgradient_defect(max_norm_field(), v2(0.8, 0.8), kEta, z) <= 1e-9);
    }
  }

  TEST_CASE("horizontal subgradients") {
    CHECK(horiz_subdiff(distance_field(), v2(1, 0), kEta, kSigma).empty());
    // Square-root growth to the right of a half-plane: T = sqrt(max(x1, 0)).
    const ValueField root = sample_field(Expr::parse("sqrt(max(x1,0))"), GridSpec::square(2, -1, 1, 101));
    const auto hz = horiz_subdiff(root, v2(0, 0.2), 3 * 0.02, default_sigma_max(0.02));
    REQUIRE_FALSE(hz.empty());
    double best = M_PI;
    for (const Vec& u : hz) best = std::min(best, angle(u, v2(1, 0)));
    CHECK(best <= 0.05);
    // The subdifferential there is the ray {(s, 0) : s >= 0}.
    const auto sub = prox_subdiff(root, v2(0, 0.2), 3 * 0.02, 0.05 / (2 * 0.02 / kDefaultRefine));
    REQUIRE_FALSE(sub.empty());
    for (const Vec& z : sub) CHECK(angle(z, v2(1, 0)) <= 2 * 2 * M_PI / 360 + 1e-12);
  }

  TEST_CASE("cone dimension") {
    CHECK(cone_dimension(std::vector<Vec>{}) == 0);
    CHECK(cone_dimension({v2(1, 0), v2(2, 0)}) == 1);
    CHECK(cone_dimension({v2(1, 0), v2(0, 1), v2(1, 1)}) == 2);
    CHECK(cone_is_pointed({v2(1, 0), v2(0, 1)}));
    CHECK_FALSE(cone_is_pointed({v2(1, 0), v2(-1, 0)}));
  }

  TEST_CASE("phi convexity constant") {
    // Convex cloud: a disc of lattice points.
    std::vector<Vec> disc;
    for (int i = -40; i <= 40; ++i)
      for (int j = -40; j <= 40; ++j)
        if (std::hypot(i, j) <= 40) disc.push_back(v2(i * 0.025, j * 0.025));
    std::vector<ProximalCone> cones;
    for (const Vec& b : {v2(1, 0), v2(0, -1), v2(-0.6, 0.8)}) {
      ProximalCone c;
      c.base = b;
      c.generators = {b};
      c.sigma = {0};
      cones.push_back(c);
    }
    CHECK(phi_convexity_constant(disc, cones) <= 1e-9);

    // Complement of a disc of radius r: the inward normal sees the chord
    // identity <v, y - x> = |y - x|^2 / (2r).
    const double r = 0.5;
    std::vector<Vec> circle;
    for (int k = 0; k < 720; ++k) circle.push_back(r * v2(std::cos(2 * M_PI * k / 720), std::sin(2 * M_PI * k / 720)));
    ProximalCone c;
    c.base = v2(r, 0);
    c.generators = {v2(-1, 0)};
    c.sigma = {0};
    CHECK(phi_convexity_constant(circle, {c}) == doctest::Approx(1.0 / (2 * r)).epsilon(1e-6));
  }

  TEST_CASE("epigraph phi constant of a convex function") {
    EpiPhiOptions opts;
    opts.t_min = 0.3;
    opts.t_max = 1.3;
    opts.r_min = 0.2;
    opts.principal_only = true;
    opts.sigma_max = 4.0;
    const Box region{v2(-1.6, -1.6), v2(1.6, 1.6)};
    const auto r = epi_phi_convexity(distance_field(), region, 20, opts);
    CHECK(r.tested > 0);
    CHECK(r.constant <= 2 * kDx / (0.2 * 0.2));
    const auto m = epi_phi_convexity(max_norm_field(), region, 20, opts);
    CHECK(m.constant <= 2 * kDx / (0.2 * 0.2));
  }

  TEST_CASE("jump filter") {
    CHECK_FALSE(jump_suspect(distance_field(), v2(1, 0.5)));
    const GridSpec g = GridSpec::square(2, -1, 1, 41);
    auto right = Multifunction::linear_drift(Mat::Zero(2, 2), ConvexBody::box(v2(0.5, -0.5), v2(1, 0.5)));
    const ValueField f = solve_min_time(right, TargetSet(ConvexBody::ball(v2(0, 0), 0.1)), g);
    // Left of the target values are finite, right of it they are +inf.
    CHECK(jump_suspect(f, v2(0.1, 0.0)));
  }

  TEST_CASE("cone json") {
    const auto cone = sublevel_normals(distance_field(), v2(0.9, 0.3), kEta, 360, kSigma);
    const auto j = cone_to_json(cone, 0.3);
    CHECK(j.at("dimension") == 1);
    CHECK(j.at("generators").size() == cone.generators.size());
    CHECK(j.at("point").size() == 2);
  }
}

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
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "mintime/hamflow.hpp"

using namespace mintime;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

Multifunction unit_isotropic() { return Multifunction::isotropic(2, Expr::constant(1.0)); }

Multifunction double_integrator() {
  return Multifunction::affine_control({Expr::parse("x2"), Expr::constant(0)},
                                       {{Expr::constant(0)}, {Expr::constant(1)}},
                                       ConvexBody::polytope({Vec::Constant(1, -1), Vec::Constant(1, 1)}));
}

Mat rotation() {
  Mat a(2, 2);
  a << 0, -1, 1, 0;
  return a;
}

// Truncated power series; independent of the integrator.
Mat expm_series(const Mat& m) {
  Mat term = Mat::Identity(m.rows(), m.cols());
  Mat sum = term;
  for (int k = 1; k < 60; ++k) {
    term = term * m / k;
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_SUITE("hamflow") {
  TEST_CASE("eikonal extremals are straight with constant costate") {
    const auto arc = integrate_mp(unit_isotropic(), v2(2, 0), v2(-1, 0), 1.0, 1e-3);
    REQUIRE(arc.size() > 2);
    for (std::size_t i = 0; i < arc.size(); ++i) {
      CHECK((arc.p[i] - v2(-1, 0)).norm() < 1e-12);
      CHECK((arc.x[i] - v2(2 - arc.t[i], 0)).norm() < 1e-12);
    }
    CHECK(arc.t.back() == doctest::Approx(1.0));
    CHECK(arc.switch_count() == 0);
  }

  TEST_CASE("linear drift costate is a matrix exponential") {
    Mat a(2, 2);
    a << 0, 1, -2, -0.3;
    auto f = Multifunction::linear_drift(a, ConvexBody::ball(v2(0, 0), 1));
    const Vec p0 = v2(0.3, -1.1);
    const auto arc = integrate_mp(f, v2(0.5, 0.5), p0, 1.0, 1e-3);
    for (std::size_t i = 0; i < arc.size(); i += 50) {
      CHECK((arc.p[i] - expm_series(-a.transpose() * arc.t[i]) * p0).norm() <= 1e-8);
    }
  }

  TEST_CASE("double integrator costate and single switch") {
    const Vec p0 = v2(1.0, 0.4);
    const auto arc = integrate_mp(double_integrator(), v2(0, 0), p0, 1.0, 1e-3);
    for (std::size_t i = 0; i < arc.size(); ++i) {
      CHECK(arc.p[i][0] == doctest::Approx(1.0));
      CHECK(arc.p[i][1] == doctest::Approx(0.4 - arc.t[i]).epsilon(1e-9));
    }
    CHECK(arc.switch_count() == 1);
    // Before the switch u = +1, after it u = -1: x2(1) = 0.4 - 0.6.
    CHECK(arc.x.back()[1] == doctest::Approx(-0.2).epsilon(1e-6));
  }

  TEST_CASE("backward integration reverses time") {
    const auto fwd = integrate_mp(unit_isotropic(), v2(0, 0), v2(0, 1), 0.5, 1e-2);
    const auto bwd = integrate_mp(unit_isotropic(), fwd.x.back(), fwd.p.back(), 0.5, 1e-2, FlowDirection::kBackward);
    CHECK(bwd.t[1] < 0.0);
    CHECK((bwd.x.back() - v2(0, 0)).norm() < 1e-12);
  }

  TEST_CASE("synthesis from the target") {
    const GridSpec g = GridSpec::square(2, -2, 2, 161);
    const double dx = g.spacing(0);
    {
      const TargetSet k(ConvexBody::ball(v2(0, 0), 0.25));
      const ValueField field = solve_min_time(unit_isotropic(), k, g);
      const auto s = synthesize_from_target(unit_isotropic(), k, v2(0.25, 0), v2(1, 0), 1.0, 1e-3, &field);
      CHECK(s.certified);
      CHECK(s.worst_residual <= 2 * dx);
      for (std::size_t i = 0; i < s.arc.size(); ++i) CHECK(std::abs(s.arc.x[i][1]) < 1e-12);
      CHECK((s.arc.x.back() - v2(0.25, 0)).norm() < 1e-9);
      CHECK((s.arc.p.back() + v2(1, 0)).norm() < 1e-12);
    }
    {
      const TargetSet k(ConvexBody::ball(v2(0, 0), 2 * dx));
      const ValueField field = solve_min_time(double_integrator(), k, g);
      int certified = 0;
      for (int d = 0; d < 24; ++d) {
        const double th = 2 * std::numbers::pi * d / 24;
        const Vec nu = v2(std::cos(th), std::sin(th));
        const auto s = synthesize_from_target(double_integrator(), k, 2 * dx * nu, nu, 1.2, 1e-3, &field);
        if (!s.certified) continue;
        ++certified;
        CHECK(s.arc.switch_count() == 1);
      }
      CHECK(certified >= 2);
      CHECK(certified % 2 == 0);  // the field is symmetric under x -> -x
    }
    {
      const TargetSet k(ConvexBody::ball(v2(0, 0), 0.3));
      auto rot = Multifunction::linear_drift(rotation(), ConvexBody::ball(v2(0, 0), 1));
      const ValueField field = solve_min_time(rot, k, g);
      const auto s = synthesize_from_target(rot, k, v2(0.3, 0), v2(1, 0), 1.0, 1e-3, &field);
      CHECK(s.certified);
      CHECK(s.worst_residual <= 3 * dx);
    }
  }

  TEST_CASE("synthesis family") {
    const TargetSet k(ConvexBody::ball(v2(0, 0), 0.25));
    const auto fam = synthesize_family(unit_isotropic(), k, 12, 0.5, 1e-2);
    CHECK(fam.size() == 12);
    for (const auto& s : fam) CHECK(std::abs(s.arc.x.back().norm() - 0.25) < 1e-9);
  }

  TEST_CASE("dual bounds") {
    const auto eik = integrate_mp(unit_isotropic(), v2(2, 0), v2(-1, 0), 1.0, 1e-3);
    const auto r0 = check_dual_bounds(eik, 0.0);
    CHECK(r0.pass);
    CHECK(r0.worst_relative <= 1e-12);

    auto lin = Multifunction::linear_drift(rotation() * 1.5, ConvexBody::ball(v2(0, 0), 1));
    const auto arc = integrate_mp(lin, v2(0.2, 0.1), v2(0.4, -1), 1.0, 1e-3);
    const double k0 = 1.5;
    CHECK(check_dual_bounds(arc, k0).pass);
    // A rotation keeps |p| constant, so only the increment bound can bind.
    CHECK_FALSE(check_dual_bounds(arc, k0 / 2).pass);

    Mat a(2, 2);
    a << 0.5, 1, 0, -0.8;
    auto grow = Multifunction::linear_drift(a, ConvexBody::ball(v2(0, 0), 1));
    // Start on the direction Aᵀ stretches most so the halved bound is violated at once.
    const Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU);
    const auto g = integrate_mp(grow, v2(0, 0), svd.matrixU().col(0), 1.0, 1e-3);
    CHECK(check_dual_bounds(g, a.operatorNorm()).pass);
    CHECK_FALSE(check_dual_bounds(g, a.operatorNorm() / 2).pass);
    CHECK_THROWS_AS(check_dual_bounds(g, -1.0), ConfigError);
  }

  TEST_CASE("hamiltonian constancy") {
    const auto eik = integrate_mp(unit_isotropic(), v2(1, 1), v2(0.6, 0.8), 1.0, 1e-3);
    CHECK(hamiltonian_constancy(eik, unit_isotropic()) <= 1e-12);
    const auto di = integrate_mp(double_integrator(), v2(0.5, -0.2), v2(0.7, 0.3), 1.0, 1e-3);
    CHECK(hamiltonian_constancy(di, double_integrator()) <= 1e-3);
    auto rot = Multifunction::linear_drift(rotation(), ConvexBody::ball(v2(0, 0), 1));
    const auto r = integrate_mp(rot, v2(0.5, 0), v2(1, 0.2), 1.0, 1e-3);
    CHECK(hamiltonian_constancy(r, rot) <= 1e-6);
    CHECK(extremal_identity_defect(r, rot) <= 1e-9);
  }

  TEST_CASE("degenerate costates") {
    CHECK_THROWS_AS(integrate_mp(unit_isotropic(), v2(0, 0), v2(0, 0), 1.0, 1e-2), DegenerateCostateError);
  }

  TEST_CASE("arc csv") {
    const auto arc = integrate_mp(unit_isotropic(), v2(0, 0), v2(1, 0), 0.02, 1e-3);
    std::ostringstream os;
    write_arc_csv(os, arc);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,x1,x2,p1,p2,switch");
    int rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    CHECK(rows == static_cast<int>(arc.size()));
  }
}

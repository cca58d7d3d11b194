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
#include "mintime/dynamics.hpp"
#include "mintime/expr.hpp"
#include "mintime/sampling.hpp"

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

Box box2(double r) { return Box{Vec::Constant(2, -r), Vec::Constant(2, r)}; }

// Exact class-L constant of x -> B(0, 1 + |x|^2): the radius gap at a convex
// combination is lambda (1 - lambda) |x - y|^2, so the ratio is 1 on every
// pair and lambda. Evaluated on a fine (x, y, lambda) grid.
double quadratic_radius_oracle(double half_width) {
  auto r = [](const Vec& x) { return 1.0 + std::min(x.squaredNorm(), 1.0); };
  double worst = 0.0;
  const int m = 9;
  for (int i = 0; i < m * m; ++i) {
    for (int j = 0; j < m * m; ++j) {
      const Vec x = v2(-half_width + 2 * half_width * (i % m) / (m - 1), -half_width + 2 * half_width * (i / m) / (m - 1));
      const Vec y = v2(-half_width + 2 * half_width * (j % m) / (m - 1), -half_width + 2 * half_width * (j / m) / (m - 1));
      const double d2 = (x - y).squaredNorm();
      if (d2 < 1e-12) continue;
      for (int k = 1; k < 20; ++k) {
        const double lam = k / 20.0;
        const double gap = std::abs(r(lam * x + (1 - lam) * y) - (lam * r(x) + (1 - lam) * r(y)));
        worst = std::max(worst, gap / (lam * (1 - lam) * d2));
      }
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("expr") {
  TEST_CASE("evaluation") {
    const Vec x = (Vec(3) << 1.5, -2.0, 0.5).finished();
    CHECK(Expr::parse("1 + 2*3").eval(x) == doctest::Approx(7));
    CHECK(Expr::parse("x1^2 + x2").eval(x) == doctest::Approx(0.25));
    CHECK(Expr::parse("-x2^2").eval(x) == doctest::Approx(-4));
    CHECK(Expr::parse("max(abs(x1), abs(x2))").eval(x) == doctest::Approx(2));
    CHECK(Expr::parse("min(x1, x3) / 2").eval(x) == doctest::Approx(0.25));
    CHECK(Expr::parse("sqrt(pow(x1, 2) + x2*x2)").eval(x) == doctest::Approx(2.5));
    CHECK(Expr::parse("2^3^2").eval(x) == doctest::Approx(512));
    CHECK(Expr::constant(0.1).eval(x) == 0.1);
  }

  TEST_CASE("text round trip") {
    for (const char* src : {"1+min(x1^2+x2^2,1)", "x2", "-x1+0.2*x1^2"}) {
      const Expr e = Expr::parse(src);
      CHECK(Expr::parse(e.text()).eval(v2(0.3, -0.7)) == e.eval(v2(0.3, -0.7)));
    }
    CHECK(Expr::parse(Expr::constant(0.1).text()).eval(v2(0, 0)) == 0.1);
  }

  TEST_CASE("parse errors") {
    for (const char* bad : {"", "1 +", "x4", "foo(1)", "(1", "1 2", "max(1)"}) {
      CHECK_THROWS_AS(Expr::parse(bad), ConfigError);
    }
  }
}

TEST_SUITE("dynamics") {
  TEST_CASE("min hamiltonian") {
    auto r = min_hamiltonian(unit_isotropic(), v2(0, 0), v2(3, 4));
    CHECK(r.value == doctest::Approx(-5));
    CHECK((r.extremal_point - v2(-0.6, -0.8)).norm() < 1e-12);
    CHECK(min_hamiltonian(double_integrator(), v2(1, 2), v2(0, 0)).value == 0.0);
    auto sq = Multifunction::linear_drift(Mat::Zero(2, 2), ConvexBody::box(v2(-1, -1), v2(1, 1)));
    auto s = min_hamiltonian(sq, v2(0.5, 0.5), v2(1, 1));
    CHECK(s.value == doctest::Approx(-2));
    CHECK((s.extremal_point - v2(-1, -1)).norm() < 1e-12);
  }

  TEST_CASE("max hamiltonian") {
    auto r = max_hamiltonian(unit_isotropic(), v2(0, 0), v2(3, 4));
    CHECK(r.value == doctest::Approx(5));
    CHECK((r.extremal_point - v2(0.6, 0.8)).norm() < 1e-12);
    auto d = max_hamiltonian(double_integrator(), v2(1, 2), v2(1, 1));
    CHECK(d.value == doctest::Approx(3));
    CHECK((d.extremal_point - v2(2, 1)).norm() < 1e-12);
    auto rot = Multifunction::linear_drift(rotation(), ConvexBody::ball(v2(0, 0), 1));
    CHECK(max_hamiltonian(rot, v2(1, 0), v2(0, 1)).value == doctest::Approx(2));
  }

  TEST_CASE("h(x, z) = -H(x, -z) on random data") {
    Sampler rng(2);
    auto f = double_integrator();
    for (int k = 0; k < 100; ++k) {
      const Vec x = rng.in_box(v2(-2, -2), v2(2, 2));
      const Vec z = rng.in_box(v2(-2, -2), v2(2, 2));
      CHECK(min_hamiltonian(f, x, z).value == doctest::Approx(-max_hamiltonian(f, x, -z).value));
      CHECK(max_hamiltonian(f, x, 2.5 * z).value == doctest::Approx(2.5 * max_hamiltonian(f, x, z).value));
    }
  }

  TEST_CASE("gradient of H in x") {
    CHECK(grad_x_H(unit_isotropic(), v2(0.3, 0.1), v2(1, 1)).norm() < 1e-9);
    Mat a(2, 2);
    a << 0, 1, 0, 0;
    auto lin = Multifunction::linear_drift(a, ConvexBody::ball(v2(0, 0), 1));
    CHECK((grad_x_H(lin, v2(0.7, -1.2), v2(1, 1)) - v2(0, 1)).norm() < 1e-8);
    CHECK((grad_x_H(double_integrator(), v2(0.4, 0.4), v2(1, 1)) - v2(0, 1)).norm() < 1e-8);
    Sampler rng(4);
    auto rot = Multifunction::linear_drift(rotation(), ConvexBody::ball(v2(0, 0), 1));
    for (int k = 0; k < 20; ++k) {
      const Vec p = rng.unit_vector(2);
      CHECK((grad_x_H(rot, rng.in_box(v2(-1, -1), v2(1, 1)), p) - rotation().transpose() * p).norm() < 1e-8);
    }
    CHECK_THROWS_AS(grad_x_H(unit_isotropic(), v2(0, 0), v2(0, 0)), DegenerateCostateError);
  }

  TEST_CASE("lipschitz certificate") {
    CHECK(certify_lipschitz(unit_isotropic(), box2(2), 50) == doctest::Approx(0).epsilon(1e-12));
    Mat a(2, 2);
    a << 1, 2, -0.5, 0.3;
    const double oracle = std::sqrt(Eigen::SelfAdjointEigenSolver<Mat>(a.transpose() * a).eigenvalues().maxCoeff());
    const double est = certify_lipschitz(Multifunction::linear_drift(a, ConvexBody::ball(v2(0, 0), 1)), box2(2), 400);
    CHECK(est <= oracle * (1 + 1e-9));
    CHECK(est >= 0.95 * oracle);
    auto aff = Multifunction::affine_control({Expr::parse("x2"),
                                              Expr::parse("-x1")},
                                             {{Expr::constant(1)}, {Expr::constant(0)}},
                                             ConvexBody::polytope({Vec::Constant(1, -1), Vec::Constant(1, 1)}));
    CHECK(certify_lipschitz(aff, box2(2), 200) == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("growth certificate") {
    CHECK(certify_growth(unit_isotropic(), box2(2), 50) == doctest::Approx(1.0).epsilon(1e-3));
    Mat a = 2.0 * rotation();
    const double corner = 2.0 * std::sqrt(2.0);  // |Ax+u| peaks at the box corners
    CHECK(certify_growth(Multifunction::linear_drift(a, ConvexBody::ball(v2(0, 0), 1)), box2(2), 200) ==
          doctest::Approx((2.0 * corner + 1.0) / (1.0 + corner)).epsilon(1e-3));
    auto zero = Multifunction::linear_drift(Mat::Zero(2, 2), ConvexBody::point(v2(0, 0)));
    CHECK(certify_growth(zero, box2(1), 20) == 0.0);
  }

  TEST_CASE("class L certificate") {
    auto lin = Multifunction::linear_drift(rotation(), ConvexBody::ball(v2(0, 0), 1));
    CHECK(certify_class_L(lin, box2(1.5), 50, 5) <= 1e-9);
    CHECK(certify_class_L(unit_isotropic(), box2(1.5), 50, 5) <= 1e-9);
    auto quad = Multifunction::isotropic(2, Expr::parse("1+min(x1^2+x2^2,1)"));
    const double oracle = quadratic_radius_oracle(0.7);
    CHECK(oracle == doctest::Approx(1.0).epsilon(1e-9));
    const double est = certify_class_L(quad, box2(0.7), 50, 5);
    CHECK(est > 0.0);
    CHECK(std::abs(est - oracle) <= 0.1 * oracle);
  }

  TEST_CASE("H semiconvexity certificate") {
    CHECK(certify_H_semiconvexity(unit_isotropic(), v2(0.6, 0.8), box2(1), 50) <= 1e-12);
    auto lin = Multifunction::linear_drift(rotation(), ConvexBody::ball(v2(0, 0), 1));
    CHECK(certify_H_semiconvexity(lin, v2(1, 0), box2(1), 50) <= 1e-9);
    // H(x, p) = r(x) |p| with r concave along x1 gives a positive constant.
    auto conc = Multifunction::isotropic(2, Expr::parse("2-x1^2"));
    CHECK(certify_H_semiconvexity(conc, v2(1, 0), box2(1), 50) == doctest::Approx(2.0).epsilon(0.05));
    CHECK_THROWS_AS(certify_H_semiconvexity(lin, v2(2, 0), box2(1), 50), ConfigError);
  }

  TEST_CASE("support lipschitz certificate") {
    CHECK(certify_support_lipschitz(unit_isotropic(), box2(1), 20, 64) == 0.0);
    auto lin = Multifunction::linear_drift(rotation(), ConvexBody::ball(v2(0, 0), 1));
    CHECK(certify_support_lipschitz(lin, box2(1), 50, 64) == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("evaluation errors") {
    auto neg = Multifunction::isotropic(2, Expr::parse("x1"));
    CHECK_THROWS_AS(neg.eval(v2(-1, 0)), DomainError);
    CHECK_THROWS_AS(unit_isotropic().eval(Vec::Zero(3)), DomainError);
    CHECK_THROWS_AS(Multifunction::linear_drift(Mat::Zero(2, 3), ConvexBody::ball(v2(0, 0), 1)), ConfigError);
    CHECK_THROWS_AS(certify_lipschitz(unit_isotropic(), Box{Vec::Zero(3), Vec::Ones(3)}, 5), ConfigError);
  }
}
